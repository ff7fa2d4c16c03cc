"""Energy-series CSV: byte-deterministic, lossless round trip.

Numbers are rendered as the shortest decimal string that parses back to the
same float (repr, with a trailing ".0" stripped), so parse -> re-serialize
reproduces the file byte for byte.
"""

from __future__ import annotations

from .energy import EnergyRecord

ENERGY_HEADER = "step,time,inertial,potential_spring,potential_area,total"


def format_value(x: float) -> str:
    s = repr(float(x))
    if s.endswith(".0"):
        return s[:-2]
    return s


def energy_rows(records) -> str:
    lines = [ENERGY_HEADER]
    for r in records:
        lines.append(
            f"{r.step},{format_value(r.time)},{format_value(r.inertial)},"
            f"{format_value(r.potential_spring)},{format_value(r.potential_area)},"
            f"{format_value(r.total)}"
        )
    return "\n".join(lines) + "\n"


def write_energy_csv(records, destination) -> None:
    """One row per record in step order; header only for an empty series."""
    with open(destination, "w", encoding="utf-8", newline="") as fh:
        fh.write(energy_rows(records))


def read_energy_csv(path) -> list[EnergyRecord]:
    with open(path, "r", encoding="utf-8", newline="") as fh:
        text = fh.read()
    lines = text.split("\n")
    if not lines or lines[0] != ENERGY_HEADER:
        raise ValueError(f"{path}: bad energy CSV header")
    records = []
    for ln, line in enumerate(lines[1:], start=2):
        if line == "":
            continue
        parts = line.split(",")
        if len(parts) != 6:
            raise ValueError(f"{path}:{ln}: expected 6 fields, got {len(parts)}")
        records.append(
            EnergyRecord(
                step=int(parts[0]),
                time=float(parts[1]),
                inertial=float(parts[2]),
                potential_spring=float(parts[3]),
                potential_area=float(parts[4]),
                total=float(parts[5]),
            )
        )
    return records


def write_comparison_csv(angle_labels, total_series, destination) -> None:
    """Side-by-side total-energy columns for a set of insertion angles.

    Header is `step,total_angle_<label>,...` with labels exactly as supplied.
    """
    if len(angle_labels) != len(total_series) or not angle_labels:
        raise ValueError("need one total-energy series per angle label")
    steps = len(total_series[0])
    if any(len(s) != steps for s in total_series):
        raise ValueError("angle runs disagree on step count")
    lines = ["step," + ",".join(f"total_angle_{a}" for a in angle_labels)]
    for s in range(steps):
        lines.append(f"{s}," + ",".join(format_value(series[s]) for series in total_series))
    with open(destination, "w", encoding="utf-8", newline="") as fh:
        fh.write("\n".join(lines) + "\n")
