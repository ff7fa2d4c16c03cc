"""tissuesim: deterministic 2D soft-tissue simulation.

Pipeline: tissue shape (mask image or polygon) -> triangle mesh with distance
and area constraints -> position-based dynamics with a scripted circular tool
-> per-step implicit-Euler energy tracking.
"""

from .constraints import (
    AreaConstraint,
    ConstraintSet,
    DistanceConstraint,
    eval_area,
    eval_distance,
    project_area,
    project_distance,
)
from .dynamics import (
    BoundaryConditions,
    ParticleSystem,
    SimParams,
    StepReport,
    apply_boundary,
    integrate,
    predict,
    solve,
    step,
)
from .energy import (
    EnergyRecord,
    grad_potential,
    implicit_euler_energy,
    inertial_energy,
    potential_energy,
)
from .interaction import (
    CollisionEvent,
    ToolState,
    Trajectory,
    apply_tool,
    detect_collisions,
    displacement_field,
    tool_at,
)
from .meshgen import (
    Mesh,
    Polygon,
    build_constraints,
    cull_outside,
    delaunay,
    load_mesh,
    load_polygon,
    sample_points,
    save_mesh,
    trace_boundary,
)
from .pgm import BinaryMask, PgmParseError, load_mask, load_mask_file
from .runner import Frame, RunOutput, build_mesh, run, write_outputs
from .scenario import (
    InsertionSpec,
    MeshSource,
    Scenario,
    ScenarioError,
    insertion_to_trajectory,
    load_scenario,
    parse_scenario,
)

__version__ = "0.1.0"
