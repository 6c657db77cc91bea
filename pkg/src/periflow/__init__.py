"""periflow: mixed finite elements for steady channel flow with periodic
sections driven by a prescribed pressure loss."""

from .analysis import (
    ConvergenceTable,
    TraceProfile,
    derivative_periodicity,
    identity_refinement_study,
    manufactured_solution_study,
    norms_and_flux,
    poiseuille_exact,
    pressure_jump,
    strong_residual,
    trace_profiles,
)
from .assembly import (
    SparseSystem,
    assemble_body_force,
    assemble_convection_skew,
    assemble_divergence,
    assemble_pressure_loss_rhs,
    assemble_pressure_mean,
    assemble_system,
    assemble_vector_laplacian,
    trilinear_form,
)
from .constraints import ConstraintSet, apply_constraints, build_constraints, expand_solution
from .dofmap import DofMap, build_dofmap
from .geometry import ChannelGeometry, GeometryError
from .manufactured import ManufacturedSolution, default_manufactured
from .meshing import BoundaryTag, Mesh, build_channel_mesh, mesh_quality_report
from .solvers import (
    FieldSolution,
    NonlinearSolveError,
    SaddleSolveError,
    SolveOptions,
    solve_linear_saddle,
    solve_navier_stokes,
    solve_stokes,
)

__version__ = "0.1.0"
