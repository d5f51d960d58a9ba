"""Parametric resonance of Runge-Kutta-Nystrom integrators under periodic step-size variation."""

__version__ = "0.1.0"

from .errors import (  # noqa: E402
    CatalogError,
    NoUnitModulusAngle,
    NoWedgeError,
    RknError,
    SingularMatrixError,
    UnsupportedMethodError,
)
from .tableau import RknTableau, RkTableau, builtin_rk, builtin_rkn, newmark, verify_rk_equivalence  # noqa: E402
from .transition import (  # noqa: E402
    StepPattern,
    composed_transition,
    step_sequence,
    transition_derivative,
    transition_matrix,
)
from .stability import ChartResult, ChartSpec, constant_step_limit, growth_factor, schur_cohn_stable, stability_chart  # noqa: E402
from .resonance import (  # noqa: E402
    Branch,
    CriticalPoint,
    critical_point,
    critical_step_size,
    omega,
    r0_matrix,
    r1_matrix,
    small_step_asymptote,
    wedge_boundary_numeric,
    wedge_halfwidth,
)
from .contractivity import (  # noqa: E402
    LinearSystem,
    a_stable_check,
    contractivity_trace,
    is_hurwitz,
    lyapunov_solve,
    rk_step_linear,
    stability_function,
    w_norm,
)
from .simulate import Trajectory, integrate, measured_growth  # noqa: E402
