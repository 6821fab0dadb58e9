"""Critical-point Kerr nonlinearity sensing with single- and two-photon drives."""
__version__ = "0.1.0"

from .errors import (
    ConfigError,
    DegenerateNullSpace,
    DivergentSteadyState,
    KerrSenseError,
    NonConvergence,
    OracleError,
    ParameterError,
    PreconditionError,
    RegimeTooHot,
    SensitivityError,
    SolverFailure,
)
from .params import REFERENCE_GAMMA_HZ, CavityParams, UnitConvention, critical_strength, denormalize, normalize
from .meanfield import (
    BranchSet,
    SteadyStateBranch,
    effective_params,
    steady_state_closed_form,
    steady_state_time_march,
)
from .stability import EigenSpectrum, classify, eigen_fluctuation, eigen_meanfield, spectrum


from .flags import RowFlag, flags_text
from .fluctuations import NoiseState, SnrReport, fig4_curves, noise_dynamics_rhs, noise_steady_state, snr
from .sensing import SensitivityReport, fig3_surface, n_analytic_cp, sensitivity_analytic_cp, sensitivity_numeric
from .fock import DiscrepancyReport, FockConfig, OracleResult, compare_with_meanfield, lindblad_steady_state
from .sweep import Axis, SweepSpec, run_sweep
