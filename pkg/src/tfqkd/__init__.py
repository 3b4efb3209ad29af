"""Finite-key secret key rates for decoy-state twin-field QKD."""
from .channel import Observables, ZeroSignalError, simulate_observables
from .concentration import (BoundModel, ConditionsNotMet, DeltaSolveError, ExpectationInterval,
                            azuma_interval, delta_approx, gamma_sampling, hoeffding_interval,
                            improved_chernoff_interval, mult_chernoff_interval, solve_delta_exact)
from .config import ConfigError, ProtocolConfig, load_config
from .decoy import TBounds, YieldBounds, estimate_yields, t_bounds
from .fluctuation import IntensityCandidate, intensity_grid, worst_case_rate
from .kernels import BACKEND, bessel_i0
from .keyrate import (KeyRateResult, SecurityBudget, binary_entropy, epsilon_budget,
                      evaluate_point, key_length, optimize_point, plob_bound)
from .phase_error import KCoefficients, eph_upper, ex_upper, k_coefficients

__version__ = "0.1.0"
