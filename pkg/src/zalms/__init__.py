"""Zero-point attraction LMS filters for sparse and near-sparse system identification."""

from .errors import (ConfigError, ConvergenceError, DomainError, NumericOverflowError,
                     TheoryOutOfRangeError)
from .filters import (DwzaLms, DwzaNlms, DzaLms, FilterState, Lms, Nlms, StepOutput, WzaLms,
                      ZaLms, ZaNlms, init_state, partial_sign, run, step)
from .metrics import LearningCurve, average_curves, msd, steady_state_estimate, to_db
from .signals import InputKind, InputSpec, NoiseSpec, desired_output, gen_input, gen_noise
from .systems import (Family, GgdParams, SystemModel, SystemSpec, gen_exact_sparse,
                      gen_gaussian_system, gen_ggd_system, gen_noisy_sparse, ggd_cdf, ggd_pdf,
                      lower_incomplete_gamma, sample_ggd)
from .theory import (TheoryInputs, TheoryPrediction, attraction_probability, lms_mse,
                     stability_bound, steady_state_mse)

__version__ = "0.1.0"
