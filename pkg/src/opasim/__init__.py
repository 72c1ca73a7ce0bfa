"""Digital twin of a sub-threshold OPA squeezed-light bench."""

__version__ = "0.1.0"

from .analyzer import (NormalizedTrace, PowerSpectrum, SpectrumConfig,
                       fft_spectrum, log_resample, normalize_and_subtract,
                       rms_average, stitch_spectra, zero_span)
from .detection import (HomodyneDetector, SpcmChannel, count_rate_model,
                        expected_homodyne_psd, homodyne_measure, spcm_counts)
from .errors import (AboveThresholdError, AnalysisError, ConfigError,
                     InconsistentDataError, InfeasiblePairError, LockError,
                     OpaSimError, ParameterError)
from .inference import (MeasurementPair, OperatingPointFit, fit_opa_operating_point,
                        fit_phase_jitter, stability_metrics)
from .locking import (LockInConfig, LockResult, PidConfig, PidState, QnlPlant,
                      SmlPlant, lock_in_demodulate, pid_step,
                      quantum_noise_lock, sml_lock)
from .noise import (NoiseScenario, TechnicalNoise, TimeSeries, Tone,
                    colored_noise_from_psd, phase_random_walk, power_law_noise,
                    white_noise)
from .physics import (DetectionChain, OpaParams, PhaseJitter,
                      QuadratureVariancePair, apply_phase_jitter,
                      cavity_decay_rate, escape_efficiency, from_db,
                      mean_intracavity_photons, normalized_pump,
                      parametric_power_gain, squeezing_spectrum, to_db)
