"""IRS-aided electromagnetic stealth: channels, power model, reflection designs."""

from .arrays import (AnglePair, ArrayGeometry, ArrayKind, cascaded_response,
                     cssa_response, split_ts_response, steer_1d, upa_response)
from .channel import LosChannel, PathGain, los_channel, path_gain
from .config import (ConfigError, RadarConfig, ScenarioConfig, TargetConfig,
                     build_scenario, multi_radar_config, single_radar_config)
from .estimation import (AoaEstimate, EstimationError, GainEstimate, SnapshotSet,
                         collect_snapshots, estimate_parameters, gain_estimate,
                         ls_recover, music_aoa, steering_matrix)
from .experiments import (ExperimentResult, ExperimentRow, emit_csv,
                          inject_aoa_error, parse_csv, run_experiment)
from .optimizers import (ConvergenceError, InfeasibleError, QcqpInstance,
                         ReflectionSolution, build_instance,
                         build_instance_from_estimates, dft_codebook_design,
                         dft_codebook_search,
                         dual_value, kkt_certificate, lagrange_semiclosed,
                         min_irs_elements, mmse_delta_search, mmse_reflection,
                         random_phase, reverse_alignment, solve_pgd)
from .power_model import (GainSet, IrsPanel, NirsPanel, RadarNode, Scenario,
                          Target, beamforming_gains, chirp_waveform,
                          matched_beamformer, radar_power, sum_power)

__version__ = "0.1.0"
