"""Radar heart-rate estimation at desk scale: synthetic FMCW and IR-UWB
scenes, the signal-processing front end, CFAR presence detection, feature
extraction, a from-scratch 2D+1D residual network with transfer learning,
and the evaluation metrics machinery."""

from .dsp import (ChirpCube, RangeProfileCube, Segment, average_chirps,
                  clutter_filter, downsample_uwb, range_fft, segment_stream)
from .features import (FeatureConfig, FeatureTensor, SegmentRejected,
                       adaptive_respiration_filter, assemble_features,
                       extract_feature_rows, highpass, normalize_rows,
                       pca_beamform, select_bins, unwrap_phase)
from .presence import CfarConfig, PresenceResult, detect
from .radar import RadarSpec, fmcw_preset, preset, uwb_preset
from .metrics import (EvalReport, bland_altman, bootstrap_ci, build_report,
                      mae_mape, subgroup_report)
from .pipeline import (FeatureDataset, build_feature_dataset, featurize_segment,
                       load_feature_dataset, preprocess_manifest,
                       segments_from_scene)
from .simulate import (SceneSpec, displacement_series, make_dataset,
                       simulate_fmcw, simulate_fmcw_bursts, simulate_scene,
                       simulate_uwb, split_subjects)
from .train import (HrAccelerateConfig, TrainConfig, TrainResult, UpweightConfig,
                    ablation_suite, augment_feature_swap, augment_gaussian,
                    augment_hr_accelerate, desk_preset, evaluate_dataset,
                    paper_preset, preset as train_preset, resample_time, train)

__version__ = "0.1.0"
