from .v1.constants import *
from .v1.zsvr_errors import (ZsvrError, ZsvrFormatError, ZsvrLengthError, ZsvrShapeError, ZsvrParameterError,
                             ZsvrConfigurationError, ZsvrSerializationError, ZsvrIndexError,
                             ZsvrEmptyInputError, ZsvrNothingToMergeError)
from .v1.zsvr_base import ZsvrBaseEntity
from .v1.zsvr_run import ErrorLog, ZsvrRun
from .v1.zsvr_utilities import *
from .v1.zsvr_manager import ZsvrManager, plan_batches, precompute_flows, measure, stage_bounds, format_table
from .v1.zsvr_mediaio import (read_frames, write_frames, decode_pnm, encode_ppm, read_flo, write_flo,
                              decode_flo, encode_flo, read_raw_tensor, write_raw_tensor, encode_raw_tensor,
                              decode_raw_tensor, write_report, read_report, report_to_dict, report_from_dict)
from .v1.zsvr_flow import (estimate_flow, warp, bilinear_sample, fb_residual, fb_confidence, occlusion_mask,
                           resample_flow, resample_mask, resample_map)
from .v1.zsvr_token_merge import (split_src_tar, cosine_scores, spatial_weight, cosine_correspondence,
                                  flow_correspondence, select_top_r, merge, unmerge, strip_padding,
                                  restore_padding, anneal_ratio, attend_per_frame, hybrid_merge_pass)
from .v1.zsvr_latent_warp import predict_x0, warp_keyframe_chain, propagate_to_batch
from .v1.zsvr_toy_diffusion import ZsvrToyDenoiser, make_schedule, forward_diffuse, denoise_step, sample
from .v1.zsvr_metrics import psnr, ssim, warping_error, interpolation_error, build_report
from .v1.zsvr_synthetic import synthesize_video, degrade
from .v1.entities.zsvr_frame_sequence import ZsvrFrameSequence
from .v1.entities.zsvr_flow_field import ZsvrFlowField
from .v1.entities.zsvr_flow_maps import ZsvrOcclusionMask, ZsvrConfidenceMap
from .v1.entities.zsvr_latent_grid import ZsvrLatentGrid
from .v1.entities.zsvr_token_chunk import ZsvrTokenChunk, ZsvrPadSpec
from .v1.entities.zsvr_token_split import ZsvrTokenSplit
from .v1.entities.zsvr_correspondence import ZsvrCorrespondence, ZsvrMergeSet
from .v1.entities.zsvr_merge_record import ZsvrMergeRecord
from .v1.entities.zsvr_anneal_params import ZsvrAnnealParams
from .v1.entities.zsvr_noise_schedule import ZsvrNoiseSchedule
from .v1.entities.zsvr_hook_set import ZsvrHookSet
from .v1.entities.zsvr_batch_plan import ZsvrBatchPlan
from .v1.entities.zsvr_stage_schedule import ZsvrStageSchedule
from .v1.entities.zsvr_metrics_report import ZsvrMetricsReport
from .v1.entities.zsvr_flow_bank import ZsvrFlowBank, ZsvrFlowPair
from .v1.entities.zsvr_restore_config import ZsvrRestoreConfig
from .v1.enums.zsvr_enums import (ZsvrEnum, ZsvrBlockKindEnum, ZsvrCorrespondenceEnum, ZsvrStageEnum,
                                  ZsvrCommandEnum)
