# Optional, for forward declarations in Python 3.7+
from __future__ import annotations

import logging
import math

import numpy as np

from .entities.zsvr_batch_plan import ZsvrBatchPlan
from .entities.zsvr_flow_bank import ZsvrFlowBank, ZsvrFlowPair
from .entities.zsvr_frame_sequence import ZsvrFrameSequence
from .entities.zsvr_hook_set import ZsvrHookSet
from .entities.zsvr_latent_grid import ZsvrLatentGrid
from .entities.zsvr_metrics_report import ZsvrMetricsReport
from .entities.zsvr_restore_config import ZsvrRestoreConfig
from .enums.zsvr_enums import ZsvrCorrespondenceEnum, ZsvrStageEnum
from .zsvr_errors import ZsvrConfigurationError, ZsvrShapeError
from .zsvr_flow import estimate_flow, fb_confidence, occlusion_mask
from .zsvr_latent_warp import propagate_to_batch, warp_keyframe_chain
from .zsvr_metrics import build_report, interpolation_error, scale_e_warp, warping_error
from .zsvr_run import ZsvrRun
from .zsvr_token_merge import anneal_ratio, hybrid_merge_pass
from .zsvr_toy_diffusion import ZsvrToyDenoiser, forward_diffuse, make_schedule, make_timesteps, sample
from .zsvr_utilities import area_downsample, bilinear_resize

logger = logging.getLogger(__name__)

FLOW = ZsvrCorrespondenceEnum.FLOW
COSINE = ZsvrCorrespondenceEnum.COSINE

# label -> (down mode, up mode, spatial weighting)
CORRESPONDENCE_VARIANTS = {
    "Flow/Flow": (FLOW, FLOW, False),
    "Cos/Cos": (COSINE, COSINE, False),
    "Cos/Flow": (COSINE, FLOW, False),
    "Flow/Cos": (FLOW, COSINE, False),
    "Flow/Cos+spatial": (FLOW, COSINE, True),
}

# label -> (latent warping stages, token merging stages)
STAGE_VARIANTS = {
    "none/none": ("none", "none"),
    "E/E": ("E", "E"),
    "EM/EML": ("EM", "EML"),
    "EML/EML": ("EML", "EML"),
    "E/EML": ("E", "EML"),
}


def plan_batches(n: int, B: int, seed: int) -> ZsvrBatchPlan:
    """Contiguous batches of B frames (the last may be shorter), one seeded keyframe each."""
    if n < 1 or B < 1:
        raise ZsvrConfigurationError("need n >= 1 frames and batch size B >= 1",
                                     problem_data={'n': n, 'B': B})
    rng = np.random.default_rng(seed)
    batches, keyframes = [], []
    for start in range(0, n, B):
        stop = min(start + B, n)
        batches.append((start, stop))
        keyframes.append(start + int(rng.integers(0, stop - start)))
    return ZsvrBatchPlan(batch_size=B, batches=batches, keyframe_of=keyframes, seed=seed, num_frames=n)


def stage_bounds(stages: str, num_steps: int) -> tuple:
    """Step range covered by a contiguous run of thirds ('E', 'EM', 'EML', 'M', ...)."""
    members = ZsvrStageEnum.from_stage_string(stages)
    if not members:
        return 0, 0
    order = list(ZsvrStageEnum)
    positions = sorted(order.index(member) for member in members)
    if positions != list(range(positions[0], positions[-1] + 1)):
        raise ZsvrConfigurationError("stages must be contiguous", problem_data={'stages': stages})
    cuts = [0, int(round(num_steps / 3.0)), int(round(2.0 * num_steps / 3.0)), num_steps]
    return cuts[positions[0]], cuts[positions[-1] + 1]


def start_timestep(config: ZsvrRestoreConfig) -> int:
    return int(round(config.strength * (config.schedule_T - 1)))


def sampler_steps(config: ZsvrRestoreConfig) -> int:
    """Steps the sampler really runs: strided timesteps that round to the same value count once."""
    return len(make_timesteps(start_timestep(config), config.steps))


def _alignment_pair(frames: np.ndarray, target: int, source: int, raw: dict, config: ZsvrRestoreConfig) -> ZsvrFlowPair:
    def field(src: int, dst: int):
        if (src, dst) not in raw:
            raw[(src, dst)] = estimate_flow(frames[src], frames[dst], config.flow_block, config.flow_search)
        return raw[(src, dst)]

    flow = field(target, source)
    reverse = field(source, target)
    return ZsvrFlowPair(target, source, flow, reverse,
                        fb_confidence(flow, reverse),
                        occlusion_mask(flow, reverse, config.flow_tau_occ))


def precompute_flows(seq: ZsvrFrameSequence, plan: ZsvrBatchPlan, config: ZsvrRestoreConfig,
                     include_metrics: bool = True) -> ZsvrFlowBank:
    """Every alignment the run needs, estimated once on the input frames.

    Keyframe chain pairs, keyframe-to-member pairs and, with
    ``include_metrics``, the adjacent and skip-one pairs the consistency
    metrics read.
    """
    frames = seq.frames
    n = seq.num_frames
    bank = ZsvrFlowBank((seq.height, seq.width), config.flow_tau_occ)
    raw = {}

    def add(target: int, source: int, kind: str):
        if bank.has_pair(target, source):
            bank.add(bank.pair(target, source), kind)
        else:
            bank.add(_alignment_pair(frames, target, source, raw, config), kind)

    keyframes = plan.keyframe_of
    for b in range(1, plan.num_batches):
        add(keyframes[b], keyframes[b - 1], 'keyframe')
    for b in range(plan.num_batches):
        for member in plan.members(b):
            if member != keyframes[b]:
                add(member, keyframes[b], 'member')
    if include_metrics:
        for t in range(1, n):
            add(t, t - 1, 'adjacent')
        for t in range(1, n - 1):
            add(t + 1, t - 1, 'skip')
            add(t - 1, t + 1, 'skip')
    logger.info("precomputed %d alignment pairs from %d raw flows", len(bank), len(raw))
    return bank


def measure(seq: ZsvrFrameSequence, bank: ZsvrFlowBank, reference: ZsvrFrameSequence = None,
            border: int = 0, metadata: dict = None) -> ZsvrMetricsReport:
    """Consistency metrics with the bank's adjacent/skip flows, quality metrics against ``reference``."""
    n = seq.num_frames
    if tuple(bank.resolution) != (seq.height, seq.width):
        raise ZsvrShapeError("flow bank resolution differs from the sequence",
                             problem_data={'bank': bank.resolution, 'sequence': (seq.height, seq.width)})
    adjacent = [bank.pair(t, t - 1) for t in range(1, n)]
    e_warp, _ = warping_error(seq, [p.flow for p in adjacent], [p.mask for p in adjacent], border)
    e_inter = []
    if n >= 3:
        fwd = [bank.pair(t + 1, t - 1).flow for t in range(1, n - 1)]
        bwd = [bank.pair(t - 1, t + 1).flow for t in range(1, n - 1)]
        e_inter, _ = interpolation_error(seq, fwd, bwd, border)
    return build_report(seq, reference, e_warp, e_inter, metadata)


class ZsvrManager():

    def __init__(self):
        self.runs = []

    def _validate(self, seq: ZsvrFrameSequence, config: ZsvrRestoreConfig, batch_order) -> tuple:
        if not isinstance(seq, ZsvrFrameSequence):
            raise TypeError("'seq' should be a ZsvrFrameSequence")
        if not isinstance(config, ZsvrRestoreConfig):
            raise TypeError("'config' should be a ZsvrRestoreConfig")
        config.validate()
        if seq.height % config.latent_scale or seq.width % config.latent_scale:
            raise ZsvrConfigurationError("frame size must be divisible by latent_scale",
                                         problem_data={'size': (seq.height, seq.width),
                                                       'latent_scale': config.latent_scale})
        t_start = start_timestep(config)
        if config.steps > t_start + 1:
            raise ZsvrConfigurationError("more steps than timesteps below the starting point",
                                         problem_data={'steps': config.steps, 't_start': t_start})
        plan = plan_batches(seq.num_frames, config.batch_size, config.seed)
        if batch_order is not None:
            order = [int(b) for b in batch_order]
            if sorted(order) != list(range(plan.num_batches)):
                raise ZsvrConfigurationError("batch order must be a permutation of the batches",
                                             problem_data={'batch_order': order})
            if order != sorted(order) and config.hlw_chain and config.hlw_until > 0.0:
                raise ZsvrConfigurationError("chained keyframes need batches in order",
                                             problem_data={'batch_order': order})
        else:
            order = list(range(plan.num_batches))
        return plan, order, t_start

    def restore(self,
                seq: ZsvrFrameSequence,
                config: ZsvrRestoreConfig,
                batch_order: list = None,
                bank: ZsvrFlowBank = None,
                name: str = None,
                show_progress: bool = False) -> ZsvrFrameSequence:
        """Restore a degraded sequence batch by batch with the toy latent diffusion model.

        Latent warping and token merging are driven by the stage schedule of
        ``config``. The run (outputs, final latents, hook call counts) is
        appended to ``runs``.
        """
        plan, order, t_start = self._validate(seq, config, batch_order)
        steps = sampler_steps(config)
        schedule = config.stage_schedule(steps)
        sched = make_schedule(config.schedule_T, config.schedule_beta_start, config.schedule_beta_end)
        denoiser = ZsvrToyDenoiser(config.seed, channels=config.denoiser_channels,
                                   gain=config.denoiser_gain, pad_multiple=config.denoiser_pad_multiple)

        hlw_on = config.hlw_until > 0.0
        tome_on = schedule.tome_range[0] < schedule.tome_range[1]
        uses_flow = FLOW in (config.tome_down, config.tome_up)
        if bank is None and seq.num_frames > 1 and (hlw_on or (tome_on and uses_flow)):
            bank = precompute_flows(seq, plan, config, include_metrics=False)

        run = ZsvrRun(name=name, config=config)
        h, w = seq.height, seq.width
        scale = config.latent_scale
        h_lat, w_lat = h // scale, w // scale
        keyframe_cache = {}
        outputs = [None] * seq.num_frames
        latents_out = [None] * seq.num_frames

        for b in order:
            members = plan.members(b)
            keyframe = plan.keyframe_of[b]
            previous = plan.keyframe_of[b - 1] if b > 0 else None
            conds = [area_downsample(seq[f], scale) for f in members]
            start = []
            for f, cond in zip(members, conds):
                eps = np.random.default_rng([config.seed, f]).standard_normal(cond.shape)
                start.append(forward_diffuse(ZsvrLatentGrid(cond, frame_index=f), t_start, eps, sched))

            hooks = ZsvrHookSet(
                latent_hook=self._latent_hook(bank, keyframe, previous, keyframe_cache,
                                              config.hlw_chain, (h_lat, w_lat)) if hlw_on else None,
                attention_hook=self._attention_hook(bank, members, keyframe, schedule, config)
                if tome_on and len(members) >= 2 else None,
                latent_gate=schedule.hlw_active,
                attention_gate=schedule.tome_active)

            final = sample(start, denoiser, hooks, sched, steps, t_start=t_start, conds=conds,
                           target_index=members.index(keyframe), show_progress=show_progress)
            run.latent_hook_calls += hooks.latent_calls
            run.attention_hook_calls += hooks.attention_calls
            for f, latent in zip(members, final):
                latents_out[f] = latent
                outputs[f] = np.clip(bilinear_resize(latent.data, h, w), 0.0, 1.0)
            logger.info("batch %d: frames %d-%d, keyframe %d", b, members[0], members[-1], keyframe)

        restored = ZsvrFrameSequence(outputs, frame_rate=seq.frame_rate, name=name)
        run.frames = restored
        run.latents = latents_out
        run.metadata = {'keyframes': list(plan.keyframe_of), 'batches': list(plan.batches),
                        'steps': steps, 't_start': t_start}
        self.runs.append(run)
        return restored

    @staticmethod
    def _latent_hook(bank, keyframe: int, previous, cache: dict, chain: bool, size: tuple):
        def latent_hook(step_index: int, t: int, latents: list) -> list:
            position = [g.frame_index for g in latents].index(keyframe)
            current = latents[position]
            if chain and previous is not None and (previous, step_index) in cache:
                flow, _, mask = bank.resampled(keyframe, previous, *size)
                current = warp_keyframe_chain([cache[(previous, step_index)], current], [flow], [mask])[1]
            cache[(keyframe, step_index)] = current
            batch = list(latents)
            batch[position] = current
            others = [g.frame_index for g in batch if g.frame_index != keyframe]
            maps = [bank.resampled(f, keyframe, *size) for f in others]
            return propagate_to_batch(current, batch, [m[0] for m in maps], [m[2] for m in maps])

        return latent_hook

    @staticmethod
    def _attention_hook(bank, members: list, keyframe: int, schedule, config: ZsvrRestoreConfig):
        def attention_hook(kind, chunk, attention, step_index: int):
            r_i = anneal_ratio(step_index, schedule.anneal)
            mode = schedule.mode_for(kind)
            flows, confidences = {}, {}
            if mode == FLOW and r_i > 0.0:
                h_c, w_c = chunk.content
                for position, frame in enumerate(members):
                    if frame == keyframe:
                        continue
                    flow, confidence, _ = bank.resampled(frame, keyframe, h_c, w_c)
                    flows[position] = flow
                    confidences[position] = confidence
            R = config.spatial_radius if mode == COSINE else None
            return hybrid_merge_pass(chunk, mode, flows, confidences, R, r_i, attention,
                                     strip=config.tome_strip_padding)

        return attention_hook

    def ablate(self, seq: ZsvrFrameSequence, config: ZsvrRestoreConfig,
               variants: list = None, reference: ZsvrFrameSequence = None) -> list:
        """Restore once per variant and tabulate E_warp / E_inter (and PSNR/SSIM with a reference).

        ``variants`` picks labels from ``CORRESPONDENCE_VARIANTS`` and
        ``STAGE_VARIANTS``; all of them by default.
        """
        config.validate()
        steps = sampler_steps(config)
        labels = variants or list(CORRESPONDENCE_VARIANTS) + list(STAGE_VARIANTS)
        plan = plan_batches(seq.num_frames, config.batch_size, config.seed)
        bank = precompute_flows(seq, plan, config)
        rows = []
        for label in labels:
            if label in CORRESPONDENCE_VARIANTS:
                group = "correspondence"
                down, up, spatial = CORRESPONDENCE_VARIANTS[label]
                variant = config.replace(tome_down=down, tome_up=up, tome_spatial=spatial)
            elif label in STAGE_VARIANTS:
                group = "stages"
                hlw_stages, tome_stages = STAGE_VARIANTS[label]
                _, hlw_end = stage_bounds(hlw_stages, steps)
                beg, end = stage_bounds(tome_stages, steps)
                variant = config.replace(hlw_until=hlw_end / steps,
                                         tome_range_beg=beg, tome_range_end=end)
            else:
                raise ZsvrConfigurationError("unknown ablation variant", problem_data={'variant': label})
            restored = self.restore(seq, variant, bank=bank, name=label)
            report = measure(restored, bank, reference, metadata={'variant': label})
            row = {'group': group, 'variant': label,
                   'e_warp': report.e_warp_mean,
                   'e_warp_x1e3': scale_e_warp(report.e_warp_mean),
                   'e_inter': report.e_inter_mean}
            if reference is not None:
                row['psnr'] = report.psnr_mean
                row['ssim'] = report.ssim_mean
            rows.append(row)
            logger.info("ablation %s: e_warp=%s e_inter=%s", label, row['e_warp'], row['e_inter'])
        return rows


def format_table(rows: list) -> str:
    """Plain-text ablation table."""
    columns = ['group', 'variant', 'e_warp_x1e3', 'e_inter'] + \
        [c for c in ('psnr', 'ssim') if rows and c in rows[0]]

    def cell(value) -> str:
        if isinstance(value, float):
            return "inf" if math.isinf(value) else f"{value:.4f}"
        return "-" if value is None else str(value)

    table = [columns] + [[cell(row.get(c)) for c in columns] for row in rows]
    widths = [max(len(line[i]) for line in table) for i in range(len(columns))]
    return "\n".join("  ".join(text.ljust(widths[i]) for i, text in enumerate(line)) for line in table)
