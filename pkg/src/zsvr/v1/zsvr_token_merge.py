# Optional, for forward declarations in Python 3.7+
from __future__ import annotations

import logging
import math
from typing import Callable

import numpy as np

from .constants import INVALID_TARGET
from .entities.zsvr_anneal_params import ZsvrAnnealParams
from .entities.zsvr_correspondence import ZsvrCorrespondence, ZsvrMergeSet
from .entities.zsvr_merge_record import ZsvrMergeRecord
from .entities.zsvr_token_chunk import ZsvrPadSpec, ZsvrTokenChunk
from .entities.zsvr_token_split import ZsvrTokenSplit
from .enums.zsvr_enums import ZsvrCorrespondenceEnum
from .zsvr_errors import (ZsvrConfigurationError, ZsvrNothingToMergeError,
                          ZsvrParameterError, ZsvrShapeError)
from .zsvr_flow import flow_array, map_array, resample_flow, resample_map

logger = logging.getLogger(__name__)

# absorbs r * N landing a hair below an integer
_COUNT_EPSILON = 1e-9


def split_src_tar(chunk: ZsvrTokenChunk) -> ZsvrTokenSplit:
    if not isinstance(chunk, ZsvrTokenChunk):
        raise TypeError("'chunk' should be a ZsvrTokenChunk")
    B, A, C = chunk.tokens.shape
    if B < 2:
        raise ZsvrNothingToMergeError("nothing to merge", problem_data={'B': B})
    source_frames = [frame for frame in range(B) if frame != chunk.target_index]
    src = chunk.tokens[source_frames].reshape(-1, C).copy()
    tar = chunk.tokens[chunk.target_index].copy()
    src_frame = np.repeat(np.array(source_frames, dtype=np.int64), A)
    src_position = np.tile(np.arange(A, dtype=np.int64), len(source_frames))
    return ZsvrTokenSplit(src, tar, src_frame, src_position, B, chunk.target_index,
                          chunk.layout, chunk.content)


def cosine_scores(src: np.ndarray, tar: np.ndarray) -> np.ndarray:
    """(N_src, A) cosine matrix; a zero-norm vector scores 0 against everything."""
    if src.ndim != 2 or tar.ndim != 2 or src.shape[1] != tar.shape[1] or src.shape[1] < 1:
        raise ZsvrShapeError("cosine_scores needs (N, C) and (A, C) with C >= 1",
                             problem_data={'src': src.shape, 'tar': tar.shape})
    src_norm = np.linalg.norm(src, axis=1)
    tar_norm = np.linalg.norm(tar, axis=1)
    denominator = src_norm[:, None] * tar_norm[None, :]
    dots = src @ tar.T
    scores = np.zeros_like(dots)
    np.divide(dots, denominator, out=scores, where=denominator > 0.0)
    return np.clip(scores, -1.0, 1.0)


def token_positions(layout: tuple, positions: np.ndarray) -> np.ndarray:
    """Row-major slot positions to (x, y) token-grid coordinates."""
    w_tok = layout[1]
    positions = np.asarray(positions, dtype=np.int64)
    return np.stack([positions % w_tok, positions // w_tok], axis=1).astype(np.float64)


def spatial_weight(scores: np.ndarray, src_pos: np.ndarray, tar_pos: np.ndarray, R: float) -> np.ndarray:
    """s'_ij = s_ij * exp(-floor(|X(i) - X(j)|^2 / R)); frame offsets play no part."""
    if R is None or not R > 0.0:
        raise ZsvrParameterError("spatial radius R must be > 0", problem_data={'R': R})
    if scores.shape != (src_pos.shape[0], tar_pos.shape[0]):
        raise ZsvrShapeError("positions do not match the score matrix",
                             problem_data={'scores': scores.shape, 'src': src_pos.shape, 'tar': tar_pos.shape})
    delta = src_pos[:, None, :] - tar_pos[None, :, :]
    tau = np.floor(np.sum(delta ** 2, axis=2) / R)
    return scores * np.exp(-tau)


def cosine_correspondence(scores: np.ndarray) -> ZsvrCorrespondence:
    # argmax keeps the first maximum: ties go to the smallest target index
    targets = np.argmax(scores, axis=1)
    criteria = scores[np.arange(scores.shape[0]), targets]
    return ZsvrCorrespondence(targets, criteria, scores.shape[1])


def flow_correspondence(split: ZsvrTokenSplit, flows: dict, confidences: dict) -> ZsvrCorrespondence:
    """Map each source token along its frame's flow to the nearest target cell.

    ``flows[f]`` / ``confidences[f]`` belong to chunk frame ``f`` and live on the
    token grid. Source tokens on padding, or whose displaced cell leaves the
    content extent, are INVALID with criterion 0.
    """
    h_tok, w_tok = split.layout
    h_img, w_img = split.content
    targets = np.full(split.num_sources, INVALID_TARGET, dtype=np.int64)
    criteria = np.zeros(split.num_sources)

    for frame in np.unique(split.src_frame):
        frame = int(frame)
        if frame not in flows or frame not in confidences:
            raise ZsvrConfigurationError("missing flow for a source frame",
                                         problem_data={'frame': frame})
        flow = flow_array(flows[frame])
        sigma = map_array(confidences[frame])
        if flow.shape[:2] != (h_tok, w_tok) or sigma.shape != (h_tok, w_tok):
            raise ZsvrShapeError("flows must be at token resolution",
                                 problem_data={'layout': (h_tok, w_tok), 'flow': flow.shape[:2]})

        slots = np.nonzero(split.src_frame == frame)[0]
        xy = token_positions(split.layout, split.src_position[slots])
        x = xy[:, 0].astype(np.int64)
        y = xy[:, 1].astype(np.int64)
        in_content = (x < w_img) & (y < h_img)
        tx = np.floor(x + flow[y, x, 0] + 0.5).astype(np.int64)
        ty = np.floor(y + flow[y, x, 1] + 0.5).astype(np.int64)
        inside = in_content & (tx >= 0) & (tx < w_img) & (ty >= 0) & (ty < h_img)
        targets[slots[inside]] = ty[inside] * w_tok + tx[inside]
        criteria[slots[inside]] = sigma[y[inside], x[inside]]

    return ZsvrCorrespondence(targets, criteria, split.num_targets)


def select_top_r(corr: ZsvrCorrespondence, r_i: float) -> ZsvrMergeSet:
    """The floor(r_i * N_src) valid pairs with the largest criterion, ties by slot index."""
    if not 0.0 <= r_i <= 1.0:
        raise ZsvrParameterError("r_i must lie in [0, 1]", problem_data={'r_i': r_i})
    k = int(math.floor(r_i * corr.num_sources + _COUNT_EPSILON))
    valid_slots = np.nonzero(corr.valid)[0]
    if k == 0 or valid_slots.size == 0:
        return ZsvrMergeSet(np.empty(0, dtype=np.int64), np.empty(0, dtype=np.int64), corr.num_sources)
    order = np.lexsort((valid_slots, -corr.criteria[valid_slots]))
    chosen = valid_slots[order[:k]]
    return ZsvrMergeSet(chosen, corr.targets[chosen], corr.num_sources)


def merge(split: ZsvrTokenSplit, mergeset: ZsvrMergeSet) -> tuple:
    """Merged tokens (targets first, then surviving sources by slot) and the record to undo it.

    A group's token is the mean of its members, accumulated as offsets from the
    target so that a group of equal tokens reproduces the target exactly.
    """
    if mergeset.num_sources != split.num_sources:
        raise ZsvrShapeError("merge set was built for another split",
                             problem_data={'set': mergeset.num_sources, 'split': split.num_sources})
    A = split.num_targets
    src, tar = split.src, split.tar

    selected = np.zeros(split.num_sources, dtype=bool)
    selected[mergeset.slots] = True
    surviving = np.nonzero(~selected)[0]

    group_of_source = np.empty(split.num_sources, dtype=np.int64)
    group_of_source[mergeset.slots] = mergeset.targets
    group_of_source[surviving] = A + np.arange(surviving.size)

    offsets = np.zeros_like(tar)
    np.add.at(offsets, mergeset.targets, src[mergeset.slots] - tar[mergeset.targets])
    counts = np.bincount(mergeset.targets, minlength=A).astype(np.float64) + 1.0
    merged_targets = tar + offsets / counts[:, None]

    merged = np.concatenate([merged_targets, src[surviving]], axis=0)
    record = ZsvrMergeRecord(group_of_source, merged.shape[0], split)
    return merged, record


def unmerge(attended: np.ndarray, record: ZsvrMergeRecord) -> ZsvrTokenChunk:
    if attended.ndim != 2 or attended.shape[0] != record.num_groups:
        raise ZsvrShapeError("attended tokens do not match the merge record",
                             problem_data={'attended': attended.shape, 'K': record.num_groups})
    split = record.split
    tokens = attended[record.group_of_slot()]
    return ZsvrTokenChunk(tokens, split.layout, split.content, split.target_index)


def strip_padding(chunk: ZsvrTokenChunk) -> tuple:
    pad = ZsvrPadSpec(chunk.layout, chunk.content, chunk.tokens.copy())
    if not chunk.is_padded:
        return chunk, pad
    B, _, C = chunk.tokens.shape
    h_tok, w_tok = chunk.layout
    h_img, w_img = chunk.content
    grid = chunk.tokens.reshape(B, h_tok, w_tok, C)[:, :h_img, :w_img]
    content_chunk = ZsvrTokenChunk(grid.reshape(B, h_img * w_img, C), (h_img, w_img),
                                   (h_img, w_img), chunk.target_index)
    return content_chunk, pad


def restore_padding(content_chunk: ZsvrTokenChunk, pad: ZsvrPadSpec) -> ZsvrTokenChunk:
    B, _, C = pad.padded_tokens.shape
    h_tok, w_tok = pad.layout
    h_img, w_img = pad.content
    if (content_chunk.layout != (h_img, w_img) or content_chunk.num_frames != B
            or content_chunk.channels != C or h_img > h_tok or w_img > w_tok):
        raise ZsvrShapeError("padding layout does not fit the chunk",
                             problem_data={'layout': pad.layout, 'content': pad.content,
                                           'chunk_layout': content_chunk.layout})
    if (h_img, w_img) == (h_tok, w_tok):
        return ZsvrTokenChunk(content_chunk.tokens, pad.layout, pad.content, content_chunk.target_index)
    grid = pad.padded_tokens.reshape(B, h_tok, w_tok, C).copy()
    grid[:, :h_img, :w_img] = content_chunk.tokens.reshape(B, h_img, w_img, C)
    return ZsvrTokenChunk(grid.reshape(B, h_tok * w_tok, C), pad.layout, pad.content,
                          content_chunk.target_index)


def anneal_ratio(i: int, params: ZsvrAnnealParams) -> float:
    progress = params.delta * (i - params.i_beg) / (params.i_end - params.i_beg)
    progress = min(max(progress, 0.0), 1.0)
    if progress >= 1.0:
        return 0.0
    return params.r * math.cos(0.5 * math.pi * progress)


def attend_per_frame(chunk: ZsvrTokenChunk, attention: Callable) -> ZsvrTokenChunk:
    """Frame-local attention: the path taken whenever nothing is merged."""
    outputs = []
    for frame in range(chunk.num_frames):
        out = attention(chunk.tokens[frame])
        if out.shape != chunk.tokens[frame].shape:
            raise ZsvrShapeError("attention changed the token shape",
                                 problem_data={'in': chunk.tokens[frame].shape, 'out': out.shape})
        outputs.append(out)
    return chunk.with_tokens(np.stack(outputs))


def _identity(tokens: np.ndarray) -> np.ndarray:
    return tokens


def _at_resolution(maps: dict, layout: tuple, resample) -> dict:
    result = {}
    for frame, value in maps.items():
        data = flow_array(value) if resample is resample_flow else map_array(value)
        if data.shape[:2] != tuple(layout):
            value = resample(value, layout[0], layout[1])
        result[frame] = value
    return result


def _zero_padded(maps: dict, layout: tuple) -> dict:
    result = {}
    for frame, value in maps.items():
        data = np.asarray(getattr(value, 'data', value), dtype=np.float64)
        extra = ((0, layout[0] - data.shape[0]), (0, layout[1] - data.shape[1])) + ((0, 0),) * (data.ndim - 2)
        result[frame] = np.pad(data, extra)
    return result


def hybrid_merge_pass(chunk: ZsvrTokenChunk,
                      mode: ZsvrCorrespondenceEnum,
                      flows: dict = None,
                      confidences: dict = None,
                      R: float = None,
                      r_i: float = 0.0,
                      attention: Callable = None,
                      strip: bool = True) -> ZsvrTokenChunk:
    """strip -> split -> correspond -> top-r -> merge -> attend -> unmerge -> restore.

    FLOW mode follows the per-frame flows (resampled to the token grid when
    needed); COSINE mode uses cosine scores, spatially weighted when ``R`` is
    given. ``r_i`` is already annealed. With ``strip=False`` padding tokens
    take part in merging: they carry zero flow and zero confidence. When
    nothing gets merged the chunk is attended frame by frame, exactly as
    without a hook.
    """
    attention = attention or _identity
    if not isinstance(mode, ZsvrCorrespondenceEnum):
        raise TypeError("'mode' should be a ZsvrCorrespondenceEnum")
    if mode == ZsvrCorrespondenceEnum.FLOW and (flows is None or confidences is None):
        raise ZsvrConfigurationError("flow-guided merging needs flows and confidences")
    if r_i <= 0.0 or chunk.num_frames < 2:
        return attend_per_frame(chunk, attention)

    if strip:
        content_chunk, pad = strip_padding(chunk)
    else:
        content_chunk = ZsvrTokenChunk(chunk.tokens, chunk.layout, chunk.layout, chunk.target_index)
        pad = None
    split = split_src_tar(content_chunk)

    if mode == ZsvrCorrespondenceEnum.FLOW:
        if strip:
            flow_maps = _at_resolution(flows, split.layout, resample_flow)
            confidence_maps = _at_resolution(confidences, split.layout, resample_map)
        else:
            flow_maps = _zero_padded(_at_resolution(flows, chunk.content, resample_flow), chunk.layout)
            confidence_maps = _zero_padded(_at_resolution(confidences, chunk.content, resample_map), chunk.layout)
        corr = flow_correspondence(split, flow_maps, confidence_maps)
    else:
        scores = cosine_scores(split.src, split.tar)
        if R is not None:
            scores = spatial_weight(scores,
                                    token_positions(split.layout, split.src_position),
                                    token_positions(split.layout, np.arange(split.num_targets)),
                                    R)
        corr = cosine_correspondence(scores)

    mergeset = select_top_r(corr, r_i)
    if len(mergeset) == 0:
        return attend_per_frame(chunk, attention)

    merged, record = merge(split, mergeset)
    attended = attention(merged)
    if attended.shape != merged.shape:
        raise ZsvrShapeError("attention changed the merged token shape",
                             problem_data={'in': merged.shape, 'out': attended.shape})
    logger.debug("merged %d of %d source tokens (%s)", len(mergeset), split.num_sources, mode.value)
    unmerged = unmerge(attended, record)
    if pad is None:
        return chunk.with_tokens(unmerged.tokens)
    return restore_padding(unmerged, pad)
