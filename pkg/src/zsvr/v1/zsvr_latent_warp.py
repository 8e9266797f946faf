# Optional, for forward declarations in Python 3.7+
from __future__ import annotations

import logging
import math

import numpy as np

from .entities.zsvr_latent_grid import ZsvrLatentGrid
from .zsvr_errors import ZsvrConfigurationError, ZsvrParameterError, ZsvrShapeError
from .zsvr_flow import flow_array, map_array, warp

logger = logging.getLogger(__name__)


def _data(latent) -> np.ndarray:
    if isinstance(latent, ZsvrLatentGrid):
        return latent.data
    if isinstance(latent, np.ndarray):
        return latent
    raise TypeError("expected a ZsvrLatentGrid or a numpy array")


def _like(template, data: np.ndarray):
    if isinstance(template, ZsvrLatentGrid):
        return template.with_data(data)
    return data


def predict_x0(x_t, eps, abar_t: float):
    """Invert the forward process: (x_t - sqrt(1 - abar) eps) / sqrt(abar)."""
    if not 0.0 < abar_t <= 1.0:
        raise ZsvrParameterError("abar_t must lie in (0, 1]", problem_data={'abar_t': abar_t})
    x = _data(x_t)
    e = _data(eps)
    if x.shape != e.shape:
        raise ZsvrShapeError("x_t and eps differ in shape", problem_data={'x_t': x.shape, 'eps': e.shape})
    return _like(x_t, (x - math.sqrt(1.0 - abar_t) * e) / math.sqrt(abar_t))


def blend_warped(own: np.ndarray, source: np.ndarray, flow, mask) -> np.ndarray:
    """M * own + (1 - M) * warp(source, flow); M may be binary or soft in [0, 1]."""
    flow_data = flow_array(flow)
    mask_data = map_array(mask)
    if own.shape != source.shape or flow_data.shape[:2] != own.shape[:2] or mask_data.shape != own.shape[:2]:
        raise ZsvrShapeError("latent, flow and mask resolutions differ",
                             problem_data={'latent': own.shape, 'source': source.shape,
                                           'flow': flow_data.shape[:2], 'mask': mask_data.shape})
    if np.any(mask_data < 0.0) or np.any(mask_data > 1.0):
        raise ZsvrParameterError("mask values must lie in [0, 1]")
    m = mask_data[:, :, None]
    return m * own + (1.0 - m) * warp(source, flow_data)


def warp_keyframe_chain(keyframes: list, flows: list, masks: list) -> list:
    """Pull every keyframe toward its already-updated predecessor, in order.

    ``flows[i - 1]`` lives on keyframe ``i``'s grid and points into keyframe
    ``i - 1``; ``masks[i - 1]`` marks where keyframe ``i`` keeps its own latent.
    """
    if len(keyframes) == 0:
        return []
    if len(flows) != len(keyframes) - 1 or len(masks) != len(keyframes) - 1:
        raise ZsvrConfigurationError("need one flow and one mask per adjacent keyframe pair",
                                     problem_data={'keyframes': len(keyframes), 'flows': len(flows),
                                                   'masks': len(masks)})
    updated = [keyframes[0]]
    for i in range(1, len(keyframes)):
        previous = _data(updated[i - 1])
        current = _data(keyframes[i])
        updated.append(_like(keyframes[i], blend_warped(current, previous, flows[i - 1], masks[i - 1])))
    return updated


def propagate_to_batch(keyframe, batch: list, flows: list, masks: list) -> list:
    """Warp the keyframe directly into every other batch member (star topology).

    ``flows`` and ``masks`` follow the order of the non-keyframe members of
    ``batch``; the keyframe is recognised by its frame index.
    """
    key_index = keyframe.frame_index if isinstance(keyframe, ZsvrLatentGrid) else None
    others = [position for position, member in enumerate(batch)
              if key_index is None or not isinstance(member, ZsvrLatentGrid)
              or member.frame_index != key_index]
    if len(flows) != len(others) or len(masks) != len(others):
        raise ZsvrConfigurationError("need one flow and one mask per non-keyframe member",
                                     problem_data={'members': len(others), 'flows': len(flows),
                                                   'masks': len(masks)})
    source = _data(keyframe)
    result = list(batch)
    for slot, position in enumerate(others):
        member = batch[position]
        result[position] = _like(member, blend_warped(_data(member), source, flows[slot], masks[slot]))
    return result
