# Optional, for forward declarations in Python 3.7+
from __future__ import annotations

import logging
import math

import numpy as np

from .constants import E_INTER_SCALE, E_WARP_SCALE, SSIM_K1, SSIM_K2, SSIM_WINDOW
from .entities.zsvr_frame_sequence import ZsvrFrameSequence
from .entities.zsvr_metrics_report import ZsvrMetricsReport
from .zsvr_errors import ZsvrLengthError, ZsvrParameterError, ZsvrShapeError
from .zsvr_flow import flow_array, map_array, warp

logger = logging.getLogger(__name__)


def _frames(seq) -> np.ndarray:
    if isinstance(seq, ZsvrFrameSequence):
        return seq.frames
    return np.asarray(seq, dtype=np.float64)


def _check_pair(a: np.ndarray, b: np.ndarray) -> None:
    if a.shape != b.shape:
        raise ZsvrShapeError("frames differ in shape", problem_data={'a': a.shape, 'b': b.shape})


def psnr(a: np.ndarray, b: np.ndarray) -> float:
    """Peak signal-to-noise ratio for values in [0, 1]; identical frames give +inf."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    _check_pair(a, b)
    mse = float(np.mean((a - b) ** 2))
    if mse == 0.0:
        return math.inf
    return 10.0 * math.log10(1.0 / mse)


def ssim(a: np.ndarray, b: np.ndarray, window: int = SSIM_WINDOW) -> float:
    """Mean SSIM over non-overlapping windows of the channel-averaged frames.

    A frame smaller than the window is treated as one window; trailing rows and
    columns that do not fill a window are ignored.
    """
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    _check_pair(a, b)
    if window < 1:
        raise ZsvrParameterError("window must be >= 1", problem_data={'window': window})
    if a.ndim == 3:
        a = a.mean(axis=2)
        b = b.mean(axis=2)
    h, w = a.shape
    wy = min(window, h)
    wx = min(window, w)
    ny, nx = h // wy, w // wx
    xa = a[:ny * wy, :nx * wx].reshape(ny, wy, nx, wx)
    xb = b[:ny * wy, :nx * wx].reshape(ny, wy, nx, wx)

    mu_a = xa.mean(axis=(1, 3))
    mu_b = xb.mean(axis=(1, 3))
    var_a = ((xa - mu_a[:, None, :, None]) ** 2).mean(axis=(1, 3))
    var_b = ((xb - mu_b[:, None, :, None]) ** 2).mean(axis=(1, 3))
    cov = ((xa - mu_a[:, None, :, None]) * (xb - mu_b[:, None, :, None])).mean(axis=(1, 3))

    c1 = SSIM_K1 ** 2
    c2 = SSIM_K2 ** 2
    values = ((2.0 * mu_a * mu_b + c1) * (2.0 * cov + c2)) / \
        ((mu_a ** 2 + mu_b ** 2 + c1) * (var_a + var_b + c2))
    return float(values.mean())


def _border_mask(h: int, w: int, border: int) -> np.ndarray:
    if border < 0:
        raise ZsvrParameterError("border must be >= 0", problem_data={'border': border})
    valid = np.zeros((h, w))
    if 2 * border < h and 2 * border < w:
        valid[border:h - border, border:w - border] = 1.0
    return valid


def warping_error(seq, flows: list, masks: list, border: int = 0) -> tuple:
    """Mean squared warp residual per adjacent pair, over unoccluded pixels.

    ``flows[t - 1]`` lives on frame t and points into frame t - 1;
    ``masks[t - 1]`` is 1 where frame t is occluded. Returns
    ``(values, mean)`` with ``mean`` None for a single frame.
    """
    frames = _frames(seq)
    n = frames.shape[0]
    if len(flows) != max(n - 1, 0) or len(masks) != len(flows):
        raise ZsvrLengthError("need one flow and one mask per adjacent frame pair",
                              problem_data={'frames': n, 'flows': len(flows), 'masks': len(masks)})
    h, w = frames.shape[1:3]
    inside = _border_mask(h, w, border)
    values = []
    for t in range(1, n):
        warped = warp(frames[t - 1], flow_array(flows[t - 1]))
        valid = (1.0 - map_array(masks[t - 1])) * inside
        count = float(valid.sum())
        if count == 0.0:
            values.append(0.0)
            continue
        squared = np.sum((frames[t] - warped) ** 2, axis=2)
        values.append(float(np.sum(squared * valid) / count))
    mean = float(np.mean(values)) if values else None
    return values, mean


def scale_e_warp(value):
    return None if value is None else value * E_WARP_SCALE


def interpolation_error(seq, flows_fwd: list, flows_bwd: list, border: int = 0) -> tuple:
    """RMS error (x255) of the midpoint frame synthesised from its two neighbours.

    For triple (t - 1, t, t + 1), ``flows_fwd[t - 1]`` lives on frame t + 1 and
    points into frame t - 1; ``flows_bwd[t - 1]`` lives on frame t - 1 and points
    into frame t + 1. Half of each is used to sample the neighbours at t.
    """
    frames = _frames(seq)
    n = frames.shape[0]
    if n < 3:
        raise ZsvrLengthError("sequence too short for interpolation error", problem_data={'frames': n})
    if len(flows_fwd) != n - 2 or len(flows_bwd) != n - 2:
        raise ZsvrLengthError("need one flow per direction per frame triple",
                              problem_data={'frames': n, 'fwd': len(flows_fwd), 'bwd': len(flows_bwd)})
    h, w, c = frames.shape[1:]
    inside = _border_mask(h, w, border)
    count = float(inside.sum()) * c
    values = []
    for t in range(1, n - 1):
        from_prev = warp(frames[t - 1], 0.5 * flow_array(flows_fwd[t - 1]))
        from_next = warp(frames[t + 1], 0.5 * flow_array(flows_bwd[t - 1]))
        estimate = 0.5 * (from_prev + from_next)
        if count == 0.0:
            values.append(0.0)
            continue
        squared = ((estimate - frames[t]) ** 2) * inside[:, :, None]
        values.append(float(math.sqrt(squared.sum() / count) * E_INTER_SCALE))
    return values, float(np.mean(values))


def build_report(seq, reference=None, e_warp: list = None, e_inter: list = None,
                 metadata: dict = None) -> ZsvrMetricsReport:
    """Assemble a report; quality metrics only when a reference is given."""
    frames = _frames(seq)
    psnr_values, ssim_values = [], []
    if reference is not None:
        ref = _frames(reference)
        if ref.shape != frames.shape:
            raise ZsvrShapeError("reference differs from the sequence",
                                 problem_data={'sequence': frames.shape, 'reference': ref.shape})
        psnr_values = [psnr(frames[t], ref[t]) for t in range(frames.shape[0])]
        ssim_values = [ssim(frames[t], ref[t]) for t in range(frames.shape[0])]
    return ZsvrMetricsReport(psnr=psnr_values, ssim=ssim_values,
                             e_warp=list(e_warp or []), e_inter=list(e_inter or []),
                             metadata=dict(metadata or {}))
