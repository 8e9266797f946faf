# Optional, for forward declarations in Python 3.7+
from __future__ import annotations

import logging

import numpy as np

from .constants import MAX_SQUARED_RESIDUAL
from .entities.zsvr_flow_field import ZsvrFlowField
from .entities.zsvr_flow_maps import ZsvrConfidenceMap, ZsvrOcclusionMask
from .zsvr_errors import ZsvrParameterError, ZsvrShapeError
from .zsvr_utilities import bilinear_resize, nearest_resize

logger = logging.getLogger(__name__)


def flow_array(flow) -> np.ndarray:
    if isinstance(flow, ZsvrFlowField):
        return flow.data
    if isinstance(flow, np.ndarray) and flow.ndim == 3 and flow.shape[-1] == 2:
        return flow.astype(np.float64, copy=False)
    raise TypeError("flow should be a ZsvrFlowField or an (h, w, 2) array")


def map_array(value) -> np.ndarray:
    if isinstance(value, (ZsvrOcclusionMask, ZsvrConfidenceMap)):
        return value.data
    if isinstance(value, np.ndarray) and value.ndim == 2:
        return value.astype(np.float64, copy=False)
    raise TypeError("expected a mask/confidence entity or an (h, w) array")


def _as_channels(frame: np.ndarray) -> np.ndarray:
    frame = np.asarray(frame, dtype=np.float64)
    if frame.ndim == 2:
        return frame[:, :, None]
    if frame.ndim != 3:
        raise ZsvrShapeError("frames should be (h, w) or (h, w, c)", problem_data={'shape': frame.shape})
    return frame


def estimate_flow(src: np.ndarray, dst: np.ndarray, block: int = 5, search: int = 6) -> ZsvrFlowField:
    """Exhaustive block matching: ``src(p) ~ dst(p + flow(p))``.

    Each pixel takes the displacement within +-search whose block x block patch
    SSD is smallest. Candidates are visited by increasing magnitude, then
    raster order (dy, dx), and only a strictly smaller SSD replaces the current
    best, so ties resolve toward zero motion. Borders are edge-clamped.
    """
    src = _as_channels(src)
    dst = _as_channels(dst)
    if src.shape != dst.shape:
        raise ZsvrShapeError("estimate_flow needs frames of equal shape",
                             problem_data={'src': src.shape, 'dst': dst.shape})
    if block < 1 or search < 0:
        raise ZsvrParameterError("block must be >= 1 and search >= 0",
                                 problem_data={'block': block, 'search': search})

    h, w = src.shape[:2]
    reach_y = min(search, h - 1)
    reach_x = min(search, w - 1)
    before = block // 2
    after = block - 1 - before

    src_pad = np.pad(src, ((before, after), (before, after), (0, 0)), mode='edge')
    dst_pad = np.pad(dst, ((before + reach_y, after + reach_y),
                           (before + reach_x, after + reach_x), (0, 0)), mode='edge')
    ph, pw = h + block - 1, w + block - 1

    candidates = sorted(((dy * dy + dx * dx, dy, dx)
                         for dy in range(-reach_y, reach_y + 1)
                         for dx in range(-reach_x, reach_x + 1)))

    best_cost = None
    best = np.zeros((h, w, 2))
    for _, dy, dx in candidates:
        shifted = dst_pad[reach_y + dy:reach_y + dy + ph, reach_x + dx:reach_x + dx + pw]
        pixel_cost = np.sum((src_pad - shifted) ** 2, axis=2)
        cost = np.zeros((h, w))
        for oy in range(block):
            for ox in range(block):
                cost += pixel_cost[oy:oy + h, ox:ox + w]
        if best_cost is None:
            best_cost = cost
            best[..., 0] = dx
            best[..., 1] = dy
            continue
        better = cost < best_cost
        best_cost = np.where(better, cost, best_cost)
        best[..., 0] = np.where(better, dx, best[..., 0])
        best[..., 1] = np.where(better, dy, best[..., 1])

    logger.debug("block matching %dx%d, %d candidates", h, w, len(candidates))
    return ZsvrFlowField(best)


def bilinear_sample(grid: np.ndarray, x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Sample ``grid`` (h, w[, c]) at real coordinates, clamped to the valid rectangle."""
    h, w = grid.shape[:2]
    x = np.clip(x, 0.0, w - 1)
    y = np.clip(y, 0.0, h - 1)
    x0 = np.floor(x).astype(np.int64)
    y0 = np.floor(y).astype(np.int64)
    x1 = np.minimum(x0 + 1, w - 1)
    y1 = np.minimum(y0 + 1, h - 1)
    wx = x - x0
    wy = y - y0
    if grid.ndim == 3:
        wx = wx[..., None]
        wy = wy[..., None]
    top = grid[y0, x0] * (1.0 - wx) + grid[y0, x1] * wx
    bottom = grid[y1, x0] * (1.0 - wx) + grid[y1, x1] * wx
    return top * (1.0 - wy) + bottom * wy


def _pixel_grid(h: int, w: int) -> tuple:
    ys, xs = np.mgrid[0:h, 0:w]
    return xs.astype(np.float64), ys.astype(np.float64)


def warp(grid: np.ndarray, flow) -> np.ndarray:
    """Backward warp: ``out(p) = grid(p + flow(p))`` with bilinear sampling."""
    data = flow_array(flow)
    grid = np.asarray(grid, dtype=np.float64)
    if grid.shape[:2] != data.shape[:2]:
        raise ZsvrShapeError("flow resolution differs from the grid",
                             problem_data={'grid': grid.shape[:2], 'flow': data.shape[:2]})
    xs, ys = _pixel_grid(*data.shape[:2])
    return bilinear_sample(grid, xs + data[..., 0], ys + data[..., 1])


def fb_residual(f_fwd, f_bwd) -> np.ndarray:
    fwd = flow_array(f_fwd)
    bwd = flow_array(f_bwd)
    if fwd.shape != bwd.shape:
        raise ZsvrShapeError("forward and backward flows differ in resolution",
                             problem_data={'fwd': fwd.shape[:2], 'bwd': bwd.shape[:2]})
    xs, ys = _pixel_grid(*fwd.shape[:2])
    return fwd + bilinear_sample(bwd, xs + fwd[..., 0], ys + fwd[..., 1])


def fb_confidence(f_fwd, f_bwd) -> ZsvrConfidenceMap:
    residual = fb_residual(f_fwd, f_bwd)
    squared = np.minimum(np.sum(residual ** 2, axis=2), MAX_SQUARED_RESIDUAL)
    return ZsvrConfidenceMap(np.exp(-squared))


def occlusion_mask(f_fwd, f_bwd, tau_occ: float) -> ZsvrOcclusionMask:
    """1 where the forward-backward confidence falls below ``tau_occ``."""
    if not 0.0 < tau_occ <= 1.0:
        raise ZsvrParameterError("tau_occ must lie in (0, 1]", problem_data={'tau_occ': tau_occ})
    confidence = fb_confidence(f_fwd, f_bwd).data
    return ZsvrOcclusionMask((confidence < tau_occ).astype(np.float64))


def resample_flow(flow, h2: int, w2: int) -> ZsvrFlowField:
    data = flow_array(flow)
    if h2 < 1 or w2 < 1:
        raise ZsvrParameterError("target resolution must be at least 1x1")
    h, w = data.shape[:2]
    if (h, w) == (h2, w2):
        return ZsvrFlowField(data.copy())
    resized = bilinear_resize(data, h2, w2)
    resized[..., 0] *= w2 / w
    resized[..., 1] *= h2 / h
    return ZsvrFlowField(resized)


def resample_mask(mask, h2: int, w2: int) -> ZsvrOcclusionMask:
    data = map_array(mask)
    if h2 < 1 or w2 < 1:
        raise ZsvrParameterError("target resolution must be at least 1x1")
    return ZsvrOcclusionMask(nearest_resize(data[:, :, None], h2, w2)[:, :, 0].copy())


def resample_map(confidence, h2: int, w2: int) -> ZsvrConfidenceMap:
    data = map_array(confidence)
    if h2 < 1 or w2 < 1:
        raise ZsvrParameterError("target resolution must be at least 1x1")
    resized = bilinear_resize(data[:, :, None], h2, w2)[:, :, 0]
    return ZsvrConfidenceMap(np.clip(resized, np.finfo(np.float64).tiny, 1.0))
