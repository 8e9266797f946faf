import math

import numpy as np
import pytest

from src.zsvr.v1.entities.zsvr_flow_field import ZsvrFlowField
from src.zsvr.v1.entities.zsvr_flow_maps import ZsvrOcclusionMask
from src.zsvr.v1.entities.zsvr_metrics_report import ZsvrMetricsReport
from src.zsvr.v1.zsvr_errors import *
from src.zsvr.v1.zsvr_metrics import build_report, interpolation_error, psnr, scale_e_warp, ssim, warping_error


def _constant(value: float, h: int = 8, w: int = 8) -> np.ndarray:
    return np.full((h, w, 3), value)


def _shift_flow(h: int, w: int, u: float) -> ZsvrFlowField:
    data = np.zeros((h, w, 2))
    data[..., 0] = u
    return ZsvrFlowField(data)


def test_zsvr_psnr_examples():
    assert psnr(_constant(0.0), _constant(0.1)) == pytest.approx(20.0)
    assert psnr(_constant(0.3), _constant(0.3)) == math.inf
    with pytest.raises(ZsvrShapeError):
        psnr(_constant(0.0), _constant(0.0, 4, 4))


def test_zsvr_ssim_examples():
    rng = np.random.default_rng(0)
    frame = rng.random((16, 16, 3))
    assert ssim(frame, frame) == pytest.approx(1.0)

    c1, c2 = 0.01 ** 2, 0.03 ** 2
    expected = (2 * 0.2 * 0.4 + c1) / (0.2 ** 2 + 0.4 ** 2 + c1)
    assert ssim(_constant(0.2), _constant(0.4)) == pytest.approx(expected)

    # a 3x3 frame is a single window
    assert ssim(_constant(0.2, 3, 3), _constant(0.4, 3, 3)) == pytest.approx(expected)
    assert ssim(frame, 1.0 - frame) < 0.5


def test_zsvr_warping_error_constant_frames():
    frames = [_constant(0.2), _constant(0.5)]
    flows = [ZsvrFlowField.zeros(8, 8)]

    values, mean = warping_error(frames, flows, [ZsvrOcclusionMask(np.zeros((8, 8)))])
    assert values == pytest.approx([3 * 0.3 ** 2])
    assert mean == pytest.approx(0.27)

    values, _ = warping_error(frames, flows, [ZsvrOcclusionMask(np.ones((8, 8)))])
    assert values == [0.0]

    values, _ = warping_error(frames, flows, [np.zeros((8, 8))], border=4)
    assert values == [0.0]


def test_zsvr_warping_error_translation_is_zero_inside():
    rng = np.random.default_rng(1)
    first = rng.random((10, 12, 3))
    # second(p) = first(p - (2, 0))
    second = np.roll(first, 2, axis=1)

    values, _ = warping_error([first, second], [_shift_flow(10, 12, -2.0)], [np.zeros((10, 12))], border=2)

    assert values == [0.0]


def test_zsvr_warping_error_single_frame_and_lengths():
    values, mean = warping_error([_constant(0.5)], [], [])
    assert values == []
    assert mean is None

    with pytest.raises(ZsvrLengthError):
        warping_error([_constant(0.1), _constant(0.2)], [], [])
    with pytest.raises(ZsvrLengthError):
        warping_error([_constant(0.1), _constant(0.2)], [ZsvrFlowField.zeros(8, 8)], [])


def test_zsvr_scale_e_warp():
    assert scale_e_warp(0.002) == pytest.approx(2.0)
    assert scale_e_warp(None) is None


def test_zsvr_interpolation_error_examples():
    flows = [ZsvrFlowField.zeros(8, 8)]

    values, mean = interpolation_error([_constant(0.0), _constant(0.5), _constant(1.0)], flows, flows)
    assert values == [0.0]
    assert mean == 0.0

    values, _ = interpolation_error([_constant(0.0), _constant(0.6), _constant(1.0)], flows, flows)
    assert values == pytest.approx([0.1 * 255.0])


def test_zsvr_interpolation_error_uses_half_flows():
    ramp = np.tile(np.arange(12, dtype=np.float64)[None, :, None] / 20.0, (6, 1, 3))
    prev = ramp
    mid = np.roll(ramp, 1, axis=1)
    nxt = np.roll(ramp, 2, axis=1)
    # fwd lives on t+1 pointing into t-1, bwd lives on t-1 pointing into t+1
    fwd = [_shift_flow(6, 12, -2.0)]
    bwd = [_shift_flow(6, 12, 2.0)]

    values, _ = interpolation_error([prev, mid, nxt], fwd, bwd, border=3)

    assert values == pytest.approx([0.0], abs=1e-12)


def test_zsvr_interpolation_error_too_short():
    with pytest.raises(ZsvrLengthError) as excinfo:
        interpolation_error([_constant(0.0), _constant(1.0)], [], [])
    assert "too short" in str(excinfo.value)
    with pytest.raises(ZsvrLengthError):
        interpolation_error([_constant(0.0)] * 4, [ZsvrFlowField.zeros(8, 8)], [ZsvrFlowField.zeros(8, 8)])


def test_zsvr_build_report():
    frames = [_constant(0.2), _constant(0.4)]
    report = build_report(frames, frames, e_warp=[0.5], metadata={'run': 'x'})

    assert isinstance(report, ZsvrMetricsReport)
    assert report.psnr == [math.inf, math.inf]
    assert report.ssim == pytest.approx([1.0, 1.0])
    assert report.e_warp == [0.5]
    assert report.e_inter == []
    assert report.metadata == {'run': 'x'}

    bare = build_report(frames)
    assert bare.psnr == []
    assert bare.psnr_mean is None

    with pytest.raises(ZsvrShapeError):
        build_report(frames, [_constant(0.2, 4, 4)] * 2)


def _bilinear_oracle(grid, x, y):
    h, w = grid.shape[:2]
    x = min(max(x, 0.0), w - 1)
    y = min(max(y, 0.0), h - 1)
    x0, y0 = int(math.floor(x)), int(math.floor(y))
    x1, y1 = min(x0 + 1, w - 1), min(y0 + 1, h - 1)
    ax, ay = x - x0, y - y0
    return ((grid[y0, x0] * (1 - ax) + grid[y0, x1] * ax) * (1 - ay)
            + (grid[y1, x0] * (1 - ax) + grid[y1, x1] * ax) * ay)


def _random_flows(rng, count: int, h: int, w: int) -> list:
    return [ZsvrFlowField(np.stack([rng.uniform(-2, 2, (h, w)), rng.uniform(-2, 2, (h, w))], axis=2))
            for _ in range(count)]


def _inside(y: int, x: int, h: int, w: int, border: int) -> bool:
    return border <= y < h - border and border <= x < w - border


def test_zsvr_warping_error_matches_scalar_oracle():
    rng = np.random.default_rng(41)
    for _ in range(50):
        n = int(rng.integers(2, 5))
        h, w = (int(v) for v in rng.integers(2, 7, size=2))
        border = int(rng.integers(0, 2))
        frames = rng.random((n, h, w, 3))
        flows = _random_flows(rng, n - 1, h, w)
        masks = [ZsvrOcclusionMask((rng.random((h, w)) < 0.3).astype(np.float64)) for _ in range(n - 1)]

        values, mean = warping_error(frames, flows, masks, border)

        expected = []
        for t in range(1, n):
            total, count = 0.0, 0
            for y in range(h):
                for x in range(w):
                    if masks[t - 1].data[y, x] == 1.0 or not _inside(y, x, h, w, border):
                        continue
                    u, v = flows[t - 1].data[y, x]
                    diff = frames[t, y, x] - _bilinear_oracle(frames[t - 1], x + u, y + v)
                    total += float(diff @ diff)
                    count += 1
            expected.append(total / count if count else 0.0)
        assert values == pytest.approx(expected, abs=1e-6)
        assert mean == pytest.approx(sum(expected) / len(expected), abs=1e-6)


def test_zsvr_interpolation_error_matches_scalar_oracle():
    rng = np.random.default_rng(42)
    for _ in range(50):
        n = int(rng.integers(3, 5))
        h, w = (int(v) for v in rng.integers(2, 7, size=2))
        border = int(rng.integers(0, 2))
        frames = rng.random((n, h, w, 3))
        fwd = _random_flows(rng, n - 2, h, w)
        bwd = _random_flows(rng, n - 2, h, w)

        values, _ = interpolation_error(frames, fwd, bwd, border)

        expected = []
        for t in range(1, n - 1):
            total, count = 0.0, 0
            for y in range(h):
                for x in range(w):
                    if not _inside(y, x, h, w, border):
                        continue
                    f = fwd[t - 1].data[y, x]
                    b = bwd[t - 1].data[y, x]
                    from_prev = _bilinear_oracle(frames[t - 1], x + 0.5 * f[0], y + 0.5 * f[1])
                    from_next = _bilinear_oracle(frames[t + 1], x + 0.5 * b[0], y + 0.5 * b[1])
                    diff = 0.5 * (from_prev + from_next) - frames[t, y, x]
                    total += float(diff @ diff)
                    count += 3
            expected.append(math.sqrt(total / count) * 255.0 if count else 0.0)
        assert values == pytest.approx(expected, abs=1e-6)


def test_zsvr_metrics_degrade_with_noise_amplitude():
    rng = np.random.default_rng(43)
    clean = np.full((4, 8, 8, 3), 0.5)
    pattern = rng.uniform(-1.0, 1.0, clean.shape)
    zero_flows = [ZsvrFlowField.zeros(8, 8) for _ in range(3)]
    no_occlusion = [ZsvrOcclusionMask(np.zeros((8, 8))) for _ in range(3)]

    rows = []
    for amplitude in (0.02, 0.05, 0.1, 0.2):
        noisy = clean + amplitude * pattern
        rows.append((warping_error(noisy, zero_flows, no_occlusion)[1],
                     interpolation_error(noisy, zero_flows[:2], zero_flows[:2])[1],
                     psnr(noisy[0], clean[0]),
                     ssim(noisy[0], clean[0])))

    for weaker, stronger in zip(rows, rows[1:]):
        assert stronger[0] > weaker[0]
        assert stronger[1] > weaker[1]
        assert stronger[2] < weaker[2]
        assert stronger[3] < weaker[3]
