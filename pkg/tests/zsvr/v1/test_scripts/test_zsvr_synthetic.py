import numpy as np
import pytest

from src.zsvr.v1.entities.zsvr_frame_sequence import ZsvrFrameSequence
from src.zsvr.v1.zsvr_errors import *
from src.zsvr.v1.zsvr_flow import estimate_flow
from src.zsvr.v1.zsvr_synthetic import ZsvrTexture, degrade, synthesize_video


def test_zsvr_synthesize_video_shape_and_range():
    seq = synthesize_video(num_frames=5, size=20, seed=1)

    assert isinstance(seq, ZsvrFrameSequence)
    assert seq.frames.shape == (5, 20, 20, 3)
    assert seq.frames.min() >= 0.0
    assert seq.frames.max() <= 1.0
    assert seq.frames.std() > 0.05


def test_zsvr_synthesize_video_is_seeded():
    a = synthesize_video(num_frames=3, size=12, seed=4)
    b = synthesize_video(num_frames=3, size=12, seed=4)
    c = synthesize_video(num_frames=3, size=12, seed=5)
    assert np.array_equal(a.frames, b.frames)
    assert not np.array_equal(a.frames, c.frames)


def test_zsvr_synthesize_video_pure_translation():
    seq = synthesize_video(num_frames=2, size=24, seed=2, velocity=(2.0, 0.0), angular=0.0)
    # frame 1 is frame 0 moved two pixels right
    assert np.allclose(seq[1][:, 2:], seq[0][:, :-2], atol=1e-12)

    flow = estimate_flow(seq[1], seq[0], block=5, search=3)
    assert np.all(flow.data[4:20, 6:20, 0] == -2.0)
    assert np.all(flow.data[4:20, 6:20, 1] == 0.0)


def test_zsvr_texture_is_smooth():
    texture = ZsvrTexture(seed=0)
    ys, xs = np.mgrid[0:10, 0:10].astype(np.float64)
    values = texture(xs, ys)
    assert values.shape == (10, 10, 3)
    assert np.max(np.abs(np.diff(values, axis=1))) < 0.5


def test_zsvr_degrade():
    hq = synthesize_video(num_frames=3, size=16, seed=0)
    lq = degrade(hq, scale=4, noise_sigma=0.05, seed=0)

    assert lq.frames.shape == hq.frames.shape
    assert lq.frames.min() >= 0.0
    assert lq.frames.max() <= 1.0
    assert not np.array_equal(lq.frames, hq.frames)
    assert np.array_equal(lq.frames, degrade(hq, scale=4, noise_sigma=0.05, seed=0).frames)
    assert not np.array_equal(lq[0], lq[1])


def test_zsvr_degrade_without_noise_is_blur_only():
    flat = ZsvrFrameSequence([np.full((8, 8, 3), 0.3)] * 2)
    lq = degrade(flat, scale=2, noise_sigma=0.0)
    assert np.allclose(lq.frames, 0.3)


def test_zsvr_synthetic_errors():
    with pytest.raises(ZsvrParameterError):
        synthesize_video(num_frames=0)
    with pytest.raises(ZsvrParameterError):
        degrade(synthesize_video(num_frames=1, size=8), scale=0)
