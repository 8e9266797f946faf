# Optional, for forward declarations in Python 3.7+
from __future__ import annotations

import logging
import math

import numpy as np

from .entities.zsvr_frame_sequence import ZsvrFrameSequence
from .zsvr_errors import ZsvrParameterError
from .zsvr_utilities import area_downsample, bilinear_resize

logger = logging.getLogger(__name__)


class ZsvrTexture():
    """A smooth colour texture defined everywhere on the plane, as a sum of sinusoids."""

    def __init__(self, seed: int, components: int = 6, period: float = 12.0):
        rng = np.random.default_rng([seed, 0])
        angles = rng.uniform(0.0, 2.0 * math.pi, components)
        lengths = rng.uniform(0.6, 1.4, components) * (2.0 * math.pi / period)
        self.wave = np.stack([np.cos(angles) * lengths, np.sin(angles) * lengths], axis=1)
        self.phase = rng.uniform(0.0, 2.0 * math.pi, (components, 3))
        self.amplitude = rng.uniform(0.5, 1.0, (components, 3))
        self.amplitude /= self.amplitude.sum(axis=0, keepdims=True)

    def __call__(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        angle = x[..., None] * self.wave[:, 0] + y[..., None] * self.wave[:, 1]
        value = np.zeros(x.shape + (3,))
        for k in range(self.wave.shape[0]):
            value += self.amplitude[k] * np.sin(angle[..., k, None] + self.phase[k])
        return 0.5 + 0.42 * value


def synthesize_video(num_frames: int = 24,
                     size: int = 48,
                     seed: int = 0,
                     velocity: tuple = (1.0, 0.5),
                     angular: float = 0.01) -> ZsvrFrameSequence:
    """Texture translating by ``velocity`` px/frame while rotating ``angular`` rad/frame about the centre."""
    if num_frames < 1 or size < 1:
        raise ZsvrParameterError("need at least one frame of at least 1x1 pixels")
    texture = ZsvrTexture(seed)
    ys, xs = np.mgrid[0:size, 0:size].astype(np.float64)
    centre = (size - 1) / 2.0
    frames = []
    for t in range(num_frames):
        theta = angular * t
        dx = xs - centre - velocity[0] * t
        dy = ys - centre - velocity[1] * t
        u = math.cos(theta) * dx + math.sin(theta) * dy
        v = -math.sin(theta) * dx + math.cos(theta) * dy
        frames.append(np.clip(texture(u, v), 0.0, 1.0))
    return ZsvrFrameSequence(frames, name=f"synthetic-{seed}")


def degrade(seq: ZsvrFrameSequence, scale: int = 4, noise_sigma: float = 0.05, seed: int = 0) -> ZsvrFrameSequence:
    """Downsample by ``scale``, add per-frame Gaussian noise, clip, and bring back to full size."""
    if scale < 1 or noise_sigma < 0.0:
        raise ZsvrParameterError("need scale >= 1 and noise_sigma >= 0",
                                 problem_data={'scale': scale, 'noise_sigma': noise_sigma})
    h, w = seq.height, seq.width
    frames = []
    for t in range(seq.num_frames):
        small = area_downsample(seq[t], scale)
        rng = np.random.default_rng([seed, 1, t])
        noisy = np.clip(small + noise_sigma * rng.standard_normal(small.shape), 0.0, 1.0)
        frames.append(np.clip(bilinear_resize(noisy, h, w), 0.0, 1.0))
    logger.debug("degraded %d frames (x%d, sigma=%s)", len(frames), scale, noise_sigma)
    return ZsvrFrameSequence(frames, frame_rate=seq.frame_rate, name=f"{seq.name or 'video'}-lq")
