# Optional, for forward declarations in Python 3.7+
from __future__ import annotations

import logging
import math

import numpy as np
from tqdm import tqdm

from .entities.zsvr_hook_set import ZsvrHookSet
from .entities.zsvr_latent_grid import ZsvrLatentGrid
from .entities.zsvr_noise_schedule import ZsvrNoiseSchedule
from .entities.zsvr_token_chunk import ZsvrTokenChunk
from .enums.zsvr_enums import ZsvrBlockKindEnum
from .zsvr_base import ZsvrBaseEntity
from .zsvr_errors import ZsvrIndexError, ZsvrParameterError, ZsvrShapeError
from .zsvr_latent_warp import predict_x0
from .zsvr_token_merge import attend_per_frame
from .zsvr_utilities import box_blur3

logger = logging.getLogger(__name__)

BLOCK_KINDS = (ZsvrBlockKindEnum.DOWN, ZsvrBlockKindEnum.DOWN,
               ZsvrBlockKindEnum.UP, ZsvrBlockKindEnum.UP)

_RMS_EPSILON = 1e-12


def make_schedule(T: int, beta_start: float, beta_end: float) -> ZsvrNoiseSchedule:
    if T < 1:
        raise ZsvrParameterError("T must be >= 1", problem_data={'T': T})
    if not 0.0 < beta_start <= beta_end < 1.0:
        raise ZsvrParameterError("betas must satisfy 0 < beta_start <= beta_end < 1",
                                 problem_data={'beta_start': beta_start, 'beta_end': beta_end})
    return ZsvrNoiseSchedule(np.linspace(beta_start, beta_end, T))


def forward_diffuse(x0, t: int, eps, sched: ZsvrNoiseSchedule):
    if not 0 <= t < sched.T:
        raise ZsvrIndexError("t outside the schedule", problem_data={'t': t, 'T': sched.T})
    x = x0.data if isinstance(x0, ZsvrLatentGrid) else x0
    e = eps.data if isinstance(eps, ZsvrLatentGrid) else eps
    if x.shape != e.shape:
        raise ZsvrShapeError("x0 and eps differ in shape", problem_data={'x0': x.shape, 'eps': e.shape})
    abar = sched.abars[t]
    x_t = math.sqrt(abar) * x + math.sqrt(1.0 - abar) * e
    if isinstance(x0, ZsvrLatentGrid):
        return x0.with_data(x_t, step=int(t))
    return x_t


def make_timesteps(t_start: int, steps: int) -> list:
    """``steps`` descending timesteps from ``t_start`` to 0, evenly strided."""
    if steps < 1 or t_start < 0:
        raise ZsvrParameterError("need steps >= 1 and t_start >= 0",
                                 problem_data={'steps': steps, 't_start': t_start})
    if steps == 1:
        return [int(t_start)]
    timesteps = []
    for value in np.round(np.linspace(t_start, 0, steps)).astype(np.int64):
        if not timesteps or value != timesteps[-1]:
            timesteps.append(int(value))
    return timesteps


def _round_up(value: int, multiple: int) -> int:
    return int(math.ceil(value / multiple) * multiple)


class ZsvrToyDenoiser(ZsvrBaseEntity):
    """Untrained, seeded stand-in for a latent-diffusion UNet.

    Two down blocks and two up blocks, each a token projection, a hookable
    self-attention and a residual add. The clean-latent head reads only the
    attention contributions, RMS-normalized per token, on top of a blurred copy
    of the conditioning latent; the predicted noise follows from it.
    """

    __slots__ = ZsvrBaseEntity.__slots__ + ('_seed',
                                            '_channels',
                                            '_latent_channels',
                                            '_gain',
                                            '_pad_multiple',
                                            '_weights')

    def __init__(self,
                 seed: int,
                 channels: int = 32,
                 latent_channels: int = 3,
                 gain: float = 0.35,
                 pad_multiple: int = 8,
                 name: str = None,
                 description: str = None):
        super().__init__(name=name, description=description,
                         entity_type="ZsvrToyDenoiser")
        if channels < 1 or latent_channels < 1 or pad_multiple < 1:
            raise ZsvrParameterError("channels, latent_channels and pad_multiple must be >= 1")
        self._seed = int(seed)
        self._channels = int(channels)
        self._latent_channels = int(latent_channels)
        self._gain = float(gain)
        self._pad_multiple = int(pad_multiple)
        self._weights = self._init_weights()

    def _init_weights(self) -> dict:
        rng = np.random.default_rng(self._seed)
        C = self._channels
        lc = self._latent_channels

        def dense(fan_in: int, fan_out: int) -> np.ndarray:
            return rng.standard_normal((fan_in, fan_out)) / math.sqrt(fan_in)

        weights = {'in': dense(2 * lc, C), 'time': dense(C, C)}
        for index in range(len(BLOCK_KINDS)):
            for part in ('proj', 'q', 'k', 'v', 'o'):
                weights[f'{index}.{part}'] = dense(C, C)
        weights['out'] = dense(C, lc)
        return weights

    @property
    def seed(self) -> int:
        return self._seed

    @property
    def channels(self) -> int:
        return self._channels

    @property
    def gain(self) -> float:
        return self._gain

    @property
    def weights(self) -> dict:
        return self._weights

    def padded_size(self, h: int, w: int) -> tuple:
        # the grid is pooled once, so it must stay even
        multiple = self._pad_multiple if self._pad_multiple % 2 == 0 else 2 * self._pad_multiple
        return _round_up(h, multiple), _round_up(w, multiple)

    def time_embedding(self, t: int) -> np.ndarray:
        C = self._channels
        half = max(C // 2, 1)
        freqs = np.exp(-math.log(10000.0) * np.arange(half) / half)
        angles = float(t) * freqs
        embedding = np.concatenate([np.sin(angles), np.cos(angles)])[:C]
        if embedding.shape[0] < C:
            embedding = np.pad(embedding, (0, C - embedding.shape[0]))
        return embedding @ self._weights['time']

    def attention_fn(self, index: int):
        wq = self._weights[f'{index}.q']
        wk = self._weights[f'{index}.k']
        wv = self._weights[f'{index}.v']
        wo = self._weights[f'{index}.o']
        scale = 1.0 / math.sqrt(self._channels)

        def attention(tokens: np.ndarray) -> np.ndarray:
            logits = (tokens @ wq) @ (tokens @ wk).T * scale
            logits = logits - logits.max(axis=1, keepdims=True)
            probs = np.exp(logits)
            probs = probs / probs.sum(axis=1, keepdims=True)
            return (probs @ (tokens @ wv)) @ wo

        return attention

    def _block(self, index: int, features: list, content: tuple, hooks: ZsvrHookSet,
               step_index: int, num_steps: int, target_index: int) -> list:
        Hb, Wb, C = features[0].shape
        projection = self._weights[f'{index}.proj']
        tokens = np.stack([feature.reshape(Hb * Wb, C) @ projection for feature in features])
        chunk = ZsvrTokenChunk(tokens, (Hb, Wb), content, target_index)
        attention = self.attention_fn(index)

        if hooks is not None and hooks.attention_active(step_index, num_steps):
            hooks.attention_calls += 1
            result = hooks.attention_hook(BLOCK_KINDS[index], chunk, attention, step_index)
            if not isinstance(result, ZsvrTokenChunk) or result.tokens.shape != tokens.shape:
                raise ZsvrShapeError("attention hook changed the chunk shape",
                                     problem_data={'block': index, 'expected': tokens.shape})
        else:
            result = attend_per_frame(chunk, attention)
        return [result.tokens[b].reshape(Hb, Wb, C) for b in range(len(features))]

    def predict_noise(self, latents: list, t: int, abar_t: float, conds: list = None,
                      hooks: ZsvrHookSet = None, step_index: int = 0, num_steps: int = 1,
                      target_index: int = 0) -> list:
        """Noise prediction for every frame of a batch; frames only meet inside attention hooks."""
        B = len(latents)
        h, w, lc = latents[0].shape
        if lc != self._latent_channels:
            raise ZsvrShapeError("latent channel count differs from the denoiser",
                                 problem_data={'expected': self._latent_channels, 'found': lc})
        if conds is None:
            conds = [np.zeros_like(x) for x in latents]
        H, W = self.padded_size(h, w)
        half_content = ((h + 1) // 2, (w + 1) // 2)
        temb = self.time_embedding(t)

        embedded = []
        for x, cond in zip(latents, conds):
            inp = np.zeros((H, W, 2 * lc))
            inp[:h, :w, :lc] = x
            inp[:h, :w, lc:] = cond
            embedded.append(inp @ self._weights['in'] + temb)

        args = (hooks, step_index, num_steps, target_index)
        a1 = self._block(0, embedded, (h, w), *args)
        h1 = [embedded[b] + a1[b] for b in range(B)]
        pooled = [_pool2(feature) for feature in h1]
        a2 = self._block(1, pooled, half_content, *args)
        h2 = [pooled[b] + a2[b] for b in range(B)]
        a3 = self._block(2, h2, half_content, *args)
        h3 = [h2[b] + a3[b] for b in range(B)]
        lifted = [_unpool2(h3[b]) + h1[b] for b in range(B)]
        a4 = self._block(3, lifted, (h, w), *args)

        sqrt_abar = math.sqrt(abar_t)
        sqrt_one_minus = math.sqrt(1.0 - abar_t)
        noise = []
        for b in range(B):
            detail = (a1[b] + _unpool2(a2[b] + a3[b]) + a4[b])[:h, :w]
            x0_head = box_blur3(conds[b]) + self._gain * np.tanh(_rms_normalize(detail) @ self._weights['out'])
            noise.append((latents[b] - sqrt_abar * x0_head) / sqrt_one_minus)
        return noise


def _rms_normalize(detail: np.ndarray) -> np.ndarray:
    # unit RMS per token keeps W_out @ detail near N(0, 1), inside the linear part of tanh
    rms = np.sqrt(np.mean(detail ** 2, axis=-1, keepdims=True) + _RMS_EPSILON)
    return detail / rms


def _pool2(feature: np.ndarray) -> np.ndarray:
    H, W, C = feature.shape
    return feature.reshape(H // 2, 2, W // 2, 2, C).mean(axis=(1, 3))


def _unpool2(feature: np.ndarray) -> np.ndarray:
    return np.repeat(np.repeat(feature, 2, axis=0), 2, axis=1)


def denoise_step(latents: list,
                 t: int,
                 denoiser: ZsvrToyDenoiser,
                 hooks: ZsvrHookSet,
                 sched: ZsvrNoiseSchedule,
                 t_prev: int = None,
                 conds: list = None,
                 step_index: int = 0,
                 num_steps: int = 1,
                 target_index: int = 0) -> list:
    """One deterministic DDIM step from ``t`` to ``t_prev`` (default ``t - 1``; below 0 means clean)."""
    if not 0 <= t < sched.T:
        raise ZsvrIndexError("t outside the schedule", problem_data={'t': t, 'T': sched.T})
    t_prev = t - 1 if t_prev is None else t_prev
    abar = float(sched.abars[t])
    abar_prev = float(sched.abars[t_prev]) if t_prev >= 0 else 1.0

    x_data = [latent.data for latent in latents]
    eps = denoiser.predict_noise(x_data, t, abar, conds, hooks, step_index, num_steps, target_index)
    x0 = [predict_x0(latent, ZsvrLatentGrid(e, latent.frame_index), abar)
          for latent, e in zip(latents, eps)]

    if hooks is not None and hooks.latent_active(step_index, num_steps):
        hooks.latent_calls += 1
        replaced = hooks.latent_hook(step_index, t, x0)
        if len(replaced) != len(x0) or any(r.shape != o.shape for r, o in zip(replaced, x0)):
            raise ZsvrShapeError("latent hook changed the batch shape",
                                 problem_data={'step': step_index})
        x0 = replaced

    next_step = None if t_prev < 0 else int(t_prev)
    result = []
    for clean, e in zip(x0, eps):
        data = math.sqrt(abar_prev) * clean.data + math.sqrt(1.0 - abar_prev) * e
        result.append(ZsvrLatentGrid(data, frame_index=clean.frame_index, step=next_step))
    return result


def sample(latents: list,
           denoiser: ZsvrToyDenoiser,
           hooks: ZsvrHookSet,
           sched: ZsvrNoiseSchedule,
           steps: int,
           t_start: int = None,
           conds: list = None,
           target_index: int = 0,
           show_progress: bool = False) -> list:
    """Run ``steps`` strided DDIM steps from ``t_start`` (default T - 1) down to a clean latent."""
    t_start = sched.T - 1 if t_start is None else t_start
    if not 0 <= t_start < sched.T:
        raise ZsvrIndexError("t_start outside the schedule", problem_data={'t_start': t_start})
    timesteps = make_timesteps(t_start, steps)
    num_steps = len(timesteps)
    current = list(latents)
    iterator = tqdm(enumerate(timesteps), total=num_steps, desc='DDIM Sampler',
                    disable=not show_progress, leave=False)
    for step_index, t in iterator:
        t_prev = timesteps[step_index + 1] if step_index + 1 < num_steps else -1
        current = denoise_step(current, t, denoiser, hooks, sched, t_prev=t_prev, conds=conds,
                               step_index=step_index, num_steps=num_steps,
                               target_index=target_index)
    logger.debug("sampled %d frames over %d steps", len(current), num_steps)
    return current
