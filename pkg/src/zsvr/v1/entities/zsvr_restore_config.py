# Optional, for forward declarations in Python 3.7+
from __future__ import annotations

import logging

import numpy as np

from ..constants import DEFAULT_SPATIAL_RADIUS, DEFAULT_TAU_OCC
from ..enums.zsvr_enums import ZsvrCorrespondenceEnum
from ..zsvr_base import ZsvrBaseEntity
from ..zsvr_errors import ZsvrConfigurationError
from ..zsvr_run import ErrorLog
from ..zsvr_utilities import is_empty_or_whitespace
from .zsvr_anneal_params import ZsvrAnnealParams
from .zsvr_stage_schedule import ZsvrStageSchedule

logger = logging.getLogger(__name__)

# config file key -> attribute
KEY_MAPPING = {
    "batch_size": "batch_size",
    "steps": "steps",
    "seed": "seed",
    "hlw_until": "hlw_until",
    "hlw.chain": "hlw_chain",
    "tome.i_beg": "tome_i_beg",
    "tome.i_end": "tome_i_end",
    "tome.delta": "tome_delta",
    "tome.r": "tome_r",
    "tome.R": "tome_R",
    "tome.range_beg": "tome_range_beg",
    "tome.range_end": "tome_range_end",
    "tome.down": "tome_down",
    "tome.up": "tome_up",
    "tome.spatial": "tome_spatial",
    "tome.strip_padding": "tome_strip_padding",
    "flow.block": "flow_block",
    "flow.search": "flow_search",
    "flow.tau_occ": "flow_tau_occ",
    "latent_scale": "latent_scale",
    "strength": "strength",
    "schedule.T": "schedule_T",
    "schedule.beta_start": "schedule_beta_start",
    "schedule.beta_end": "schedule_beta_end",
    "denoiser.channels": "denoiser_channels",
    "denoiser.gain": "denoiser_gain",
    "denoiser.pad_multiple": "denoiser_pad_multiple",
}

# attribute -> (kind, default, help)
FIELDS = {
    "batch_size": (int, 8, "frames per batch B"),
    "steps": (int, 50, "sampler steps"),
    "seed": (int, 0, "single seed for weights, keyframes and noise"),
    "hlw_until": (float, 0.2, "latent warping active while step fraction < value"),
    "hlw_chain": (bool, True, "chain keyframes across batches"),
    "tome_i_beg": (int, None, "annealing start step (default 60% of steps)"),
    "tome_i_end": (int, None, "annealing end step (default: steps)"),
    "tome_delta": (float, 1.0, "annealing speed"),
    "tome_r": (float, 0.8, "base merge ratio"),
    "tome_R": (float, DEFAULT_SPATIAL_RADIUS, "spatial radius in token units squared"),
    "tome_range_beg": (int, 0, "first step with token merging"),
    "tome_range_end": (int, None, "step after the last merging step (default: steps; = beg disables)"),
    "tome_down": (ZsvrCorrespondenceEnum, ZsvrCorrespondenceEnum.FLOW, "down-block correspondence (Flow|Cos)"),
    "tome_up": (ZsvrCorrespondenceEnum, ZsvrCorrespondenceEnum.COSINE, "up-block correspondence (Flow|Cos)"),
    "tome_spatial": (bool, True, "weight cosine scores by spatial distance"),
    "tome_strip_padding": (bool, True, "drop padding tokens before merging, restore them after"),
    "flow_block": (int, 5, "block-matching patch size"),
    "flow_search": (int, 6, "block-matching search radius"),
    "flow_tau_occ": (float, DEFAULT_TAU_OCC, "occlusion threshold on the confidence"),
    "latent_scale": (int, 4, "area-downsample factor of the latent encoder"),
    "strength": (float, 0.6, "fraction of the schedule the sampler starts from"),
    "schedule_T": (int, 1000, "diffusion steps of the noise schedule"),
    "schedule_beta_start": (float, 1e-4, "first beta"),
    "schedule_beta_end": (float, 0.02, "last beta"),
    "denoiser_channels": (int, 32, "toy denoiser width"),
    "denoiser_gain": (float, 0.35, "toy denoiser detail amplitude"),
    "denoiser_pad_multiple": (int, 8, "latents are zero-padded to this multiple"),
}

_TRUE = ("1", "true", "yes", "on")
_FALSE = ("0", "false", "no", "off")


def _parse_value(kind, text: str):
    text = text.strip()
    if kind is bool:
        if text.lower() in _TRUE:
            return True
        if text.lower() in _FALSE:
            return False
        raise ValueError(f"not a boolean: {text!r}")
    if kind is int:
        return int(text)
    if kind is float:
        return float(text)
    found = kind.from_attribute_get_enum(text) or kind.from_name_get_enum(text.upper())
    if found is None:
        raise ValueError(f"not a {kind.__name__}: {text!r}")
    return found


def describe_keys() -> str:
    """One line per config key, used by the CLI help."""
    lines = []
    for key, attr in KEY_MAPPING.items():
        kind, default, text = FIELDS[attr]
        shown = default.value if isinstance(default, ZsvrCorrespondenceEnum) else default
        lines.append(f"  {key:<22} {text} [default: {'auto' if shown is None else shown}]")
    return "\n".join(lines)


class ZsvrRestoreConfig(ZsvrBaseEntity):
    """Every knob of a restore run; ``validate`` checks them all before any compute."""

    __slots__ = ZsvrBaseEntity.__slots__ + tuple('_' + attr for attr in FIELDS)

    def __init__(self, name: str = None, description: str = None, **kwargs):
        super().__init__(name=name, description=description,
                         entity_type="ZsvrRestoreConfig")
        unknown = [key for key in kwargs if key not in FIELDS]
        if unknown:
            raise ZsvrConfigurationError("unknown configuration keys",
                                         problem_data={'keys': unknown})
        self.set_attributes(**kwargs)

    def set_attributes(self, **kwargs):
        for attr_name, (kind, default, _) in FIELDS.items():
            value = kwargs.get(attr_name, default)
            setattr(self, attr_name, value)

    def __setattr__(self, attr_name, value):
        if attr_name in FIELDS:
            kind = FIELDS[attr_name][0]
            if value is not None:
                if kind is float and isinstance(value, (int, np.integer, np.floating)) and not isinstance(value, bool):
                    value = float(value)
                if kind is int and isinstance(value, np.integer):
                    value = int(value)
                if kind is bool and isinstance(value, np.bool_):
                    value = bool(value)
                if not isinstance(value, kind) or (kind is int and isinstance(value, bool)):
                    raise TypeError(
                        f"'{attr_name}' should be of type {kind.__name__}")
            elif FIELDS[attr_name][1] is not None:
                raise TypeError(f"'{attr_name}' should not be None")
            object.__setattr__(self, '_' + attr_name, value)
            return
        object.__setattr__(self, attr_name, value)

    def __getattr__(self, attr_name):
        if attr_name in FIELDS:
            return object.__getattribute__(self, '_' + attr_name)
        raise AttributeError(attr_name)

    # derived values

    @property
    def anneal_i_beg(self) -> int:
        return self._anneal_bounds(self.steps)[0]

    @property
    def anneal_i_end(self) -> int:
        return self._anneal_bounds(self.steps)[1]

    @property
    def range_end(self) -> int:
        return self.tome_range_end if self.tome_range_end is not None else self.steps

    @property
    def spatial_radius(self):
        return self.tome_R if self.tome_spatial else None

    def _anneal_bounds(self, num_steps: int) -> tuple:
        i_beg = self.tome_i_beg if self.tome_i_beg is not None else min(int(round(0.6 * num_steps)), num_steps - 1)
        i_end = self.tome_i_end if self.tome_i_end is not None else max(num_steps, i_beg + 1)
        return i_beg, i_end

    def anneal_params(self, num_steps: int = None) -> ZsvrAnnealParams:
        i_beg, i_end = self._anneal_bounds(self.steps if num_steps is None else num_steps)
        return ZsvrAnnealParams(r=self.tome_r, delta=self.tome_delta, i_beg=i_beg, i_end=i_end)

    def stage_schedule(self, num_steps: int = None) -> ZsvrStageSchedule:
        """Schedule over ``num_steps`` sampler steps (default ``steps``); the tome range is clipped to it."""
        n = self.steps if num_steps is None else int(num_steps)
        return ZsvrStageSchedule(hlw_until=self.hlw_until,
                                 tome_range=(min(self.tome_range_beg, n), min(self.range_end, n)),
                                 anneal=self.anneal_params(n),
                                 num_steps=n,
                                 down_mode=self.tome_down,
                                 up_mode=self.tome_up,
                                 spatial=self.tome_spatial)

    def validate(self) -> None:
        problems = []

        def need(condition: bool, message: str):
            if not condition:
                problems.append(message)

        need(self.batch_size >= 1, "batch_size must be >= 1")
        need(self.steps >= 1, "steps must be >= 1")
        need(self.seed >= 0, "seed must be >= 0")
        need(0.0 <= self.hlw_until <= 1.0, "hlw_until must lie in [0, 1]")
        need(0.0 <= self.tome_r <= 1.0, "tome.r must lie in [0, 1]")
        need(self.tome_delta > 0.0, "tome.delta must be > 0")
        need(self.tome_R > 0.0, "tome.R must be > 0")
        need(self.anneal_i_beg < self.anneal_i_end, "tome.i_beg must be < tome.i_end")
        need(0 <= self.tome_range_beg <= self.range_end <= self.steps,
             "tome range must satisfy 0 <= range_beg <= range_end <= steps")
        need(self.flow_block >= 1, "flow.block must be >= 1")
        need(self.flow_search >= 0, "flow.search must be >= 0")
        need(0.0 < self.flow_tau_occ <= 1.0, "flow.tau_occ must lie in (0, 1]")
        need(self.latent_scale >= 1, "latent_scale must be >= 1")
        need(0.0 < self.strength <= 1.0, "strength must lie in (0, 1]")
        need(self.schedule_T >= 1, "schedule.T must be >= 1")
        need(0.0 < self.schedule_beta_start <= self.schedule_beta_end < 1.0,
             "schedule betas must satisfy 0 < beta_start <= beta_end < 1")
        need(self.steps <= self.schedule_T, "steps must not exceed schedule.T")
        need(self.denoiser_channels >= 1, "denoiser.channels must be >= 1")
        need(self.denoiser_gain >= 0.0, "denoiser.gain must be >= 0")
        need(self.denoiser_pad_multiple >= 1, "denoiser.pad_multiple must be >= 1")

        if problems:
            raise ZsvrConfigurationError("invalid configuration",
                                         problem_data={'problems': problems})

    def replace(self, **overrides) -> ZsvrRestoreConfig:
        values = {attr: getattr(self, attr) for attr in FIELDS}
        for key, value in overrides.items():
            if key not in FIELDS:
                raise ZsvrConfigurationError("unknown configuration key",
                                             problem_data={'key': key})
            values[key] = value
        return ZsvrRestoreConfig(name=self.name, description=self.description, **values)

    def to_dict(self) -> dict:
        result = {}
        for key, attr in KEY_MAPPING.items():
            value = getattr(self, attr)
            result[key] = value.value if isinstance(value, ZsvrCorrespondenceEnum) else value
        return result

    @classmethod
    def from_dict(cls, obj: dict) -> tuple:
        """Build from a dict keyed by config keys (``tome.r``) or attribute names.

        String values are parsed. Returns ``(instance or None, error_logs)``.
        """
        instance = None
        error_logs: list[ErrorLog] = []
        processed_data: dict = {}

        for index, (key, raw) in enumerate(obj.items()):
            attr = KEY_MAPPING.get(key, key if key in FIELDS else None)
            if attr is None:
                error_logs.append(ErrorLog("ZsvrRestoreConfig", index,
                                           f"Unknown key: {key}", raw))
                continue
            kind = FIELDS[attr][0]
            try:
                processed_data[attr] = _parse_value(kind, raw) if isinstance(raw, str) else raw
            except ValueError as e:
                error_logs.append(ErrorLog("ZsvrRestoreConfig", index,
                                           f"Invalid value for {key}: {e}", raw))

        if error_logs:
            return None, error_logs

        try:
            instance = cls(**processed_data)
        except (TypeError, ZsvrConfigurationError) as e:
            error_logs.append(ErrorLog("ZsvrRestoreConfig", -1,
                                       f"Error instantiating ZsvrRestoreConfig: {e}", obj))
            instance = None

        return instance, error_logs

    @classmethod
    def parse_config_text(cls, text: str) -> tuple:
        """``key = value`` lines to a dict; ``#`` starts a comment line."""
        entries = {}
        error_logs: list[ErrorLog] = []
        for line_number, line in enumerate(text.splitlines(), start=1):
            stripped = line.strip()
            if is_empty_or_whitespace(stripped) or stripped.startswith('#'):
                continue
            if '=' not in stripped:
                error_logs.append(ErrorLog("ConfigLine", line_number,
                                           "Expected 'key = value'", stripped))
                continue
            key, value = (part.strip() for part in stripped.split('=', 1))
            if is_empty_or_whitespace(key) or is_empty_or_whitespace(value):
                error_logs.append(ErrorLog("ConfigLine", line_number,
                                           "Empty key or value", stripped))
                continue
            if key in entries:
                error_logs.append(ErrorLog("ConfigLine", line_number,
                                           f"Duplicate key: {key}", stripped))
                continue
            entries[key] = value
        return entries, error_logs

    @classmethod
    def from_config_file(cls, path: str) -> ZsvrRestoreConfig:
        with open(path, 'r', encoding='utf-8') as f:
            text = f.read()
        entries, error_logs = cls.parse_config_text(text)
        instance = None
        if not error_logs:
            instance, error_logs = cls.from_dict(entries)
        if error_logs or instance is None:
            raise ZsvrConfigurationError(
                f"invalid configuration file: {path}",
                problem_data={'errors': [log.to_dict() for log in error_logs]})
        instance.validate()
        logger.info("loaded configuration from %s", path)
        return instance
