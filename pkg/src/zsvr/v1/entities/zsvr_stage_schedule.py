# Optional, for forward declarations in Python 3.7+
from __future__ import annotations

from ..enums.zsvr_enums import ZsvrBlockKindEnum, ZsvrCorrespondenceEnum
from ..zsvr_base import ZsvrBaseEntity
from ..zsvr_errors import ZsvrConfigurationError
from .zsvr_anneal_params import ZsvrAnnealParams


class ZsvrStageSchedule(ZsvrBaseEntity):
    """Which mechanism fires at which sampler step.

    Latent warping is active while ``step_index / num_steps < hlw_until``;
    token merging while ``tome_range[0] <= step_index < tome_range[1]``.
    """

    __slots__ = ZsvrBaseEntity.__slots__ + ('_hlw_until',
                                            '_tome_range',
                                            '_anneal',
                                            '_down_mode',
                                            '_up_mode',
                                            '_spatial',
                                            '_num_steps')

    def __init__(self,
                 hlw_until: float,
                 tome_range: tuple,
                 anneal: ZsvrAnnealParams,
                 num_steps: int,
                 down_mode: ZsvrCorrespondenceEnum = ZsvrCorrespondenceEnum.FLOW,
                 up_mode: ZsvrCorrespondenceEnum = ZsvrCorrespondenceEnum.COSINE,
                 spatial: bool = True,
                 name: str = None,
                 description: str = None):
        super().__init__(name=name, description=description,
                         entity_type="ZsvrStageSchedule")
        if not 0.0 <= hlw_until <= 1.0:
            raise ZsvrConfigurationError("hlw_until must lie in [0, 1]",
                                         problem_data={'hlw_until': hlw_until})
        beg, end = (int(v) for v in tome_range)
        if not 0 <= beg <= end <= num_steps:
            raise ZsvrConfigurationError("tome range must satisfy 0 <= beg <= end <= steps",
                                         problem_data={'tome_range': (beg, end), 'steps': num_steps})
        if not isinstance(anneal, ZsvrAnnealParams):
            raise TypeError("'anneal' should be a ZsvrAnnealParams")
        if not isinstance(down_mode, ZsvrCorrespondenceEnum) or not isinstance(up_mode, ZsvrCorrespondenceEnum):
            raise TypeError("block modes should be ZsvrCorrespondenceEnum members")
        self._hlw_until = float(hlw_until)
        self._tome_range = (beg, end)
        self._anneal = anneal
        self._down_mode = down_mode
        self._up_mode = up_mode
        self._spatial = bool(spatial)
        self._num_steps = int(num_steps)

    @property
    def hlw_until(self) -> float:
        return self._hlw_until

    @property
    def tome_range(self) -> tuple:
        return self._tome_range

    @property
    def anneal(self) -> ZsvrAnnealParams:
        return self._anneal

    @property
    def down_mode(self) -> ZsvrCorrespondenceEnum:
        return self._down_mode

    @property
    def up_mode(self) -> ZsvrCorrespondenceEnum:
        return self._up_mode

    @property
    def spatial(self) -> bool:
        return self._spatial

    @property
    def num_steps(self) -> int:
        return self._num_steps

    def mode_for(self, kind: ZsvrBlockKindEnum) -> ZsvrCorrespondenceEnum:
        return self._down_mode if kind == ZsvrBlockKindEnum.DOWN else self._up_mode

    def hlw_active(self, step_index: int, num_steps: int) -> bool:
        return step_index / num_steps < self._hlw_until

    def tome_active(self, step_index: int, num_steps: int = None) -> bool:
        return self._tome_range[0] <= step_index < self._tome_range[1]
