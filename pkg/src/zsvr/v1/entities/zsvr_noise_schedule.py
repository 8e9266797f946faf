# Optional, for forward declarations in Python 3.7+
from __future__ import annotations

import numpy as np

from ..zsvr_base import ZsvrBaseEntity


class ZsvrNoiseSchedule(ZsvrBaseEntity):
    __slots__ = ZsvrBaseEntity.__slots__ + ('_betas',
                                            '_alphas',
                                            '_abars')

    def __init__(self, betas: np.ndarray, name: str = None, description: str = None):
        super().__init__(name=name, description=description,
                         entity_type="ZsvrNoiseSchedule")
        betas = np.asarray(betas, dtype=np.float64)
        if betas.ndim != 1 or betas.size < 1:
            raise ValueError("'betas' should be a non-empty vector")
        self._betas = betas
        self._alphas = 1.0 - betas
        self._abars = np.cumprod(self._alphas)

    @property
    def T(self) -> int:
        return self._betas.shape[0]

    @property
    def betas(self) -> np.ndarray:
        return self._betas

    @property
    def alphas(self) -> np.ndarray:
        return self._alphas

    @property
    def abars(self) -> np.ndarray:
        return self._abars
