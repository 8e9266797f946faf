# Optional, for forward declarations in Python 3.7+
from __future__ import annotations

import numpy as np

from ..zsvr_base import ZsvrBaseEntity
from ..zsvr_errors import ZsvrParameterError, ZsvrShapeError


class ZsvrFlowField(ZsvrBaseEntity):
    """Dense displacement field (h, w, 2); channel 0 is u (x), channel 1 is v (y)."""

    __slots__ = ZsvrBaseEntity.__slots__ + ('_data',)

    def __init__(self, data, name: str = None, description: str = None, **kwargs):
        super().__init__(name=name, description=description,
                         entity_type="ZsvrFlowField")
        self.data = kwargs.get('data', data)

    @property
    def data(self) -> np.ndarray:
        return self._data

    @data.setter
    def data(self, value):
        if not isinstance(value, np.ndarray):
            raise TypeError("'data' should be a numpy array")
        if value.ndim != 3 or value.shape[-1] != 2 or value.shape[0] < 1 or value.shape[1] < 1:
            raise ZsvrShapeError("flow data should have shape (h, w, 2)",
                                 problem_data={'shape': value.shape})
        value = np.asarray(value, dtype=np.float64)
        if not np.all(np.isfinite(value)):
            raise ZsvrParameterError("flow contains non-finite values")
        h, w = value.shape[:2]
        if np.any(np.abs(value[..., 0]) > w) or np.any(np.abs(value[..., 1]) > h):
            raise ZsvrParameterError("flow exceeds the frame extent",
                                     problem_data={'resolution': (h, w)})
        self._data = value

    @property
    def resolution(self) -> tuple:
        return self._data.shape[:2]

    @classmethod
    def zeros(cls, h: int, w: int) -> ZsvrFlowField:
        return cls(np.zeros((h, w, 2)))
