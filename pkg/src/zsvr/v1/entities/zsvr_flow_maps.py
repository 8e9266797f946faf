# Optional, for forward declarations in Python 3.7+
from __future__ import annotations

import numpy as np

from ..zsvr_base import ZsvrBaseEntity
from ..zsvr_errors import ZsvrParameterError, ZsvrShapeError


def _as_map(value, label: str) -> np.ndarray:
    if not isinstance(value, np.ndarray):
        raise TypeError(f"'{label}' should be a numpy array")
    if value.ndim != 2 or value.shape[0] < 1 or value.shape[1] < 1:
        raise ZsvrShapeError(f"{label} should have shape (h, w)",
                             problem_data={'shape': value.shape})
    value = np.asarray(value, dtype=np.float64)
    if not np.all(np.isfinite(value)):
        raise ZsvrParameterError(f"{label} contains non-finite values")
    return value


class ZsvrOcclusionMask(ZsvrBaseEntity):
    """1 marks occluded / unreliable pixels, 0 marks pixels whose warped content is trusted."""

    __slots__ = ZsvrBaseEntity.__slots__ + ('_data',)

    def __init__(self, data, name: str = None, description: str = None, **kwargs):
        super().__init__(name=name, description=description,
                         entity_type="ZsvrOcclusionMask")
        self.data = kwargs.get('data', data)

    @property
    def data(self) -> np.ndarray:
        return self._data

    @data.setter
    def data(self, value):
        value = _as_map(value, "mask")
        if not np.all((value == 0.0) | (value == 1.0)):
            raise ZsvrParameterError("occlusion mask must be binary")
        self._data = value

    @property
    def resolution(self) -> tuple:
        return self._data.shape


class ZsvrConfidenceMap(ZsvrBaseEntity):

    __slots__ = ZsvrBaseEntity.__slots__ + ('_data',)

    def __init__(self, data, name: str = None, description: str = None, **kwargs):
        super().__init__(name=name, description=description,
                         entity_type="ZsvrConfidenceMap")
        self.data = kwargs.get('data', data)

    @property
    def data(self) -> np.ndarray:
        return self._data

    @data.setter
    def data(self, value):
        value = _as_map(value, "confidence")
        if np.any(value <= 0.0) or np.any(value > 1.0):
            raise ZsvrParameterError("confidence values must lie in (0, 1]")
        self._data = value

    @property
    def resolution(self) -> tuple:
        return self._data.shape
