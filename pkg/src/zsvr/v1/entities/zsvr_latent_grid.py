# Optional, for forward declarations in Python 3.7+
from __future__ import annotations

import numpy as np

from ..zsvr_base import ZsvrBaseEntity
from ..zsvr_errors import ZsvrParameterError, ZsvrShapeError


class ZsvrLatentGrid(ZsvrBaseEntity):
    __slots__ = ZsvrBaseEntity.__slots__ + ('_data',
                                            '_frame_index',
                                            '_step')

    def __init__(self,
                 data,
                 frame_index: int = 0,
                 step: int = None,
                 name: str = None,
                 description: str = None,
                 **kwargs
                 ):
        super().__init__(name=name, description=description,
                         entity_type="ZsvrLatentGrid")
        self.set_attributes(data, frame_index, step, **kwargs)

    def set_attributes(self, data, frame_index, step, **kwargs):
        attributes = [
            ('data', data),
            ('frame_index', frame_index),
            ('step', step)
        ]

        for attr_name, attr_value in attributes:
            value = kwargs.get(attr_name, attr_value)
            setattr(self, attr_name, value)

    @property
    def data(self) -> np.ndarray:
        return self._data

    @data.setter
    def data(self, value):
        if not isinstance(value, np.ndarray):
            raise TypeError("'data' should be a numpy array")
        if value.ndim != 3:
            raise ZsvrShapeError("latent data should have shape (h, w, c)",
                                 problem_data={'shape': value.shape})
        value = np.asarray(value, dtype=np.float64)
        if not np.all(np.isfinite(value)):
            raise ZsvrParameterError("latent contains non-finite values")
        self._data = value

    @property
    def frame_index(self) -> int:
        return self._frame_index

    @frame_index.setter
    def frame_index(self, value):
        if isinstance(value, bool) or not isinstance(value, (int, np.integer)):
            raise TypeError("'frame_index' should be an int")
        if value < 0:
            raise ValueError("'frame_index' should be >= 0")
        self._frame_index = int(value)

    @property
    def step(self):
        return self._step

    @step.setter
    def step(self, value):
        if value is not None and (isinstance(value, bool) or not isinstance(value, (int, np.integer))):
            raise TypeError("'step' should be an int or None")
        self._step = None if value is None else int(value)

    @property
    def shape(self) -> tuple:
        return self._data.shape

    def with_data(self, data: np.ndarray, step: int = None) -> ZsvrLatentGrid:
        return ZsvrLatentGrid(data, frame_index=self._frame_index,
                              step=self._step if step is None else step, name=self.name)
