# Optional, for forward declarations in Python 3.7+
from __future__ import annotations

import numpy as np

from ..zsvr_base import ZsvrBaseEntity
from ..zsvr_errors import ZsvrEmptyInputError, ZsvrParameterError, ZsvrShapeError


class ZsvrFrameSequence(ZsvrBaseEntity):
    """Ordered RGB frames in [0, 1], stored as one (n, h, w, 3) float64 array."""

    __slots__ = ZsvrBaseEntity.__slots__ + ('_frames',
                                            '_frame_rate')

    def __init__(self,
                 frames,
                 frame_rate: float = None,
                 name: str = None,
                 description: str = None,
                 **kwargs
                 ):
        entity_type = "ZsvrFrameSequence"

        super().__init__(name=name,
                         description=description,
                         entity_type=entity_type)

        self.set_attributes(frames, frame_rate, **kwargs)

    def set_attributes(self, frames, frame_rate, **kwargs):
        attributes = [
            ('frames', frames),
            ('frame_rate', frame_rate)
        ]

        for attr_name, attr_value in attributes:
            value = kwargs.get(attr_name, attr_value)
            setattr(self, attr_name, value)

    @property
    def frames(self) -> np.ndarray:
        return self._frames

    @frames.setter
    def frames(self, value):
        if isinstance(value, (list, tuple)):
            if len(value) == 0:
                raise ZsvrEmptyInputError("no frames")
            shapes = {np.shape(frame) for frame in value}
            if len(shapes) != 1:
                raise ZsvrShapeError("frames do not share one shape",
                                     problem_data={'shapes': sorted(shapes)})
            value = np.stack([np.asarray(frame, dtype=np.float64)
                             for frame in value])
        if not isinstance(value, np.ndarray):
            raise TypeError("'frames' should be a numpy array or a list of arrays")
        if value.ndim != 4 or value.shape[-1] != 3:
            raise ZsvrShapeError(
                "'frames' should have shape (n, h, w, 3)", problem_data={'shape': value.shape})
        if value.shape[0] == 0:
            raise ZsvrEmptyInputError("no frames")
        if value.shape[1] < 1 or value.shape[2] < 1:
            raise ZsvrShapeError("frames need h >= 1 and w >= 1")
        value = np.asarray(value, dtype=np.float64)
        if not np.all(np.isfinite(value)):
            raise ZsvrParameterError("frames contain non-finite values")
        if value.min() < 0.0 or value.max() > 1.0:
            raise ZsvrParameterError("frame values must lie in [0, 1]",
                                     problem_data={'min': float(value.min()), 'max': float(value.max())})
        self._frames = value

    @property
    def frame_rate(self):
        return self._frame_rate

    @frame_rate.setter
    def frame_rate(self, value):
        if value is not None and not isinstance(value, (int, float)):
            raise TypeError("'frame_rate' should be a number or None")
        self._frame_rate = value

    @property
    def num_frames(self) -> int:
        return self._frames.shape[0]

    @property
    def height(self) -> int:
        return self._frames.shape[1]

    @property
    def width(self) -> int:
        return self._frames.shape[2]

    def __len__(self) -> int:
        return self.num_frames

    def __getitem__(self, index: int) -> np.ndarray:
        return self._frames[index]
