# Optional, for forward declarations in Python 3.7+
from __future__ import annotations

from ..zsvr_base import ZsvrBaseEntity
from ..zsvr_errors import ZsvrConfigurationError


class ZsvrBatchPlan(ZsvrBaseEntity):
    """Contiguous batches ``[start, stop)`` over n frames and one keyframe per batch."""

    __slots__ = ZsvrBaseEntity.__slots__ + ('_batch_size',
                                            '_batches',
                                            '_keyframe_of',
                                            '_seed',
                                            '_num_frames')

    def __init__(self,
                 batch_size: int,
                 batches: list,
                 keyframe_of: list,
                 seed: int,
                 num_frames: int,
                 name: str = None,
                 description: str = None):
        super().__init__(name=name, description=description,
                         entity_type="ZsvrBatchPlan")
        if batch_size < 1:
            raise ZsvrConfigurationError("batch size must be >= 1")
        batches = [(int(start), int(stop)) for start, stop in batches]
        keyframe_of = [int(k) for k in keyframe_of]
        if len(batches) != len(keyframe_of):
            raise ZsvrConfigurationError("one keyframe per batch is required")
        expected = 0
        for (start, stop), keyframe in zip(batches, keyframe_of):
            if start != expected or stop <= start:
                raise ZsvrConfigurationError("batches must partition the frames in order",
                                             problem_data={'batches': batches})
            if not start <= keyframe < stop:
                raise ZsvrConfigurationError("keyframe outside its batch",
                                             problem_data={'batch': (start, stop), 'keyframe': keyframe})
            expected = stop
        if expected != num_frames:
            raise ZsvrConfigurationError("batches do not cover every frame")
        self._batch_size = int(batch_size)
        self._batches = batches
        self._keyframe_of = keyframe_of
        self._seed = int(seed)
        self._num_frames = int(num_frames)

    @property
    def batch_size(self) -> int:
        return self._batch_size

    @property
    def batches(self) -> list:
        return list(self._batches)

    @property
    def keyframe_of(self) -> list:
        return list(self._keyframe_of)

    @property
    def seed(self) -> int:
        return self._seed

    @property
    def num_frames(self) -> int:
        return self._num_frames

    @property
    def num_batches(self) -> int:
        return len(self._batches)

    def members(self, batch: int) -> list:
        start, stop = self._batches[batch]
        return list(range(start, stop))

    def batch_of(self, frame: int) -> int:
        for index, (start, stop) in enumerate(self._batches):
            if start <= frame < stop:
                return index
        raise IndexError(frame)
