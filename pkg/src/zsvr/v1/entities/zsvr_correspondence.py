# Optional, for forward declarations in Python 3.7+
from __future__ import annotations

import numpy as np

from ..constants import INVALID_TARGET
from ..zsvr_base import ZsvrBaseEntity
from ..zsvr_errors import ZsvrParameterError, ZsvrShapeError


class ZsvrCorrespondence(ZsvrBaseEntity):
    """Per source slot: a target index in [0, A) or INVALID_TARGET, and its ranking criterion."""

    __slots__ = ZsvrBaseEntity.__slots__ + ('_targets',
                                            '_criteria',
                                            '_num_targets')

    def __init__(self, targets: np.ndarray, criteria: np.ndarray, num_targets: int,
                 name: str = None, description: str = None):
        super().__init__(name=name, description=description,
                         entity_type="ZsvrCorrespondence")
        targets = np.asarray(targets, dtype=np.int64)
        criteria = np.asarray(criteria, dtype=np.float64)
        if targets.ndim != 1 or targets.shape != criteria.shape:
            raise ZsvrShapeError("targets and criteria should be equal-length vectors")
        if not np.all(np.isfinite(criteria)):
            raise ZsvrParameterError("correspondence criteria must be finite")
        valid = targets != INVALID_TARGET
        if np.any(targets[valid] < 0) or np.any(targets[valid] >= num_targets):
            raise ZsvrShapeError("correspondence target index out of range",
                                 problem_data={'num_targets': int(num_targets)})
        self._targets = targets
        self._criteria = criteria
        self._num_targets = int(num_targets)

    @property
    def targets(self) -> np.ndarray:
        return self._targets

    @property
    def criteria(self) -> np.ndarray:
        return self._criteria

    @property
    def num_targets(self) -> int:
        return self._num_targets

    @property
    def num_sources(self) -> int:
        return self._targets.shape[0]

    @property
    def valid(self) -> np.ndarray:
        return self._targets != INVALID_TARGET


class ZsvrMergeSet(ZsvrBaseEntity):
    """Selected source slots (ascending) and the target each one merges into."""

    __slots__ = ZsvrBaseEntity.__slots__ + ('_slots',
                                            '_targets',
                                            '_num_sources')

    def __init__(self, slots: np.ndarray, targets: np.ndarray, num_sources: int,
                 name: str = None, description: str = None):
        super().__init__(name=name, description=description,
                         entity_type="ZsvrMergeSet")
        slots = np.asarray(slots, dtype=np.int64)
        targets = np.asarray(targets, dtype=np.int64)
        if slots.shape != targets.shape:
            raise ZsvrShapeError("slots and targets differ in length")
        if slots.size and (slots.min() < 0 or slots.max() >= num_sources):
            raise ZsvrShapeError("merge slot out of range")
        if slots.size and np.any(targets < 0):
            raise ZsvrShapeError("merge set references an invalid target")
        order = np.argsort(slots, kind='stable')
        self._slots = slots[order]
        self._targets = targets[order]
        self._num_sources = int(num_sources)

    @property
    def slots(self) -> np.ndarray:
        return self._slots

    @property
    def targets(self) -> np.ndarray:
        return self._targets

    @property
    def num_sources(self) -> int:
        return self._num_sources

    def __len__(self) -> int:
        return self._slots.shape[0]
