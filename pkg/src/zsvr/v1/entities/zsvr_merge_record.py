# Optional, for forward declarations in Python 3.7+
from __future__ import annotations

import numpy as np

from ..zsvr_base import ZsvrBaseEntity
from .zsvr_token_split import ZsvrTokenSplit


class ZsvrMergeRecord(ZsvrBaseEntity):
    """Partition of all slots into merge groups.

    Target slot ``j`` is group ``j``; source slot ``i`` belongs to group
    ``group_of_source[i]``. Groups ``A..K-1`` are the surviving sources in slot order.
    """

    __slots__ = ZsvrBaseEntity.__slots__ + ('_group_of_source',
                                            '_num_groups',
                                            '_split')

    def __init__(self, group_of_source: np.ndarray, num_groups: int, split: ZsvrTokenSplit,
                 name: str = None, description: str = None):
        super().__init__(name=name, description=description,
                         entity_type="ZsvrMergeRecord")
        if not isinstance(split, ZsvrTokenSplit):
            raise TypeError("'split' should be a ZsvrTokenSplit")
        self._group_of_source = np.asarray(group_of_source, dtype=np.int64)
        self._num_groups = int(num_groups)
        self._split = split

    @property
    def group_of_source(self) -> np.ndarray:
        return self._group_of_source

    @property
    def num_groups(self) -> int:
        return self._num_groups

    @property
    def split(self) -> ZsvrTokenSplit:
        return self._split

    @property
    def num_targets(self) -> int:
        return self._split.num_targets

    def group_of_slot(self) -> np.ndarray:
        """Group id per chunk slot, shape (B, A)."""
        split = self._split
        groups = np.empty((split.num_frames, split.num_targets), dtype=np.int64)
        groups[split.target_index] = np.arange(split.num_targets)
        groups[split.src_frame, split.src_position] = self._group_of_source
        return groups

    def groups(self) -> list:
        """Members of every group as lists of (frame, position) pairs."""
        members = [[] for _ in range(self._num_groups)]
        slot_groups = self.group_of_slot()
        for frame in range(slot_groups.shape[0]):
            for position in range(slot_groups.shape[1]):
                members[slot_groups[frame, position]].append((frame, position))
        return members
