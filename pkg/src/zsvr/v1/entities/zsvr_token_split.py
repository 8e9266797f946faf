# Optional, for forward declarations in Python 3.7+
from __future__ import annotations

import numpy as np

from ..zsvr_base import ZsvrBaseEntity


class ZsvrTokenSplit(ZsvrBaseEntity):
    """Source/target partition of a chunk.

    ``src_frame[i]`` and ``src_position[i]`` locate source slot ``i`` in the chunk;
    target slot ``j`` is position ``j`` of frame ``target_index``.
    """

    __slots__ = ZsvrBaseEntity.__slots__ + ('_src',
                                            '_tar',
                                            '_src_frame',
                                            '_src_position',
                                            '_num_frames',
                                            '_target_index',
                                            '_layout',
                                            '_content')

    def __init__(self,
                 src: np.ndarray,
                 tar: np.ndarray,
                 src_frame: np.ndarray,
                 src_position: np.ndarray,
                 num_frames: int,
                 target_index: int,
                 layout: tuple,
                 content: tuple,
                 name: str = None,
                 description: str = None):
        super().__init__(name=name, description=description,
                         entity_type="ZsvrTokenSplit")
        if src.ndim != 2 or tar.ndim != 2 or src.shape[1] != tar.shape[1]:
            raise ValueError("src and tar should be (N, C) and (A, C)")
        if src_frame.shape != (src.shape[0],) or src_position.shape != (src.shape[0],):
            raise ValueError("slot map length differs from the source count")
        self._src = src
        self._tar = tar
        self._src_frame = src_frame
        self._src_position = src_position
        self._num_frames = int(num_frames)
        self._target_index = int(target_index)
        self._layout = tuple(layout)
        self._content = tuple(content)

    @property
    def src(self) -> np.ndarray:
        return self._src

    @property
    def tar(self) -> np.ndarray:
        return self._tar

    @property
    def src_frame(self) -> np.ndarray:
        return self._src_frame

    @property
    def src_position(self) -> np.ndarray:
        return self._src_position

    @property
    def num_frames(self) -> int:
        return self._num_frames

    @property
    def target_index(self) -> int:
        return self._target_index

    @property
    def layout(self) -> tuple:
        return self._layout

    @property
    def content(self) -> tuple:
        return self._content

    @property
    def num_sources(self) -> int:
        return self._src.shape[0]

    @property
    def num_targets(self) -> int:
        return self._tar.shape[0]

    def __iter__(self):
        # allows ``src, tar = split_src_tar(chunk)``
        yield self._src
        yield self._tar
