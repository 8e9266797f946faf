# Optional, for forward declarations in Python 3.7+
from __future__ import annotations

import logging

from ..zsvr_base import ZsvrBaseEntity
from ..zsvr_errors import ZsvrConfigurationError
from ..zsvr_flow import resample_flow, resample_map, resample_mask
from .zsvr_flow_field import ZsvrFlowField
from .zsvr_flow_maps import ZsvrConfidenceMap, ZsvrOcclusionMask

logger = logging.getLogger(__name__)


class ZsvrFlowPair(ZsvrBaseEntity):
    """Alignment of frame ``source_index`` onto frame ``target_index``.

    ``flow`` lives on the target grid: ``warp(source, flow)`` brings the source
    into the target's view. ``reverse`` is the opposite field, ``confidence``
    and ``mask`` are the forward-backward check of the two.
    """

    __slots__ = ZsvrBaseEntity.__slots__ + ('_target_index',
                                            '_source_index',
                                            '_flow',
                                            '_reverse',
                                            '_confidence',
                                            '_mask')

    def __init__(self,
                 target_index: int,
                 source_index: int,
                 flow: ZsvrFlowField,
                 reverse: ZsvrFlowField,
                 confidence: ZsvrConfidenceMap,
                 mask: ZsvrOcclusionMask,
                 name: str = None,
                 description: str = None):
        super().__init__(name=name, description=description,
                         entity_type="ZsvrFlowPair")
        if not isinstance(flow, ZsvrFlowField) or not isinstance(reverse, ZsvrFlowField):
            raise TypeError("'flow' and 'reverse' should be ZsvrFlowField")
        if not isinstance(confidence, ZsvrConfidenceMap):
            raise TypeError("'confidence' should be a ZsvrConfidenceMap")
        if not isinstance(mask, ZsvrOcclusionMask):
            raise TypeError("'mask' should be a ZsvrOcclusionMask")
        self._target_index = int(target_index)
        self._source_index = int(source_index)
        self._flow = flow
        self._reverse = reverse
        self._confidence = confidence
        self._mask = mask

    @property
    def target_index(self) -> int:
        return self._target_index

    @property
    def source_index(self) -> int:
        return self._source_index

    @property
    def flow(self) -> ZsvrFlowField:
        return self._flow

    @property
    def reverse(self) -> ZsvrFlowField:
        return self._reverse

    @property
    def confidence(self) -> ZsvrConfidenceMap:
        return self._confidence

    @property
    def mask(self) -> ZsvrOcclusionMask:
        return self._mask


class ZsvrFlowBank(ZsvrBaseEntity):
    """Alignment pairs computed on the LQ frames, plus resampled variants cached per resolution."""

    __slots__ = ZsvrBaseEntity.__slots__ + ('_pairs',
                                            '_resampled',
                                            '_resolution',
                                            '_tau_occ',
                                            '_kinds')

    def __init__(self, resolution: tuple, tau_occ: float, name: str = None, description: str = None):
        super().__init__(name=name, description=description,
                         entity_type="ZsvrFlowBank")
        self._pairs = {}
        self._resampled = {}
        self._resolution = tuple(resolution)
        self._tau_occ = float(tau_occ)
        self._kinds = {'keyframe': [], 'member': [], 'adjacent': [], 'skip': []}

    @property
    def resolution(self) -> tuple:
        return self._resolution

    @property
    def tau_occ(self) -> float:
        return self._tau_occ

    def __len__(self) -> int:
        return len(self._pairs)

    def add(self, pair: ZsvrFlowPair, kind: str) -> None:
        if not isinstance(pair, ZsvrFlowPair):
            raise TypeError("'pair' should be a ZsvrFlowPair")
        key = (pair.target_index, pair.source_index)
        self._pairs[key] = pair
        if key not in self._kinds[kind]:
            self._kinds[kind].append(key)

    def keys(self, kind: str = None) -> list:
        if kind is None:
            return list(self._pairs.keys())
        return list(self._kinds[kind])

    def has_pair(self, target_index: int, source_index: int) -> bool:
        return (target_index, source_index) in self._pairs

    def pair(self, target_index: int, source_index: int) -> ZsvrFlowPair:
        try:
            return self._pairs[(target_index, source_index)]
        except KeyError:
            raise ZsvrConfigurationError("no flow precomputed for this frame pair",
                                         problem_data={'target': target_index, 'source': source_index})

    def resampled(self, target_index: int, source_index: int, h: int, w: int) -> tuple:
        """(flow, confidence, mask) of a pair at resolution (h, w), computed once."""
        key = (target_index, source_index, h, w)
        if key not in self._resampled:
            pair = self.pair(target_index, source_index)
            if (h, w) == tuple(pair.flow.resolution):
                self._resampled[key] = (pair.flow, pair.confidence, pair.mask)
            else:
                flow = resample_flow(pair.flow, h, w)
                confidence = resample_map(pair.confidence, h, w)
                mask = resample_mask(pair.mask, h, w)
                self._resampled[key] = (flow, confidence, mask)
            logger.debug("resampled pair %s -> %sx%s", key[:2], h, w)
        return self._resampled[key]
