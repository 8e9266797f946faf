# Optional, for forward declarations in Python 3.7+
from __future__ import annotations

import math

from ..zsvr_base import ZsvrBaseEntity


def _as_float_list(value, label: str) -> list:
    if value is None:
        return []
    if not isinstance(value, (list, tuple)):
        try:
            value = list(value)
        except TypeError:
            raise TypeError(f"'{label}' should be a sequence of numbers")
    result = []
    for item in value:
        if isinstance(item, bool) or not isinstance(item, (int, float)) and not hasattr(item, '__float__'):
            raise TypeError(f"'{label}' should contain numbers only")
        result.append(float(item))
    return result


class ZsvrMetricsReport(ZsvrBaseEntity):
    """Per-frame quality and per-pair / per-triple consistency values of one sequence."""

    __slots__ = ZsvrBaseEntity.__slots__ + ('_psnr',
                                            '_ssim',
                                            '_e_warp',
                                            '_e_inter',
                                            '_metadata')

    def __init__(self,
                 psnr: list = None,
                 ssim: list = None,
                 e_warp: list = None,
                 e_inter: list = None,
                 metadata: dict = None,
                 name: str = None,
                 description: str = None,
                 **kwargs
                 ):
        super().__init__(name=name, description=description,
                         entity_type="ZsvrMetricsReport")
        self.set_attributes(psnr, ssim, e_warp, e_inter, metadata, **kwargs)

    def set_attributes(self, psnr, ssim, e_warp, e_inter, metadata, **kwargs):
        attributes = [
            ('psnr', psnr),
            ('ssim', ssim),
            ('e_warp', e_warp),
            ('e_inter', e_inter),
            ('metadata', metadata)
        ]

        for attr_name, attr_value in attributes:
            value = kwargs.get(attr_name, attr_value)
            setattr(self, attr_name, value)

    @property
    def psnr(self) -> list:
        return self._psnr

    @psnr.setter
    def psnr(self, value):
        self._psnr = _as_float_list(value, "psnr")

    @property
    def ssim(self) -> list:
        return self._ssim

    @ssim.setter
    def ssim(self, value):
        self._ssim = _as_float_list(value, "ssim")

    @property
    def e_warp(self) -> list:
        return self._e_warp

    @e_warp.setter
    def e_warp(self, value):
        self._e_warp = _as_float_list(value, "e_warp")

    @property
    def e_inter(self) -> list:
        return self._e_inter

    @e_inter.setter
    def e_inter(self, value):
        self._e_inter = _as_float_list(value, "e_inter")

    @property
    def metadata(self) -> dict:
        return self._metadata

    @metadata.setter
    def metadata(self, value):
        if value is None:
            value = {}
        if not isinstance(value, dict):
            raise TypeError("'metadata' should be a dict")
        self._metadata = dict(value)

    @staticmethod
    def mean_of(values: list):
        if not values:
            return None
        if any(math.isinf(v) and v > 0 for v in values):
            return math.inf
        return math.fsum(values) / len(values)

    @property
    def psnr_mean(self):
        return self.mean_of(self._psnr)

    @property
    def ssim_mean(self):
        return self.mean_of(self._ssim)

    @property
    def e_warp_mean(self):
        return self.mean_of(self._e_warp)

    @property
    def e_inter_mean(self):
        return self.mean_of(self._e_inter)
