# Optional, for forward declarations in Python 3.7+
from __future__ import annotations

import numpy as np

from ..zsvr_base import ZsvrBaseEntity
from ..zsvr_errors import ZsvrParameterError


class ZsvrAnnealParams(ZsvrBaseEntity):
    __slots__ = ZsvrBaseEntity.__slots__ + ('_r',
                                            '_delta',
                                            '_i_beg',
                                            '_i_end')

    def __init__(self,
                 r: float,
                 delta: float,
                 i_beg: int,
                 i_end: int,
                 name: str = None,
                 description: str = None,
                 **kwargs
                 ):
        super().__init__(name=name, description=description,
                         entity_type="ZsvrAnnealParams")
        self.set_attributes(r, delta, i_beg, i_end, **kwargs)
        if self._i_beg >= self._i_end:
            raise ZsvrParameterError("annealing needs i_beg < i_end",
                                     problem_data={'i_beg': self._i_beg, 'i_end': self._i_end})

    def set_attributes(self, r, delta, i_beg, i_end, **kwargs):
        attributes = [
            ('r', r),
            ('delta', delta),
            ('i_beg', i_beg),
            ('i_end', i_end)
        ]

        for attr_name, attr_value in attributes:
            value = kwargs.get(attr_name, attr_value)
            setattr(self, attr_name, value)

    @property
    def r(self) -> float:
        return self._r

    @r.setter
    def r(self, value):
        if isinstance(value, bool) or not isinstance(value, (int, float, np.floating)):
            raise TypeError("'r' should be a number")
        if not 0.0 <= value <= 1.0:
            raise ZsvrParameterError("'r' must lie in [0, 1]", problem_data={'r': value})
        self._r = float(value)

    @property
    def delta(self) -> float:
        return self._delta

    @delta.setter
    def delta(self, value):
        if isinstance(value, bool) or not isinstance(value, (int, float, np.floating)):
            raise TypeError("'delta' should be a number")
        if not value > 0.0:
            raise ZsvrParameterError("'delta' must be > 0", problem_data={'delta': value})
        self._delta = float(value)

    @property
    def i_beg(self) -> int:
        return self._i_beg

    @i_beg.setter
    def i_beg(self, value):
        if isinstance(value, bool) or not isinstance(value, (int, np.integer)):
            raise TypeError("'i_beg' should be an int")
        self._i_beg = int(value)

    @property
    def i_end(self) -> int:
        return self._i_end

    @i_end.setter
    def i_end(self, value):
        if isinstance(value, bool) or not isinstance(value, (int, np.integer)):
            raise TypeError("'i_end' should be an int")
        self._i_end = int(value)
