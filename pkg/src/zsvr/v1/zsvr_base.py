# Optional, for forward declarations in Python 3.7+
from __future__ import annotations


class ZsvrBaseEntity():
    """Common root of frames, latents, flows, token chunks and run configurations.

    Carries an optional label pair (name, description) and the concrete class tag
    that error logs report when a ``from_dict`` load fails.
    """

    __slots__ = ('_name',
                 '_description',
                 '_entity_type')

    def __init__(self,
                 name: str = None,
                 description: str = None,
                 entity_type: str = "ZsvrBaseEntity",
                 **kwargs):
        self.name = name if name is not None else kwargs.get('name')
        self.description = description if description is not None else kwargs.get('description')
        self.entity_type = entity_type

    @staticmethod
    def _check_label(value, label: str):
        if value is not None and not isinstance(value, str):
            raise TypeError(f"'{label}' should be a str or None")
        return value

    @property
    def entity_type(self) -> str:
        return self._entity_type

    @entity_type.setter
    def entity_type(self, value):
        if not isinstance(value, str) or not value.startswith("Zsvr"):
            raise TypeError("'entity_type' should be a Zsvr class name")
        self._entity_type = value

    @property
    def name(self) -> str:
        return self._name

    @name.setter
    def name(self, value):
        self._name = self._check_label(value, "name")

    @property
    def description(self) -> str:
        return self._description

    @description.setter
    def description(self, value):
        self._description = self._check_label(value, "description")
