# Optional, for forward declarations in Python 3.7+
from __future__ import annotations

from .entities.zsvr_frame_sequence import ZsvrFrameSequence
from .entities.zsvr_latent_grid import ZsvrLatentGrid


class ErrorLog():
    def __init__(self, entity_type: str, index: int, message: str, obj: str = None):
        self.entity_type: str = entity_type
        self.index: int = index
        self.message: str = message
        self.obj: str = str(obj)

    def to_dict(self) -> dict:
        return {'entity_type': self.entity_type, 'index': self.index,
                'message': self.message, 'obj': self.obj}

    def __repr__(self) -> str:
        return f"ErrorLog({self.entity_type!r}, {self.index}, {self.message!r})"


class ZsvrRun():
    """Record of one restore call: outputs, final latents and hook activity."""

    def __init__(self, name: str = None, config=None):
        self.frames: ZsvrFrameSequence = None
        self.latents: list[ZsvrLatentGrid] = []
        self.latent_hook_calls: int = 0
        self.attention_hook_calls: int = 0
        self.metadata: dict = {}
        self.name = name
        self.config = config

    @property
    def name(self):
        return self._name

    @name.setter
    def name(self, value):
        if value is not None and not isinstance(value, str):
            raise TypeError("'name' should be an str or None")
        self._name = value
