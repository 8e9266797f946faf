# Optional, for forward declarations in Python 3.7+
from __future__ import annotations

from typing import Callable

from ..zsvr_base import ZsvrBaseEntity


def _always(step_index: int, num_steps: int) -> bool:
    return True


class ZsvrHookSet(ZsvrBaseEntity):
    """The two sampler hook surfaces, their step gates and call counters.

    ``latent_hook(step_index, t, latents) -> latents`` may replace the batch's
    predicted clean latents. ``attention_hook(kind, chunk, attention, step_index)
    -> chunk`` replaces one self-attention call; ``attention`` is the layer's
    token transform. A gate returning False means the hook is not invoked at
    that step.
    """

    __slots__ = ZsvrBaseEntity.__slots__ + ('_latent_hook',
                                            '_attention_hook',
                                            '_latent_gate',
                                            '_attention_gate',
                                            'latent_calls',
                                            'attention_calls')

    def __init__(self,
                 latent_hook: Callable = None,
                 attention_hook: Callable = None,
                 latent_gate: Callable = None,
                 attention_gate: Callable = None,
                 name: str = None,
                 description: str = None):
        super().__init__(name=name, description=description,
                         entity_type="ZsvrHookSet")
        for label, value in (('latent_hook', latent_hook), ('attention_hook', attention_hook),
                             ('latent_gate', latent_gate), ('attention_gate', attention_gate)):
            if value is not None and not callable(value):
                raise TypeError(f"'{label}' should be callable or None")
        self._latent_hook = latent_hook
        self._attention_hook = attention_hook
        self._latent_gate = latent_gate or _always
        self._attention_gate = attention_gate or _always
        self.latent_calls = 0
        self.attention_calls = 0

    @property
    def latent_hook(self):
        return self._latent_hook

    @property
    def attention_hook(self):
        return self._attention_hook

    def latent_active(self, step_index: int, num_steps: int) -> bool:
        return self._latent_hook is not None and self._latent_gate(step_index, num_steps)

    def attention_active(self, step_index: int, num_steps: int) -> bool:
        return self._attention_hook is not None and self._attention_gate(step_index, num_steps)
