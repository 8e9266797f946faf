# Optional, for forward declarations in Python 3.7+
from __future__ import annotations

import numpy as np

from ..zsvr_base import ZsvrBaseEntity
from ..zsvr_errors import ZsvrParameterError, ZsvrShapeError


def _as_extent(value, label: str) -> tuple:
    if not isinstance(value, (tuple, list)) or len(value) != 2:
        raise TypeError(f"'{label}' should be a pair of ints")
    h, w = value
    if isinstance(h, bool) or isinstance(w, bool) or not isinstance(h, (int, np.integer)) or not isinstance(w, (int, np.integer)):
        raise TypeError(f"'{label}' should be a pair of ints")
    if h < 1 or w < 1:
        raise ZsvrShapeError(f"'{label}' must be at least 1x1",
                             problem_data={label: (int(h), int(w))})
    return (int(h), int(w))


class ZsvrTokenChunk(ZsvrBaseEntity):
    """Attention tokens of B frames, (B, A, C), laid out row-major on an (h_tok, w_tok) grid.

    ``content`` is the unpadded (h_img, w_img) extent anchored at the top-left.
    """

    __slots__ = ZsvrBaseEntity.__slots__ + ('_tokens',
                                            '_layout',
                                            '_content',
                                            '_target_index')

    def __init__(self,
                 tokens: np.ndarray,
                 layout: tuple,
                 content: tuple = None,
                 target_index: int = 0,
                 name: str = None,
                 description: str = None,
                 **kwargs
                 ):
        super().__init__(name=name, description=description,
                         entity_type="ZsvrTokenChunk")
        self.set_attributes(tokens, layout, content if content is not None else layout,
                            target_index, **kwargs)

    def set_attributes(self, tokens, layout, content, target_index, **kwargs):
        attributes = [
            ('tokens', tokens),
            ('layout', layout),
            ('content', content),
            ('target_index', target_index)
        ]

        for attr_name, attr_value in attributes:
            value = kwargs.get(attr_name, attr_value)
            setattr(self, attr_name, value)

    @property
    def tokens(self) -> np.ndarray:
        return self._tokens

    @tokens.setter
    def tokens(self, value):
        if not isinstance(value, np.ndarray):
            raise TypeError("'tokens' should be a numpy array")
        if value.ndim != 3 or min(value.shape) < 1:
            raise ZsvrShapeError("tokens should have shape (B, A, C)",
                                 problem_data={'shape': value.shape})
        value = np.asarray(value, dtype=np.float64)
        if not np.all(np.isfinite(value)):
            raise ZsvrParameterError("tokens contain non-finite values")
        self._tokens = value

    @property
    def layout(self) -> tuple:
        return self._layout

    @layout.setter
    def layout(self, value):
        value = _as_extent(value, "layout")
        if value[0] * value[1] != self._tokens.shape[1]:
            raise ZsvrShapeError("layout does not match the token count",
                                 problem_data={'layout': value, 'A': self._tokens.shape[1]})
        self._layout = value

    @property
    def content(self) -> tuple:
        return self._content

    @content.setter
    def content(self, value):
        value = _as_extent(value, "content")
        if value[0] > self._layout[0] or value[1] > self._layout[1]:
            raise ZsvrShapeError("content extent exceeds the layout",
                                 problem_data={'layout': self._layout, 'content': value})
        self._content = value

    @property
    def target_index(self) -> int:
        return self._target_index

    @target_index.setter
    def target_index(self, value):
        if isinstance(value, bool) or not isinstance(value, (int, np.integer)):
            raise TypeError("'target_index' should be an int")
        if not 0 <= value < self.num_frames:
            raise ZsvrShapeError("target_index outside the chunk",
                                 problem_data={'target_index': int(value), 'B': self.num_frames})
        self._target_index = int(value)

    @property
    def num_frames(self) -> int:
        return self._tokens.shape[0]

    @property
    def channels(self) -> int:
        return self._tokens.shape[2]

    @property
    def is_padded(self) -> bool:
        return self._content != self._layout

    def with_tokens(self, tokens: np.ndarray) -> ZsvrTokenChunk:
        return ZsvrTokenChunk(tokens, self._layout, self._content, self._target_index)


class ZsvrPadSpec(ZsvrBaseEntity):
    """Everything strip_padding removed: the padded layout and the original tokens."""

    __slots__ = ZsvrBaseEntity.__slots__ + ('_layout',
                                            '_content',
                                            '_padded_tokens')

    def __init__(self, layout: tuple, content: tuple, padded_tokens: np.ndarray,
                 name: str = None, description: str = None):
        super().__init__(name=name, description=description,
                         entity_type="ZsvrPadSpec")
        self._layout = _as_extent(layout, "layout")
        self._content = _as_extent(content, "content")
        if not isinstance(padded_tokens, np.ndarray) or padded_tokens.ndim != 3:
            raise TypeError("'padded_tokens' should be a (B, A, C) numpy array")
        self._padded_tokens = padded_tokens

    @property
    def layout(self) -> tuple:
        return self._layout

    @property
    def content(self) -> tuple:
        return self._content

    @property
    def padded_tokens(self) -> np.ndarray:
        return self._padded_tokens
