import os
import shutil
import tempfile
from contextlib import contextmanager

import numpy as np


def is_empty_or_whitespace(input_string: str) -> bool:
    return not input_string or not input_string.strip()


def atomic_write_bytes(path: str, payload: bytes) -> None:
    """Write ``payload`` next to ``path`` and rename it into place."""
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp_path = tempfile.mkstemp(prefix=".zsvr-", dir=directory)
    try:
        with os.fdopen(fd, 'wb') as f:
            f.write(payload)
        os.replace(tmp_path, path)
    except BaseException:
        if os.path.exists(tmp_path):
            os.remove(tmp_path)
        raise


def atomic_write_text(path: str, text: str) -> None:
    atomic_write_bytes(path, text.encode('utf-8'))


def _tree_conflicts(staged: str, target: str) -> list:
    conflicts = []
    for name in sorted(os.listdir(staged)):
        source = os.path.join(staged, name)
        dest = os.path.join(target, name)
        if not os.path.lexists(dest):
            continue
        if os.path.isdir(source) != os.path.isdir(dest):
            conflicts.append(dest)
        elif os.path.isdir(source):
            conflicts.extend(_tree_conflicts(source, dest))
    return conflicts


def _merge_tree(staged: str, target: str) -> None:
    for name in sorted(os.listdir(staged)):
        source = os.path.join(staged, name)
        dest = os.path.join(target, name)
        if os.path.isdir(source) and os.path.isdir(dest):
            _merge_tree(source, dest)
        else:
            os.replace(source, dest)


@contextmanager
def staged_directory(path: str):
    """Yield a scratch directory beside ``path`` that replaces it only if the block succeeds.

    An existing ``path`` keeps the entries the block did not write. A file where
    the tree needs a directory (or the reverse) fails before anything moves.
    """
    target = os.path.abspath(path)
    parent = os.path.dirname(target)
    os.makedirs(parent, exist_ok=True)
    staged = tempfile.mkdtemp(prefix=".zsvr-", dir=parent)
    os.chmod(staged, 0o755)
    try:
        yield staged
        if not os.path.lexists(target):
            os.replace(staged, target)
        else:
            if not os.path.isdir(target):
                raise NotADirectoryError(f"output path is not a directory: {path}")
            conflicts = _tree_conflicts(staged, target)
            if conflicts:
                raise FileExistsError(f"output entries of the wrong kind: {', '.join(conflicts)}")
            _merge_tree(staged, target)
    finally:
        if os.path.exists(staged):
            shutil.rmtree(staged)


def area_downsample(grid: np.ndarray, factor: int) -> np.ndarray:
    """Mean over non-overlapping ``factor`` x ``factor`` cells of a (h, w, c) grid."""
    h, w, c = grid.shape
    if h % factor or w % factor:
        raise ValueError(
            f"grid of size {h}x{w} is not divisible by {factor}")
    return grid.reshape(h // factor, factor, w // factor, factor, c).mean(axis=(1, 3))


def bilinear_resize(grid: np.ndarray, h2: int, w2: int) -> np.ndarray:
    """Half-pixel-centred bilinear resize of a (h, w, c) grid with edge clamping."""
    h, w = grid.shape[:2]
    if (h, w) == (h2, w2):
        return grid.copy()
    ys = np.clip((np.arange(h2) + 0.5) * (h / h2) - 0.5, 0.0, h - 1)
    xs = np.clip((np.arange(w2) + 0.5) * (w / w2) - 0.5, 0.0, w - 1)
    y0 = np.floor(ys).astype(np.int64)
    x0 = np.floor(xs).astype(np.int64)
    y1 = np.minimum(y0 + 1, h - 1)
    x1 = np.minimum(x0 + 1, w - 1)
    wy = (ys - y0)[:, None, None]
    wx = (xs - x0)[None, :, None]
    top = grid[y0][:, x0] * (1.0 - wx) + grid[y0][:, x1] * wx
    bottom = grid[y1][:, x0] * (1.0 - wx) + grid[y1][:, x1] * wx
    return top * (1.0 - wy) + bottom * wy


def nearest_resize(grid: np.ndarray, h2: int, w2: int) -> np.ndarray:
    h, w = grid.shape[:2]
    ys = np.minimum(np.floor((np.arange(h2) + 0.5) * (h / h2)).astype(np.int64), h - 1)
    xs = np.minimum(np.floor((np.arange(w2) + 0.5) * (w / w2)).astype(np.int64), w - 1)
    return grid[ys][:, xs]


def box_blur3(grid: np.ndarray) -> np.ndarray:
    """3x3 mean filter with edge replication on a (h, w, c) grid."""
    h, w = grid.shape[:2]
    padded = np.pad(grid, ((1, 1), (1, 1), (0, 0)), mode='edge')
    total = np.zeros_like(grid)
    for dy in range(3):
        for dx in range(3):
            total = total + padded[dy:dy + h, dx:dx + w]
    return total / 9.0
