import itertools
import logging
from typing import Dict, Iterator, List, Sequence, Tuple

import numpy as np

from ..common import SignatureError

logger = logging.getLogger(__name__)

# letters are 1-based channel indices, () is the empty word
Word = Tuple[int, ...]


################################################################
# Signature
################################################################
class Signature:
    """Truncated signature of a d-dimensional path.

    `levels[k]` holds the level-k coefficients as an array of shape (d,) * k, so that
    `levels[k][i1 - 1, ..., ik - 1]` is the coefficient of the word (i1, ..., ik).
    Level 0 is the constant 1.
    """

    __slots__ = ("dimension", "level", "levels")

    def __init__(self, levels: Sequence[np.ndarray], dimension: int, level: int):
        if dimension < 1:
            raise SignatureError(f"dimension must be >= 1, got {dimension}")
        if level < 1:
            raise SignatureError(f"level must be >= 1, got {level}")
        if len(levels) != level + 1:
            raise SignatureError(f"expected {level + 1} levels, got {len(levels)}")
        _levels = []
        for k, arr in enumerate(levels):
            arr = np.array(arr, dtype=float)
            if arr.shape != (dimension,) * k:
                raise SignatureError(f"level {k} has shape {arr.shape}, expected {(dimension,) * k}")
            if not np.all(np.isfinite(arr)):
                raise SignatureError(f"level {k} has non-finite coefficients")
            arr.setflags(write=False)
            _levels.append(arr)
        self.dimension = dimension
        self.level = level
        self.levels = tuple(_levels)

    @classmethod
    def identity(cls, dimension: int, level: int) -> "Signature":
        levels = [np.ones(())] + [np.zeros((dimension,) * k) for k in range(1, level + 1)]
        return cls(levels, dimension, level)

    def __getitem__(self, word: Word) -> float:
        word = tuple(word)
        if len(word) > self.level:
            raise KeyError(f"word {word} is longer than level {self.level}")
        if any(not 1 <= i <= self.dimension for i in word):
            raise KeyError(f"word {word} has letters outside 1..{self.dimension}")
        return float(self.levels[len(word)][tuple(i - 1 for i in word)])

    def __len__(self):
        return coefficient_count(self.dimension, self.level)

    def __eq__(self, other):
        if not isinstance(other, Signature):
            return NotImplemented
        return (
            self.dimension == other.dimension
            and self.level == other.level
            and all(np.array_equal(a, b) for a, b in zip(self.levels, other.levels))
        )

    def __repr__(self):
        return f"Signature(dimension={self.dimension}, level={self.level}, level1={self.levels[1].tolist()})"

    def words(self) -> List[Word]:
        return list(iter_words(self.dimension, self.level))

    def coefficients(self) -> Dict[Word, float]:
        return dict(zip(self.words(), self.flatten(include_constant=True).tolist()))

    def flatten(self, include_constant: bool = False) -> np.ndarray:
        """Coefficients ordered by (word length, letters)."""
        start = 0 if include_constant else 1
        return np.concatenate([arr.ravel() for arr in self.levels[start:]])


################################################################
# Helpers
################################################################
def coefficient_count(dimension: int, level: int) -> int:
    if dimension == 1:
        return level + 1
    return (dimension ** (level + 1) - dimension) // (dimension - 1) + 1


def iter_words(dimension: int, level: int) -> Iterator[Word]:
    for k in range(level + 1):
        yield from itertools.product(range(1, dimension + 1), repeat=k)


def render_word(word: Word) -> str:
    return ".".join(str(i) for i in word)


def _as_path(points) -> np.ndarray:
    path = np.asarray(points, dtype=float)
    if path.ndim == 1:
        path = path[:, None]
    if path.ndim != 2 or path.shape[0] < 1:
        raise SignatureError(f"a path needs at least one point, got shape {path.shape}")
    if not np.all(np.isfinite(path)):
        raise SignatureError("path has non-finite coordinates")
    return path


def _extend(levels: List[np.ndarray], delta: np.ndarray, level: int) -> List[np.ndarray]:
    """levels ⊗ exp(delta), truncated, by Horner's scheme."""
    out = [levels[0]]
    for k in range(1, level + 1):
        acc = levels[0] * delta / k
        for i in range(1, k):
            acc = np.multiply.outer(levels[i] + acc, delta) / (k - i)
        out.append(levels[k] + acc)
    return out


################################################################
# Operations
################################################################
# segment signature
def segment_signature(delta: Sequence[float], level: int) -> Signature:
    """Signature of a straight segment with increment `delta`: delta^{⊗k} / k! at level k."""
    if level < 1:
        raise SignatureError(f"level must be >= 1, got {level}")
    delta = np.atleast_1d(np.asarray(delta, dtype=float))
    levels = [np.ones(())]
    for k in range(1, level + 1):
        levels.append(np.multiply.outer(levels[-1], delta) / k)
    return Signature(levels, delta.shape[0], level)


# chen's identity
def chen_concatenate(a: Signature, b: Signature) -> Signature:
    """Signature of `a`'s path followed by `b`'s path (truncated tensor product)."""
    if a.dimension != b.dimension:
        raise SignatureError(f"dimension mismatch: {a.dimension} != {b.dimension}")
    if a.level != b.level:
        raise SignatureError(f"level mismatch: {a.level} != {b.level}")
    levels = [np.ones(())]
    for k in range(1, a.level + 1):
        acc = a.levels[k] + b.levels[k]
        for i in range(1, k):
            acc = acc + np.multiply.outer(a.levels[i], b.levels[k - i])
        levels.append(acc)
    return Signature(levels, a.dimension, a.level)


# path signature
def path_signature(path, level: int) -> Signature:
    """Signature of the piecewise-linear path through `path` points, shape (m, d), m >= 1.

    Folds Chen's identity over the segment increments; a single point gives the identity.
    """
    if level < 1:
        raise SignatureError(f"level must be >= 1, got {level}")
    path = _as_path(path)
    dimension = path.shape[1]
    levels = list(Signature.identity(dimension, level).levels)
    for delta in np.diff(path, axis=0):
        levels = _extend(levels, delta, level)
    return Signature(levels, dimension, level)
