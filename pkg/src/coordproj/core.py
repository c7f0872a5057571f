"""Shared data model for the toolkit.

Everything downstream works with finite function classes: an m-by-n table
whose rows are functions on the n-point uniform probability space, plus
coordinate subsets that select columns.  Norms on this space are always
normalized by n, so constants stay dimension-free.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass

import numpy as np


class CoordprojError(Exception):
    """Base class for errors carrying a machine-readable code."""

    code = "ERROR"


class InputError(CoordprojError, ValueError):
    """Invalid argument; `code` names the violated contract."""

    def __init__(self, code: str, message: str):
        super().__init__(message)
        self.code = code


class SizeCapError(CoordprojError, RuntimeError):
    """An exact routine was asked to exceed its combinatorial budget."""

    code = "SIZE_CAP"

    def __init__(self, message: str, cost_estimate: float | None = None):
        super().__init__(message)
        self.cost_estimate = cost_estimate


def as_vector(x) -> np.ndarray:
    """Coerce to a finite 1-d float array."""
    v = np.asarray(x, dtype=float)
    if v.ndim != 1:
        raise InputError("DIMENSION", f"expected a 1-d vector, got shape {v.shape}")
    if v.size and not np.all(np.isfinite(v)):
        raise InputError("BAD_INPUT", "vector entries must be finite")
    return v


@dataclass(frozen=True)
class CoordinateSubset:
    """Strictly increasing subset of {1..ambient_n}; indices are 1-based.

    May be empty: random selector draws legitimately produce empty subsets,
    and downstream operations decide whether that is an error.
    """

    indices: tuple[int, ...]
    ambient_n: int

    def __post_init__(self):
        idx = tuple(int(i) for i in self.indices)
        object.__setattr__(self, "indices", idx)
        if self.ambient_n < 1:
            raise InputError("DIMENSION", "ambient_n must be at least 1")
        prev = 0
        for i in idx:
            if i <= prev:
                raise InputError("BAD_INPUT", "indices must be strictly increasing and >= 1")
            prev = i
        if idx and idx[-1] > self.ambient_n:
            raise InputError(
                "DIMENSION", f"index {idx[-1]} outside [1, {self.ambient_n}]"
            )

    @property
    def size(self) -> int:
        return len(self.indices)

    def zero_based(self) -> np.ndarray:
        return np.asarray(self.indices, dtype=np.intp) - 1

    @classmethod
    def full(cls, n: int) -> "CoordinateSubset":
        return cls(tuple(range(1, n + 1)), n)

    @classmethod
    def from_mask(cls, mask) -> "CoordinateSubset":
        mask = np.asarray(mask, dtype=bool)
        return cls(tuple(int(i) + 1 for i in np.flatnonzero(mask)), int(mask.size))


# substream labels must stay below this span so derived ids never collide
_SUBSTREAM_SPAN = 1_000_003


@dataclass(frozen=True)
class RngStream:
    """Reproducible random stream: the pair (seed, stream_id) pins every draw.

    Distinct stream_ids give statistically independent generators (numpy
    SeedSequence hashing).  Each call to generator() restarts the stream,
    so two operations handed the *same* RngStream see identical bits;
    callers wanting independence derive substreams.
    """

    seed: int
    stream_id: int = 0

    def generator(self) -> np.random.Generator:
        mask = (1 << 64) - 1
        return np.random.default_rng((self.seed & mask, self.stream_id & mask))

    def substream(self, k: int) -> "RngStream":
        if not 0 <= k < _SUBSTREAM_SPAN:
            raise InputError("BAD_INPUT", f"substream label must lie in [0, {_SUBSTREAM_SPAN})")
        return RngStream(self.seed, self.stream_id * _SUBSTREAM_SPAN + k + 1)


@dataclass(frozen=True)
class FunctionClass:
    """m functions on {1..n} under the uniform measure, as an m-by-n table.

    Rows are functions, columns are points.  Duplicate rows are retained:
    the class is a multiset.  `bounded_by_one` asserts sup |f| <= 1 and is
    checked at construction.
    """

    values: np.ndarray
    bounded_by_one: bool = False

    def __post_init__(self):
        v = np.array(self.values, dtype=float, copy=True)
        if v.ndim != 2 or v.shape[0] < 1 or v.shape[1] < 1:
            raise InputError("DIMENSION", f"values must be a nonempty 2-d table, got shape {v.shape}")
        if not np.all(np.isfinite(v)):
            raise InputError("BAD_INPUT", "table entries must be finite")
        if self.bounded_by_one and np.abs(v).max() > 1.0:
            raise InputError("BAD_INPUT", "bounded_by_one is set but max |value| exceeds 1")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @property
    def m(self) -> int:
        return self.values.shape[0]

    @property
    def n(self) -> int:
        return self.values.shape[1]


def project(f, sigma: CoordinateSubset) -> np.ndarray:
    """Restrict a vector to the coordinates in sigma (order preserved)."""
    v = as_vector(f)
    if sigma.size == 0:
        raise InputError("EMPTY_SUBSET", "cannot project onto an empty subset")
    if sigma.ambient_n != v.size:
        raise InputError(
            "DIMENSION", f"subset lives on {sigma.ambient_n} points, vector has {v.size}"
        )
    return v[sigma.zero_based()]


def normalized_lp(f, p: float) -> float:
    """L_p norm under the uniform probability measure: (mean |f|^p)^(1/p)."""
    v = as_vector(f)
    if v.size == 0:
        raise InputError("DIMENSION", "empty vector has no normalized L_p norm")
    if p < 1:
        raise InputError("BAD_EXPONENT", f"exponent must satisfy p >= 1, got {p}")
    return float(np.mean(np.abs(v) ** p) ** (1.0 / p))


def banach_norm(v, norm="sup") -> float:
    """Unnormalized vector norm: "sup" or a p-norm exponent >= 1."""
    w = np.asarray(v, dtype=float)
    if norm == "sup":
        return float(np.abs(w).max())
    p = float(norm)
    if p < 1:
        raise InputError("BAD_EXPONENT", f"norm exponent must be >= 1, got {p}")
    return float(np.sum(np.abs(w) ** p) ** (1.0 / p))


def project_class(F: FunctionClass, sigma: CoordinateSubset) -> FunctionClass:
    """Project every row of F onto sigma; duplicates created by projection stay."""
    if sigma.size == 0:
        raise InputError("EMPTY_SUBSET", "cannot project a class onto an empty subset")
    if sigma.ambient_n != F.n:
        raise InputError(
            "DIMENSION", f"subset lives on {sigma.ambient_n} points, class has {F.n}"
        )
    return FunctionClass(F.values[:, sigma.zero_based()], bounded_by_one=F.bounded_by_one)


@dataclass(frozen=True)
class FittedConstant:
    """An absolute constant estimated from data.

    `protocol` documents exactly how the value was produced; `inputs_digest`
    fingerprints the fitting inputs so reruns can be checked.
    """

    name: str
    value: float
    protocol: str
    inputs_digest: str


def digest_inputs(*parts) -> str:
    """SHA-256 fingerprint of arrays and plain values, order-sensitive."""
    h = hashlib.sha256()
    for p in parts:
        if isinstance(p, np.ndarray):
            h.update(np.ascontiguousarray(p, dtype=float).tobytes())
            h.update(repr(p.shape).encode())
        else:
            h.update(repr(p).encode())
    return h.hexdigest()
