"""Non-negative matrix kernel.

Entry-sum norms, allowability flags, the Hilbert projective metric and
Birkhoff contraction coefficient, Gelfand spectral radius, and
overflow-proof scaled products. Every matrix carries an exact boolean
support pattern alongside its float entries; zero detection is always
structural, never a float threshold.
"""

from __future__ import annotations

import math
import struct
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import (
    BudgetExceededError,
    DomainError,
    NotPositiveError,
    RangeError,
    UnderflowError_,
)

MAX_DIM = 16  # phi() is an exhaustive O(d^4) scan; keep d small


def _check_entries(entries: np.ndarray) -> np.ndarray:
    arr = np.asarray(entries, dtype=float)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise DomainError("matrix must be square")
    if arr.shape[0] < 1:
        raise DomainError("dimension must be >= 1")
    if not np.all(np.isfinite(arr)):
        raise RangeError("matrix entries must be finite")
    if np.any(arr < 0):
        raise DomainError("matrix entries must be non-negative")
    return arr


class NonNegMatrix:
    """Square non-negative matrix with an exact zero/nonzero shadow.

    support[i, j] False forces entries[i, j] == 0.0 exactly; support True
    requires entries[i, j] > 0. A structurally nonzero entry that arrives
    as float zero is an underflow error, never a silent zero.
    """

    __slots__ = ("entries", "support")

    def __init__(self, entries, support=None, _position=None):
        arr = _check_entries(entries)
        if support is None:
            sup = arr > 0
        else:
            sup = np.asarray(support, dtype=bool)
            if sup.shape != arr.shape:
                raise DomainError("support shape must match entries")
            if np.any(arr[~sup] != 0.0):
                raise DomainError("support-false entry must be exactly zero")
            if np.any(arr[sup] == 0.0):
                raise UnderflowError_(
                    "structurally nonzero entry underflowed to float zero",
                    position=_position,
                )
        arr = np.ascontiguousarray(arr)
        sup = np.ascontiguousarray(sup)
        arr.setflags(write=False)
        sup.setflags(write=False)
        object.__setattr__(self, "entries", arr)
        object.__setattr__(self, "support", sup)

    def __setattr__(self, name, value):
        raise AttributeError("NonNegMatrix is immutable")

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    @property
    def is_zero(self) -> bool:
        return not bool(self.support.any())

    @classmethod
    def identity(cls, d: int) -> "NonNegMatrix":
        return cls(np.eye(d))

    @classmethod
    def ones(cls, d: int) -> "NonNegMatrix":
        return cls(np.ones((d, d)))

    @classmethod
    def zero(cls, d: int) -> "NonNegMatrix":
        return cls(np.zeros((d, d)))

    def __matmul__(self, other: "NonNegMatrix") -> "NonNegMatrix":
        if not isinstance(other, NonNegMatrix):
            return NotImplemented
        if self.dim != other.dim:
            raise DomainError("dimension mismatch")
        sup = bool_matmul(self.support, other.support)
        return NonNegMatrix(self.entries @ other.entries, sup)

    def __repr__(self):
        return f"NonNegMatrix({self.entries.tolist()})"


def as_matrix(B) -> NonNegMatrix:
    if isinstance(B, NonNegMatrix):
        return B
    return NonNegMatrix(B)


def bool_matmul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Exact boolean matrix product (OR of ANDs)."""
    return (a.astype(np.uint8) @ b.astype(np.uint8)) > 0


# --- support rows as bitmasks (fast exact zero tracking in streams) -------


def rows_from_support(support: np.ndarray) -> tuple:
    weights = 1 << np.arange(support.shape[1], dtype=np.int64)
    return tuple(int(x) for x in support.astype(np.int64) @ weights)


def support_from_rows(rows: Sequence[int], d: int) -> np.ndarray:
    out = np.zeros((len(rows), d), dtype=bool)
    for i, r in enumerate(rows):
        for j in range(d):
            out[i, j] = bool((r >> j) & 1)
    return out


_ROWS_MUL_CACHE: dict = {}


def rows_mul(a: tuple, b: tuple) -> tuple:
    """Bitmask-row product: row i of the result ORs the rows of b selected
    by the set bits of a[i]. Memoized; distinct patterns are few."""
    key = (a, b)
    hit = _ROWS_MUL_CACHE.get(key)
    if hit is not None:
        return hit
    out = []
    for ra in a:
        acc = 0
        r = ra
        while r:
            low = r & -r
            acc |= b[low.bit_length() - 1]
            r ^= low
        out.append(acc)
    res = tuple(out)
    if len(_ROWS_MUL_CACHE) < (1 << 16):
        _ROWS_MUL_CACHE[key] = res
    return res


def identity_rows(d: int) -> tuple:
    return tuple(1 << i for i in range(d))


# ---------------------------------------------------------------------------
# Scalar functionals
# ---------------------------------------------------------------------------


def entry_sum_norm(B) -> float:
    """The norm used throughout: sum of all entries. Zero iff B = 0."""
    return float(as_matrix(B).entries.sum())


@dataclass(frozen=True)
class Allowability:
    row_allowable: bool
    column_allowable: bool
    positive: bool

    @property
    def allowable(self) -> bool:
        return self.row_allowable and self.column_allowable

    @property
    def none(self) -> bool:
        return not (self.row_allowable or self.column_allowable)


def allowability(B) -> Allowability:
    """Flags computed from the support pattern only: a matrix is
    row-allowable (column-allowable) when every row (column) has a
    positive entry, allowable when both, positive when all entries are."""
    sup = as_matrix(B).support
    return Allowability(
        row_allowable=bool(sup.any(axis=1).all()),
        column_allowable=bool(sup.any(axis=0).all()),
        positive=bool(sup.all()),
    )


def elem_constant(P) -> float:
    """c(P) = (1/d) * min(P) / max(P) for strictly positive P.

    Satisfies the norm sandwich c(P) * ||L|| * ||P R|| <= ||L P R|| <=
    ||L|| * ||P R|| for all non-negative L, R (property-tested, not an
    operation).
    """
    P = as_matrix(P)
    if not bool(P.support.all()):
        raise NotPositiveError("elem_constant requires a strictly positive matrix")
    return float(P.entries.min() / (P.dim * P.entries.max()))


@dataclass(frozen=True)
class ConeVector:
    """Point in the open positive cone (all coordinates > 0)."""

    coordinates: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.coordinates, dtype=float).reshape(-1)
        if arr.size < 1 or not np.all(np.isfinite(arr)) or np.any(arr <= 0):
            raise DomainError("cone vector coordinates must be finite and strictly positive")
        arr = np.ascontiguousarray(arr)
        arr.setflags(write=False)
        object.__setattr__(self, "coordinates", arr)

    @property
    def dim(self) -> int:
        return self.coordinates.size


def _cone_coords(x) -> np.ndarray:
    if isinstance(x, ConeVector):
        return x.coordinates
    return ConeVector(np.asarray(x, dtype=float)).coordinates


def hilbert_metric(x, y) -> float:
    """Projective distance log(max_i x_i/y_i / min_i x_i/y_i) on the open
    cone; zero exactly on rays."""
    xv, yv = _cone_coords(x), _cone_coords(y)
    if xv.size != yv.size:
        raise DomainError("dimension mismatch")
    r = xv / yv
    return float(np.log(r.max() / r.min()))


def phi(B) -> float:
    """Minimal entry cross-ratio min_{i,j,k,s} b_ik b_js / (b_jk b_is).

    Defined for allowable B; equals 0 as soon as B has a zero entry, and
    is found by an exhaustive scan over all index quadruples otherwise.
    """
    B = as_matrix(B)
    if B.dim > MAX_DIM:
        raise DomainError(f"phi supports dim <= {MAX_DIM}")
    if not allowability(B).allowable:
        raise DomainError("phi requires an allowable matrix")
    if not bool(B.support.all()):
        return 0.0
    E = B.entries
    num = E[:, None, :, None] * E[None, :, None, :]
    den = E[None, :, :, None] * E[:, None, None, :]
    return float((num / den).min())


def birkhoff_tau(B) -> float:
    """Birkhoff contraction coefficient tau(B) = (1 - sqrt(phi)) / (1 + sqrt(phi))."""
    p = math.sqrt(phi(B))
    return (1.0 - p) / (1.0 + p)


def log_norm_bounds(n: int, a_star: float, a_upper: float, d: int) -> tuple[float, float]:
    """Envelope (-c n, c n) for log-norms of nonzero n-fold products whose
    nonzero entries lie in [a_star, a_upper]; c = max(|log a_star|,
    |log(a_upper d^2)|)."""
    if not 0 < a_star <= a_upper:
        raise DomainError("need 0 < a_star <= a_upper")
    c = max(abs(math.log(a_star)), abs(math.log(a_upper * d * d)))
    return (-c * n, c * n)


# ---------------------------------------------------------------------------
# Scaled products
# ---------------------------------------------------------------------------


class ScaledProduct:
    """Running matrix product kept at entry-sum 1, with the accumulated
    log-scale stored separately, so log_norm always equals the log
    entry-sum norm of the full product without overflow.

    The length-0 accumulator represents the empty product: its unit is the
    identity (not sum-normalized) and its log_norm is 0. The boolean
    support rides along as exact bitmask rows; a product is zero iff its
    support product is zero.
    """

    __slots__ = ("dim", "unit", "support_rows", "log_norm", "length")

    def __init__(self, dim, unit, support_rows, log_norm, length):
        self.dim = dim
        self.unit = unit
        self.support_rows = support_rows
        self.log_norm = log_norm
        self.length = length

    @classmethod
    def empty(cls, d: int) -> "ScaledProduct":
        return cls(d, np.eye(d), identity_rows(d), 0.0, 0)

    @property
    def is_zero(self) -> bool:
        return all(r == 0 for r in self.support_rows)

    @property
    def support(self) -> np.ndarray:
        return support_from_rows(self.support_rows, self.dim)

    @property
    def unit_matrix(self) -> NonNegMatrix:
        """Materialize the normalized product; raises when a structurally
        nonzero entry has underflowed to float zero."""
        return NonNegMatrix(self.unit, self.support, _position=self.length)

    def multiply(self, B) -> "ScaledProduct":
        """Accumulator for (old product) . B."""
        B = as_matrix(B)
        if B.dim != self.dim:
            raise DomainError("dimension mismatch")
        rows = rows_mul(self.support_rows, rows_from_support(B.support))
        raw = self.unit @ B.entries
        if all(r == 0 for r in rows):
            return ScaledProduct(
                self.dim, np.zeros_like(raw), rows, float("-inf"), self.length + 1
            )
        s = float(raw.sum())
        if s == 0.0:
            raise UnderflowError_(
                "entry-sum collapsed to zero on a structurally nonzero product",
                position=self.length + 1,
            )
        if not math.isfinite(s):
            raise RangeError("entry-sum overflowed; rescale the factors")
        return ScaledProduct(self.dim, raw / s, rows, self.log_norm + math.log(s), self.length + 1)


def scaled_multiply(acc: ScaledProduct, B) -> ScaledProduct:
    """Functional form of :meth:`ScaledProduct.multiply`."""
    return acc.multiply(B)


def _squared(acc: ScaledProduct) -> ScaledProduct:
    rows = rows_mul(acc.support_rows, acc.support_rows)
    raw = acc.unit @ acc.unit
    if all(r == 0 for r in rows):
        return ScaledProduct(acc.dim, np.zeros_like(raw), rows, float("-inf"), acc.length * 2)
    s = float(raw.sum())
    if s == 0.0:
        raise UnderflowError_("entry-sum collapsed while squaring", position=acc.length * 2)
    return ScaledProduct(
        acc.dim, raw / s, rows, 2.0 * acc.log_norm + math.log(s), acc.length * 2
    )


def spectral_radius(B, tol: float = 1e-14, max_squarings: int = 200) -> float:
    """Spectral radius by renormalized repeated squaring.

    Gelfand estimates ||B^(2^k)||^(1/2^k) are monitored until two
    successive values differ by less than tol * max(1, estimate); exact
    for d = 1 and structurally-zero powers (acyclic support) return 0.
    """
    if tol <= 0:
        raise DomainError("tol must be positive")
    B = as_matrix(B)
    if B.dim == 1:
        return float(B.entries[0, 0])
    if B.is_zero:
        return 0.0
    acc = ScaledProduct.empty(B.dim).multiply(B)
    prev = None
    for k in range(1, max_squarings + 1):
        acc = _squared(acc)
        if acc.is_zero:
            return 0.0
        est = math.exp(acc.log_norm / acc.length)
        if prev is not None and abs(est - prev) <= tol * max(1.0, abs(est)):
            return est
        prev = est
    raise BudgetExceededError(
        f"spectral radius did not settle within {max_squarings} squarings",
        last_estimates=(prev, est),
    )


# ---------------------------------------------------------------------------
# Serialization: dense decimal text and compact binary
# ---------------------------------------------------------------------------


def matrix_to_text(B) -> str:
    """Dense row-major decimal text: first line the dimension, then one
    line per row with repr() entries (shortest round-tripping decimals)."""
    B = as_matrix(B)
    lines = [str(B.dim)]
    for row in B.entries:
        lines.append(" ".join(repr(float(x)) for x in row))
    return "\n".join(lines) + "\n"


def matrix_from_text(text: str) -> NonNegMatrix:
    lines = [ln for ln in text.strip().splitlines() if ln.strip()]
    d = int(lines[0])
    rows = [[float(tok) for tok in ln.split()] for ln in lines[1 : d + 1]]
    return NonNegMatrix(np.array(rows))


def matrix_to_bytes(B) -> bytes:
    """Compact binary form, bit-exact: little-endian uint32 dimension d,
    then d*d float64 entries row-major, then ceil(d*d/8) bytes of support
    bitmap (row-major, LSB-first within each byte)."""
    B = as_matrix(B)
    d = B.dim
    out = bytearray(struct.pack("<I", d))
    out += B.entries.astype("<f8").tobytes()
    out += np.packbits(B.support.reshape(-1), bitorder="little").tobytes()
    return bytes(out)


def matrix_from_bytes(data: bytes) -> NonNegMatrix:
    (d,) = struct.unpack_from("<I", data, 0)
    entries = np.frombuffer(data, dtype="<f8", count=d * d, offset=4).reshape(d, d)
    bitmap_off = 4 + 8 * d * d
    nbytes = (d * d + 7) // 8
    bits = np.unpackbits(
        np.frombuffer(data, dtype=np.uint8, count=nbytes, offset=bitmap_off),
        bitorder="little",
    )[: d * d]
    return NonNegMatrix(entries.copy(), bits.reshape(d, d).astype(bool))
