"""Constructive exponent estimation through return words.

Pick a positivity window u and a marker v extending it, decompose the
orbit prefix at the marker's return times, and average per-return-word
log-norms; quasi-multiplicativity bounds the error by a band proportional
to the return rate. The periodic case is exact: log of the spectral
radius of the period product divided by the period.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .cocycles import CocycleSpec, _accumulate, check_positivity_condition, partial_product
from .errors import (
    ConditionUnsatisfiedError,
    DomainError,
    InsufficientContextError,
)
from .matrices import elem_constant, spectral_radius
from .words import FiniteWord, ReturnDecomposition, decompose_returns, occurrences

_NEG_INF = float("-inf")


@dataclass(frozen=True)
class MarkerSelection:
    """Positivity window u (with horizon ell0 and entry floor b) plus the
    marker v: the first k0 symbols of the first observed point z in [u].

    c1 is the quasi-multiplicativity constant of the ell0-step product on
    [u]; shift_exits_u reports whether shifting z by |u| leaves [u] (None
    when the prefix is too short to tell).
    """

    u: FiniteWord
    ell0: int
    b: float
    z_position: int
    z_prefix: FiniteWord
    v: FiniteWord
    k0: int
    c1: float
    shift_exits_u: bool | None

    def describe(self) -> dict:
        return {
            "u": self.u.to_text(),
            "ell0": self.ell0,
            "b": self.b,
            "z_position": self.z_position,
            "v": self.v.to_text(),
            "k0": self.k0,
            "c1": self.c1,
            "shift_exits_u": self.shift_exits_u,
        }


def select_marker(spec: CocycleSpec, prefix: FiniteWord, k0: int, max_ell: int,
                  occurrence_index: int = 0, start: int = 0) -> MarkerSelection:
    """Find the positivity window and cut the marker out of the orbit.

    k0 below |u| is clamped up to |u| so the marker always determines the
    u-cylinder. occurrence_index selects which occurrence of u seeds z
    (default: the first).
    """
    if k0 < 1:
        raise DomainError("k0 must be >= 1")
    witness = check_positivity_condition(spec, prefix, max_ell, start=start)
    if witness is None:
        raise ConditionUnsatisfiedError(
            f"no positivity witness among observed windows up to ell={max_ell}"
        )
    u, ell0, b = witness.u, witness.ell0, witness.b
    occ = occurrences(prefix, u, start=0)
    if len(occ) <= occurrence_index:
        raise InsufficientContextError(
            f"only {len(occ)} occurrences of u observed; wanted index {occurrence_index}",
            required=occurrence_index + 1,
        )
    p = int(occ[occurrence_index])
    k0_eff = max(k0, len(u))
    if p + k0_eff > len(prefix):
        raise InsufficientContextError(
            f"prefix of length {len(prefix)} cannot host a k0={k0_eff} marker at {p}",
            required=p + k0_eff,
        )
    z_prefix = prefix[p : min(len(prefix), p + 2 * k0_eff)]
    v = z_prefix[:k0_eff]
    n0 = len(u)
    if p + 2 * n0 <= len(prefix):
        shifted = prefix[p + n0 : p + 2 * n0]
        shift_exits_u = shifted != u
    else:
        shift_exits_u = None
    # The ell0-step product is constant on [u] for a depth-r table, so the
    # quasi-multiplicativity constant is that single product's c(P).
    P = np.eye(spec.dim)
    for t in range(ell0):
        P = P @ spec._mats[spec.word_index(u.symbols[t : t + spec.depth])]
    c1 = elem_constant(P)
    return MarkerSelection(u, ell0, b, p, z_prefix, v, k0_eff, c1, shift_exits_u)


@dataclass(frozen=True)
class ReturnFormulaEstimate:
    """Orbit-average exponent over return blocks below the length cutoff.

    estimate = short_sum / tau_i with the prefix block (tau_{-1} = 0
    convention) always included; correction_band = (i / tau_i)|log c1| is
    the quasi-multiplicativity slack, and long_mass the horizon fraction
    covered by return words above the cutoff.
    """

    i: int
    tau_i: int
    cutoff: int
    short_sum: float
    long_mass: float
    estimate: float
    correction_band: float
    mixed_support: bool
    histogram: dict
    selection: MarkerSelection

    def to_json(self) -> str:
        doc = {
            "selection": self.selection.describe(),
            "i": self.i,
            "tau_i": self.tau_i,
            "cutoff": self.cutoff,
            "short_sum": self.short_sum,
            "long_mass": self.long_mass,
            "estimate": self.estimate,
            "correction_band": self.correction_band,
            "mixed_support": self.mixed_support,
            "histogram": self.histogram,
        }
        return json.dumps(doc, sort_keys=True, indent=2)


def _block_log_norms(spec: CocycleSpec, prefix: FiniteWord,
                     decomp: ReturnDecomposition) -> np.ndarray:
    """log||A^(tau_{j-1}, tau_j)|| for j = 0..count, grouped by the block's
    symbols (with the depth lookahead) so each distinct block is computed
    once."""
    r = spec.depth
    arr = prefix.symbols
    taus = np.concatenate([[0], decomp.return_times])
    out = np.empty(len(taus) - 1)
    cache: dict[bytes, float] = {}
    for j in range(len(taus) - 1):
        a, b = int(taus[j]), int(taus[j + 1])
        key = arr[a : b + r - 1].tobytes()
        val = cache.get(key)
        if val is None:
            idx = spec.factor_indices(arr, a, b)
            _, zero_index, final = _accumulate(spec, idx)
            val = _NEG_INF if zero_index is not None else final.log_norm
            cache[key] = val
        out[j] = val
    return out


def return_formula_estimate(spec: CocycleSpec, prefix: FiniteWord,
                            selection: MarkerSelection, cutoff: int) -> ReturnFormulaEstimate:
    """Assemble the return-word exponent estimate at length cutoff M."""
    if cutoff < 0:
        raise DomainError("cutoff must be non-negative")
    decomp = decompose_returns(prefix, selection.v)
    if decomp.count < 1:
        raise InsufficientContextError(
            "marker must occur at least twice to form a return word", required=2
        )
    if len(prefix) < int(decomp.return_times[-1]) + spec.depth - 1:
        decomp = ReturnDecomposition(
            prefix, selection.v, decomp.return_times[:-1]
        )  # drop a final return too close to the edge for the depth lookahead
    logs = _block_log_norms(spec, prefix, decomp)
    lengths = np.concatenate([[decomp.return_times[0]], decomp.lengths])
    short = np.ones(len(logs), dtype=bool)
    short[1:] = lengths[1:] <= cutoff
    finite = np.isfinite(logs)
    mixed = bool(np.any(~finite & short))
    used = short & finite
    tau_i = int(decomp.return_times[-1])
    i = decomp.count
    short_sum = float(logs[used].sum())
    hist: dict[str, dict] = {}
    for L in np.unique(lengths[1:]):
        sel = lengths[1:] == L
        vals = logs[1:][sel]
        fin = vals[np.isfinite(vals)]
        hist[str(int(L))] = {
            "count": int(sel.sum()),
            "mean_log_norm": float(fin.mean()) if len(fin) else None,
        }
    return ReturnFormulaEstimate(
        i=i,
        tau_i=tau_i,
        cutoff=cutoff,
        short_sum=short_sum,
        long_mass=float(lengths[1:][lengths[1:] > cutoff].sum() / tau_i),
        estimate=short_sum / tau_i,
        correction_band=(i / tau_i) * abs(math.log(selection.c1)),
        mixed_support=mixed,
        histogram=hist,
        selection=selection,
    )


@dataclass(frozen=True)
class QuasiMultiplicativityReport:
    """Per-return-time ratios ||A^(tau_j + ell)|| / (||A^(tau_j)|| *
    ||A^(tau_j, tau_j + ell)||), pinned to [c1, 1] at positivity markers."""

    taus: np.ndarray
    ratios: np.ndarray
    c1: float

    @property
    def min_ratio(self) -> float:
        return float(self.ratios.min())

    @property
    def max_ratio(self) -> float:
        return float(self.ratios.max())


def quasi_multiplicativity_check(spec: CocycleSpec, prefix: FiniteWord,
                                 selection: MarkerSelection, ell: int) -> QuasiMultiplicativityReport:
    if ell < len(selection.u):
        raise DomainError(f"probe length must be >= |u| = {len(selection.u)}")
    decomp = decompose_returns(prefix, selection.v)
    r = spec.depth
    taus = [int(t) for t in decomp.return_times if t + ell + r - 1 <= len(prefix)]
    if not taus:
        raise InsufficientContextError("no return time leaves room for the probe", required=ell)
    marks = sorted({t for t in taus} | {t + ell for t in taus})
    idx = spec.factor_indices(prefix.symbols, 0, marks[-1])
    values, _, _ = _accumulate(spec, idx, checkpoints=marks)
    at = dict(zip(marks, values))
    ratios = []
    for t in taus:
        tail = partial_product(spec, prefix, t, t + ell)
        ratios.append(math.exp(at[t + ell] - at[t] - tail.log_norm))
    return QuasiMultiplicativityReport(np.array(taus), np.array(ratios), selection.c1)


def periodic_exponent(spec: CocycleSpec, cycle: FiniteWord, rtol: float = 1e-12) -> float:
    """Exact exponent on the periodic orbit cycle^inf: log rho of the
    period product over the period. Computed for every rotation of the
    cycle and asserted rotation-invariant; a nilpotent period product
    gives -inf."""
    p = len(cycle)
    if p < 1:
        raise DomainError("cycle must be nonempty")
    vals = []
    for t in range(p):
        reps = -(-(p + spec.depth - 1 + t) // p) + 1
        ext = np.tile(cycle.symbols, reps)[t : t + p + spec.depth - 1]
        sp = partial_product(spec, FiniteWord(ext, spec.alphabet), 0, p)
        if sp.is_zero:
            vals.append(_NEG_INF)
            continue
        rho_unit = spectral_radius(sp.unit_matrix)
        if rho_unit == 0.0:
            vals.append(_NEG_INF)
        else:
            vals.append((sp.log_norm + math.log(rho_unit)) / p)
    finite = [v for v in vals if v != _NEG_INF]
    if finite and len(finite) != len(vals):
        raise DomainError("rotations disagree on nilpotency; inconsistent table")
    if not finite:
        return _NEG_INF
    spread = max(finite) - min(finite)
    if spread > rtol * (1.0 + abs(finite[0])):
        raise DomainError(
            f"period exponent not rotation-invariant within {rtol}: spread {spread}"
        )
    return vals[0]
