"""Multifractal spectrum of weighted orbit averages.

A two-coordinate potential f on a q-symbol space and a weight stream
taking finitely many values define a family of positive matrices
A_j(beta) with entries exp(beta * v_j * f(a, b)). The pressure psi(beta)
is the exponent of that matrix family along the weight stream, and the
dimension spectrum is its Legendre transform divided by log q.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .cocycles import CocycleSpec, lyapunov_trace
from .errors import DomainError, RangeError
from .returns import periodic_exponent
from .words import Alphabet, PeriodicSource, WordSource

_EXP_LIMIT = 700.0  # exp overflows just above this


@dataclass(frozen=True)
class WeightedAverageSpec:
    """Potential table f(a, b) over a q-letter state space, weight values
    v_0..v_{m-1}, and the weight stream selecting one value per step."""

    potential: np.ndarray
    weight_values: np.ndarray
    weight_source: WordSource

    def __post_init__(self):
        pot = np.asarray(self.potential, dtype=float)
        if pot.ndim != 2 or pot.shape[0] != pot.shape[1] or pot.shape[0] < 2:
            raise DomainError("potential must be a q x q table with q >= 2")
        if not np.all(np.isfinite(pot)):
            raise DomainError("potential values must be finite")
        w = np.asarray(self.weight_values, dtype=float).reshape(-1)
        if w.size < 1 or not np.all(np.isfinite(w)):
            raise DomainError("need at least one finite weight value")
        if self.weight_source.alphabet.size != w.size:
            raise DomainError("weight source alphabet must match the number of weight values")
        object.__setattr__(self, "potential", pot)
        object.__setattr__(self, "weight_values", w)

    @property
    def q(self) -> int:
        return self.potential.shape[0]

    def describe(self) -> dict:
        return {
            "states": self.q,
            "potential": self.potential.tolist(),
            "weights": self.weight_values.tolist(),
            "weight_source": self.weight_source.describe(),
        }


def beta_cocycle(spec: WeightedAverageSpec, beta: float) -> CocycleSpec:
    """Depth-1 cocycle over the weight alphabet: symbol j maps to the
    strictly positive matrix exp(beta * v_j * f)."""
    peak = abs(beta) * float(np.abs(spec.weight_values).max()) * float(
        np.abs(spec.potential).max()
    )
    if peak > _EXP_LIMIT:
        raise RangeError(
            f"|beta * v * f| reaches {peak:.1f} > {_EXP_LIMIT}; rescale the potential or weights"
        )
    m = len(spec.weight_values)
    table = {
        (j,): np.exp(beta * spec.weight_values[j] * spec.potential) for j in range(m)
    }
    return CocycleSpec(Alphabet(m), 1, table)


def psi(spec: WeightedAverageSpec, beta: float, horizon: int) -> float:
    """Pressure at beta: exponent of the beta-deformed family along the
    weight stream.

    Periodic weight streams use the exact period spectral radius; other
    streams use the trace slope between horizon/2 and horizon, which
    cancels the O(1) norm constant.
    """
    if horizon < 1:
        raise DomainError("horizon must be >= 1")
    cocycle = beta_cocycle(spec, beta)
    src = spec.weight_source
    if isinstance(src, PeriodicSource):
        return periodic_exponent(cocycle, src.cycle)
    half = max(1, horizon // 2)
    cps = [half, horizon] if half < horizon else [horizon]
    return lyapunov_trace(cocycle, src, cps).slope_estimate()


@dataclass(frozen=True)
class SpectrumPoint:
    beta: float
    psi: float
    alpha: float          # numerical derivative psi'(beta)
    dim: float            # (psi - alpha * beta) / log q
    in_domain: bool       # False when dim < -1e-6 (outside the spectrum)


def spectrum_curve(spec: WeightedAverageSpec, betas, horizon: int,
                   h: float | None = None) -> list[SpectrumPoint]:
    """Dimension spectrum along a beta grid.

    alpha is the central difference (psi(b+h) - psi(b-h)) / 2h with the
    default step 1e-3 * (1 + |beta|); the dimension at each point is the
    Legendre value (psi - alpha*beta)/log q.
    """
    grid = np.asarray(betas, dtype=float)
    if grid.ndim != 1 or len(grid) == 0 or np.any(np.diff(grid) <= 0):
        raise DomainError("beta grid must be strictly increasing")
    logq = math.log(spec.q)
    out = []
    for beta in grid:
        step = h if h is not None else 1e-3 * (1.0 + abs(beta))
        p0 = psi(spec, beta, horizon)
        alpha = (psi(spec, beta + step, horizon) - psi(spec, beta - step, horizon)) / (2 * step)
        dim = (p0 - alpha * beta) / logq
        out.append(SpectrumPoint(float(beta), p0, alpha, dim, dim >= -1e-6))
    return out


def spectrum_to_csv(points: list[SpectrumPoint]) -> str:
    lines = ["beta,psi,alpha,dim"]
    for pt in points:
        lines.append(f"{pt.beta!r},{pt.psi!r},{pt.alpha!r},{pt.dim!r}")
    return "\n".join(lines) + "\n"


def weighted_average_from_description(d) -> WeightedAverageSpec:
    from .words import source_from_description

    return WeightedAverageSpec(
        np.asarray(d["potential"], dtype=float),
        np.asarray(d["weights"], dtype=float),
        source_from_description(d["weight_source"]),
    )
