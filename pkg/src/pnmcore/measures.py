"""Information quantifiers, flux series, and non-Markovianity measures.

All measures here are evaluated for explicit initializations (ancilla-free
orthogonal state pairs) rather than by maximizing over the full state space.
For depolarizing evolutions this is exact: every orthogonal pair saturates
the optimum because the trace-norm distance scales with the characteristic
function.  For other families the results are lower bounds and the report
labels them as such.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import linalg
from .errors import (
    DegeneratePair,
    DomainError,
    UndefinedIntermediateMap,
    UnsupportedDimension,
    ZeroDifference,
)
from .evolutions import Depolarizing, Evolution, QuasiEternal, quasi_eternal_prob_grid
from .exprparse import ScalarFn, numeric_derivative
from .numerics import bisect_boundary, bisect_root

HERM_INPUT_TOL = 1e-8


@dataclass(frozen=True)
class StatePair:
    """Two density matrices of equal dimension, evolved and compared."""

    rho1: np.ndarray
    rho2: np.ndarray

    def __post_init__(self):
        if self.rho1.shape != self.rho2.shape:
            raise DomainError("state pair dimensions differ")
        for rho in (self.rho1, self.rho2):
            if not linalg.is_valid_density_matrix(rho, tol=1e-8):
                raise DomainError("StatePair entries must be density matrices")

    @property
    def dim(self) -> int:
        return self.rho1.shape[0]


def distinguishability(p: StatePair) -> float:
    """Trace-norm distance ||rho1 - rho2||_1, in [0, 2]."""
    return linalg.trace_norm(p.rho1 - p.rho2)


def guessing_probability(p: StatePair) -> float:
    """Optimal success probability for discriminating the two states with
    equal priors."""
    return (2.0 + distinguishability(p)) / 4.0


def evolve_pair(e: Evolution, p: StatePair, t: float) -> StatePair:
    m = e.dynamical_map(t)
    return StatePair(linalg.apply_map(m, p.rho1), linalg.apply_map(m, p.rho2))


def orthogonal_pair_from_difference(delta_op: np.ndarray) -> StatePair:
    """Split a traceless hermitian operator into an orthogonal state pair
    whose difference is proportional to it with trace norm 2."""
    if np.max(np.abs(delta_op - delta_op.conj().T)) > HERM_INPUT_TOL:
        raise DomainError("difference operator must be hermitian")
    if abs(np.trace(delta_op).real) > HERM_INPUT_TOL:
        raise DomainError("difference operator must be traceless")
    w, v = np.linalg.eigh(linalg.hermitian_part(delta_op))
    tn = float(np.sum(np.abs(w)))
    if tn < 1e-12:
        raise ZeroDifference("difference operator is numerically zero")
    w = 2.0 * w / tn
    pos = (v * np.clip(w, 0.0, None)) @ v.conj().T
    neg = (v * np.clip(-w, 0.0, None)) @ v.conj().T
    return StatePair(linalg.hermitian_part(pos), linalg.hermitian_part(neg))


@dataclass(frozen=True)
class FluxSeries:
    """Information values W on a uniform time grid with forward-difference
    fluxes sigma (length n - 1)."""

    times: np.ndarray
    W: np.ndarray
    sigma: np.ndarray


def flux_series(e: Evolution, p: StatePair, horizon: float, n: int) -> FluxSeries:
    if n < 2:
        raise DomainError("flux series needs at least two samples")
    times = np.linspace(0.0, horizon, n)
    if isinstance(e, Depolarizing) and p.dim == e.dim:
        # trace distance of a depolarized pair scales exactly with f
        d0 = distinguishability(p)
        W = d0 * np.abs(np.asarray(e.f(times), dtype=float))
    else:
        W = np.array([distinguishability(evolve_pair(e, p, float(t))) for t in times])
    step = float(times[1] - times[0])
    return FluxSeries(times, W, np.diff(W) / step)


def integrate_flux_measures(series: FluxSeries):
    """(M_W, M_W_max, M_W_av): total retrieved information, largest
    single-interval backflow, and largest excess over the running mean."""
    W = series.W
    step = float(series.times[1] - series.times[0])
    m_w = float(np.sum(np.clip(np.diff(W), 0.0, None)))
    m_w_max = float(max(0.0, np.max(W - np.minimum.accumulate(W))))
    # trapezoidal running mean of W on [0, t_k]
    cum = np.concatenate([[0.0], np.cumsum((W[1:] + W[:-1]) / 2.0 * step)])
    with np.errstate(invalid="ignore", divide="ignore"):
        mean = cum[1:] / series.times[1:]
    m_w_av = float(max(0.0, np.max(W[1:] - mean)))
    return m_w, m_w_max, m_w_av


def revivals_delta(f: ScalarFn, horizon: float, n: int = 2000) -> float:
    """Total increase of f over all maximal intervals of growth, with the
    interval endpoints refined by bisection on the derivative sign."""
    times = np.linspace(0.0, horizon, n)
    fv = np.asarray(f(times), dtype=float)
    rising = np.diff(fv) > 0
    # refine each slope sign flip to the derivative zero crossing
    def refine(i: int) -> float:
        lo, hi = float(times[max(i - 1, 0)]), float(times[min(i + 1, n - 1)])
        g = lambda x: numeric_derivative(f, x)
        if g(lo) * g(hi) < 0:
            return bisect_root(g, lo, hi, xtol=1e-6)
        return float(times[i])

    total = 0.0
    k = 0
    while k < n - 1:
        if not rising[k]:
            k += 1
            continue
        j = k
        while j < n - 1 and rising[j]:
            j += 1
        start = refine(k) if k > 0 else 0.0
        end = refine(j) if j < n - 1 else horizon
        total += f.eval_finite(end) - f.eval_finite(start)
        k = j
    return total


def depolarizing_measures(delta: float, f_at_T: float):
    """Closed forms (M_D, M_D_core, M_mix, M_mix_core) for a depolarizing
    evolution with total revival delta and characteristic value f(T)."""
    if f_at_T <= 0:
        raise DomainError(f"f at T must be positive, got {f_at_T}")
    if delta < 0:
        raise DomainError(f"total revival must be non-negative, got {delta}")
    return (
        2.0 * delta,
        2.0 * delta / f_at_T,
        delta / (1.0 + delta),
        delta / (f_at_T + delta),
    )


def amplification_factor(e: Evolution, p: StatePair, T: float) -> float:
    """Backflow gain of the core over the parent: 2 divided by the
    distinguishability surviving at time T."""
    d = distinguishability(evolve_pair(e, p, T))
    if d < 1e-12:
        raise DegeneratePair("evolved pair is indistinguishable at T")
    return 2.0 / d


def _choi_trace_norm_excess(e: Evolution, s: float, t: float) -> float:
    if isinstance(e, Depolarizing):
        fs = e.f_at(s)
        if abs(fs) <= 1e-12:
            raise UndefinedIntermediateMap(f"f({s}) = 0")
        g = e.f_at(t) / fs
        eigs = np.array([(1 + (e.dim**2 - 1) * g), *([1 - g] * (e.dim**2 - 1))]) / e.dim**2
        return max(0.0, float(np.sum(np.abs(eigs))) - 1.0)
    if isinstance(e, QuasiEternal):
        return max(0.0, float(np.sum(np.abs(e.probs(s, t)))) - 1.0)
    choi = linalg.choi_of(e.intermediate_map(s, t))
    return max(0.0, linalg.trace_norm(choi) - 1.0)


def _rhp_once(e: Evolution, horizon: float, n: int) -> float:
    times = np.linspace(0.0, horizon, n)
    if isinstance(e, Depolarizing):
        fv = np.asarray(e.f(times), dtype=float)
        fs, ft = fv[:-1], fv[1:]
        defined = np.abs(fs) > 1e-12
        with np.errstate(divide="ignore", invalid="ignore"):
            g = ft / fs
        k = e.dim**2 - 1
        excess = (np.abs(1 + k * g) + k * np.abs(1 - g)) / (k + 1) - 1.0
        return float(np.sum(np.clip(excess[defined], 0.0, None)))
    if isinstance(e, QuasiEternal):
        p0, pxy, pz = quasi_eternal_prob_grid(e, times[:-1], times[1:])
        tn = np.abs(p0) + 2.0 * np.abs(pxy) + np.abs(pz)
        return float(np.sum(np.clip(tn - 1.0, 0.0, None)))
    if hasattr(e, "map_eigenvalues"):
        eig = np.array([e.map_eigenvalues(float(t)) for t in times])
        with np.errstate(divide="ignore", invalid="ignore"):
            r = eig[1:] / eig[:-1]
        lx, ly, lz = r[:, 0], r[:, 1], r[:, 2]
        tn = (
            np.abs(1 + lx + ly + lz)
            + np.abs(1 + lx - ly - lz)
            + np.abs(1 - lx + ly - lz)
            + np.abs(1 - lx - ly + lz)
        ) / 4.0
        good = np.isfinite(tn)
        return float(np.sum(np.clip(tn[good] - 1.0, 0.0, None)))
    total = 0.0
    for s, t in zip(times[:-1], times[1:]):
        try:
            total += _choi_trace_norm_excess(e, float(s), float(t))
        except UndefinedIntermediateMap:
            continue
    return total


def rhp_measure(e: Evolution, horizon: float, n: int = 4000, drift_tol: float = 2e-5) -> float:
    """Accumulated Choi trace-norm excess of grid-step intermediate maps,
    with the step halved until the value drifts less than drift_tol and a
    final Richardson extrapolation of the first-order step error.  Values
    that keep growing under refinement diverge and report inf.  Undefined
    steps are skipped."""
    cheap = isinstance(e, (Depolarizing, QuasiEternal))
    if not cheap:
        n = min(n, 1000)
    value = _rhp_once(e, horizon, n)
    drift = math.inf
    for _ in range(7 if cheap else 2):
        n = 2 * n
        refined = _rhp_once(e, horizon, n)
        drift = refined - value
        if abs(drift) < drift_tol:
            return 2.0 * refined - value
        value = refined
    # a drift that never shrinks under halving marks a divergent integral
    # (the characteristic function passes through zero)
    if cheap and abs(drift) > 1e-2:
        return math.inf
    return value


def eb_time_qubit(e: Evolution, horizon: float, n: int = 400) -> Optional[float]:
    """Earliest time after which the map stays entanglement-breaking up to
    the horizon; None if it never does."""
    if e.dim != 2:
        raise UnsupportedDimension(f"EB check implemented for qubits, got dim {e.dim}")
    times = np.linspace(0.0, horizon, n)
    eb = np.array([linalg.is_eb_qubit(e.dynamical_map(float(t))) for t in times])
    if not eb[-1]:
        return None
    # onset of the trailing all-EB suffix
    idx = len(eb) - 1
    while idx > 0 and eb[idx - 1]:
        idx -= 1
    if idx == 0:
        return 0.0
    return bisect_boundary(
        lambda x: not linalg.is_eb_qubit(e.dynamical_map(x)),
        float(times[idx - 1]),
        float(times[idx]),
        xtol=1e-5,
    )


@dataclass(frozen=True)
class MeasureReport:
    """Measure bundle for one evolution and, when NNM, its extracted core.
    None marks a quantity with no closed form for the family (M_mix outside
    depolarizing) or no EB onset inside the horizon."""

    delta: float
    M_D: float
    M_D_core: Optional[float]
    M_mix: Optional[float]
    M_mix_core: Optional[float]
    M_W_max: float
    M_W_av: float
    rhp: float
    amplification: Optional[float]
    eb_time: Optional[float]
    exact: bool = True


def _default_pair(dim: int) -> StatePair:
    d = np.zeros((dim, dim), dtype=complex)
    d[0, 0], d[1, 1] = 1.0, -1.0
    return orthogonal_pair_from_difference(d)


def measure_report(
    e: Evolution, horizon: float, T: float, n: int = 2000, pair: Optional[StatePair] = None
) -> MeasureReport:
    """Full measure bundle for an evolution whose T has been computed."""
    pair = pair or _default_pair(e.dim)
    series = flux_series(e, pair, horizon, n)
    m_w, m_w_max, m_w_av = integrate_flux_measures(series)
    rhp = rhp_measure(e, horizon, n)
    eb = eb_time_qubit(e, horizon, max(400, n // 4)) if e.dim == 2 else None
    amp = None
    if math.isfinite(T) and T >= 0:
        try:
            amp = amplification_factor(e, pair, T)
        except DegeneratePair:
            amp = None
    if isinstance(e, Depolarizing):
        delta = revivals_delta(e.f, horizon, n)
        f_at_T = e.f_at(T) if math.isfinite(T) else 1.0
        if f_at_T > 0:
            m_d, m_d_core, m_mix, m_mix_core = depolarizing_measures(delta, f_at_T)
        else:
            m_d, m_d_core, m_mix, m_mix_core = 2.0 * delta, None, None, None
        return MeasureReport(
            delta, m_d, m_d_core, m_mix, m_mix_core, m_w_max, m_w_av, rhp, amp, eb, True
        )
    delta = m_w / 2.0
    m_d_core = m_w * amp / 2.0 if amp is not None else None
    return MeasureReport(
        delta, m_w, m_d_core, None, None, m_w_max, m_w_av, rhp, amp, eb, False
    )
