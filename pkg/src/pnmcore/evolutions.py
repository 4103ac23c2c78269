"""Dynamical-map families: depolarizing, Pauli (probability- and
rate-driven), quasi-eternal, and time-shifted derived evolutions.

Every family exposes the dynamical map at time t and the intermediate map
between two times, plus a closed-form smallest Choi eigenvalue wherever
the family provides one (numeric inversion is only a fallback).
"""

from __future__ import annotations

import bisect
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import linalg
from .errors import (
    CPTPViolation,
    NonFiniteResult,
    SingularMap,
    UndefinedIntermediateMap,
)
from .exprparse import ScalarFn
from .numerics import adaptive_simpson, bisect_root

F_ZERO_TOL = 1e-12


def t0_alpha(alpha: float) -> float:
    """Smallest admissible onset time of the quasi-eternal model:
    max{0, log(2^(1/alpha) - 1) / 2}; zero for alpha >= 1."""
    if alpha <= 0:
        raise ValueError("alpha must be positive")
    if alpha >= 1:
        return 0.0
    return max(0.0, math.log(2.0 ** (1.0 / alpha) - 1.0) / 2.0)


def quasi_eternal_probs(alpha: float, t0: float, s: float, t: float):
    """Pauli probabilities (p_0, p_x, p_y, p_z) of the intermediate map
    between s and t; s = 0 gives the dynamical map. p_z may be negative."""
    dt = t - s
    pxy = (1.0 - math.exp(-2.0 * alpha * dt)) / 4.0
    cr = _cosh_ratio_pow(t - t0, s - t0, alpha)
    pz = (1.0 + math.exp(-2.0 * alpha * dt) - 2.0 * math.exp(-alpha * dt) * cr) / 4.0
    p0 = 1.0 - 2.0 * pxy - pz
    return (p0, pxy, pxy, pz)


def _cosh_ratio_pow(a: float, b: float, alpha: float) -> float:
    # (cosh a / cosh b)^alpha, computed in log space to survive large args
    la = abs(a) + math.log1p(math.exp(-2 * abs(a))) - math.log(2.0)
    lb = abs(b) + math.log1p(math.exp(-2 * abs(b))) - math.log(2.0)
    return math.exp(alpha * (la - lb))


def pauli_probs_from_eigs(lx: float, ly: float, lz: float):
    p0 = (1.0 + lx + ly + lz) / 4.0
    px = (1.0 + lx - ly - lz) / 4.0
    py = (1.0 - lx + ly - lz) / 4.0
    pz = (1.0 - lx - ly + lz) / 4.0
    return (p0, px, py, pz)


def pauli_eigs_from_probs(p0: float, px: float, py: float, pz: float):
    lx = p0 + px - py - pz
    ly = p0 - px + py - pz
    lz = p0 - px - py + pz
    return (lx, ly, lz)


class Evolution:
    """A one-parameter family of quantum maps."""

    dim: int = 2

    def dynamical_map(self, t: float) -> linalg.Superoperator:
        raise NotImplementedError

    def intermediate_map(self, s: float, t: float) -> linalg.Superoperator:
        """V_{t,s} with dynamical_map(t) = V_{t,s} ∘ dynamical_map(s)."""
        if not 0 <= s <= t:
            raise ValueError(f"need 0 <= s <= t, got s={s}, t={t}")
        lam_s = self.dynamical_map(s)
        lam_t = self.dynamical_map(t)
        return linalg.compose_maps(lam_t, linalg.invert_map(lam_s))

    def intermediate_min_choi(self, s: float, t: float) -> float:
        """Smallest Choi eigenvalue of V_{t,s}."""
        return linalg.min_choi_eigenvalue(self.intermediate_map(s, t))

    def is_unitary_at(self, t: float) -> bool:
        return linalg.is_unitary_map(self.dynamical_map(t), 1e-9)

    def rate_min(self, t: float) -> Optional[float]:
        """min_i gamma_i(t) for rate-driven families, else None."""
        return None

    def non_bijective_time(self, horizon: float) -> Optional[float]:
        """First time in (0, horizon] where the dynamical map loses its
        inverse, if any."""
        return None


@dataclass(frozen=True)
class Depolarizing(Evolution):
    """rho -> f(t) rho + (1 - f(t)) Tr[rho] 1/d."""

    f: ScalarFn
    dim: int = 2

    def f_at(self, t: float) -> float:
        v = float(self.f(t))
        if not math.isfinite(v):
            raise NonFiniteResult(f"f({t}) is not finite")
        return v

    def dynamical_map(self, t: float) -> linalg.Superoperator:
        return linalg.depolarizing_superoperator(self.dim, self.f_at(t))

    def intermediate_map(self, s: float, t: float) -> linalg.Superoperator:
        if not 0 <= s <= t:
            raise ValueError(f"need 0 <= s <= t, got s={s}, t={t}")
        fs = self.f_at(s)
        if abs(fs) <= F_ZERO_TOL:
            raise UndefinedIntermediateMap(
                f"f({s}) = 0: the dynamical map is non-invertible at s={s}"
            )
        return linalg.depolarizing_superoperator(self.dim, self.f_at(t) / fs)

    def intermediate_min_choi(self, s: float, t: float) -> float:
        fs = self.f_at(s)
        if abs(fs) <= F_ZERO_TOL:
            raise UndefinedIntermediateMap(f"f({s}) = 0 at s={s}")
        return (1.0 - self.f_at(t) / fs) / self.dim**2

    def regularized_value(self, s: float, t: float) -> float:
        """l_{t,s} = f(s) * lambda_{t,s} = (f(s) - f(t)) / d^2; finite and
        sign-equivalent to lambda even where f(s) = 0."""
        return (self.f_at(s) - self.f_at(t)) / self.dim**2

    def is_unitary_at(self, t: float) -> bool:
        return abs(self.f_at(t) - 1.0) <= 1e-9

    def non_bijective_time(self, horizon: float) -> Optional[float]:
        return find_first_zero(self.f, horizon)


@dataclass(frozen=True)
class PauliProbs(Evolution):
    """Qubit Pauli evolution given by probability functions p_x, p_y, p_z."""

    p_x: ScalarFn
    p_y: ScalarFn
    p_z: ScalarFn
    dim: int = 2

    def probs_at(self, t: float):
        px, py, pz = (float(p(t)) for p in (self.p_x, self.p_y, self.p_z))
        if not all(map(math.isfinite, (px, py, pz))):
            raise NonFiniteResult(f"Pauli probabilities not finite at t={t}")
        return (1.0 - px - py - pz, px, py, pz)

    def map_eigenvalues(self, t: float):
        return pauli_eigs_from_probs(*self.probs_at(t))

    def dynamical_map(self, t: float) -> linalg.Superoperator:
        probs = self.probs_at(t)
        if min(probs) < -1e-9:
            raise CPTPViolation(f"Pauli probabilities {probs} negative at t={t}")
        return linalg.pauli_superoperator(probs)

    def intermediate_map(self, s: float, t: float) -> linalg.Superoperator:
        return linalg.pauli_superoperator(self._intermediate_probs(s, t))

    def _intermediate_probs(self, s: float, t: float):
        if not 0 <= s <= t:
            raise ValueError(f"need 0 <= s <= t, got s={s}, t={t}")
        es = self.map_eigenvalues(s)
        et = self.map_eigenvalues(t)
        if min(abs(e) for e in es) <= 1e-12:
            raise SingularMap(f"Pauli map not invertible at s={s}")
        return pauli_probs_from_eigs(*(a / b for a, b in zip(et, es)))

    def intermediate_min_choi(self, s: float, t: float) -> float:
        # Choi eigenvalues of a Pauli map are its four probabilities
        return min(self._intermediate_probs(s, t))

    def is_unitary_at(self, t: float) -> bool:
        # a Pauli map is unitary iff it is conjugation by a single sigma_i
        return max(self.probs_at(t)) >= 1.0 - 1e-9


class _RateIntegral:
    """Cumulative integral of a rate function with a sorted cache."""

    def __init__(self, fn):
        self.fn = fn
        self.points = [(0.0, 0.0)]  # sorted (t, integral from 0)

    def _value(self, t: float) -> float:
        v = float(self.fn(t))
        # rates with a removable endpoint singularity (bounded oscillation
        # like sin(1/t) tanh(t) at t = 0) evaluate to nan exactly there
        return v if math.isfinite(v) else 0.0

    def __call__(self, t: float) -> float:
        if t < 0:
            raise ValueError("rates are integrated from 0")
        i = bisect.bisect_right(self.points, (t, math.inf)) - 1
        lo = self.points[i]
        if lo[0] == t:
            return lo[1]
        total = lo[1] + adaptive_simpson(self._value, lo[0], t, tol=1e-9, max_depth=40)
        bisect.insort(self.points, (t, total))
        return total


@dataclass
class PauliRates(Evolution):
    """Qubit Pauli evolution defined by master-equation rates gamma_i(t).

    Map eigenvalues are lambda_i(t) = exp(-2 Int_0^t (gamma_j + gamma_k)),
    {i,j,k} a permutation of {x,y,z}.
    """

    g_x: ScalarFn
    g_y: ScalarFn
    g_z: ScalarFn
    dim: int = 2
    _integrals: tuple = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        self._integrals = (
            _RateIntegral(self.g_x),
            _RateIntegral(self.g_y),
            _RateIntegral(self.g_z),
        )

    def map_eigenvalues(self, t: float):
        ix, iy, iz = (g(t) for g in self._integrals)
        return (
            math.exp(-2.0 * (iy + iz)),
            math.exp(-2.0 * (ix + iz)),
            math.exp(-2.0 * (ix + iy)),
        )

    def probs_at(self, t: float):
        return pauli_probs_from_eigs(*self.map_eigenvalues(t))

    def dynamical_map(self, t: float) -> linalg.Superoperator:
        return linalg.pauli_superoperator(self.probs_at(t))

    def intermediate_map(self, s: float, t: float) -> linalg.Superoperator:
        return linalg.pauli_superoperator(self._intermediate_probs(s, t))

    def _intermediate_probs(self, s: float, t: float):
        if not 0 <= s <= t:
            raise ValueError(f"need 0 <= s <= t, got s={s}, t={t}")
        es = self.map_eigenvalues(s)
        et = self.map_eigenvalues(t)
        return pauli_probs_from_eigs(*(a / b for a, b in zip(et, es)))

    def intermediate_min_choi(self, s: float, t: float) -> float:
        return min(self._intermediate_probs(s, t))

    def rate_min(self, t: float) -> float:
        vals = []
        for g in (self.g_x, self.g_y, self.g_z):
            v = float(g(t))
            vals.append(v if math.isfinite(v) else 0.0)
        return min(vals)

    def is_unitary_at(self, t: float) -> bool:
        return max(self.probs_at(t)) >= 1.0 - 1e-9


def pauli_from_rates(g_x: ScalarFn, g_y: ScalarFn, g_z: ScalarFn, t: float):
    """Pauli probabilities at time t of the evolution driven by the rates."""
    return PauliRates(g_x, g_y, g_z).probs_at(t)


@dataclass(frozen=True)
class QuasiEternal(Evolution):
    """Pauli evolution with rates (alpha/2) {1, 1, -tanh(t - t0)}.

    CPTP at all times iff alpha > 0 and t0 >= t0_alpha(alpha).  An optional
    unitary prefix keeps the map equal to the identity on [0, t_unitary]
    and runs the quasi-eternal clock from there.
    """

    alpha: float
    t0: float
    t_unitary: float = 0.0
    dim: int = 2

    def __post_init__(self):
        if self.alpha <= 0:
            raise ValueError("alpha must be positive")
        if self.t_unitary < 0:
            raise ValueError("t_unitary must be non-negative")
        if self.t0 < t0_alpha(self.alpha) - 1e-12:
            raise CPTPViolation(
                f"t0 = {self.t0} below t0_alpha = {t0_alpha(self.alpha):.6f}: "
                "dynamical maps would not stay CPTP"
            )

    def _shift(self, t: float) -> float:
        return max(0.0, t - self.t_unitary)

    def probs(self, s: float, t: float):
        """Intermediate-map probabilities between s and t (s = 0: dynamical map)."""
        return quasi_eternal_probs(self.alpha, self.t0, self._shift(s), self._shift(t))

    def dynamical_map(self, t: float) -> linalg.Superoperator:
        return linalg.pauli_superoperator(self.probs(0.0, t))

    def intermediate_map(self, s: float, t: float) -> linalg.Superoperator:
        if not 0 <= s <= t:
            raise ValueError(f"need 0 <= s <= t, got s={s}, t={t}")
        return linalg.pauli_superoperator(self.probs(s, t))

    def intermediate_min_choi(self, s: float, t: float) -> float:
        # p_z(s,t) is always the smallest of the four probabilities
        return min(self.probs(s, t))

    def rate_min(self, t: float) -> float:
        if t < self.t_unitary:
            return 0.0
        return min(
            self.alpha / 2.0,
            -self.alpha / 2.0 * math.tanh(self._shift(t) - self.t0),
        )

    def is_unitary_at(self, t: float) -> bool:
        return t <= self.t_unitary + 1e-12


@dataclass(frozen=True)
class ShiftedEvolution(Evolution):
    """The derived evolution t -> V_{t + shift, shift} of a parent family.

    Generic fallback for core extraction when the parent has no
    closed-form reparametrization.
    """

    parent: Evolution
    shift: float

    @property
    def dim(self) -> int:  # type: ignore[override]
        return self.parent.dim

    def dynamical_map(self, t: float) -> linalg.Superoperator:
        return self.parent.intermediate_map(self.shift, t + self.shift)

    def intermediate_map(self, s: float, t: float) -> linalg.Superoperator:
        if not 0 <= s <= t:
            raise ValueError(f"need 0 <= s <= t, got s={s}, t={t}")
        return self.parent.intermediate_map(s + self.shift, t + self.shift)

    def intermediate_min_choi(self, s: float, t: float) -> float:
        return self.parent.intermediate_min_choi(s + self.shift, t + self.shift)

    def rate_min(self, t: float) -> Optional[float]:
        return self.parent.rate_min(t + self.shift)

    def is_unitary_at(self, t: float) -> bool:
        return linalg.is_unitary_map(self.dynamical_map(t), 1e-9)


def _log_cosh(x):
    ax = np.abs(x)
    return ax + np.log1p(np.exp(-2.0 * ax)) - math.log(2.0)


def quasi_eternal_prob_grid(e: QuasiEternal, s, t):
    """Vectorized intermediate-map probabilities (p0, pxy, pz) of a
    quasi-eternal evolution, broadcast over arrays of s and t."""
    s = np.maximum(0.0, np.asarray(s, dtype=float) - e.t_unitary)
    t = np.maximum(0.0, np.asarray(t, dtype=float) - e.t_unitary)
    dt = t - s
    e1 = np.exp(-e.alpha * dt)
    e2 = e1 * e1
    cr = np.exp(e.alpha * (_log_cosh(t - e.t0) - _log_cosh(s - e.t0)))
    pz = (1.0 + e2 - 2.0 * e1 * cr) / 4.0
    pxy = (1.0 - e2) / 4.0
    p0 = 1.0 - 2.0 * pxy - pz
    return p0, pxy, pz


def find_first_zero(f: ScalarFn, horizon: float, n: int = 2048) -> Optional[float]:
    """Earliest root of f in (0, horizon], by sign scan plus bisection."""
    ts = np.linspace(0.0, horizon, n)
    vals = np.asarray(f(ts), dtype=float)
    for i in range(1, len(ts)):
        a, b = vals[i - 1], vals[i]
        if not (math.isfinite(a) and math.isfinite(b)):
            continue
        if b == 0.0:
            return float(ts[i])
        if a > 0 > b or a < 0 < b:
            return bisect_root(lambda x: float(f(x)), float(ts[i - 1]), float(ts[i]), xtol=1e-9)
        # tangential zero: a near-zero local minimum of |f| refined to
        # confirm it actually touches 0 (a quadratic touch leaves the
        # nearest grid sample at O(step^2), not at machine zero)
        if (
            abs(b) < 1e-4
            and i + 1 < len(ts)
            and abs(vals[i + 1]) >= abs(b)
            and abs(a) >= abs(b)
        ):
            lo, hi = float(ts[i - 1]), float(ts[i + 1])
            x = _refine_min_abs(f, lo, hi)
            if abs(float(f(x))) <= 1e-10:
                return x
    return None


def _refine_min_abs(f: ScalarFn, lo: float, hi: float) -> float:
    for _ in range(80):
        third = (hi - lo) / 3.0
        a, b = lo + third, hi - third
        if abs(float(f(a))) < abs(float(f(b))):
            hi = b
        else:
            lo = a
    return 0.5 * (lo + hi)


@dataclass(frozen=True)
class ValidationReport:
    valid: bool
    f0_ok: bool
    range_violations: tuple
    t_nb: Optional[float]
    cptp_ok: bool
    notes: tuple = ()


def validate_spec(evolution: Evolution, horizon: float, n: int = 256) -> ValidationReport:
    """Check the defining invariants of an evolution on a time grid."""
    if horizon <= 0 or n < 2:
        raise ValueError("need horizon > 0 and n >= 2")
    ts = np.linspace(0.0, horizon, n)
    notes = []
    if isinstance(evolution, Depolarizing):
        vals = np.asarray(evolution.f(ts), dtype=float)
        f0_ok = bool(abs(vals[0] - 1.0) <= 1e-9)
        bad = [
            (float(t), float(v))
            for t, v in zip(ts, vals)
            if not math.isfinite(v) or v < -1e-9 or v > 1.0 + 1e-9
        ]
        t_nb = evolution.non_bijective_time(horizon)
        cptp_ok = not bad and f0_ok
        if t_nb is not None:
            notes.append(f"non-bijective at t = {t_nb:.6f} (f hits zero)")
        return ValidationReport(cptp_ok, f0_ok, tuple(bad), t_nb, cptp_ok, tuple(notes))

    bad = []
    f0_ok = True
    for t in ts:
        try:
            probs = (
                evolution.probs(0.0, float(t))
                if isinstance(evolution, QuasiEternal)
                else evolution.probs_at(float(t))  # type: ignore[attr-defined]
            )
        except AttributeError:
            probs = None
        if probs is None:
            m = linalg.min_choi_eigenvalue(evolution.dynamical_map(float(t)))
            if m < -1e-9:
                bad.append((float(t), float(m)))
        elif min(probs) < -1e-9:
            bad.append((float(t), float(min(probs))))
    ident = linalg.identity_superoperator(evolution.dim)
    f0_ok = bool(np.max(np.abs(evolution.dynamical_map(0.0).matrix - ident.matrix)) <= 1e-9)
    ok = f0_ok and not bad
    return ValidationReport(ok, f0_ok, tuple(bad), None, not bad, tuple(notes))


PAPER_EXAMPLE_F = "(1-3*t+2*t^2+2*t^3)/(1+t^2+t^3+3*t^5)"
APPENDIX_F_F = "(2*t-1)^2/(2*t^3-t+1)"
PATHOLOGICAL_RATES = ("1", "1", "-sin(1/t)*tanh(t)")


def make_preset(name: str, **params) -> Evolution:
    """Build a catalog evolution by preset name."""
    if name == "paper-example":
        return Depolarizing(ScalarFn.parse(PAPER_EXAMPLE_F), dim=int(params.get("dim", 2)))
    if name == "appendix-f":
        return Depolarizing(ScalarFn.parse(APPENDIX_F_F), dim=int(params.get("dim", 2)))
    if name == "eternal":
        return QuasiEternal(alpha=1.0, t0=0.0)
    if name == "quasi-eternal":
        alpha = float(params.get("alpha", 0.1))
        t0 = float(params["t0"]) if "t0" in params else t0_alpha(alpha)
        return QuasiEternal(alpha=alpha, t0=t0)
    if name == "pathological":
        gx, gy, gz = (ScalarFn.parse(r) for r in PATHOLOGICAL_RATES)
        return PauliRates(gx, gy, gz)
    if name == "unitary-prefix":
        alpha = float(params.get("alpha", 2.0))
        return QuasiEternal(alpha=alpha, t0=0.0, t_unitary=float(params.get("t_unitary", 1.0)))
    raise KeyError(f"unknown preset {name!r}")


PRESET_NAMES = (
    "paper-example",
    "appendix-f",
    "eternal",
    "quasi-eternal",
    "pathological",
    "unitary-prefix",
)
