"""The discord marker Q: Gaussian closed form, general Wigner evaluator, classifiers.

Q vanishes exactly on states with zero discord on mode A. For Wigner states it
is the difference of two 10-dimensional phase-space integrals over
``alpha_1 .. alpha_5``; each is Gaussian-times-polynomial and is evaluated
exactly by :mod:`discordq.gauss`.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .covariance import GaussianParams
from .errors import ComplexResidue, Degenerate, DiscordQError, ParamMismatch
from .gauss import integrate_factored
from .wigner import WignerState, make_photon_added_squeezed_thermal, make_squeezed_thermal

DEFAULT_THRESHOLD = 1e-9
LOG10_FLOOR = 1e-300
NALPHA = 5
NREAL = 2 * NALPHA
PREFACTOR_LOG = math.log(4 * math.pi**3)


class Method(str, Enum):
    CLOSED_GAUSSIAN = "ClosedGaussian"
    GENERAL_WIGNER = "GeneralWigner"
    FOCK_ORACLE = "FockOracle"


class Verdict(str, Enum):
    ZERO = "Zero"
    NONZERO = "Nonzero"


@dataclass(frozen=True)
class QReport:
    q: float
    term1: float
    term2: float
    method: Method
    meta: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "q": self.q,
            "term1": self.term1,
            "term2": self.term2,
            "method": self.method.value,
            "meta": dict(self.meta),
        }


@dataclass(frozen=True)
class DiscordVerdict:
    verdict: Verdict
    q: float
    threshold: float

    def to_dict(self) -> dict:
        return {"verdict": self.verdict.value, "q": self.q, "threshold": self.threshold}


def classify(q: float, threshold: float = DEFAULT_THRESHOLD) -> DiscordVerdict:
    """Numerical zero test; floating point cannot certify an exact zero."""
    if threshold <= 0:
        raise ValueError("threshold must be positive")
    return DiscordVerdict(Verdict.NONZERO if q > threshold else Verdict.ZERO, float(q), float(threshold))


# Gaussian closed form


def q_gaussian_closed(p: GaussianParams) -> QReport:
    """Closed-form Q for a standard-form Gaussian state.

    ``q`` is computed as ``-f / (32 a R sqrtP (a R + sqrtP))`` with the
    manifestly non-negative numerator
    ``-f = b^2 (ab s - chi1 chi2) + 16 ab s (ab - chi1)(ab - chi2)``,
    ``s = chi1 + chi2``, which avoids the cancellation in ``term1 - term2``.
    """
    p.check()
    a, b = p.a, p.b
    ab = a * b
    chi = (p.c1 * p.c1, p.c2 * p.c2)
    gaps = [ab - x for x in chi]
    factors = [g * (b + 16 * a * a * b - 16 * a * x) for g, x in zip(gaps, chi)]
    if min(gaps) <= 0 or min(factors) <= 0:
        raise Degenerate("ab = c_i^2: covariance matrix is singular")
    sqrt_p = math.sqrt(factors[0] * factors[1])
    r_fac = b * b + 16 * gaps[0] * gaps[1]
    term1 = 1.0 / (32 * sqrt_p)
    term2 = 1.0 / (32 * a * r_fac)
    s = chi[0] + chi[1]
    neg_f = b * b * (ab * s - chi[0] * chi[1]) + 16 * ab * s * gaps[0] * gaps[1]
    q = neg_f / (32 * a * r_fac * sqrt_p * (a * r_fac + sqrt_p))
    return QReport(q, term1, term2, Method.CLOSED_GAUSSIAN, {"params": [a, b, p.c1, p.c2]})


def sign_function(a: float, b: float, chi1: float, chi2: float) -> float:
    """``f = prod_i (ab - chi_i)(b + 16 a^2 b - 16 a chi_i) - a^2 [b^2 + 16 prod_i (ab - chi_i)]^2``.

    ``Q >= 0`` is equivalent to ``f <= 0``; ``f = 0`` only at ``chi1 = chi2 = 0``.
    """
    ab = a * b
    prod = 1.0
    for x in (chi1, chi2):
        prod *= (ab - x) * (b + 16 * a * a * b - 16 * a * x)
    return prod - a * a * (b * b + 16 * (ab - chi1) * (ab - chi2)) ** 2


def sign_function_parts(a: float, b: float, chi1: float, chi2: float) -> dict:
    """The auxiliary quantities of the sign analysis: ``Delta``, ``g``, and ``f = 16ab(g - ab^3/16)``."""
    delta = b * (32 * a * a - 1) / (16 * a)
    g = (2 * a * b - chi1 - chi2 - delta) * (a * b - chi1) * (a * b - chi2)
    return {"delta": delta, "g": g, "f": 16 * a * b * (g - a * b**3 / 16)}


def gaussian_zero_discord(p: GaussianParams, tol: float = DEFAULT_THRESHOLD) -> DiscordVerdict:
    """Zero discord iff ``c1 = c2 = 0``, tested as ``sqrt(c1^2 + c2^2) <= tol``.

    ``tol`` bounds the size of the correlations, not Q. The reported threshold
    is ``tol**2`` mapped to Q through the slope of Q in ``c1^2 + c2^2`` at the
    origin, ``1 / (64 a^2 b^3 (1 + 16 a^2)^2)``, so that ``q <= threshold``
    agrees with the verdict away from the boundary.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    p.check()
    q = q_gaussian_closed(p).q
    slope = 1.0 / (64 * p.a**2 * p.b**3 * (1 + 16 * p.a**2) ** 2)
    zero = math.hypot(p.c1, p.c2) <= tol
    return DiscordVerdict(Verdict.ZERO if zero else Verdict.NONZERO, q, slope * tol * tol)


# general Wigner evaluator

# each Wigner factor: (mode-A argument as {alpha index: coefficient}, mode-B alpha index)
TERM1_PATTERN = (({1: 1}, 2), ({3: 1}, 2), ({5: 1}, 4), ({5: 1, 3: -1, 1: 1}, 4))
TERM2_PATTERN = (({1: 1}, 2), ({3: 1}, 4), ({5: 1}, 2), ({5: 1, 3: -1, 1: 1}, 4))
# 4 Im(alpha_j^* alpha_k) entries of the common phase: (j, k, sign)
PHASE_PAIRS = ((3, 1, 1), (5, 3, 1), (5, 1, -1))


def _x(j: int) -> int:
    return 2 * (j - 1)


def _p(j: int) -> int:
    return 2 * (j - 1) + 1


def factor_map(mode_a: dict, mode_b: int) -> np.ndarray:
    """4 x 10 map from ``(x_1, p_1, ..., x_5, p_5)`` to a Wigner argument ``(x_A, p_A, x_B, p_B)``."""
    lmap = np.zeros((4, NREAL))
    for j, coef in mode_a.items():
        lmap[0, _x(j)] += coef
        lmap[1, _p(j)] += coef
    lmap[2, _x(mode_b)] = 1.0
    lmap[3, _p(mode_b)] = 1.0
    return lmap


def phase_quad() -> np.ndarray:
    """Complex quadratic form ``A`` with ``-z.A.z/2 = i 4 Im(a3* a1 + a5* a3 - a5* a1)``.

    ``Im(z* w) = x_z p_w - p_z x_w``.
    """
    h = np.zeros((NREAL, NREAL))
    for j, k, sign in PHASE_PAIRS:
        for u, v, s in ((_x(j), _p(k), 1.0), (_p(j), _x(k), -1.0)):
            h[u, v] += 2.0 * sign * s
            h[v, u] += 2.0 * sign * s
    # phase = z.h.z, so i * phase = -z.(-2i h).z / 2
    return -2j * h


def assemble_term(w: WignerState, pattern) -> list[tuple]:
    """All component 4-tuples of one integral as ``(quad, lin, logconst, factors)``."""
    maps = [factor_map(a, b) for a, b in pattern]
    phase = phase_quad()
    out = []
    for combo in itertools.product(w.components, repeat=len(pattern)):
        quad = phase.copy()
        lin = np.zeros(NREAL, dtype=complex)
        logconst = PREFACTOR_LOG
        factors = []
        for comp, lmap in zip(combo, maps):
            quad = quad + lmap.T @ comp.quad @ lmap
            lin = lin + lmap.T @ comp.lin
            logconst += comp.logconst
            factors.append((comp.poly, lmap))
        out.append((quad, lin, logconst, factors))
    return out


def _integrate_term(w: WignerState, pattern, stats: dict) -> complex:
    total = 0j
    for quad, lin, logconst, factors in assemble_term(w, pattern):
        total += integrate_factored(quad, lin, logconst, factors, stats)
    return total


def q_general(w: WignerState) -> QReport:
    """Q of an arbitrary Gaussian-polynomial Wigner state by exact integration."""
    stats: dict = {}
    t1 = _integrate_term(w, TERM1_PATTERN, stats)
    t2 = _integrate_term(w, TERM2_PATTERN, stats)
    q = t1 - t2
    for name, val in (("term1", t1), ("term2", t2), ("q", q)):
        if abs(val.imag) > 1e-8 * (1 + abs(val.real)):
            raise ComplexResidue(f"{name} has imaginary part {val.imag:.3e}")
    meta = {
        "components": len(w.components),
        "tuples": 2 * len(w.components) ** 4,
        "max_cond": stats.get("cond", float("nan")),
        "moments": stats.get("moments", 0),
        "imag_residue": abs(q.imag),
    }
    return QReport(float(q.real), float(t1.real), float(t2.real), Method.GENERAL_WIGNER, meta)


# printed closed forms for the non-Gaussian families


def q_mixture_closed(k: float, p: GaussianParams) -> float:
    """Q of ``k rho_G + (1-k)|00><00|`` for a Gaussian with ``c1^2 = c2^2 = c^2``."""
    if not 0 <= k <= 1:
        raise ValueError("k must lie in [0, 1]")
    if abs(p.c1**2 - p.c2**2) > 1e-12:
        raise ParamMismatch(f"requires c1^2 = c2^2, got {p.c1**2:.6g} vs {p.c2**2:.6g}")
    p.check()
    a, b, c2 = p.a, p.b, p.c1**2
    kb = 1 - k
    big_a = (a * b - c2) * (b + 16 * a * (a * b - c2))
    big_b = (1 + 4 * a) ** 2 * b - 8 * (1 + 2 * a) * c2
    big_c = ((1 + 4 * a) * (1 + 4 * b) - 16 * c2) * big_b
    return (
        k**4 * b * c2 / (32 * (big_a + b * c2) * big_a)
        + 8 * k**2 * kb**2 * c2 / ((big_b + 4 * c2) * big_b)
        + 128 * k**3 * kb * (1 + 4 * b) * c2 / ((big_c + 8 * (1 + 4 * b) * c2) * big_c)
    )


def q_photon_mixed_closed(k: float) -> float:
    """Q of ``k|00><00| + (1-k)|+1><+1|``: ``k^2 (1-k)^2 / 2``."""
    return k * k * (1 - k) ** 2 / 2


def q_photon_added_n0(r: float) -> float:
    """Q of the single-photon-added two-mode squeezed vacuum."""
    t8 = math.tanh(r) ** 8
    sech2r = 1.0 / math.cosh(2 * r)
    first = (3 + math.cosh(4 * r)) * sech2r**3 / 4
    second = math.cosh(r) ** -16 * (1 + 11 * t8 + 11 * t8**2 + t8**3) / (1 - t8) ** 5
    return first - second


def q_squeezed_thermal_formula(n: float, r: float) -> float:
    m = 1 + 2 * n
    return (
        2 * math.sinh(2 * r) * math.tanh(2 * r)
        / (m**3 * (1 + 2 * n + 2 * n * n) * (3 + 8 * n + 8 * n * n + math.cosh(4 * r)))
    )


def q_symmetric_c_formula(a: float, b: float, c: float) -> float:
    """Closed form for ``c1^2 = c2^2 = c^2``: ``b c^2 / [32 (A + b c^2) A]``."""
    big_a = (a * b - c * c) * (b + 16 * a * (a * b - c * c))
    return b * c * c / (32 * (big_a + b * c * c) * big_a)


# (n, r) scans


@dataclass(frozen=True)
class ScanRow:
    n: float
    r: float
    q: float
    status: str = "ok"

    @property
    def log10_q(self) -> float:
        if self.status != "ok":
            return float("nan")
        return math.log10(max(self.q, LOG10_FLOOR))


def photon_added_q(n: float, r: float) -> float:
    return q_general(make_photon_added_squeezed_thermal(n, r)).q


def squeezed_thermal_q(n: float, r: float) -> float:
    return q_general(make_squeezed_thermal(n, r)).q


def _scan_point(args) -> ScanRow:
    q_fn, n, r = args
    try:
        q = q_fn(n, r)
    except (DiscordQError, ArithmeticError, ValueError, np.linalg.LinAlgError) as exc:
        return ScanRow(n, r, float("nan"), f"error: {type(exc).__name__}: {exc}")
    return ScanRow(n, r, q)


def scan_family(q_fn, n_grid, r_grid, workers: int = 1) -> list[ScanRow]:
    """``q_fn(n, r)`` over an (n, r) grid, n-major; failures become rows with an error status.

    Rows are independent; with ``workers > 1`` they run in a process pool and
    are returned in grid order.
    """
    points = [(q_fn, float(n), float(r)) for n in n_grid for r in r_grid]
    if workers > 1 and len(points) > 1:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(_scan_point, points))
    return [_scan_point(pt) for pt in points]


def scan_photon_added(n_grid, r_grid, workers: int = 1) -> list[ScanRow]:
    return scan_family(photon_added_q, n_grid, r_grid, workers)
