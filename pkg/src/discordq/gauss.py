"""Exact integrals of polynomials against complex Gaussian kernels.

An integrand ``poly(z) * exp(-z.A.z/2 + b.z + c)`` over ``R^n`` with
``Re(A)`` positive definite equals ``exp(norm) * E[poly(Z)]``, where ``Z`` is a
formal Gaussian with mean ``A^-1 b`` and covariance ``A^-1``. The expectation
is evaluated with the integration-by-parts recursion

    E[z_i m] = mu_i E[m] + sum_j Sigma_ij E[d m / d z_j]

memoized over exponent vectors. The recursion is a polynomial identity in
(mu, Sigma), so it holds for complex moments as well.
"""

from __future__ import annotations

import sys
from dataclasses import dataclass

import numpy as np

from .errors import Divergent, IllConditioned
from .poly import SparsePoly

COND_LIMIT = 1e12
DIVERGENCE_FLOOR = 1e-14
SYMMETRY_TOL = 1e-12


@dataclass(frozen=True)
class ComplexGaussPoly:
    """``poly(z) * exp(-z.quad.z/2 + lin.z + logconst)`` over ``R^n``."""

    poly: SparsePoly
    quad: np.ndarray
    lin: np.ndarray
    logconst: complex = 0.0

    def __post_init__(self):
        quad = np.asarray(self.quad, dtype=complex)
        lin = np.asarray(self.lin, dtype=complex)
        n = quad.shape[0]
        if quad.shape != (n, n) or lin.shape != (n,) or self.poly.nvars != n:
            raise ValueError(
                f"shape mismatch: quad {quad.shape}, lin {lin.shape}, poly arity {self.poly.nvars}"
            )
        if np.max(np.abs(quad - quad.T), initial=0.0) > SYMMETRY_TOL * max(1.0, np.max(np.abs(quad))):
            raise ValueError("quadratic form is not symmetric")
        object.__setattr__(self, "quad", quad)
        object.__setattr__(self, "lin", lin)
        object.__setattr__(self, "logconst", complex(self.logconst))

    @property
    def nvars(self) -> int:
        return self.quad.shape[0]


@dataclass(frozen=True)
class GaussMoments:
    mean: np.ndarray
    cov: np.ndarray
    norm: complex
    cond: float = 1.0


def _check_kernel(quad: np.ndarray) -> float:
    """Raise unless Re(quad) is positive definite and quad is well conditioned."""
    re = 0.5 * (quad.real + quad.real.T)
    evals = np.linalg.eigvalsh(re)
    scale = max(1.0, float(np.max(np.abs(quad))))
    # below DIVERGENCE_FLOOR the kernel is treated as flat; between that and
    # 1/COND_LIMIT it is integrable but flagged as ill-conditioned
    if evals[0] <= DIVERGENCE_FLOOR * scale:
        raise Divergent(f"Re(A) is not positive definite (min eigenvalue {evals[0]:.3e})")
    cond = float(np.linalg.cond(quad))
    if not np.isfinite(cond) or cond > COND_LIMIT:
        raise IllConditioned(f"condition number {cond:.3e} exceeds {COND_LIMIT:.0e}")
    return cond


def _log_det_sqrt(quad: np.ndarray) -> complex:
    # With A = R + iS and R SPD, R^-1/2 A R^-1/2 = I + iK, K real symmetric.
    # det(A)^(1/2) = det(R)^(1/2) * prod (1 + i k)^(1/2); every factor stays in the
    # right half-plane along t -> R + itS, so principal roots give the continuous branch.
    re = 0.5 * (quad.real + quad.real.T)
    im = 0.5 * (quad.imag + quad.imag.T)
    w, v = np.linalg.eigh(re)
    if w[0] <= 0:
        raise Divergent("Re(A) is not positive definite")
    inv_sqrt = (v / np.sqrt(w)) @ v.T
    k = np.linalg.eigvalsh(inv_sqrt @ im @ inv_sqrt)
    return 0.5 * float(np.sum(np.log(w))) + 0.5 * complex(np.sum(np.log(1 + 1j * k)))


def det_sqrt_branch(quad) -> complex:
    """``det(A)**(1/2)`` continued from the positive root along ``Re(A) + i t Im(A)``."""
    quad = np.asarray(quad, dtype=complex)
    return complex(np.exp(_log_det_sqrt(quad)))


def gauss_moments(quad, lin, logconst: complex = 0.0) -> GaussMoments:
    quad = np.asarray(quad, dtype=complex)
    lin = np.asarray(lin, dtype=complex)
    cond = _check_kernel(quad)
    n = quad.shape[0]
    cov = np.linalg.inv(quad)
    cov = 0.5 * (cov + cov.T)
    mean = cov @ lin
    norm = 0.5 * n * np.log(2 * np.pi) - _log_det_sqrt(quad) + 0.5 * lin @ mean + complex(logconst)
    return GaussMoments(mean=mean, cov=cov, norm=complex(norm), cond=cond)


class MomentTable:
    """Memoized raw moments ``E[prod z_i**e_i]`` for one (mean, cov) pair."""

    def __init__(self, mean, cov):
        self.mean = [complex(v) for v in np.asarray(mean).ravel()]
        cov = np.asarray(cov, dtype=complex)
        self.cov = [[complex(v) for v in row] for row in cov]
        self.n = len(self.mean)
        self._memo: dict = {(0,) * self.n: 1.0 + 0j}

    def __len__(self) -> int:
        return len(self._memo)

    def __call__(self, exp) -> complex:
        exp = tuple(exp)
        if len(exp) != self.n:
            raise ValueError(f"exponent arity {len(exp)} != {self.n}")
        depth = sum(exp) + 100
        if depth > sys.getrecursionlimit():
            sys.setrecursionlimit(depth + 1000)
        return self._moment(exp)

    def _moment(self, exp: tuple) -> complex:
        memo = self._memo
        val = memo.get(exp)
        if val is not None:
            return val
        i = next(k for k, e in enumerate(exp) if e)
        lower = list(exp)
        lower[i] -= 1
        lower_t = tuple(lower)
        val = self.mean[i] * self._moment(lower_t)
        row = self.cov[i]
        for j, e in enumerate(lower):
            if e:
                lower[j] -= 1
                val += row[j] * e * self._moment(tuple(lower))
                lower[j] += 1
        memo[exp] = val
        return val

    def expect(self, poly: SparsePoly) -> complex:
        return sum((c * self(e) for e, c in poly.terms.items()), 0j)


def scalar_moment(mono, m: GaussMoments) -> complex:
    """Raw moment ``E[prod z_i**mono_i]`` under the mean and covariance of ``m``."""
    return MomentTable(m.mean, m.cov)(mono)


def integrate(g: ComplexGaussPoly) -> complex:
    m = gauss_moments(g.quad, g.lin, g.logconst)
    return complex(np.exp(m.norm) * MomentTable(m.mean, m.cov).expect(g.poly))


def integrate_factored(quad, lin, logconst, factors, stats: dict | None = None) -> complex:
    """Integrate ``prod_f P_f(L_f z)`` against a Gaussian kernel without expanding.

    ``factors`` is a sequence of ``(poly, lmap)`` pairs where ``lmap`` has shape
    ``(poly.nvars, n)``. The linear images ``y = L z`` are again (degenerate)
    Gaussian with mean ``L mu`` and covariance ``L Sigma L^T``, and their moments
    are evaluated directly, so the product polynomial only has to be formed in
    block-separable form.
    """
    m = gauss_moments(quad, lin, logconst)
    lmaps = [np.asarray(lm, dtype=float) for _, lm in factors]
    big = np.vstack(lmaps)
    table = MomentTable(big @ m.mean, big @ m.cov @ big.T)

    # product of block polynomials as {stacked exponent: coefficient}
    prod: dict = {(): 1.0 + 0j}
    for poly, _ in factors:
        nxt: dict = {}
        for e1, c1 in prod.items():
            for e2, c2 in poly.terms.items():
                key = e1 + e2
                nxt[key] = nxt.get(key, 0) + c1 * c2
        prod = nxt
    total = sum((c * table(e) for e, c in prod.items()), 0j)
    if stats is not None:
        stats["cond"] = max(stats.get("cond", 0.0), m.cond)
        stats["moments"] = stats.get("moments", 0) + len(table)
    return complex(np.exp(m.norm) * total)
