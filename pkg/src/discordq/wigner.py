"""Two-mode Wigner functions as sums of polynomial-times-Gaussian components.

A component is ``poly(xi) * exp(-xi.M.xi/2 + l.xi + c)`` with
``xi = (x1, p1, x2, p2)`` and ``alpha_j = x_j + i p_j``. Wigner functions are
normalized with respect to ``dx1 dp1 dx2 dp2``; with this normalization
``Tr(rho sigma) = pi**2 * int W_rho W_sigma``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .covariance import GaussianParams
from .errors import ParamMismatch, SingularCovariance
from .gauss import ComplexGaussPoly, integrate
from .poly import SparsePoly

NVARS = 4
# vacuum kernel exp(-2(|alpha1|^2 + |alpha2|^2)) with prefactor 4/pi^2
VACUUM_QUAD = 4.0 * np.eye(NVARS)
VACUUM_LOGCONST = float(np.log(4.0 / np.pi**2))


@dataclass(frozen=True)
class WignerComponent:
    poly: SparsePoly
    quad: np.ndarray
    lin: np.ndarray
    logconst: float = 0.0

    def __post_init__(self):
        quad = np.array(self.quad, dtype=float)
        lin = np.array(self.lin, dtype=float)
        if quad.shape != (NVARS, NVARS) or lin.shape != (NVARS,) or self.poly.nvars != NVARS:
            raise ValueError("Wigner components live on 4 real variables")
        if np.max(np.abs(quad - quad.T)) > 1e-12 * max(1.0, np.max(np.abs(quad))):
            raise ValueError("quadratic form is not symmetric")
        quad = 0.5 * (quad + quad.T)
        if np.linalg.eigvalsh(quad)[0] <= 0:
            raise ValueError("quadratic form is not positive definite")
        quad.setflags(write=False)
        lin.setflags(write=False)
        object.__setattr__(self, "quad", quad)
        object.__setattr__(self, "lin", lin)
        object.__setattr__(self, "logconst", float(self.logconst))

    def __call__(self, point) -> complex:
        xi = np.asarray(point, dtype=float)
        expo = -0.5 * np.einsum("...i,ij,...j->...", xi, self.quad, xi) + xi @ self.lin + self.logconst
        return self.poly(xi) * np.exp(expo)

    def as_integrand(self) -> ComplexGaussPoly:
        return ComplexGaussPoly(self.poly, self.quad, self.lin, self.logconst)

    def scaled(self, weight: float) -> WignerComponent:
        return WignerComponent(self.poly * weight, self.quad, self.lin, self.logconst)


@dataclass(frozen=True)
class WignerState:
    components: tuple[WignerComponent, ...]

    def __post_init__(self):
        comps = tuple(self.components)
        if not comps:
            raise ValueError("a Wigner state needs at least one component")
        object.__setattr__(self, "components", comps)

    def __len__(self) -> int:
        return len(self.components)

    @property
    def is_real(self) -> bool:
        return all(c.poly.is_real() for c in self.components)

    def to_json(self) -> str:
        return json.dumps(
            {
                "components": [
                    {
                        "poly": c.poly.to_json(),
                        "quad": c.quad.tolist(),
                        "lin": c.lin.tolist(),
                        "logconst": c.logconst,
                    }
                    for c in self.components
                ]
            }
        )

    @classmethod
    def from_json(cls, text: str) -> WignerState:
        data = json.loads(text)
        comps = []
        for item in data["components"]:
            comps.append(
                WignerComponent(
                    SparsePoly.from_json(item["poly"], NVARS),
                    np.array(item["quad"], dtype=float),
                    np.array(item.get("lin", [0.0] * NVARS), dtype=float),
                    float(item.get("logconst", 0.0)),
                )
            )
        return cls(tuple(comps))


def eval_wigner(w: WignerState, point) -> float:
    """Pointwise value; ``point`` may carry leading batch axes."""
    point = np.asarray(point, dtype=float)
    if point.shape[-1] != NVARS:
        raise ValueError(f"point must have {NVARS} coordinates")
    total = sum(c(point) for c in w.components)
    total = np.asarray(total)
    if np.any(np.abs(total.imag) >= 1e-12 * np.maximum(1.0, np.abs(total.real))):
        raise ArithmeticError("Wigner function has a non-negligible imaginary part")
    real = total.real
    return float(real) if real.ndim == 0 else real


def normalization(w: WignerState) -> float:
    return float(sum(integrate(c.as_integrand()) for c in w.components).real)


def overlap_integral(w1: WignerState, w2: WignerState) -> float:
    """``int W1 W2 d^4 xi``; multiply by ``pi**2`` to get ``Tr(rho1 rho2)``."""
    total = 0j
    for c1 in w1.components:
        for c2 in w2.components:
            total += integrate(
                ComplexGaussPoly(
                    c1.poly * c2.poly,
                    c1.quad + c2.quad,
                    c1.lin + c2.lin,
                    c1.logconst + c2.logconst,
                )
            )
    return float(total.real)


def second_moments(w: WignerState) -> np.ndarray:
    """``int xi_i xi_j W d^4 xi``, the symmetrically ordered second moments."""
    out = np.zeros((NVARS, NVARS))
    for i in range(NVARS):
        for j in range(i, NVARS):
            mono = SparsePoly.variable(NVARS, i) * SparsePoly.variable(NVARS, j)
            val = sum(
                integrate(ComplexGaussPoly(c.poly * mono, c.quad, c.lin, c.logconst)) for c in w.components
            )
            out[i, j] = out[j, i] = val.real
    return out


def purity(w: WignerState) -> float:
    return float(np.pi**2 * overlap_integral(w, w))


# constructors


def _xi_var(index: int) -> SparsePoly:
    return SparsePoly.variable(NVARS, index)


def wigner_of_gaussian(p: GaussianParams) -> WignerState:
    v = p.matrix()
    det = np.linalg.det(v)
    if not det > 0 or np.linalg.eigvalsh(v)[0] <= 0:
        raise SingularCovariance(f"covariance matrix is not positive definite (det {det:.3e})")
    quad = np.linalg.inv(v)
    quad = 0.5 * (quad + quad.T)
    logconst = -np.log(4 * np.pi**2 * np.sqrt(det))
    return WignerState((WignerComponent(SparsePoly.constant(NVARS), quad, np.zeros(NVARS), logconst),))


def vacuum() -> WignerState:
    return WignerState((WignerComponent(SparsePoly.constant(NVARS), VACUUM_QUAD, np.zeros(NVARS), VACUUM_LOGCONST),))


def make_squeezed_thermal(n: float, r: float) -> WignerState:
    if n < 0:
        raise ValueError("mean photon number n must be >= 0")
    return wigner_of_gaussian(GaussianParams.squeezed_thermal(n, r))


def make_photon_number_mixed(k: float) -> WignerState:
    """``k|00><00| + (1-k)|+1><+1|`` with ``|+> = (|0> + |1>)/sqrt(2)``."""
    if not 0 <= k <= 1:
        raise ValueError("k must lie in [0, 1]")
    x1, p1, x2, p2 = (_xi_var(i) for i in range(NVARS))
    mode1 = x1 + x1 * x1 + p1 * p1
    mode2 = 4 * (x2 * x2 + p2 * p2) - 1
    poly = k + 2 * (1 - k) * mode1 * mode2
    return WignerState((WignerComponent(poly, VACUUM_QUAD, np.zeros(NVARS), VACUUM_LOGCONST),))


def make_gaussian_vacuum_mixture(k: float, p: GaussianParams) -> WignerState:
    """``k rho_G + (1-k)|00><00|`` for a Gaussian with ``c1^2 = c2^2``."""
    if not 0 <= k <= 1:
        raise ValueError("k must lie in [0, 1]")
    if abs(p.c1**2 - p.c2**2) > 1e-12:
        raise ParamMismatch(f"mixture requires c1^2 = c2^2, got {p.c1**2:.6g} vs {p.c2**2:.6g}")
    p.check()
    parts = []
    if k > 0:
        parts.append(wigner_of_gaussian(p).components[0].scaled(k))
    if k < 1:
        parts.append(vacuum().components[0].scaled(1 - k))
    return WignerState(tuple(parts))


def make_photon_added_squeezed_thermal(n: float, r: float) -> WignerState:
    """Single-photon-added symmetric squeezed thermal state.

    Built from the closed-form Wigner function; at ``r = 0`` the added photon
    sits in mode 2.
    """
    if n < 0:
        raise ValueError("mean photon number n must be >= 0")
    base = make_squeezed_thermal(n, r).components[0]
    m = 1 + 2 * n
    ch2, sh2 = np.cosh(2 * r), np.sinh(2 * r)
    cosh_sq = np.cosh(r) ** 2
    x1, p1, x2, p2 = (_xi_var(i) for i in range(NVARS))
    u = (m + ch2) * x2 - sh2 * x1
    v = (m + ch2) * p2 + sh2 * p1
    poly = u * u + v * v - m * (n + cosh_sq)
    poly = poly * (1.0 / (m * m * (cosh_sq + n * ch2)))
    return WignerState((WignerComponent(poly, base.quad, base.lin, base.logconst),))


def mixture(weights, states) -> WignerState:
    """Convex combination of Wigner states as a concatenated component list."""
    comps = []
    for wgt, st in zip(weights, states):
        if wgt:
            comps.extend(c.scaled(wgt) for c in st.components)
    return WignerState(tuple(comps))


def product_state(mode1_quad, mode2_quad, mode1_poly=None, mode2_poly=None) -> WignerState:
    """Uncorrelated ``W_A(x1, p1) W_B(x2, p2)`` from single-mode Gaussian pieces.

    The single-mode polynomials, if given, are 2-variable ``SparsePoly`` objects;
    the product is normalized numerically.
    """
    quad = np.zeros((NVARS, NVARS))
    quad[:2, :2] = mode1_quad
    quad[2:, 2:] = mode2_quad
    poly = SparsePoly.constant(NVARS)
    for poly1, offset in ((mode1_poly, 0), (mode2_poly, 2)):
        if poly1 is not None:
            lifted = {}
            for e, c in poly1.terms.items():
                exp = [0] * NVARS
                exp[offset : offset + 2] = e
                lifted[tuple(exp)] = c
            poly = poly * SparsePoly(NVARS, lifted)
    comp = WignerComponent(poly, quad, np.zeros(NVARS), 0.0)
    norm = integrate(comp.as_integrand()).real
    return WignerState((WignerComponent(poly, quad, np.zeros(NVARS), -np.log(norm)),))
