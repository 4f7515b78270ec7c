"""Two-mode covariance matrices and their standard form.

Quadratures are ordered ``(x1, p1, x2, p2)`` with ``x = (a + a^dag)/2`` and
``p = -i(a - a^dag)/2``, so the vacuum has variance 1/4. Covariances in the
common ``x = (a + a^dag)/sqrt(2)`` convention (vacuum variance 1/2) are
converted by dividing by 2.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateInvariants, NonPhysical

SYMMETRY_TOL = 1e-12
PHYSICAL_TOL = 1e-10
DISCRIMINANT_TOL = 1e-10
VACUUM_VARIANCE = 0.25

OMEGA = np.array(
    [
        [0.0, 1.0, 0.0, 0.0],
        [-1.0, 0.0, 0.0, 0.0],
        [0.0, 0.0, 0.0, 1.0],
        [0.0, 0.0, -1.0, 0.0],
    ]
)


@dataclass(frozen=True)
class GaussianParams:
    """Standard-form parameters ``A = a I``, ``B = b I``, ``C = diag(c1, c2)``."""

    a: float
    b: float
    c1: float
    c2: float

    def violations(self, tol: float = 1e-12) -> list[str]:
        out = []
        if not all(np.isfinite([self.a, self.b, self.c1, self.c2])):
            return ["parameters must be finite"]
        if self.a < VACUUM_VARIANCE - tol:
            out.append(f"a < 1/4 (a = {self.a:.6g})")
        if self.b < VACUUM_VARIANCE - tol:
            out.append(f"b < 1/4 (b = {self.b:.6g})")
        ab = self.a * self.b
        for name, c in (("c1", self.c1), ("c2", self.c2)):
            if ab < c * c - tol:
                out.append(f"ab < {name}^2 (ab = {ab:.6g}, {name}^2 = {c * c:.6g})")
        return out

    @property
    def valid(self) -> bool:
        return not self.violations()

    def check(self) -> GaussianParams:
        bad = self.violations()
        if bad:
            raise NonPhysical("; ".join(bad))
        return self

    def matrix(self) -> np.ndarray:
        a, b, c1, c2 = self.a, self.b, self.c1, self.c2
        return np.array(
            [
                [a, 0.0, c1, 0.0],
                [0.0, a, 0.0, c2],
                [c1, 0.0, b, 0.0],
                [0.0, c2, 0.0, b],
            ]
        )

    def covariance(self) -> CovarianceMatrix:
        return CovarianceMatrix(self.matrix())

    @classmethod
    def squeezed_thermal(cls, n: float, r: float) -> GaussianParams:
        m = 1 + 2 * n
        return cls(m * np.cosh(2 * r) / 4, m * np.cosh(2 * r) / 4, m * np.sinh(2 * r) / 4, -m * np.sinh(2 * r) / 4)


@dataclass(frozen=True)
class CovarianceMatrix:
    v: np.ndarray

    def __post_init__(self):
        v = np.array(self.v, dtype=float)
        if v.shape != (4, 4):
            raise ValueError(f"covariance matrix must be 4x4, got shape {v.shape}")
        v.setflags(write=False)
        object.__setattr__(self, "v", v)

    @property
    def blocks(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        v = self.v
        return v[:2, :2], v[2:, 2:], v[:2, 2:]

    def to_json(self) -> str:
        return json.dumps({"V": self.v.tolist()})

    @classmethod
    def from_json(cls, text: str) -> CovarianceMatrix:
        data = json.loads(text)
        if not isinstance(data, dict) or "V" not in data:
            raise ValueError('covariance JSON must be an object with key "V"')
        rows = data["V"]
        if not isinstance(rows, list) or len(rows) != 4 or any(
            not isinstance(r, list) or len(r) != 4 for r in rows
        ):
            raise ValueError('"V" must be a 4x4 array of numbers')
        return cls(np.array(rows, dtype=float))


@dataclass(frozen=True)
class Violation:
    name: str
    margin: float

    def __str__(self) -> str:
        return f"{self.name} (margin {self.margin:.3e})"


@dataclass(frozen=True)
class ValidationVerdict:
    violations: list[Violation] = field(default_factory=list)
    min_eigenvalue: float = 0.0

    @property
    def ok(self) -> bool:
        return not self.violations

    def __bool__(self) -> bool:
        return self.ok

    def __str__(self) -> str:
        if self.ok:
            return "valid"
        return "invalid: " + "; ".join(str(v) for v in self.violations)


def validate_covariance(v: CovarianceMatrix | np.ndarray) -> ValidationVerdict:
    """Check symmetry and the uncertainty relation ``V + i Omega/4 >= 0``.

    Margins are negative by the amount each constraint is violated. The local
    ``a < 1/4`` / ``b < 1/4`` entries are diagnostics only; they can never fire
    on their own since they are implied by the uncertainty relation.
    """
    mat = v.v if isinstance(v, CovarianceMatrix) else np.asarray(v, dtype=float)
    if mat.shape != (4, 4):
        return ValidationVerdict([Violation("shape is not 4x4", float("nan"))], float("nan"))
    if not np.all(np.isfinite(mat)):
        return ValidationVerdict([Violation("non-finite entries", float("nan"))], float("nan"))
    violations = []
    asym = float(np.max(np.abs(mat - mat.T)))
    if asym > SYMMETRY_TOL:
        violations.append(Violation("not symmetric", -asym))
    sym = 0.5 * (mat + mat.T)
    for label, block in (("a", sym[:2, :2]), ("b", sym[2:, 2:])):
        det = np.linalg.det(block)
        local = np.sqrt(det) if det > 0 else -np.sqrt(-det)
        if local < VACUUM_VARIANCE - PHYSICAL_TOL:
            violations.append(Violation(f"{label} < 1/4", float(local - VACUUM_VARIANCE)))
    min_eig = float(np.linalg.eigvalsh(sym + 0.25j * OMEGA)[0])
    if min_eig < -PHYSICAL_TOL:
        violations.append(Violation("V + i*Omega/4 not positive semidefinite", min_eig))
    return ValidationVerdict(violations, min_eig)


def _inv_sqrt_spd(m: np.ndarray) -> np.ndarray:
    w, u = np.linalg.eigh(m)
    return (u / np.sqrt(w)) @ u.T


def standard_form_reduce(v: CovarianceMatrix | np.ndarray) -> GaussianParams:
    """Standard-form parameters from the local symplectic invariants.

    ``a = sqrt(det A)``, ``b = sqrt(det B)``, ``c1 c2 = det C``, and
    ``c1^2, c2^2`` are the eigenvalues of ``K K^T`` with
    ``K = sqrt(ab) A^-1/2 C B^-1/2``. Both square-root factors have unit
    determinant, so they are local symplectic maps and ``K`` is the correlation
    block once the local blocks are ``aI``, ``bI``. The eigenvalue gap is a sum
    of squares of the entries of ``K``, which keeps the symmetric manifold
    ``c1^2 = c2^2`` free of square-root error amplification. ``det V`` is used
    only as a consistency check. Returned with ``c1 >= |c2|`` and
    ``sign(c2) = sign(det C)``.
    """
    cov = v if isinstance(v, CovarianceMatrix) else CovarianceMatrix(v)
    verdict = validate_covariance(cov)
    if not verdict.ok:
        raise NonPhysical(str(verdict))
    mat = 0.5 * (cov.v + cov.v.T)
    blk_a, blk_b, blk_c = mat[:2, :2], mat[2:, 2:], mat[:2, 2:]
    a = np.sqrt(np.linalg.det(blk_a))
    b = np.sqrt(np.linalg.det(blk_b))
    ab = a * b
    det_c = np.linalg.det(blk_c)

    # the quadratic implied by det V must have a real solution
    total_v = (ab * ab + det_c * det_c - np.linalg.det(mat)) / ab
    disc_v = total_v * total_v - 4 * det_c * det_c
    if disc_v < -DISCRIMINANT_TOL * max(1.0, total_v * total_v):
        raise DegenerateInvariants(f"negative discriminant {disc_v:.3e} for (c1^2, c2^2)")

    k = np.sqrt(ab) * _inv_sqrt_spd(blk_a) @ blk_c @ _inv_sqrt_spd(blk_b)
    r1, r2 = k[0], k[1]
    n1, n2 = r1 @ r1, r2 @ r2
    gap = float(np.hypot(n1 - n2, 2 * (r1 @ r2)))
    c1_sq = 0.5 * (n1 + n2 + gap)
    # c2^2 via the product avoids cancellation when det C is small
    c2_sq = min(det_c * det_c / c1_sq, c1_sq) if c1_sq > 0 else 0.0
    c1 = float(np.sqrt(c1_sq))
    c2 = float(np.copysign(np.sqrt(c2_sq), det_c)) if det_c != 0 else 0.0
    return GaussianParams(float(a), float(b), c1, c2)


def symplectic_single_mode(theta: float, squeeze: float, phi: float = 0.0) -> np.ndarray:
    """``R(theta) S(squeeze) R(phi)`` acting on one (x, p) pair; determinant 1."""

    def rot(t):
        return np.array([[np.cos(t), -np.sin(t)], [np.sin(t), np.cos(t)]])

    return rot(theta) @ np.diag([np.exp(-squeeze), np.exp(squeeze)]) @ rot(phi)


def local_transform(v: np.ndarray, s1: np.ndarray, s2: np.ndarray) -> np.ndarray:
    """Conjugate ``v`` by ``s1 (+) s2``."""
    s = np.zeros((4, 4))
    s[:2, :2] = s1
    s[2:, 2:] = s2
    return s @ np.asarray(v) @ s.T
