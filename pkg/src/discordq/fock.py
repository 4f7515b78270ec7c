"""Brute-force Q in a truncated Fock basis.

Q only depends on the state, not on the orthonormal operator basis used on
mode B, so it can be evaluated with the matrix-unit basis ``|n><m|``. The
blocks ``B_mn = <m|_B rho |n>_B`` play the role of the conditional operators
and

    Q = 1/2 sum_{k,l} ||[B_k, B_l]||_HS^2 = Tr(S^2) - sum_{k,l} Tr(B_k B_l B_k^dag B_l^dag)

with ``S = sum_k B_k B_k^dag``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import expm

from .errors import NonConverged, TruncationError
from .marker import Method, QReport
from .wigner import make_photon_added_squeezed_thermal, second_moments

MAX_DEFICIT = 1e-6
CONVERGENCE_RTOL = 1e-4


@dataclass(frozen=True)
class FockState:
    rho: np.ndarray
    d_a: int
    d_b: int
    deficit: float = 0.0

    def __post_init__(self):
        rho = np.array(self.rho, dtype=complex)
        dim = self.d_a * self.d_b
        if rho.shape != (dim, dim):
            raise ValueError(f"rho has shape {rho.shape}, expected {(dim, dim)}")
        if np.max(np.abs(rho - rho.conj().T)) > 1e-12:
            raise ValueError("rho is not Hermitian")
        rho = 0.5 * (rho + rho.conj().T)
        tr = np.trace(rho).real
        if abs(tr - 1) > 1e-10:
            raise ValueError(f"rho has trace {tr:.12g}")
        if np.linalg.eigvalsh(rho)[0] < -1e-10:
            raise ValueError("rho has a negative eigenvalue")
        rho.setflags(write=False)
        object.__setattr__(self, "rho", rho)

    @classmethod
    def from_pure(cls, psi, d_a: int, d_b: int) -> FockState:
        psi = np.asarray(psi, dtype=complex).ravel()
        psi = psi / np.linalg.norm(psi)
        return cls(np.outer(psi, psi.conj()), d_a, d_b)

    @property
    def purity(self) -> float:
        return float(np.trace(self.rho @ self.rho).real)


def conditional_blocks(s: FockState) -> np.ndarray:
    """``B[m, n] = <m|_B rho |n>_B`` as an array of shape ``(d_b, d_b, d_a, d_a)``."""
    r = s.rho.reshape(s.d_a, s.d_b, s.d_a, s.d_b)
    return np.ascontiguousarray(r.transpose(1, 3, 0, 2))


def fock_q(s: FockState) -> QReport:
    blocks = conditional_blocks(s).reshape(-1, s.d_a, s.d_a)
    smat = np.einsum("kab,kcb->ac", blocks, blocks.conj())
    term1 = np.trace(smat @ smat)
    # x[a, b, d, c] = sum_k B_k[a, b] conj(B_k[d, c])
    x = np.einsum("kab,kdc->abdc", blocks, blocks.conj())
    term2 = np.einsum("abdc,bcad->", x, x)
    q = term1 - term2
    return QReport(
        float(q.real),
        float(term1.real),
        float(term2.real),
        Method.FOCK_ORACLE,
        {"d_a": s.d_a, "d_b": s.d_b, "trace_deficit": s.deficit},
    )


def fock_q_commutators(s: FockState) -> float:
    """Same quantity by summing every commutator norm explicitly (small dims only)."""
    blocks = conditional_blocks(s).reshape(-1, s.d_a, s.d_a)
    total = 0.0
    for bk in blocks:
        for bl in blocks:
            c = bk @ bl - bl @ bk
            total += np.vdot(c, c).real
    return 0.5 * total


# state preparation


def annihilation(d: int) -> np.ndarray:
    return np.diag(np.sqrt(np.arange(1, d)), 1)


def thermal_weights(n: float, d: int) -> np.ndarray:
    if n == 0:
        w = np.zeros(d)
        w[0] = 1.0
        return w
    k = np.arange(d)
    return n**k / (1 + n) ** (k + 1)


def _truncate(rho_big: np.ndarray, big: int, d: int) -> tuple[np.ndarray, float]:
    r = rho_big.reshape(big, big, big, big)[:d, :d, :d, :d].reshape(d * d, d * d)
    tr = float(np.trace(r).real)
    return r / tr, 1.0 - tr


def _squeezed_thermal_big(n: float, r: float, big: int) -> tuple[np.ndarray, np.ndarray]:
    """Squeezed thermal density matrix in a ``big``-level working space, plus input weights."""
    a = annihilation(big)
    eye = np.eye(big)
    a1, a2 = np.kron(a, eye), np.kron(eye, a)
    u = expm(r * (a1.T @ a2.T - a1 @ a2))
    th = thermal_weights(n, big)
    return (u * np.kron(th, th)) @ u.T, th


def _finish(rho_big, th, big, d, max_deficit) -> FockState:
    rho, deficit = _truncate(rho_big, big, d)
    # input thermal tail beyond the working space
    deficit = max(deficit, 1.0 - float(np.sum(th)) ** 2)
    if max_deficit is not None and deficit > max_deficit:
        raise TruncationError(f"trace deficit {deficit:.3e} exceeds {max_deficit:.0e} at d={d}")
    return FockState(rho, d, d, deficit)


def _check_dims(n: float, d: int):
    if d < 4:
        raise ValueError("truncation dimension must be >= 4")
    if n < 0:
        raise ValueError("n must be >= 0")


def fock_squeezed_thermal(
    n: float, r: float, d: int, pad: int | None = None, max_deficit: float | None = MAX_DEFICIT
) -> FockState:
    """Two-mode squeezed thermal state truncated to ``d`` levels per mode.

    The squeezer ``exp(r (a1^dag a2^dag - a1 a2))`` acts on thermal inputs in a
    working space of ``d + pad`` levels (scipy's scaling-and-squaring ``expm``);
    the result is projected to ``d`` levels and renormalized. The discarded
    weight is reported as ``deficit`` and must not exceed ``max_deficit``
    (``None`` disables the check).
    """
    _check_dims(n, d)
    big = d + (d if pad is None else pad)
    rho_big, th = _squeezed_thermal_big(n, r, big)
    return _finish(rho_big, th, big, d, max_deficit)


def fock_photon_added(
    n: float, r: float, d: int, mode: int, pad: int | None = None, max_deficit: float | None = MAX_DEFICIT
) -> FockState:
    """``a_mode^dag rho_STS a_mode``, normalized; ``mode`` is 1 or 2."""
    _check_dims(n, d)
    if mode not in (1, 2):
        raise ValueError("mode must be 1 or 2")
    big = d + (d if pad is None else pad)
    rho_big, th = _squeezed_thermal_big(n, r, big)
    a = annihilation(big)
    eye = np.eye(big)
    create = np.kron(a.T, eye) if mode == 1 else np.kron(eye, a.T)
    added = create @ rho_big @ create.T
    return _finish(added / np.trace(added), th, big, d, max_deficit)


def quadrature_ops(d: int) -> list[np.ndarray]:
    """``(x1, p1, x2, p2)`` on a ``d x d`` truncation, ``x = (a + a^dag)/2``."""
    a = annihilation(d)
    eye = np.eye(d)
    x = (a + a.T) / 2
    p = -1j * (a - a.T) / 2
    return [np.kron(x, eye), np.kron(p, eye), np.kron(eye, x), np.kron(eye, p)]


def photon_added_matching_wigner(
    n: float, r: float, d: int, max_deficit: float | None = MAX_DEFICIT, tol: float = 1e-4
) -> tuple[FockState, int]:
    """Fock form of the photon-added family, with the mode fixed by the Wigner function.

    Both ``a_1^dag`` and ``a_2^dag`` candidates are built; the one whose second
    moments match those of :func:`make_photon_added_squeezed_thermal` is kept.
    """
    target = second_moments(make_photon_added_squeezed_thermal(n, r))
    best = None
    for mode in (1, 2):
        s = fock_photon_added(n, r, d, mode, max_deficit=max_deficit)
        err = float(np.max(np.abs(symmetric_second_moments(s) - target)))
        if best is None or err < best[0]:
            best = (err, s, mode)
    err, s, mode = best
    if err > tol * max(1.0, float(np.max(np.abs(target)))):
        raise TruncationError(f"no candidate matches the Wigner second moments (best error {err:.3e})")
    return s, mode


def symmetric_second_moments(s: FockState) -> np.ndarray:
    """``<(xi_i xi_j + xi_j xi_i)/2>``, comparable with Wigner second moments."""
    if s.d_a != s.d_b:
        raise ValueError("requires equal truncation on both modes")
    ops = quadrature_ops(s.d_a)
    out = np.zeros((4, 4))
    for i, oi in enumerate(ops):
        for j, oj in enumerate(ops):
            out[i, j] = np.trace(s.rho @ (oi @ oj + oj @ oi)).real / 2
    return out


def fock_photon_number_mixed(k: float) -> FockState:
    """``k|00><00| + (1-k)|+1><+1|`` in a 2 x 2 truncation (exact)."""
    if not 0 <= k <= 1:
        raise ValueError("k must lie in [0, 1]")
    zero = np.array([1.0, 0.0])
    one = np.array([0.0, 1.0])
    plus = (zero + one) / np.sqrt(2)
    v00 = np.kron(zero, zero)
    vp1 = np.kron(plus, one)
    rho = k * np.outer(v00, v00) + (1 - k) * np.outer(vp1, vp1)
    return FockState(rho, 2, 2)


def classical_quantum(probs, basis_a: np.ndarray, sigmas) -> FockState:
    """``sum_i p_i |i><i|_A (x) sigma_i``; columns of ``basis_a`` are ``|i>``."""
    d_a = basis_a.shape[0]
    d_b = sigmas[0].shape[0]
    rho = np.zeros((d_a * d_b, d_a * d_b), dtype=complex)
    for p, col, sig in zip(probs, basis_a.T, sigmas):
        rho += p * np.kron(np.outer(col, col.conj()), sig)
    return FockState(rho / np.trace(rho).real, d_a, d_b)


def local_unitary(s: FockState, u_a: np.ndarray, u_b: np.ndarray) -> FockState:
    u = np.kron(u_a, u_b)
    return FockState(u @ s.rho @ u.conj().T, s.d_a, s.d_b, s.deficit)


def converge_q(builder, dims, rtol: float = CONVERGENCE_RTOL) -> tuple[float, list]:
    """Evaluate ``fock_q(builder(d))`` for increasing ``d``.

    Raises :class:`NonConverged` (carrying the history) when the last two values
    differ by more than ``rtol`` relative.
    """
    dims = list(dims)
    if any(b <= a for a, b in zip(dims, dims[1:])):
        raise ValueError("dims must be strictly increasing")
    history = []
    for d in dims:
        history.append((d, fock_q(builder(d)).q))
    q = history[-1][1]
    if len(history) > 1:
        prev = history[-2][1]
        if abs(q - prev) > rtol * max(abs(q), 1e-300):
            raise NonConverged(f"Q changed from {prev:.10g} to {q:.10g} between d={history[-2][0]} and d={history[-1][0]}", history)
    return q, history


def embed(s: FockState, d: int) -> FockState:
    """Zero-pad both modes of ``s`` to ``d`` levels."""
    if d < max(s.d_a, s.d_b):
        raise ValueError("cannot embed into a smaller space")
    r = s.rho.reshape(s.d_a, s.d_b, s.d_a, s.d_b)
    out = np.zeros((d, d, d, d), dtype=complex)
    out[: s.d_a, : s.d_b, : s.d_a, : s.d_b] = r
    return FockState(out.reshape(d * d, d * d), d, d, s.deficit)
