"""Cross-evaluator checks run by ``discordq verify``.

Each check returns a :class:`CheckResult`; a check that raises is recorded as a
failure with the exception text, so one broken evaluator never hides the rest.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass

import numpy as np

from . import fock, marker, wigner
from .covariance import GaussianParams
from .gauss import ComplexGaussPoly, integrate
from .poly import SparsePoly

SEED = 20120125


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str
    seconds: float = 0.0

    def to_dict(self) -> dict:
        return {"name": self.name, "passed": self.passed, "detail": self.detail, "seconds": self.seconds}


def random_gaussian_params(rng: np.random.Generator, count: int, corr: float = 0.95) -> list[GaussianParams]:
    """``a, b`` uniform in [0.25, 1.5] and ``|c_i| <= corr * sqrt(ab)``."""
    out = []
    for _ in range(count):
        a, b = rng.uniform(0.25, 1.5, size=2)
        lim = corr * math.sqrt(a * b)
        c1, c2 = rng.uniform(-lim, lim, size=2)
        out.append(GaussianParams(float(a), float(b), float(c1), float(c2)))
    return out


def rel_err(x: float, ref: float) -> float:
    return abs(x - ref) / abs(ref) if ref != 0 else abs(x)


# individual checks; each returns (passed, detail)


def check_gaussian_agreement(count: int = 100):
    worst = 0.0
    for p in random_gaussian_params(np.random.default_rng(SEED), count):
        closed = marker.q_gaussian_closed(p).q
        general = marker.q_general(wigner.wigner_of_gaussian(p)).q
        if closed < 1e-6:
            if abs(general - closed) > 1e-10:
                return False, f"abs error {abs(general - closed):.3e} at {p}"
        else:
            worst = max(worst, rel_err(general, closed))
    return worst <= 1e-6, f"{count} random states, worst relative error {worst:.2e} (tol 1e-6)"


def check_squeezed_thermal_formula():
    worst = 0.0
    for n in (0.0, 0.5, 1.0):
        for r in (0.0, 0.25, 0.5, 0.75, 1.0):
            q = marker.q_gaussian_closed(GaussianParams.squeezed_thermal(n, r)).q
            ref = marker.q_squeezed_thermal_formula(n, r)
            err = rel_err(q, ref) if ref else abs(q)
            worst = max(worst, err)
    return worst <= 1e-12, f"15 (n, r) points, worst error {worst:.2e} (tol 1e-12)"


def check_photon_mixed():
    worst_gen = worst_fock = 0.0
    for k in np.linspace(0, 1, 11):
        ref = k * k * (1 - k) ** 2 / 2
        worst_gen = max(worst_gen, abs(marker.q_general(wigner.make_photon_number_mixed(k)).q - ref))
        worst_fock = max(worst_fock, abs(fock.fock_q(fock.fock_photon_number_mixed(k)).q - ref))
    ok = worst_gen <= 1e-10 and worst_fock <= 1e-12
    return ok, f"general abs err {worst_gen:.2e} (tol 1e-10), Fock abs err {worst_fock:.2e} (tol 1e-12)"


def check_mixture():
    worst = 0.0
    zero_err = 0.0
    for r in (0.2, 0.5):
        p = GaussianParams.squeezed_thermal(0, r)
        for k in (0.0, 0.3, 0.7, 1.0):
            q = marker.q_general(wigner.make_gaussian_vacuum_mixture(k, p)).q
            ref = marker.q_mixture_closed(k, p)
            if k == 0:
                zero_err = max(zero_err, abs(q))
            else:
                worst = max(worst, rel_err(q, ref))
    for k in (0.3, 0.7):
        q = marker.q_general(wigner.make_gaussian_vacuum_mixture(k, GaussianParams(0.4, 0.3, 0.0, 0.0))).q
        zero_err = max(zero_err, abs(q))
    ok = worst <= 1e-8 and zero_err <= 1e-10
    return ok, f"worst relative error {worst:.2e} (tol 1e-8); |q| at k=0 or c=0 <= {zero_err:.1e}"


def check_photon_added_n0():
    worst = 0.0
    for r in (0.1, 0.3, 0.5, 0.8, 1.0):
        q = marker.photon_added_q(0.0, r)
        worst = max(worst, rel_err(q, marker.q_photon_added_n0(r)))
    q0 = marker.photon_added_q(0.0, 0.0)
    ok = worst <= 1e-7 and q0 <= 1e-9
    return ok, f"worst relative error {worst:.2e} (tol 1e-7); q(r=0) = {q0:.1e}"


def check_scan():
    grid = np.linspace(0, 1, 11)
    rows = marker.scan_photon_added(grid, grid)
    bad = [r for r in rows if r.status != "ok"]
    if bad:
        return False, f"{len(bad)} rows failed, first: {bad[0].status}"
    pos = all(r.q > 0 for r in rows if r.r >= 0.1 - 1e-12)
    zero = all(r.q <= 1e-9 for r in rows if r.r == 0)
    n0 = max(
        rel_err(r.q, marker.q_photon_added_n0(r.r)) for r in rows if r.n == 0 and r.r in (0.1, 0.3, 0.5, 0.8, 1.0)
    )
    ok = pos and zero and n0 <= 1e-7
    return ok, f"121 rows; r>=0.1 all positive: {pos}; r=0 all <= 1e-9: {zero}; n=0 row error {n0:.1e}"


def check_fock(fock_dim: int):
    parts = []
    ok = True
    # the deficit cap is lifted here so a small --fock-dim degrades instead of raising
    for n, r in ((0.0, 0.3), (0.5, 0.5)):
        ref = marker.q_gaussian_closed(GaussianParams.squeezed_thermal(n, r)).q
        state = fock.fock_squeezed_thermal(n, r, fock_dim, max_deficit=None)
        err = rel_err(fock.fock_q(state).q, ref)
        ok &= err <= 1e-3
        parts.append(f"squeezed-thermal n={n:g} r={r:g} d={fock_dim}: rel err {err:.1e} (deficit {state.deficit:.1e})")
    exact = fock.fock_q(fock.fock_photon_number_mixed(0.5)).q
    ok &= abs(exact - 1 / 32) <= 1e-12
    parts.append(f"photon-mixed k=0.5 err {abs(exact - 1 / 32):.1e}")
    rng = np.random.default_rng(SEED)
    d = min(fock_dim, 6)
    base = fock.fock_squeezed_thermal(0.0, 0.3, d, max_deficit=None)
    q0 = fock.fock_q(base).q
    worst = 0.0
    for _ in range(3):
        q1 = fock.fock_q(fock.local_unitary(base, random_unitary(rng, d), random_unitary(rng, d))).q
        worst = max(worst, rel_err(q1, q0))
    ok &= worst <= 1e-9
    parts.append(f"local-unitary invariance {worst:.1e} (tol 1e-9)")
    return ok, "; ".join(parts)


def check_properties(quadrature: bool = True):
    parts = []
    ok = True
    rng = np.random.default_rng(SEED + 1)
    qs = [marker.q_gaussian_closed(p).q for p in random_gaussian_params(rng, 1000)]
    fam = [marker.photon_added_q(n, r) for n in (0, 0.5, 1) for r in (0, 0.5, 1)]
    fam += [marker.q_general(wigner.make_photon_number_mixed(k)).q for k in (0, 0.25, 1)]
    qmin = min(qs + fam)
    ok &= qmin >= -1e-9
    parts.append(f"min Q {qmin:.1e}")
    fmax = -math.inf
    for p in random_gaussian_params(rng, 1000, corr=1.0):
        fmax = max(fmax, marker.sign_function(p.a, p.b, p.c1**2, p.c2**2))
    ok &= fmax <= 1e-12
    parts.append(f"max f {fmax:.1e}")
    prod = wigner.product_state(np.array([[3.0, 0.5], [0.5, 2.0]]), np.array([[1.5, 0.0], [0.0, 4.0]]))
    qp = abs(marker.q_general(prod).q)
    ok &= qp <= 1e-9
    parts.append(f"product-state |Q| {qp:.1e}")
    states = [
        wigner.make_squeezed_thermal(1, 0.5),
        wigner.make_photon_number_mixed(0.3),
        wigner.make_gaussian_vacuum_mixture(0.5, GaussianParams.squeezed_thermal(0, 0.4)),
        wigner.make_photon_added_squeezed_thermal(0.5, 0.5),
    ]
    norm_err = max(abs(wigner.normalization(s) - 1) for s in states)
    pur = max(wigner.purity(s) for s in states)
    ok &= norm_err <= 1e-9 and pur <= 1 + 1e-9
    parts.append(f"normalization err {norm_err:.1e}, max purity {pur:.6f}")
    if quadrature:
        qerr = quadrature_sweep(np.random.default_rng(SEED + 2))
        ok &= qerr <= 1e-6
        parts.append(f"gauss vs quadrature {qerr:.1e}")
    return ok, "; ".join(parts)


def check_verdicts(threshold: float):
    zero_states = {
        "vacuum": wigner.vacuum(),
        "squeezed-thermal r=0": wigner.make_squeezed_thermal(0.5, 0.0),
        "photon-mixed k=1": wigner.make_photon_number_mixed(1.0),
        "photon-added r=0": wigner.make_photon_added_squeezed_thermal(0.5, 0.0),
    }
    nonzero_states = {
        "squeezed-thermal r=0.5": wigner.make_squeezed_thermal(0.5, 0.5),
        "photon-mixed k=0.5": wigner.make_photon_number_mixed(0.5),
        "photon-added n=1 r=0.1": wigner.make_photon_added_squeezed_thermal(1.0, 0.1),
    }
    wrong = []
    for name, st in zero_states.items():
        if marker.classify(marker.q_general(st).q, threshold).verdict is not marker.Verdict.ZERO:
            wrong.append(name)
    for name, st in nonzero_states.items():
        if marker.classify(marker.q_general(st).q, threshold).verdict is not marker.Verdict.NONZERO:
            wrong.append(name)
    detail = f"threshold {threshold:g}; " + ("all verdicts as expected" if not wrong else "misclassified: " + ", ".join(wrong))
    return not wrong, detail


# quadrature oracle sweep


def random_integrand(rng: np.random.Generator, n: int, degree: int) -> ComplexGaussPoly:
    x = rng.normal(size=(n, n))
    re = 0.2 * x @ x.T / n + 0.4 * np.eye(n)
    s = rng.uniform(-0.3, 0.3, size=(n, n))
    quad = re + 1j * (s + s.T) / 2
    lin = rng.uniform(-0.5, 0.5, size=n) + 1j * rng.uniform(-0.5, 0.5, size=n)
    terms = {(0,) * n: 1.0}
    for _ in range(3):
        e = rng.multinomial(int(rng.integers(0, degree + 1)), [1 / n] * n)
        terms[tuple(e)] = complex(rng.normal(), rng.normal())
    top = rng.multinomial(degree, [1 / n] * n)
    terms[tuple(top)] = 1.0
    return ComplexGaussPoly(SparsePoly(n, terms), quad, lin, complex(rng.uniform(-0.5, 0.5)))


def quadrature_sweep(rng: np.random.Generator, cases=((1, 6, 6), (2, 6, 4), (3, 6, 2))) -> float:
    from .quadrature import quadrature_integrate

    worst = 0.0
    for n, degree, count in cases:
        for _ in range(count):
            g = random_integrand(rng, n, degree)
            worst = max(worst, rel_err(integrate(g), quadrature_integrate(g)))
    return worst


def random_unitary(rng: np.random.Generator, d: int) -> np.ndarray:
    z = (rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))) / math.sqrt(2)
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def run_checks(threshold: float = marker.DEFAULT_THRESHOLD, fock_dim: int = 16, quadrature: bool = True) -> list[CheckResult]:
    checks = [
        ("1 gaussian closed vs general", check_gaussian_agreement),
        ("2 squeezed-thermal formula", check_squeezed_thermal_formula),
        ("3 photon-number mixed", check_photon_mixed),
        ("4 gaussian+vacuum mixture", check_mixture),
        ("5 photon-added n=0", check_photon_added_n0),
        ("6 photon-added scan", check_scan),
        ("7 fock oracle", lambda: check_fock(fock_dim)),
        ("8 properties", lambda: check_properties(quadrature)),
        ("9 zero verdicts", lambda: check_verdicts(threshold)),
    ]
    results = []
    for name, fn in checks:
        t0 = time.perf_counter()
        try:
            passed, detail = fn()
        except Exception as exc:  # noqa: BLE001 - a crashing check is a failed check
            passed, detail = False, f"{type(exc).__name__}: {exc}"
        results.append(CheckResult(name, bool(passed), detail, time.perf_counter() - t0))
    return results
