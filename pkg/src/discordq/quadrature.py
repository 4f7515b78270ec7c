"""Brute-force numerical quadrature as an independent check of :mod:`discordq.gauss`.

Tensor-product Gauss-Legendre on a box centred on the peak of the kernel
magnitude, extending ``width`` standard deviations along each axis. The node
count is doubled until two successive estimates agree. Practical for n <= 3.
"""

from __future__ import annotations

import numpy as np
from numpy.polynomial.legendre import leggauss

from .gauss import ComplexGaussPoly


def integrand(g: ComplexGaussPoly):
    """Vectorized ``z -> [Re f(z), Im f(z)]`` for ``z`` of shape (npoints, n)."""
    exps = np.array(list(g.poly.terms), dtype=float).reshape(-1, g.nvars)
    coefs = np.array(list(g.poly.terms.values()), dtype=complex)

    def f(z):
        poly = np.zeros(len(z), dtype=complex)
        for e, c in zip(exps, coefs):
            term = np.full(len(z), c)
            for i, k in enumerate(e):
                if k:
                    term = term * z[:, i] ** k
            poly += term
        expo = -0.5 * np.einsum("ki,ij,kj->k", z, g.quad, z) + z @ g.lin + g.logconst
        val = poly * np.exp(expo)
        return np.stack([val.real, val.imag], axis=-1)

    return f


def _tensor_rule(lo, hi, nodes: int):
    t, w = leggauss(nodes)
    axes = [(0.5 * (h - l) * t + 0.5 * (h + l), 0.5 * (h - l) * w) for l, h in zip(lo, hi)]
    pts = np.stack([m.ravel() for m in np.meshgrid(*(a[0] for a in axes), indexing="ij")], axis=-1)
    wts = np.ones(1)
    for _, w_axis in axes:
        wts = np.multiply.outer(wts, w_axis).ravel()
    return pts, wts


def quadrature_integrate(
    g: ComplexGaussPoly, width: float = 7.0, rtol: float = 1e-10, start: int = 32, max_nodes: int = 250
) -> complex:
    re_a = 0.5 * (g.quad.real + g.quad.real.T)
    cov = np.linalg.inv(re_a)
    centre = cov @ g.lin.real
    # widen for polynomial growth
    half = width * np.sqrt(np.diag(cov)) * (1 + 0.1 * g.poly.degree)
    f = integrand(g)
    prev = None
    change = float("inf")
    nodes = start
    while nodes <= max_nodes:
        pts, wts = _tensor_rule(centre - half, centre + half, nodes)
        vals = f(pts)
        val = vals.T @ wts
        est = complex(val[0], val[1])
        # absolute floor relative to int |f| for integrals that cancel to ~0
        floor = 1e-14 * float(np.abs(vals[:, 0] + 1j * vals[:, 1]) @ wts)
        if prev is not None:
            change = abs(est - prev)
            if change <= rtol * abs(est) + floor:
                return est
        prev = est
        nodes = nodes * 3 // 2
    raise ArithmeticError(f"quadrature did not converge (last change {change:.3e})")
