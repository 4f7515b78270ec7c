"""Sparse multivariate polynomials with complex coefficients.

Terms are stored as ``{exponent_tuple: coefficient}``. Every exponent tuple of
a given polynomial has the same arity (``nvars``).
"""

from __future__ import annotations

from collections.abc import Iterable, Mapping

import numpy as np

PRUNE = 1e-300


class SparsePoly:
    """Polynomial in ``nvars`` variables, e.g. ``{(2, 0): 3.0}`` is ``3 x0**2``."""

    __slots__ = ("nvars", "terms")

    def __init__(self, nvars: int, terms: Mapping[tuple, complex] | None = None):
        self.nvars = int(nvars)
        clean = {}
        for exp, coef in (terms or {}).items():
            exp = tuple(int(e) for e in exp)
            if len(exp) != self.nvars:
                raise ValueError(f"exponent {exp} does not have arity {self.nvars}")
            if any(e < 0 for e in exp):
                raise ValueError(f"negative exponent in {exp}")
            coef = complex(coef)
            if abs(coef) > PRUNE:
                clean[exp] = clean.get(exp, 0) + coef
        self.terms = {e: c for e, c in clean.items() if abs(c) > PRUNE}

    # construction helpers

    @classmethod
    def constant(cls, nvars: int, value: complex = 1.0) -> SparsePoly:
        return cls(nvars, {(0,) * nvars: value})

    @classmethod
    def variable(cls, nvars: int, index: int, coef: complex = 1.0) -> SparsePoly:
        exp = [0] * nvars
        exp[index] = 1
        return cls(nvars, {tuple(exp): coef})

    @classmethod
    def linear_form(cls, coeffs: Iterable[complex], const: complex = 0.0) -> SparsePoly:
        """``const + sum_i coeffs[i] * x_i``."""
        coeffs = list(coeffs)
        n = len(coeffs)
        terms = {(0,) * n: const}
        for i, c in enumerate(coeffs):
            exp = [0] * n
            exp[i] = 1
            terms[tuple(exp)] = c
        return cls(n, terms)

    # arithmetic

    def _coerce(self, other) -> SparsePoly:
        if isinstance(other, SparsePoly):
            if other.nvars != self.nvars:
                raise ValueError(f"arity mismatch: {self.nvars} vs {other.nvars}")
            return other
        return SparsePoly.constant(self.nvars, other)

    def __add__(self, other) -> SparsePoly:
        other = self._coerce(other)
        terms = dict(self.terms)
        for e, c in other.terms.items():
            terms[e] = terms.get(e, 0) + c
        return SparsePoly(self.nvars, terms)

    __radd__ = __add__

    def __neg__(self) -> SparsePoly:
        return SparsePoly(self.nvars, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other) -> SparsePoly:
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> SparsePoly:
        return self._coerce(other) - self

    def __mul__(self, other) -> SparsePoly:
        if not isinstance(other, SparsePoly):
            other = complex(other)
            return SparsePoly(self.nvars, {e: c * other for e, c in self.terms.items()})
        other = self._coerce(other)
        terms: dict = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                terms[e] = terms.get(e, 0) + c1 * c2
        return SparsePoly(self.nvars, terms)

    __rmul__ = __mul__

    def __pow__(self, k: int) -> SparsePoly:
        out = SparsePoly.constant(self.nvars)
        for _ in range(int(k)):
            out = out * self
        return out

    def __eq__(self, other) -> bool:
        if not isinstance(other, SparsePoly):
            return NotImplemented
        return self.nvars == other.nvars and self.terms == other.terms

    def __len__(self) -> int:
        return len(self.terms)

    def __repr__(self) -> str:
        return f"SparsePoly({self.nvars}, {self.terms!r})"

    # queries

    @property
    def degree(self) -> int:
        return max((sum(e) for e in self.terms), default=0)

    def max_exponents(self) -> tuple:
        if not self.terms:
            return (0,) * self.nvars
        return tuple(int(v) for v in np.max(np.array(list(self.terms)), axis=0))

    def is_real(self, tol: float = 0.0) -> bool:
        return all(abs(c.imag) <= tol for c in self.terms.values())

    def __call__(self, point) -> complex:
        point = np.asarray(point)
        if point.shape[-1] != self.nvars:
            raise ValueError(f"point arity {point.shape[-1]} != {self.nvars}")
        total = 0j
        for e, c in self.terms.items():
            total = total + c * np.prod(point ** np.array(e), axis=-1)
        return total

    def compose_linear(self, lmap) -> SparsePoly:
        """Substitute ``x = lmap @ z``; ``lmap`` has shape (nvars, m)."""
        lmap = np.asarray(lmap)
        if lmap.shape[0] != self.nvars:
            raise ValueError(f"map has {lmap.shape[0]} rows, need {self.nvars}")
        m = lmap.shape[1]
        forms = [SparsePoly.linear_form(row) for row in lmap]
        powers: dict = {}

        def power(i, k):
            key = (i, k)
            if key not in powers:
                powers[key] = SparsePoly.constant(m) if k == 0 else power(i, k - 1) * forms[i]
            return powers[key]

        out = SparsePoly(m)
        for e, c in self.terms.items():
            term = SparsePoly.constant(m, c)
            for i, k in enumerate(e):
                if k:
                    term = term * power(i, k)
            out = out + term
        return out

    # serialization

    def to_json(self) -> list:
        return [
            {"exp": list(e), "re": c.real, "im": c.imag}
            for e, c in sorted(self.terms.items())
        ]

    @classmethod
    def from_json(cls, data: list, nvars: int | None = None) -> SparsePoly:
        if nvars is None:
            if not data:
                raise ValueError("cannot infer arity of an empty polynomial")
            nvars = len(data[0]["exp"])
        terms: dict = {}
        for item in data:
            e = tuple(item["exp"])
            terms[e] = terms.get(e, 0) + complex(item.get("re", 0.0), item.get("im", 0.0))
        return cls(nvars, terms)
