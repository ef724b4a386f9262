"""Sparse multivariate polynomials with complex coefficients."""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Mapping

import numpy as np

from .errors import ArgumentError

_VAR = re.compile(r"z(\d+)")
# numbers, variables, I for sqrt(-1), arithmetic; sympify evaluates its input, so nothing else
_EXPR = re.compile(r"^(?:\s|z\d+|I|\d|\.|[eE](?=[-+]?\d)|[-+*/^()])*$")


@dataclass(frozen=True)
class Polynomial:
    """Polynomial ``sum c_alpha z^alpha`` stored as sorted ``(alpha, c)`` pairs."""

    m: int
    terms: tuple[tuple[tuple[int, ...], complex], ...]

    @classmethod
    def from_dict(cls, m: int, coeffs: Mapping[Iterable[int], complex]) -> "Polynomial":
        acc: dict[tuple[int, ...], complex] = {}
        for alpha, c in coeffs.items():
            alpha = tuple(int(a) for a in alpha)
            if len(alpha) != m or any(a < 0 for a in alpha):
                raise ArgumentError(f"bad exponent {alpha} for m={m}")
            acc[alpha] = acc.get(alpha, 0) + complex(c)
        terms = tuple(sorted((a, c) for a, c in acc.items() if c != 0))
        return cls(m, terms)

    @classmethod
    def monomial(cls, alpha: Iterable[int], coeff: complex = 1.0) -> "Polynomial":
        alpha = tuple(alpha)
        return cls.from_dict(len(alpha), {alpha: coeff})

    @classmethod
    def constant(cls, m: int, value: complex = 1.0) -> "Polynomial":
        return cls.from_dict(m, {(0,) * m: value})

    @classmethod
    def parse(cls, text: str, m: int) -> "Polynomial":
        """Parse an expression in ``z1, ..., zm`` such as ``"1 + z1 - 0.5*z2**2"``."""
        import sympy

        if not _EXPR.match(text):
            raise ArgumentError(f"polynomial {text!r} contains characters other than numbers, z1..zm, I and + - * / ^ ( )")
        names = [f"z{j + 1}" for j in range(m)]
        for idx in _VAR.findall(text):
            if not 1 <= int(idx) <= m:
                raise ArgumentError(f"variable z{idx} out of range for m={m}")
        syms = sympy.symbols(names)
        local = dict(zip(names, syms))
        try:
            expr = sympy.sympify(text.replace("^", "**"), locals=local)
            poly = sympy.Poly(sympy.expand(expr), *syms)
        except (sympy.SympifyError, sympy.PolynomialError, TypeError) as exc:
            raise ArgumentError(f"cannot parse polynomial {text!r}: {exc}") from exc
        return cls.from_dict(m, {a: complex(c) for a, c in poly.terms()})

    @classmethod
    def from_terms(cls, m: int, terms) -> "Polynomial":
        """Build from ``[[alpha, coeff], ...]`` where ``coeff`` is a number or ``[re, im]``."""
        acc = {}
        for alpha, c in terms:
            if isinstance(c, (list, tuple)):
                c = complex(c[0], c[1])
            acc[tuple(alpha)] = acc.get(tuple(alpha), 0) + complex(c)
        return cls.from_dict(m, acc)

    def __call__(self, z) -> complex:
        z = np.asarray(z, dtype=complex)
        if z.shape != (self.m,):
            raise ArgumentError(f"expected a point in C^{self.m}")
        total = 0j
        for alpha, c in self.terms:
            total += c * np.prod(z ** np.asarray(alpha))
        return complex(total)

    def __mul__(self, other: "Polynomial") -> "Polynomial":
        if self.m != other.m:
            raise ArgumentError("variable count mismatch")
        acc: dict[tuple[int, ...], complex] = {}
        for a, c in self.terms:
            for b, d in other.terms:
                key = tuple(x + y for x, y in zip(a, b))
                acc[key] = acc.get(key, 0) + c * d
        return Polynomial.from_dict(self.m, acc)

    def as_dict(self) -> dict[tuple[int, ...], complex]:
        return dict(self.terms)

    @property
    def degree(self) -> int:
        return max((sum(a) for a, _ in self.terms), default=-1)

    def is_monomial(self) -> bool:
        return len(self.terms) == 1
