"""Scalar layer: powers of q, quantum brackets, Gauss sums, Chebychev
polynomials and confluent (Lagrange/Hermite) interpolation.

All arithmetic is double-precision complex.  The one place where floating
point is not allowed is the quarter-lattice membership test that gates
simplicity/typicality of modules; that test lives on :class:`ExactWeight`,
which tracks weights as (symbolic part, exact rational offset).
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass, field
from fractions import Fraction
from numbers import Integral
from typing import Iterable, Mapping, Sequence

import numpy as np

__all__ = [
    "RootData",
    "ExactWeight",
    "Poly",
    "weight",
    "q_power",
    "qbrace",
    "qbracket",
    "gauss_sum",
    "chebychev",
    "interpolate",
    "matrix_poly",
]


@dataclass(frozen=True)
class RootData:
    """Order-N root data: q = exp(4*i*pi/N) and zeta = -exp(2*i*pi/N).

    N must be odd and at least 5; then q is a primitive N-th root of unity
    and zeta is a primitive 2N-th root with zeta**2 == q.
    """

    N: int
    q: complex = field(init=False)
    zeta: complex = field(init=False)

    def __post_init__(self):
        if self.N < 5 or self.N % 2 == 0:
            raise ValueError(f"N must be odd and >= 5, got {self.N}")
        object.__setattr__(self, "q", cmath.exp(4j * cmath.pi / self.N))
        object.__setattr__(self, "zeta", -cmath.exp(2j * cmath.pi / self.N))


def _as_fraction(x) -> Fraction | None:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, Integral):
        return Fraction(int(x))
    return None


@dataclass(frozen=True)
class ExactWeight:
    """A weight stored as ``sum(coeff * symbol) + offset``.

    ``symbols`` maps generic-parameter names to integer coefficients and
    ``offset`` is an exact rational (quarters arise from the one-dimensional
    modules).  ``value`` caches the numeric value under the parameter
    assignment fixed at construction.  Membership in (1/4)Z is decided on
    the exact data, never by floating comparison.
    """

    symbols: tuple[tuple[str, int], ...]
    offset: Fraction
    value: complex = field(compare=False)

    @staticmethod
    def make(symbols: Mapping[str, int] | Iterable[tuple[str, int]],
             offset: Fraction,
             symbol_values: Mapping[str, complex]) -> "ExactWeight":
        items = dict(symbols)
        items = {k: int(c) for k, c in items.items() if c != 0}
        val = sum(c * complex(symbol_values[k]) for k, c in items.items())
        val += complex(Fraction(offset))
        return ExactWeight(tuple(sorted(items.items())), Fraction(offset), val)

    @staticmethod
    def rational(x) -> "ExactWeight":
        frac = _as_fraction(x)
        if frac is None:
            raise TypeError(f"not an exact rational: {x!r}")
        return ExactWeight((), frac, complex(frac))

    @staticmethod
    def symbol(name: str, value: complex) -> "ExactWeight":
        return ExactWeight(((name, 1),), Fraction(0), complex(value))

    # -- arithmetic ---------------------------------------------------------

    def _combine(self, other: "ExactWeight", sign: int) -> "ExactWeight":
        syms = dict(self.symbols)
        for k, c in other.symbols:
            syms[k] = syms.get(k, 0) + sign * c
        syms = {k: c for k, c in syms.items() if c != 0}
        return ExactWeight(tuple(sorted(syms.items())),
                           self.offset + sign * other.offset,
                           self.value + sign * other.value)

    def __add__(self, other) -> "ExactWeight":
        return self._combine(as_weight(other), +1)

    __radd__ = __add__

    def __sub__(self, other) -> "ExactWeight":
        return self._combine(as_weight(other), -1)

    def __rsub__(self, other) -> "ExactWeight":
        return as_weight(other)._combine(self, -1)

    def __neg__(self) -> "ExactWeight":
        return ExactWeight(tuple((k, -c) for k, c in self.symbols),
                           -self.offset, -self.value)

    def __mul__(self, n) -> "ExactWeight":
        if not isinstance(n, Integral):
            return NotImplemented
        n = int(n)
        return ExactWeight(tuple((k, n * c) for k, c in self.symbols),
                           n * self.offset, n * self.value)

    __rmul__ = __mul__

    # -- exact predicates ---------------------------------------------------

    @property
    def is_exact(self) -> bool:
        return not self.symbols

    def in_quarter_lattice(self) -> bool:
        """Exact test for membership in (1/4)Z."""
        return self.is_exact and (4 * self.offset).denominator == 1

    def in_n_quarter_lattice(self, N: int) -> bool:
        """Exact test for membership in (N/4)Z."""
        return self.is_exact and (4 * self.offset / N).denominator == 1

    def is_admissible(self, N: int) -> bool:
        """Exact test for the set (C \\ (1/4)Z) union (N/4)Z."""
        return (not self.in_quarter_lattice()) or self.in_n_quarter_lattice(N)

    def __str__(self):
        parts = []
        for k, c in self.symbols:
            if c == 1:
                parts.append(k)
            elif c == -1:
                parts.append(f"-{k}")
            else:
                parts.append(f"{c}*{k}")
        if self.offset or not parts:
            parts.append(str(self.offset))
        return "+".join(parts).replace("+-", "-")


def as_weight(x) -> ExactWeight:
    """Coerce ints/Fractions to exact offsets; floats/complex to fresh symbols.

    A float is treated as a generic (non-quarter-lattice) parameter: two
    coercions of the same numeric value share a symbol, so weight bookkeeping
    stays consistent, but no rationality is ever guessed from a float.
    """
    if isinstance(x, ExactWeight):
        return x
    frac = _as_fraction(x)
    if frac is not None:
        return ExactWeight.rational(frac)
    if isinstance(x, (float, complex)):
        z = complex(x)
        return ExactWeight.symbol(f"#{z!r}", z)
    raise TypeError(f"cannot interpret {x!r} as a weight")


def weight(x, name: str | None = None) -> ExactWeight:
    """Public constructor: ``weight(Fraction(1,5))``, ``weight(0.3, "alpha")``."""
    if name is not None:
        return ExactWeight.symbol(name, complex(x))
    return as_weight(x)


# ---------------------------------------------------------------------------
# scalars


def q_power(root: RootData, z) -> complex:
    """q**z = exp(4*i*pi*z/N) for arbitrary complex z."""
    if isinstance(z, ExactWeight):
        z = z.value
    return cmath.exp(4j * cmath.pi * complex(z) / root.N)


def qbrace(root: RootData, z) -> complex:
    """{z} = q**z - q**(-z)."""
    if isinstance(z, ExactWeight):
        z = z.value
    return q_power(root, z) - q_power(root, -complex(z))


def qbracket(root: RootData, z) -> complex:
    """[z] = {z}/{1}; {1} never vanishes for N >= 5."""
    return qbrace(root, z) / qbrace(root, 1)


def gauss_sum(root_or_N: RootData | int) -> complex:
    """G_N = sum_k q**(-k^2/2) over k = 0..N-1, for odd N."""
    if isinstance(root_or_N, RootData):
        N = root_or_N.N
    else:
        N = int(root_or_N)
        if N % 2 == 0:
            raise ValueError("Gauss sum defined here for odd N only")
    return sum(cmath.exp(-2j * cmath.pi * k * k / N) for k in range(N))


# ---------------------------------------------------------------------------
# polynomials


@dataclass(frozen=True)
class Poly:
    """Polynomial with complex coefficients in ascending degree order."""

    coeffs: tuple[complex, ...]

    @staticmethod
    def make(coeffs: Sequence[complex], trim_tol: float = 0.0) -> "Poly":
        cs = [complex(c) for c in coeffs]
        scale = max((abs(c) for c in cs), default=0.0)
        while cs and abs(cs[-1]) <= trim_tol * scale:
            cs.pop()
        return Poly(tuple(cs)) if cs else Poly((0j,))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def __call__(self, z: complex) -> complex:
        acc = 0j
        for c in reversed(self.coeffs):
            acc = acc * z + c
        return acc

    def derivative(self) -> "Poly":
        if len(self.coeffs) <= 1:
            return Poly((0j,))
        return Poly(tuple(k * c for k, c in enumerate(self.coeffs) if k > 0))

    def __add__(self, other: "Poly") -> "Poly":
        n = max(len(self.coeffs), len(other.coeffs))
        a = list(self.coeffs) + [0j] * (n - len(self.coeffs))
        b = list(other.coeffs) + [0j] * (n - len(other.coeffs))
        return Poly(tuple(x + y for x, y in zip(a, b)))

    def __sub__(self, other: "Poly") -> "Poly":
        return self + other.scale(-1)

    def scale(self, c: complex) -> "Poly":
        return Poly(tuple(c * x for x in self.coeffs))

    def shift_mul(self) -> "Poly":
        """Multiply by z."""
        return Poly((0j,) + self.coeffs)


def chebychev(n: int) -> Poly:
    """T_n with T_0 = 2, T_1 = z, T_{n+1} = z*T_n - T_{n-1}.

    Satisfies T_n(X + 1/X) = X**n + X**(-n); coefficients are integers.
    """
    if n < 0:
        raise ValueError("n must be >= 0")
    t_prev, t_cur = Poly((2 + 0j,)), Poly((0j, 1 + 0j))
    if n == 0:
        return t_prev
    for _ in range(n - 1):
        t_prev, t_cur = t_cur, t_cur.shift_mul() - t_prev
    return t_cur


def interpolate(nodes: Sequence[tuple]) -> Poly:
    """Minimal-degree polynomial through value (and optional derivative) data.

    ``nodes`` is a sequence of ``(point, value)`` or ``(point, value, deriv)``
    with pairwise-distinct points; a ``deriv`` of None means no derivative
    constraint.  Solves the confluent Vandermonde system and trims trailing
    coefficients, so e.g. redundant constraints yield a low-degree answer.
    """
    pts = [complex(n[0]) for n in nodes]
    for i in range(len(pts)):
        for j in range(i + 1, len(pts)):
            if abs(pts[i] - pts[j]) <= 1e-9:
                raise ValueError("degenerate interpolation nodes")
    rows, rhs = [], []
    m = sum(2 if (len(n) > 2 and n[2] is not None) else 1 for n in nodes)
    for n in nodes:
        p = complex(n[0])
        rows.append([p ** k for k in range(m)])
        rhs.append(complex(n[1]))
        if len(n) > 2 and n[2] is not None:
            rows.append([k * p ** (k - 1) if k else 0j for k in range(m)])
            rhs.append(complex(n[2]))
    sol = np.linalg.solve(np.array(rows, dtype=complex), np.array(rhs, dtype=complex))
    return Poly.make(sol, trim_tol=1e-12)


def matrix_poly(p: Poly, a: np.ndarray) -> np.ndarray:
    """Evaluate p(A) for square A by Horner's scheme."""
    a = np.asarray(a, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError("matrix_poly needs a square matrix")
    acc = np.zeros_like(a)
    eye = np.eye(a.shape[0], dtype=complex)
    for c in reversed(p.coeffs):
        acc = acc @ a + c * eye
    return acc
