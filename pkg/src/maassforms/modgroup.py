"""Rational 2x2 matrices with the weight-k slash action, and Gamma_0(N) cusp
data: representatives, scaling matrices, widths, cusp parameters, and coset
representatives for Eisenstein sums.

All group computations are exact (Fraction entries); floats only enter
through the slash action on the upper half-plane.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

from .characters import DirichletCharacter

__all__ = [
    "RationalMatrix",
    "Cusp",
    "identity_matrix",
    "translation",
    "fricke",
    "slash",
    "slash_factor",
    "cusps",
    "cusp_equivalent",
    "cusp_width",
    "cusp_parameter",
    "coset_reps",
    "bottom_row",
    "upper_triangular_decompose",
]


@dataclass(frozen=True)
class RationalMatrix:
    """2x2 matrix over Q with positive determinant."""

    a: Fraction
    b: Fraction
    c: Fraction
    d: Fraction

    def __post_init__(self):
        for name in "abcd":
            object.__setattr__(self, name, Fraction(getattr(self, name)))
        if self.det <= 0:
            raise ValueError(f"determinant must be positive, got {self.det}")

    @property
    def det(self) -> Fraction:
        return self.a * self.d - self.b * self.c

    def __matmul__(self, other: "RationalMatrix") -> "RationalMatrix":
        return RationalMatrix(
            self.a * other.a + self.b * other.c,
            self.a * other.b + self.b * other.d,
            self.c * other.a + self.d * other.c,
            self.c * other.b + self.d * other.d,
        )

    def inverse(self) -> "RationalMatrix":
        det = self.det
        return RationalMatrix(self.d / det, -self.b / det, -self.c / det, self.a / det)

    def apply(self, tau: complex) -> complex:
        """Moebius action (a tau + b)/(c tau + d)."""
        denom = complex(self.c) * tau + complex(self.d)
        if denom == 0:
            raise ZeroDivisionError("c*tau + d = 0")
        return (complex(self.a) * tau + complex(self.b)) / denom

    @property
    def is_integral(self) -> bool:
        return all(getattr(self, n).denominator == 1 for n in "abcd")

    def in_gamma0(self, level: int) -> bool:
        return (
            self.is_integral
            and self.det == 1
            and int(self.c) % level == 0
        )

    def entries(self) -> tuple[Fraction, Fraction, Fraction, Fraction]:
        return (self.a, self.b, self.c, self.d)

    def __repr__(self):
        return f"[[{self.a}, {self.b}], [{self.c}, {self.d}]]"


def identity_matrix() -> RationalMatrix:
    return RationalMatrix(1, 0, 0, 1)


def translation(r) -> RationalMatrix:
    """T^r = [[1, r], [0, 1]] for rational r."""
    return RationalMatrix(1, Fraction(r), 0, 1)


def fricke(level: int) -> RationalMatrix:
    """omega(N) = [[0, -1], [N, 0]]; slashing twice multiplies by (-1)^k."""
    if level < 1:
        raise ValueError("level must be >= 1")
    return RationalMatrix(0, -1, level, 0)


def slash_factor(k: int, gamma: RationalMatrix, tau: complex) -> complex:
    """(det gamma)^{k/2} (c tau + d)^{-k}; integer k keeps powers single-valued,
    and the positive real root is taken for (det)^{k/2} with odd k."""
    denom = complex(gamma.c) * tau + complex(gamma.d)
    if denom == 0:
        raise ZeroDivisionError("c*tau + d = 0")
    det = float(gamma.det)
    return det ** (k / 2.0) * denom ** (-k)


def slash(f: Callable[[complex], complex], k: int, gamma: RationalMatrix, tau: complex) -> complex:
    """Weight-k slash action (f|_k gamma)(tau) for a pointwise evaluator f."""
    if tau.imag <= 0:
        raise ValueError("tau must lie in the upper half-plane")
    return slash_factor(k, gamma, tau) * f(gamma.apply(tau))


# ---------------------------------------------------------------------------
# cusps of Gamma_0(N)


@dataclass(frozen=True)
class Cusp:
    """Cusp a/c of Gamma_0(N) in lowest terms; infinity is (1, 0).

    scaling is an SL_2(Z) matrix sending infinity to the cusp; width is the
    least h >= 1 with scaling T^h scaling^{-1} in Gamma_0(N); kappa in [0, 1)
    is the character's phase on that generator (0 for the trivial character).
    """

    a: int
    c: int
    scaling: RationalMatrix
    width: int
    kappa: float = 0.0

    @property
    def is_infinity(self) -> bool:
        return self.c == 0

    def label(self) -> str:
        return "inf" if self.c == 0 else f"{self.a}/{self.c}"

    def __repr__(self):
        return f"Cusp({self.label()}, width={self.width})"


def _scaling_matrix(a: int, c: int) -> RationalMatrix:
    """An SL_2(Z) matrix with first column (a, c)."""
    if c == 0:
        return identity_matrix()
    g, x, y = _ext_gcd(a, c)
    assert g == 1
    # a*x + c*y = 1 -> [[a, -y], [c, x]] has det a x + c y = 1
    return RationalMatrix(a, -y, c, x)


def _ext_gcd(a: int, b: int) -> tuple[int, int, int]:
    """(g, x, y) with a x + b y = g = gcd(a, b), g >= 0."""
    old_r, r = a, b
    old_x, x = 1, 0
    old_y, y = 0, 1
    while r:
        q = old_r // r
        old_r, r = r, old_r - q * r
        old_x, x = x, old_x - q * x
        old_y, y = y, old_y - q * y
    if old_r < 0:
        old_r, old_x, old_y = -old_r, -old_x, -old_y
    return old_r, old_x, old_y


def cusp_width(level: int, rho: Cusp) -> int:
    """Least h >= 1 with gamma_rho T^h gamma_rho^{-1} in Gamma_0(N)."""
    inv = rho.scaling.inverse()
    for h in range(1, level + 1):
        if (rho.scaling @ translation(h) @ inv).in_gamma0(level):
            return h
    raise RuntimeError("width not found below the level")  # unreachable


def cusp_parameter(level: int, chi: DirichletCharacter, rho: Cusp) -> float:
    """kappa in [0, 1) with e^{2 pi i kappa} = chi(d) for the width generator
    g_rho = gamma_rho T^{width} gamma_rho^{-1}."""
    g = rho.scaling @ translation(rho.width) @ rho.scaling.inverse()
    r = chi.rational_exponent(int(g.d))
    if r is None:
        raise ValueError(f"character vanishes at d = {int(g.d)}; invalid cusp data")
    return float(r)


def cusp_equivalent(level: int, a1: int, c1: int, a2: int, c2: int) -> bool:
    """Exact Gamma_0(N)-equivalence of cusps a1/c1 and a2/c2 (gcd(a,c) = 1;
    infinity is (1, 0)).

    gamma_2 (+-T^j) gamma_1^{-1} lies in Gamma_0(N) for some integer j iff
    the linear congruence c1 c2 j = c2 d1 - c1 d2 (mod N) is solvable, where
    gamma_i are scaling matrices; this scans the full (infinite) stabilizer.
    """
    g1 = _scaling_matrix(a1, c1)
    g2 = _scaling_matrix(a2, c2)
    d1, d2 = int(g1.d), int(g2.d)
    rhs = (c2 * d1 - c1 * d2) % level
    g = math.gcd(c1 * c2 % level, level)
    return rhs % g == 0


def cusps(level: int, chi: DirichletCharacter | None = None) -> list[Cusp]:
    """A complete irredundant list of Gamma_0(N) cusp representatives.

    Representatives are a/c with c | N and a mod gcd(c, N/c) coprime to it,
    ordered by (c, a); the class of the divisor c = N is represented by
    infinity.  When chi is given the kappa field is filled from it.
    """
    if level < 1:
        raise ValueError("level must be >= 1")
    reps: list[tuple[int, int]] = []
    for c in sorted(d for d in range(1, level + 1) if level % d == 0):
        if c == level:
            reps.append((1, 0))  # the class of infinity
            continue
        if c == 1:
            reps.append((0, 1))  # the cusp 0
            continue
        g = math.gcd(c, level // c)
        for a0 in range(1, g + 1):
            if math.gcd(a0, g) != 1:
                continue
            a = a0
            while math.gcd(a, c) != 1:  # lift a0 mod g to a residue coprime to c
                a += g
            reps.append((a, c))
    out = []
    for a, c in reps:
        scaling = _scaling_matrix(a, c)
        cusp = Cusp(a, c, scaling, 1)
        width = cusp_width(level, cusp)
        cusp = Cusp(a, c, scaling, width)
        if chi is not None:
            cusp = Cusp(a, c, scaling, width, cusp_parameter(level, chi, cusp))
        out.append(cusp)
    # infinity first, then by (c, a)
    out.sort(key=lambda r: (0, 0) if r.is_infinity else (r.c, r.a))
    return out


def coset_reps(level: int, rho: Cusp, bound: int) -> list[RationalMatrix]:
    """One representative per coset of Gamma_rho \\ Gamma_0(N) among matrices
    g whose row (c, d) of gamma_rho^{-1} g has max(|c|, |d|) <= bound.

    Cosets biject with bottom rows of gamma_rho^{-1} Gamma_0(N) up to sign;
    each normalized coprime row is lifted by extended Euclid and the T^j
    ambiguity (j mod width) is resolved by testing membership in Gamma_0(N).
    """
    if bound < 1:
        raise ValueError("bound must be >= 1")
    reps = []
    width = rho.width
    for c in range(0, bound + 1):
        d_range = range(1, bound + 1) if c == 0 else range(-bound, bound + 1)
        for d in d_range:
            if math.gcd(c, d) != 1:
                continue
            # Euclid lift of the bottom row (c, d) to SL_2(Z)
            _, x, y = _ext_gcd(d, -c)
            h0 = RationalMatrix(x, y, c, d)
            for j in range(width):
                g = rho.scaling @ translation(j) @ h0
                if g.in_gamma0(level):
                    reps.append(g)
                    break
    reps.sort(key=lambda g: _row_key(rho, g))
    return reps


def _row_key(rho: Cusp, g: RationalMatrix) -> tuple:
    h = rho.scaling.inverse() @ g
    c, d = int(h.c), int(h.d)
    return (max(abs(c), abs(d)), abs(c), abs(d), c, d)


def bottom_row(rho: Cusp, g: RationalMatrix) -> tuple[int, int]:
    """The row (c, d) of gamma_rho^{-1} g entering j(gamma_rho^{-1} g, tau)."""
    h = rho.scaling.inverse() @ g
    return int(h.c), int(h.d)


def upper_triangular_decompose(m: RationalMatrix) -> tuple[RationalMatrix, RationalMatrix]:
    """Write an integral M with det M > 0 as gamma * U with gamma in SL_2(Z)
    and U = [[a, b], [0, d]], a >= 1, d >= 1; exact."""
    if not m.is_integral:
        raise ValueError("matrix must have integer entries")
    m11, m21 = int(m.a), int(m.c)
    g, x, y = _ext_gcd(m11, m21)
    if g == 0:
        raise ValueError("first column must be nonzero")
    # [[x, y], [-m21/g, m11/g]] in SL_2(Z) clears the lower-left entry
    inv = RationalMatrix(x, y, Fraction(-m21, g), Fraction(m11, g))
    u = inv @ m
    gamma = inv.inverse()
    assert u.c == 0 and u.a >= 1 and u.d >= 1
    assert (gamma @ u).entries() == m.entries()
    return gamma, u
