"""Grassmann algebra with Laurent polynomial coefficients.

Elements are finite sums  c * x^e * xi_{i_1} ... xi_{i_k}  with rational
coefficients, an integer (possibly negative) exponent e, and a strictly
increasing tuple of odd generator indices encoded as a bitmask.  The odd
generators anticommute and square to zero.  The number of set bits of a
monomial's mask is its degree in the ideal generated by the odd elements;
shifting that degree is what all the nilpotency arguments run on.

Besides the elements themselves the module provides even derivations
(determined by their values on x and each xi_i) and algebra endomorphisms
(determined the same way), which are the coefficient-level halves of the
operators acting on sheaf sections.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable

_ZERO = Fraction(0)
_ONE = Fraction(1)


def popcount(mask: int) -> int:
    return bin(mask).count("1")


def multiply_masks(mask_a: int, mask_b: int) -> tuple[int, int]:
    """Product sign and union of two wedge monomials; sign 0 when they collide."""
    if mask_a & mask_b:
        return 0, 0
    # each generator of b below a generator of a costs one transposition
    sign = 1
    a = mask_a
    while a:
        low = a & -a
        below = mask_b & (low - 1)
        if popcount(below) & 1:
            sign = -sign
        a ^= low
    return sign, mask_a | mask_b


class GrassmannAlgebra:
    """The exterior algebra on m odd generators over Q[x, 1/x]."""

    def __init__(self, m: int):
        if m < 0:
            raise ValueError("number of odd generators must be nonnegative")
        self.m = m
        self.full_mask = (1 << m) - 1

    def masks(self, size: int | None = None) -> list[int]:
        out = [mask for mask in range(1 << self.m)
               if size is None or popcount(mask) == size]
        return out

    def element(self, data=None) -> "AlgebraElement":
        return AlgebraElement(self, data or {})

    def zero(self) -> "AlgebraElement":
        return AlgebraElement(self, {})

    def one(self) -> "AlgebraElement":
        return AlgebraElement(self, {(0, 0): _ONE})

    def monomial(self, exponent: int, mask: int, coeff=1) -> "AlgebraElement":
        if mask & ~self.full_mask:
            raise ValueError("mask uses generators beyond the algebra")
        c = Fraction(coeff)
        return AlgebraElement(self, {(exponent, mask): c} if c else {})

    def x(self, exponent: int = 1) -> "AlgebraElement":
        return self.monomial(exponent, 0)

    def xi(self, i: int) -> "AlgebraElement":
        """The i-th odd generator, 1-based."""
        if not 1 <= i <= self.m:
            raise ValueError(f"xi index {i} out of range 1..{self.m}")
        return self.monomial(0, 1 << (i - 1))

    def __eq__(self, other):
        return isinstance(other, GrassmannAlgebra) and other.m == self.m

    def __hash__(self):
        return hash(("GrassmannAlgebra", self.m))

    def __repr__(self):
        return f"GrassmannAlgebra(m={self.m})"


def _mask_str(mask: int) -> str:
    return "".join(f"xi{i + 1}" for i in range(mask.bit_length()) if mask >> i & 1)


class AlgebraElement:
    """Immutable-by-convention element; data maps (exponent, mask) to Fraction."""

    __slots__ = ("algebra", "data")

    def __init__(self, algebra: GrassmannAlgebra, data: dict):
        self.algebra = algebra
        self.data = {k: v for k, v in data.items() if v}

    def is_zero(self) -> bool:
        return not self.data

    def terms(self):
        return sorted(self.data.items())

    def __add__(self, other: "AlgebraElement") -> "AlgebraElement":
        self._check(other)
        data = dict(self.data)
        for k, v in other.data.items():
            data[k] = data.get(k, _ZERO) + v
        return AlgebraElement(self.algebra, data)

    def __sub__(self, other: "AlgebraElement") -> "AlgebraElement":
        self._check(other)
        data = dict(self.data)
        for k, v in other.data.items():
            data[k] = data.get(k, _ZERO) - v
        return AlgebraElement(self.algebra, data)

    def __neg__(self) -> "AlgebraElement":
        return AlgebraElement(self.algebra, {k: -v for k, v in self.data.items()})

    def scale(self, c) -> "AlgebraElement":
        c = Fraction(c)
        if not c:
            return self.algebra.zero()
        return AlgebraElement(self.algebra, {k: c * v for k, v in self.data.items()})

    def __mul__(self, other: "AlgebraElement") -> "AlgebraElement":
        self._check(other)
        data: dict = {}
        for (e1, m1), c1 in self.data.items():
            for (e2, m2), c2 in other.data.items():
                sign, mask = multiply_masks(m1, m2)
                if sign:
                    key = (e1 + e2, mask)
                    data[key] = data.get(key, _ZERO) + sign * c1 * c2
        return AlgebraElement(self.algebra, data)

    def power(self, n: int) -> "AlgebraElement":
        if n < 0:
            return self.inverse().power(-n)
        out = self.algebra.one()
        for _ in range(n):
            out = out * self
        return out

    def inverse(self) -> "AlgebraElement":
        """Inverse of c x^e (1 + nilpotent); the body must be one monomial."""
        body = [(k, v) for k, v in self.data.items() if k[1] == 0]
        if len(body) != 1:
            raise ValueError("element is not invertible in the Laurent Grassmann algebra")
        (e, _), c = body[0]
        lead_inv = self.algebra.monomial(-e, 0, 1 / c)
        nil = lead_inv * (self - self.algebra.monomial(e, 0, c))
        # geometric series sum (-nil)^k; nil raises the odd degree, so it stops
        acc = self.algebra.one()
        power = self.algebra.one()
        sign = -1
        while True:
            power = power * nil
            if power.is_zero():
                break
            acc = acc + power.scale(sign)
            sign = -sign
        return acc * lead_inv

    def min_odd_degree(self) -> int | None:
        """Smallest number of odd generators among the terms; None if zero."""
        if not self.data:
            return None
        return min(popcount(mask) for (_, mask) in self.data)

    def homogeneous_odd_part(self, degree: int) -> "AlgebraElement":
        return AlgebraElement(self.algebra,
                              {k: v for k, v in self.data.items()
                               if popcount(k[1]) == degree})

    def exponents(self) -> Iterable[int]:
        return (e for (e, _) in self.data)

    def _check(self, other: "AlgebraElement"):
        if self.algebra != other.algebra:
            raise ValueError("elements live in different algebras")

    def __eq__(self, other):
        if not isinstance(other, AlgebraElement):
            return NotImplemented
        return self.algebra == other.algebra and self.data == other.data

    def __hash__(self):
        return hash((self.algebra, tuple(sorted(self.data.items()))))

    def __repr__(self):
        if not self.data:
            return "0"
        parts = []
        for (e, mask), c in self.terms():
            factors = []
            if c != 1 or (e == 0 and mask == 0):
                factors.append(str(c))
            if e:
                factors.append(f"x^{e}" if e != 1 else "x")
            if mask:
                factors.append(_mask_str(mask))
            parts.append(" ".join(factors))
        return " + ".join(parts)


class AlgebraDerivation:
    """Even derivation of the algebra, given by its values on x and each xi."""

    __slots__ = ("algebra", "image_x", "image_xi")

    def __init__(self, algebra: GrassmannAlgebra,
                 image_x: AlgebraElement | None = None,
                 image_xi: Iterable[AlgebraElement] | None = None):
        self.algebra = algebra
        self.image_x = image_x if image_x is not None else algebra.zero()
        if image_xi is None:
            self.image_xi = tuple(algebra.zero() for _ in range(algebra.m))
        else:
            self.image_xi = tuple(image_xi)
        if len(self.image_xi) != algebra.m:
            raise ValueError("need one xi image per odd generator")
        # evenness: sign-free Leibniz expansion is only valid then
        if any(popcount(mask) % 2 for (_, mask) in self.image_x.data):
            raise ValueError("an even derivation must send x to even elements")
        for i, img in enumerate(self.image_xi):
            if any(popcount(mask) % 2 == 0 for (_, mask) in img.data):
                raise ValueError(f"an even derivation must send xi{i + 1} to odd elements")

    def is_zero(self) -> bool:
        return self.image_x.is_zero() and all(v.is_zero() for v in self.image_xi)

    def _apply_to_mask(self, mask: int) -> AlgebraElement:
        """Leibniz expansion on a wedge monomial; the derivation is even."""
        out = self.algebra.zero()
        bits = [i for i in range(self.algebra.m) if mask >> i & 1]
        for t, i in enumerate(bits):
            prefix_mask = 0
            for b in bits[:t]:
                prefix_mask |= 1 << b
            suffix_mask = 0
            for b in bits[t + 1:]:
                suffix_mask |= 1 << b
            term = self.algebra.monomial(0, prefix_mask) * self.image_xi[i] \
                * self.algebra.monomial(0, suffix_mask)
            out = out + term
        return out

    def apply(self, element: AlgebraElement) -> AlgebraElement:
        out = self.algebra.zero()
        for (e, mask), c in element.data.items():
            if e and not self.image_x.is_zero():
                dx_part = self.algebra.monomial(e - 1, 0, c * e) * self.image_x \
                    * self.algebra.monomial(0, mask)
                out = out + dx_part
            xi_part = self._apply_to_mask(mask)
            if not xi_part.is_zero():
                out = out + self.algebra.monomial(e, 0, c) * xi_part
        return out

    def add(self, other: "AlgebraDerivation") -> "AlgebraDerivation":
        return AlgebraDerivation(self.algebra, self.image_x + other.image_x,
                                 tuple(a + b for a, b in zip(self.image_xi, other.image_xi)))

    def scale(self, c) -> "AlgebraDerivation":
        return AlgebraDerivation(self.algebra, self.image_x.scale(c),
                                 tuple(v.scale(c) for v in self.image_xi))

    def odd_degree_shift(self) -> int | None:
        """Lower bound q with images raising odd degree by at least q."""
        shifts = []
        if not self.image_x.is_zero():
            shifts.append(self.image_x.min_odd_degree())
        for v in self.image_xi:
            if not v.is_zero():
                shifts.append(v.min_odd_degree() - 1)
        if not shifts:
            return None
        return min(shifts)

    def homogeneous_part(self, degree: int) -> "AlgebraDerivation":
        return AlgebraDerivation(
            self.algebra,
            self.image_x.homogeneous_odd_part(degree),
            tuple(v.homogeneous_odd_part(degree + 1) for v in self.image_xi))


class AlgebraMorphism:
    """Unital algebra endomorphism given by its values on x and each xi."""

    __slots__ = ("algebra", "image_x", "image_xi")

    def __init__(self, algebra: GrassmannAlgebra,
                 image_x: AlgebraElement, image_xi: Iterable[AlgebraElement]):
        self.algebra = algebra
        self.image_x = image_x
        self.image_xi = tuple(image_xi)
        if len(self.image_xi) != algebra.m:
            raise ValueError("need one xi image per odd generator")
        if any(popcount(mask) % 2 for (_, mask) in self.image_x.data):
            raise ValueError("a parity-preserving morphism must send x to even elements")
        for i, img in enumerate(self.image_xi):
            if any(popcount(mask) % 2 == 0 for (_, mask) in img.data):
                raise ValueError(f"a parity-preserving morphism must send xi{i + 1} "
                                 "to odd elements")

    @classmethod
    def identity(cls, algebra: GrassmannAlgebra) -> "AlgebraMorphism":
        return cls(algebra, algebra.x(),
                   tuple(algebra.xi(i + 1) for i in range(algebra.m)))

    def is_identity(self) -> bool:
        return self == AlgebraMorphism.identity(self.algebra)

    def apply(self, element: AlgebraElement) -> AlgebraElement:
        out = self.algebra.zero()
        for (e, mask), c in element.data.items():
            term = self.image_x.power(e) if e else self.algebra.one()
            for i in range(self.algebra.m):
                if mask >> i & 1:
                    term = term * self.image_xi[i]
            out = out + term.scale(c)
        return out

    def compose(self, other: "AlgebraMorphism") -> "AlgebraMorphism":
        """self after other."""
        return AlgebraMorphism(self.algebra,
                               self.apply(other.image_x),
                               tuple(self.apply(v) for v in other.image_xi))

    def deviation_shift(self) -> int | None:
        """Lower bound q with (self - id) raising odd degree by at least q."""
        alg = self.algebra
        shifts = []
        dev_x = self.image_x - alg.x()
        if not dev_x.is_zero():
            shifts.append(dev_x.min_odd_degree())
        for i in range(alg.m):
            dev = self.image_xi[i] - alg.xi(i + 1)
            if not dev.is_zero():
                shifts.append(dev.min_odd_degree() - 1)
        if not shifts:
            return None
        return min(shifts)

    def __eq__(self, other):
        if not isinstance(other, AlgebraMorphism):
            return NotImplemented
        return (self.algebra, self.image_x, self.image_xi) == \
            (other.algebra, other.image_x, other.image_xi)

    def __hash__(self):
        return hash((self.algebra, self.image_x, self.image_xi))
