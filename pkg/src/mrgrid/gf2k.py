"""Arithmetic in GF(2^d) with a polynomial-basis bit-mask representation.

An element is a plain ``int`` whose bit ``i`` is the coefficient of ``x^i``.
A :class:`FieldSpec` pins the degree and the reduction polynomial.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

MAX_DEGREE = 32

FieldElement = int


class RejectedPolynomial(ValueError):
    pass


class DivisionByZero(ZeroDivisionError):
    pass


class NotPowerOfTwo(ValueError):
    pass


def _clmul(a: int, b: int) -> int:
    r = 0
    while b:
        if b & 1:
            r ^= a
        a <<= 1
        b >>= 1
    return r


def _polymod(a: int, p: int) -> int:
    dp = p.bit_length()
    while a.bit_length() >= dp:
        a ^= p << (a.bit_length() - dp)
    return a


def is_irreducible(poly: int) -> bool:
    """Trial division by every polynomial of degree 1..deg/2."""
    d = poly.bit_length() - 1
    if d < 1:
        return False
    for q in range(2, 1 << (d // 2 + 1)):
        if _polymod(poly, q) == 0:
            return False
    return True


@lru_cache(maxsize=None)
def default_poly(degree: int) -> int:
    """Lexicographically smallest irreducible polynomial of the given degree
    with nonzero constant term (so GF(2) is built on x+1, not x)."""
    for poly in range((1 << degree) | 1, 1 << (degree + 1), 2):
        if is_irreducible(poly):
            return poly
    raise AssertionError("unreachable: irreducibles exist in every degree")


@dataclass(frozen=True)
class FieldSpec:
    degree: int
    poly: int

    @property
    def size(self) -> int:
        return 1 << self.degree

    def contains(self, x: int) -> bool:
        return isinstance(x, int) and 0 <= x < self.size

    def add(self, x: int, y: int) -> int:
        return x ^ y

    def mul(self, x: int, y: int) -> int:
        r = 0
        top = 1 << self.degree
        while y:
            if y & 1:
                r ^= x
            y >>= 1
            x <<= 1
            if x & top:
                x ^= self.poly
        return r

    def square(self, x: int) -> int:
        return self.mul(x, x)

    def pow(self, x: int, e: int) -> int:
        if e < 0:
            return self.pow(self.inv(x), -e)
        result = 1
        while e:
            if e & 1:
                result = self.mul(result, x)
            x = self.mul(x, x)
            e >>= 1
        return result

    def inv(self, x: int) -> int:
        if x == 0:
            raise DivisionByZero("inverse of zero in GF(2^%d)" % self.degree)
        return self.pow(x, self.size - 2)

    def div(self, x: int, y: int) -> int:
        return self.mul(x, self.inv(y))

    def to_json(self) -> dict:
        return {"degree": self.degree, "poly": hex(self.poly)}

    @classmethod
    def from_json(cls, obj: dict) -> "FieldSpec":
        poly = obj.get("poly")
        return make_field(int(obj["degree"]), None if poly is None else int(str(poly), 16))


def make_field(d: int, poly: int | None = None) -> FieldSpec:
    if not 1 <= d <= MAX_DEGREE:
        raise ValueError(f"degree must be in [1, {MAX_DEGREE}], got {d}")
    if poly is None:
        return FieldSpec(d, default_poly(d))
    if poly.bit_length() - 1 != d:
        raise RejectedPolynomial(f"{poly:#x} does not have degree {d}")
    if not is_irreducible(poly):
        raise RejectedPolynomial(f"{poly:#x} is reducible over F_2")
    return FieldSpec(d, poly)


def to_hex(x: int) -> str:
    return hex(x)


def from_hex(s: str) -> int:
    return int(s, 16)


def _log2_exact(x: int, what: str) -> int:
    if x < 1 or x & (x - 1):
        raise NotPowerOfTwo(f"{what} = {x} is not a power of two")
    return x.bit_length() - 1


def additive_subgroup_and_cosets(spec: FieldSpec, M: int) -> tuple[list[int], list[int]]:
    """Subgroup spanned by the low ``log2 M`` basis monomials, plus one
    representative per coset (the elements supported on the high bits).

    Both lists are in ascending bit order.
    """
    log_m = _log2_exact(M, "M")
    if log_m > spec.degree:
        raise NotPowerOfTwo(f"M = {M} exceeds the field size {spec.size}")
    subgroup = list(range(1 << log_m))
    reps = [c << log_m for c in range(1 << (spec.degree - log_m))]
    return subgroup, reps


def next_power_of_two(x: int) -> int:
    p = 1
    while p < x:
        p <<= 1
    return p
