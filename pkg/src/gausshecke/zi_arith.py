"""Exact arithmetic in Z[i].

Everything downstream (characters, Gauss sums, L-values) is built on the
Gaussian integers.  This module provides:

    norm(z)              N(a+bi) = a^2 + b^2
    primary_decompose(z) z = unit * z0 with z0 = 1 mod (1+i)^3, unit in <i>
    factor(z)            factorization of odd z into primary Gaussian primes
    mobius / euler_phi / omega    multiplicative functions on the ideal (z)
    primary_divisors(q)  all primary divisors of a primary q
    primary_elements_up_to(x)     numpy enumeration of {a primary : N(a) <= x}
    primary_prime_powers_up_to(x) prime-ideal powers with their norms

Conventions:
  * "odd" means the norm is odd, i.e. z is coprime to 1+i.
  * a + bi is primary iff b is even and a + b = 1 (mod 4); equivalently
    a + bi = 1 mod (1+i)^3.  Each odd ideal has exactly one primary generator.
  * multiplicative functions are unit-invariant: they are functions of the
    ideal (z), so inputs are normalized through primary_decompose first.
  * deterministic ordering of primes/divisors everywhere: by (norm, re, im).

Integers are machine-width by policy: any value with norm above 2^62 is
rejected (OverflowError), never silently wrapped.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from itertools import product

from sympy import factorint

NORM_LIMIT = 1 << 62


class GaussIntOverflow(OverflowError):
    """Result exceeds the machine-width policy (norm > 2^62)."""


@dataclass(frozen=True)
class GaussInt:
    """An element a + bi of Z[i]; the universal scalar of this package."""

    re: int
    im: int

    def __post_init__(self):
        if self.re * self.re + self.im * self.im > NORM_LIMIT:
            raise GaussIntOverflow(f"norm of {self.re}+{self.im}i exceeds 2^62")

    @property
    def norm(self) -> int:
        return self.re * self.re + self.im * self.im

    def is_zero(self) -> bool:
        return self.re == 0 and self.im == 0

    def is_odd(self) -> bool:
        """Coprime to 1+i, i.e. odd norm."""
        return (self.re + self.im) % 2 != 0

    def is_unit(self) -> bool:
        return self.norm == 1

    def is_primary(self) -> bool:
        """z = 1 mod (1+i)^3: b even and a + b = 1 (mod 4)."""
        return self.im % 2 == 0 and (self.re + self.im) % 4 == 1

    def conj(self) -> "GaussInt":
        return GaussInt(self.re, -self.im)

    def key(self) -> tuple[int, int, int]:
        """Deterministic sort key (norm, re, im)."""
        return (self.norm, self.re, self.im)

    def __add__(self, other: "GaussInt") -> "GaussInt":
        return GaussInt(self.re + other.re, self.im + other.im)

    def __sub__(self, other: "GaussInt") -> "GaussInt":
        return GaussInt(self.re - other.re, self.im - other.im)

    def __neg__(self) -> "GaussInt":
        return GaussInt(-self.re, -self.im)

    def __mul__(self, other: "GaussInt") -> "GaussInt":
        return GaussInt(
            self.re * other.re - self.im * other.im,
            self.re * other.im + self.im * other.re,
        )

    def __pow__(self, k: int) -> "GaussInt":
        if k < 0:
            raise ValueError("negative powers leave Z[i]")
        out = ONE
        base = self
        while k:
            if k & 1:
                out = out * base
            k >>= 1
            if k:
                base = base * base
        return out

    def __str__(self):
        if self.im == 0:
            return str(self.re)
        if self.re == 0:
            return f"{self.im}i"
        return f"{self.re}{self.im:+d}i"


ZERO = GaussInt(0, 0)
ONE = GaussInt(1, 0)
I = GaussInt(0, 1)
UNITS = (ONE, I, GaussInt(-1, 0), GaussInt(0, -1))

#: (1+i)^3 = -2 + 2i, the even part of every conductor in this family.
ONE_PLUS_I_CUBED = GaussInt(-2, 2)


def norm(z: GaussInt) -> int:
    return z.norm


def _round_half_up(t: int, n: int) -> int:
    """floor(t/n + 1/2) for n > 0; shift-invariant, so reduction below is
    canonical on residue classes."""
    return (2 * t + n) // (2 * n)


def divmod_rounded(a: GaussInt, b: GaussInt) -> tuple[GaussInt, GaussInt]:
    """Nearest-integer division: a = q*b + r with N(r) <= N(b)/2."""
    if b.is_zero():
        raise ZeroDivisionError("division by zero in Z[i]")
    n = b.norm
    t = a.re * b.re + a.im * b.im
    u = a.im * b.re - a.re * b.im
    q = GaussInt(_round_half_up(t, n), _round_half_up(u, n))
    return q, a - q * b


#: shifts delta with N(delta) <= 2; the minimal-norm representative of any
#: class lies within q*delta of the rounded-division representative.
_TIE_DELTAS = tuple(
    GaussInt(dr, di) for dr, di in
    [(0, 0), (1, 0), (-1, 0), (0, 1), (0, -1), (1, 1), (1, -1), (-1, 1), (-1, -1)]
)


def reduce_mod(a: GaussInt, q: GaussInt) -> GaussInt:
    """Canonical representative of a mod q: minimal norm, ties broken by
    (re, im).  Identical for every member of a residue class."""
    _, r0 = divmod_rounded(a, q)
    return min((r0 - q * d for d in _TIE_DELTAS), key=GaussInt.key)


def divides(d: GaussInt, a: GaussInt) -> bool:
    if d.is_zero():
        return a.is_zero()
    n = d.norm
    t = a.re * d.re + a.im * d.im
    u = a.im * d.re - a.re * d.im
    return t % n == 0 and u % n == 0


def exact_div(a: GaussInt, d: GaussInt) -> GaussInt:
    n = d.norm
    t = a.re * d.re + a.im * d.im
    u = a.im * d.re - a.re * d.im
    if t % n or u % n:
        raise ValueError(f"{d} does not divide {a}")
    return GaussInt(t // n, u // n)


def gcd(a: GaussInt, b: GaussInt) -> GaussInt:
    """A greatest common divisor (up to units), primary-normalized when odd."""
    while not b.is_zero():
        _, r = divmod_rounded(a, b)
        a, b = b, r
    if a.is_zero():
        return a
    if a.is_odd():
        return primary_decompose(a)[1]
    return a


def primary_decompose(z: GaussInt) -> tuple[GaussInt, GaussInt]:
    """Write odd z as unit * z0 with z0 primary.  Unique among the four
    associates."""
    if z.is_zero():
        raise ValueError("zero has no primary decomposition")
    if not z.is_odd():
        raise ValueError(f"{z} is even; only odd elements have a primary part")
    for u in UNITS:
        z0 = z * u.conj()  # z / u
        if z0.is_primary():
            return u, z0
    raise AssertionError("unreachable: one associate of an odd z is primary")


@dataclass(frozen=True)
class Factorization:
    """unit * prod(prime^exp), primes primary, pairwise non-associate,
    sorted by (norm, re, im)."""

    unit: GaussInt
    factors: tuple[tuple[GaussInt, int], ...]

    def value(self) -> GaussInt:
        out = self.unit
        for p, e in self.factors:
            out = out * p**e
        return out

    def norm(self) -> int:
        n = 1
        for p, e in self.factors:
            n *= p.norm**e
        return n


def _sqrt_minus_one(p: int) -> int:
    """Deterministic square root of -1 mod p for p = 1 (mod 4): exponentiate
    the smallest quadratic non-residue."""
    for a in range(2, p):
        s = pow(a, (p - 1) // 4, p)
        if (s * s) % p == p - 1:
            return s
    raise ValueError(f"{p} is not 1 mod 4")


def split_prime(p: int) -> GaussInt:
    """The primary prime above a split rational prime p = 1 (mod 4), found by
    a gcd descent from a square root of -1."""
    s = _sqrt_minus_one(p)
    pi = gcd(GaussInt(p, 0), GaussInt(s, 1))
    assert pi.norm == p
    return pi


@lru_cache(maxsize=4096)
def _factor_cached(re: int, im: int) -> Factorization:
    z = GaussInt(re, im)
    unit, z0 = primary_decompose(z)
    n = z0.norm
    primes: list[tuple[GaussInt, int]] = []
    rest = z0
    for p in sorted(factorint(n)):
        if p % 4 == 3:
            # inert: the primary associate of p
            pi = primary_decompose(GaussInt(p, 0))[1]
            e = 0
            while divides(pi, rest):
                rest = exact_div(rest, pi)
                e += 1
            primes.append((pi, e))
        else:
            pi = split_prime(p)
            for cand in (pi, primary_decompose(pi.conj())[1]):
                e = 0
                while divides(cand, rest):
                    rest = exact_div(rest, cand)
                    e += 1
                if e:
                    primes.append((cand, e))
    assert rest.is_unit()
    unit = unit * rest  # rest is a primary unit, i.e. 1; kept for safety
    primes.sort(key=lambda pe: pe[0].key())
    fact = Factorization(unit, tuple(primes))
    assert fact.value() == z
    return fact


def factor(z: GaussInt) -> Factorization:
    """Factor an odd nonzero z into primary Gaussian primes."""
    if z.is_zero():
        raise ValueError("cannot factor zero")
    if not z.is_odd():
        raise ValueError(f"{z} is even; only odd elements are factored here")
    return _factor_cached(z.re, z.im)


def mobius(z: GaussInt) -> int:
    fact = factor(z)
    if any(e > 1 for _, e in fact.factors):
        return 0
    return -1 if len(fact.factors) % 2 else 1


def euler_phi(z: GaussInt) -> int:
    phi = 1
    for p, e in factor(z).factors:
        n = p.norm
        phi *= n ** (e - 1) * (n - 1)
    return phi


def omega(z: GaussInt) -> int:
    return len(factor(z).factors)


def is_prime(z: GaussInt) -> bool:
    fact = factor(z)
    return len(fact.factors) == 1 and fact.factors[0][1] == 1


def primary_divisors(q: GaussInt) -> list[GaussInt]:
    """All primary divisors of a primary q (1 and q included), sorted by
    (norm, re, im).  Products of primary primes are primary, so no
    renormalization is needed."""
    if not q.is_primary():
        raise ValueError(f"{q} is not primary")
    fact = factor(q)
    divs = []
    for exps in product(*(range(e + 1) for _, e in fact.factors)):
        d = ONE
        for (p, _), e in zip(fact.factors, exps):
            d = d * p**e
        divs.append(d)
    divs.sort(key=GaussInt.key)
    return divs


# ---------------------------------------------------------------------------
# numpy enumerations (primary elements, primary primes) shared by the sweeps
# ---------------------------------------------------------------------------

import numpy as np


def _primary_rows(max_norm: int):
    """Yield (a, b_array) rows of primary a+bi with norm <= max_norm.

    Primary means b even, a + b = 1 (mod 4); for fixed odd a the admissible b
    form one residue class mod 4.
    """
    amax = math.isqrt(max_norm)
    for a in range(-amax, amax + 1):
        if a % 2 == 0:
            continue
        bmax = math.isqrt(max_norm - a * a)
        b0 = (1 - a) % 4
        lo = b0 - 4 * ((b0 + bmax) // 4)  # smallest b >= -bmax with b = b0 mod 4
        yield a, np.arange(lo, bmax + 1, 4, dtype=np.int64)


def count_primary_up_to(x: float) -> int:
    """#{a primary : N(a) <= x} by exhaustive row counts."""
    if x < 1:
        return 0
    return sum(len(bs) for _, bs in _primary_rows(int(x)))


def sum_inverse_norm_primary(x: float) -> float:
    """sum of 1/N(a) over primary a with N(a) <= x, streaming by rows."""
    if x < 1:
        return 0.0
    total = 0.0
    for a, bs in _primary_rows(int(x)):
        total += float(np.sum(1.0 / (a * a + bs * bs).astype(np.float64)))
    return total


_ELEMENT_TABLE: dict[str, np.ndarray] = {}


def primary_elements_up_to(max_norm: int):
    """Sorted (by norm, re, im) numpy arrays (re, im, norm) of primary
    elements with norm <= max_norm.  Cached and grown on demand; slices of
    the cached arrays are bit-identical to fresh enumerations."""
    cached = _ELEMENT_TABLE.get("limit", 0)
    if max_norm > cached:
        limit = max(max_norm, 2 * cached if cached else max_norm)
        res, ims = [], []
        for a, bs in _primary_rows(limit):
            res.append(np.full(len(bs), a, dtype=np.int64))
            ims.append(bs)
        re = np.concatenate(res)
        im = np.concatenate(ims)
        nrm = re * re + im * im
        order = np.lexsort((im, re, nrm))
        _ELEMENT_TABLE.update(
            limit=limit, re=re[order], im=im[order], norm=nrm[order]
        )
    nrm = _ELEMENT_TABLE["norm"]
    k = int(np.searchsorted(nrm, max_norm, side="right"))
    return _ELEMENT_TABLE["re"][:k], _ELEMENT_TABLE["im"][:k], nrm[:k]


_PRIME_TABLE: dict[str, object] = {}


def primary_primes_up_to(max_norm: int):
    """Primary Gaussian primes with norm <= max_norm as arrays
    (re, im, norm), sorted by (norm, re, im).

    Split p = 1 (mod 4) contributes two primary primes of norm p, inert
    p = 3 (mod 4) one primary prime of norm p^2; 1+i is excluded (even).
    """
    cached = int(_PRIME_TABLE.get("limit", 0))
    if max_norm > cached:
        limit = max(max_norm, 2 * cached if cached else max_norm)
        sieve = np.ones(limit + 1, dtype=bool)
        sieve[:2] = False
        for p in range(2, math.isqrt(limit) + 1):
            if sieve[p]:
                sieve[p * p :: p] = False
        ps = np.nonzero(sieve)[0]
        res, ims, nrms = [], [], []
        for p in ps[ps % 4 == 1]:
            pi = split_prime(int(p))
            pj = primary_decompose(pi.conj())[1]
            res += [pi.re, pj.re]
            ims += [pi.im, pj.im]
            nrms += [int(p), int(p)]
        for p in ps[ps % 4 == 3]:
            p = int(p)
            if p * p > limit:
                break
            pi = primary_decompose(GaussInt(p, 0))[1]
            res.append(pi.re)
            ims.append(pi.im)
            nrms.append(p * p)
        re = np.asarray(res, dtype=np.int64)
        im = np.asarray(ims, dtype=np.int64)
        nrm = np.asarray(nrms, dtype=np.int64)
        order = np.lexsort((im, re, nrm))
        _PRIME_TABLE.update(limit=limit, re=re[order], im=im[order], norm=nrm[order])
    nrm = _PRIME_TABLE["norm"]
    k = int(np.searchsorted(nrm, max_norm, side="right"))
    return _PRIME_TABLE["re"][:k], _PRIME_TABLE["im"][:k], nrm[:k]


def primary_moduli(norm_min: int, norm_max: int, primes_only: bool = False) -> list[GaussInt]:
    """Primary odd q with norm in [norm_min, norm_max], sorted by
    (norm, re, im); exactly one generator per ideal."""
    norm_min = max(norm_min, 1)
    re, im, nrm = primary_elements_up_to(norm_max)
    lo = int(np.searchsorted(nrm, norm_min, side="left"))
    out = [GaussInt(int(a), int(b)) for a, b in zip(re[lo:], im[lo:])]
    if primes_only:
        out = [q for q in out if is_prime(q)]
    return out
