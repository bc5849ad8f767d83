"""The unit group (O_K/(q))^* and its characters.

A modulus is a primary odd q.  The unit group is decomposed into cyclic
factors by generic element-order peeling (no CRT, no per-prime-power
structure theory): pick a first generator of maximal order e1 (= the group
exponent), then repeatedly pick an element of maximal order in the quotient
by the subgroup generated so far, correct it to an actual element of that
order, and extend.  The correction step uses the classical lemma: if g has
maximal order e in an abelian group and x^m = g^t with m the order of x in
the quotient by <g>, then m | t, so x * g^(-t/m) has order exactly m.

Characters are exponent vectors against the resulting basis; chi with
exponents (e_1, ..., e_r) maps the j-th generator to exp(2 pi i e_j / m_j).
Parity (chi(-1) = -1) and primitivity (non-trivial on the kernel of every
reduction (O_K/(q))^* -> (O_K/(q/w))^*, w prime) are precomputed as boolean
masks over the full character grid, using exact integer phase arithmetic.

Also here: the divisor-sum side of the orthogonality relation for the
parity-restricted sum over primitive characters, and the primitive-character
counts psi(q), psi*(q) = (psi(q) - mu(q)) / 2 with psi multiplicative,
psi(w) = N(w) - 2 and psi(w^k) = N(w)^k (1 - 1/N(w))^2 for k >= 2.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from functools import reduce as _reduce

import numpy as np
from sympy import factorint

from . import zvec
from .zi_arith import (
    ONE,
    Factorization,
    GaussInt,
    divides,
    euler_phi,
    exact_div,
    factor,
    gcd,
    mobius,
    primary_divisors,
    reduce_mod,
)

DEFAULT_MAX_NORM = 100_000


def pow_mod_scalar(z: GaussInt, k: int, q: GaussInt) -> GaussInt:
    """z^k reduced mod q, square-and-multiply with reduction each step."""
    out = reduce_mod(ONE, q)
    base = reduce_mod(z, q)
    while k:
        if k & 1:
            out = reduce_mod(out * base, q)
        k >>= 1
        if k:
            base = reduce_mod(base * base, q)
    return out


@dataclass(frozen=True)
class UnitGroupBasis:
    """Cyclic decomposition of (O_K/(q))^*: generators and their orders,
    orders non-increasing; prod(orders) = phi(q)."""

    generators: tuple[GaussInt, ...]
    orders: tuple[int, ...]


@dataclass(frozen=True)
class Character:
    """A character of (O_K/(q))^* as an exponent vector against the basis."""

    modulus: "Modulus"
    exponents: tuple[int, ...]
    index: int
    is_odd: bool
    is_primitive: bool

    def __call__(self, n: GaussInt) -> complex:
        return eval_char(self, n)

    def conjugate(self) -> "Character":
        mod = self.modulus
        exps = tuple((-e) % m for e, m in zip(self.exponents, mod.orders))
        return mod.character(exps)

    def is_trivial(self) -> bool:
        return all(e == 0 for e in self.exponents)


class Modulus:
    """A primary odd modulus with its unit-group tables.

    Immutable after construction; all evaluation helpers are pure, so a
    Modulus can be shared freely across workers.
    """

    def __init__(self, q: GaussInt, max_norm: int = DEFAULT_MAX_NORM):
        if not q.is_primary():
            raise ValueError(f"modulus {q} is not primary")
        if not (1 <= q.norm <= max_norm):
            raise ValueError(f"norm {q.norm} outside [1, {max_norm}]")
        self.q = q
        self.n_q = q.norm
        self.factorization: Factorization = factor(q)
        self._build()

    # -- construction -------------------------------------------------------

    def _build(self):
        q, nq = self.q, self.n_q
        if nq == 1:
            self.unit_re = np.zeros(1, dtype=np.int64)
            self.unit_im = np.zeros(1, dtype=np.int64)
            self.phi = 1
            self.unit_basis = UnitGroupBasis((), ())
            self.orders = ()
            self.dlog_exps = np.zeros((1, 0), dtype=np.int64)
            self.dlog_flat = np.zeros(1, dtype=np.int64)
            self.lcm_order = 1
            self.odd_mask = np.array([False])
            self.primitive_mask = np.array([True])
            self._comp = 4
            self._keys_sorted = zvec.encode(self.unit_re, self.unit_im, self._comp)
            self._sorter = np.zeros(1, dtype=np.int64)
            return

        # all residues mod q: box from the Hermite form of the lattice (q)
        g = math.gcd(q.re, q.im)
        xs = np.repeat(np.arange(nq // g, dtype=np.int64), g)
        ys = np.tile(np.arange(g, dtype=np.int64), nq // g)
        rr, ri = zvec.reduce(xs, ys, q.re, q.im, nq)

        umask = zvec.is_unit_mod(rr, ri, q.re, q.im)
        ur, ui = rr[umask], ri[umask]
        nrm = ur * ur + ui * ui
        order = np.lexsort((ui, ur, nrm))
        ur, ui = np.ascontiguousarray(ur[order]), np.ascontiguousarray(ui[order])

        self.unit_re, self.unit_im = ur, ui
        self.phi = len(ur)
        assert self.phi == euler_phi(q)

        self._comp = 3 * (math.isqrt(nq) + 2)
        keys = zvec.encode(ur, ui, self._comp)
        self._sorter = np.argsort(keys, kind="stable")
        self._keys_sorted = keys[self._sorter]

        gens, orders, exps = self._decompose()
        self.unit_basis = UnitGroupBasis(tuple(gens), tuple(orders))
        self.orders = tuple(orders)
        self.dlog_exps = exps
        if orders:
            self.dlog_flat = np.ravel_multi_index(
                tuple(exps[:, j] for j in range(len(orders))), self.orders
            ).astype(np.int64)
        else:
            self.dlog_flat = np.zeros(self.phi, dtype=np.int64)
        self.lcm_order = _reduce(math.lcm, orders, 1)
        self._build_masks()

    def _pow_vec(self, ar, ai, k):
        return zvec.pow_mod(ar, ai, k, self.q.re, self.q.im, self.n_q)

    def _orders_rel(self, ar, ai, group_exponent, member):
        """Order of each element in the quotient by a subgroup, given a
        membership predicate; subgroup = {1} gives plain element orders."""
        out = np.ones(len(ar), dtype=np.int64)
        for p, k in factorint(group_exponent).items():
            p = int(p)
            yr, yi = self._pow_vec(ar, ai, group_exponent // p**k)
            done = member(yr, yi)
            ppow = np.ones(len(ar), dtype=np.int64)
            for tau in range(1, k + 1):
                if done.all():
                    break
                yr, yi = self._pow_vec(yr, yi, p)
                newly = ~done & member(yr, yi)
                ppow[newly] = p**tau
                done |= newly
            assert done.all()
            out *= ppow
        return out

    def _decompose(self):
        """Element-order peeling; returns (generators, orders, dlog matrix
        aligned with the canonical unit ordering)."""
        ur, ui, phi, q = self.unit_re, self.unit_im, self.phi, self.q

        def is_identity(xr, xi):
            return (xr == 1) & (xi == 0)

        ordvec = self._orders_rel(ur, ui, phi, is_identity)
        e1 = int(ordvec.max())
        i1 = int(np.argmax(ordvec == e1))
        g1 = GaussInt(int(ur[i1]), int(ui[i1]))

        # S = <g1> by block doubling
        sre = np.array([1], dtype=np.int64)
        sim = np.array([0], dtype=np.int64)
        sexp = np.zeros((1, 1), dtype=np.int64)
        while len(sre) < e1:
            m = len(sre)
            step = pow_mod_scalar(g1, m, q)
            nr, ni = zvec.mul(sre, sim, step.re, step.im)
            nr, ni = zvec.reduce(nr, ni, q.re, q.im, q.norm)
            take = min(m, e1 - m)
            sre = np.concatenate([sre, nr[:take]])
            sim = np.concatenate([sim, ni[:take]])
            sexp = np.vstack([sexp, sexp[:take] + np.array([[m]])])
        gens, orders = [g1], [e1]

        while len(sre) < phi:
            skeys = zvec.encode(sre, sim, self._comp)
            s_sorter = np.argsort(skeys, kind="stable")
            skeys_sorted = skeys[s_sorter]

            def member(xr, xi):
                k = zvec.encode(xr, xi, self._comp)
                pos = np.searchsorted(skeys_sorted, k)
                pos = np.minimum(pos, len(skeys_sorted) - 1)
                return skeys_sorted[pos] == k

            qord = self._orders_rel(ur, ui, e1, member)
            e2 = int(qord.max())
            ix = int(np.argmax(qord == e2))
            x = GaussInt(int(ur[ix]), int(ui[ix]))

            # x^{e2} lies in S; its S-exponents are all divisible by e2
            y = pow_mod_scalar(x, e2, q)
            ky = zvec.encode(np.array([y.re]), np.array([y.im]), self._comp)[0]
            pos = int(np.searchsorted(skeys_sorted, ky))
            assert skeys_sorted[pos] == ky
            tvec = sexp[s_sorter[pos]]
            assert all(int(t) % e2 == 0 for t in tvec), "peeling invariant violated"

            adj = ONE
            for gi, oi, ti in zip(gens, orders, tvec.tolist()):
                adj = reduce_mod(adj * pow_mod_scalar(gi, (-(ti // e2)) % oi, q), q)
            xp = reduce_mod(x * adj, q)
            assert pow_mod_scalar(xp, e2, q) == reduce_mod(ONE, q)

            # extend S by powers of xp
            base_r, base_i, base_e = sre, sim, sexp
            blocks_r, blocks_i, blocks_e = [base_r], [base_i], [
                np.hstack([base_e, np.zeros((len(base_r), 1), dtype=np.int64)])
            ]
            pw = xp
            for t in range(1, e2):
                nr, ni = zvec.mul(base_r, base_i, pw.re, pw.im)
                nr, ni = zvec.reduce(nr, ni, q.re, q.im, q.norm)
                blocks_r.append(nr)
                blocks_i.append(ni)
                col = np.full((len(base_r), 1), t, dtype=np.int64)
                blocks_e.append(np.hstack([base_e, col]))
                if t + 1 < e2:
                    pw = reduce_mod(pw * xp, q)
            sre = np.concatenate(blocks_r)
            sim = np.concatenate(blocks_i)
            sexp = np.vstack(blocks_e)
            gens.append(xp)
            orders.append(e2)

        # align exponent rows with the canonical unit ordering
        skeys = zvec.encode(sre, sim, self._comp)
        s_sorter = np.argsort(skeys, kind="stable")
        pos = np.searchsorted(skeys[s_sorter], self._keys_sorted)
        rows = s_sorter[pos]
        exps = np.zeros((phi, len(orders)), dtype=np.int64)
        exps[self._sorter] = sexp[rows]
        return gens, orders, exps

    def _build_masks(self):
        phi, orders = self.phi, self.orders
        r = len(orders)
        if r == 0:
            self.odd_mask = np.array([False])
            self.primitive_mask = np.array([True])
            return
        L = self.lcm_order
        w = np.array([L // m for m in orders], dtype=np.int64)
        grid = np.indices(orders).reshape(r, -1)  # (r, phi), flat C order

        dm1 = self.dlog_exps[self.unit_index_of(reduce_mod(GaussInt(-1, 0), self.q))]
        phase = (grid * (dm1 * w)[:, None]).sum(axis=0) % L
        self.odd_mask = phase == L // 2

        primitive = np.ones(phi, dtype=bool)
        for p, _ in self.factorization.factors:
            qd = exact_div(self.q, p)
            if qd.norm == 1:
                # kernel is the whole group; only the trivial character dies
                trivial = np.all(grid == 0, axis=0)
            else:
                rr, ri = zvec.reduce(
                    self.unit_re - 1, self.unit_im, qd.re, qd.im, qd.norm
                )
                kernel = np.nonzero((rr == 0) & (ri == 0))[0]
                gens_idx = self._subgroup_generators(kernel)
                trivial = np.ones(phi, dtype=bool)
                for gi in gens_idx:
                    dg = self.dlog_exps[gi]
                    ph = (grid * (dg * w)[:, None]).sum(axis=0) % L
                    trivial &= ph == 0
            primitive &= ~trivial
        self.primitive_mask = primitive

    def _subgroup_generators(self, idx: np.ndarray) -> list[int]:
        """Greedy small generating set (as unit indices) of a subgroup given
        by its member indices; closure runs in dlog space."""
        members = {tuple(self.dlog_exps[i]) for i in idx.tolist()}
        closure = {tuple([0] * len(self.orders))}
        gens = []
        for i in idx.tolist():
            v = tuple(self.dlog_exps[i])
            if v in closure:
                continue
            gens.append(i)
            new = set(closure)
            frontier = set(closure)
            while frontier:
                nxt = {
                    tuple((a + b) % m for a, b, m in zip(c, v, self.orders))
                    for c in frontier
                }
                frontier = nxt - new
                new |= frontier
            closure = new
            if len(closure) == len(members):
                break
        return gens

    # -- lookups ------------------------------------------------------------

    def unit_index_of(self, r: GaussInt) -> int:
        """Index of a canonical unit residue; raises KeyError if not a unit."""
        k = zvec.encode(np.array([r.re]), np.array([r.im]), self._comp)[0]
        pos = int(np.searchsorted(self._keys_sorted, k))
        if pos >= self.phi or self._keys_sorted[pos] != k:
            raise KeyError(f"{r} is not a unit residue mod {self.q}")
        return int(self._sorter[pos])

    def unit_lookup(self, rr: np.ndarray, ri: np.ndarray):
        """Vectorized: canonical residues -> (unit index, found mask)."""
        k = zvec.encode(rr, ri, self._comp)
        pos = np.searchsorted(self._keys_sorted, k)
        pos = np.minimum(pos, self.phi - 1)
        found = self._keys_sorted[pos] == k
        return self._sorter[pos], found

    def reduce_lookup(self, ar: np.ndarray, ai: np.ndarray):
        """Vectorized: arbitrary elements -> (unit index, coprime mask)."""
        rr, ri = zvec.reduce(ar, ai, self.q.re, self.q.im, self.n_q)
        return self.unit_lookup(rr, ri)

    @property
    def dlog_table(self) -> dict[tuple[int, int], tuple[int, ...]]:
        """Residue (re, im) -> exponent vector, for every unit residue."""
        return {
            (int(a), int(b)): tuple(int(e) for e in self.dlog_exps[i])
            for i, (a, b) in enumerate(zip(self.unit_re, self.unit_im))
        }

    # -- characters ----------------------------------------------------------

    def character(self, exponents) -> Character:
        exps = tuple(int(e) % m for e, m in zip(exponents, self.orders))
        idx = int(np.ravel_multi_index(exps, self.orders)) if self.orders else 0
        return Character(
            self,
            exps,
            idx,
            bool(self.odd_mask[idx]),
            bool(self.primitive_mask[idx]),
        )

    def character_by_index(self, idx: int) -> Character:
        exps = (
            tuple(int(e) for e in np.unravel_index(idx, self.orders))
            if self.orders
            else ()
        )
        return Character(
            self, exps, idx, bool(self.odd_mask[idx]), bool(self.primitive_mask[idx])
        )

    def conj_index(self) -> np.ndarray:
        """Permutation mapping each character index to its conjugate's."""
        if not self.orders:
            return np.zeros(1, dtype=np.int64)
        grid = np.indices(self.orders).reshape(len(self.orders), -1)
        conj = tuple(
            (-grid[j]) % m for j, m in enumerate(self.orders)
        )
        return np.ravel_multi_index(conj, self.orders).astype(np.int64)

    def char_phases(self, chi_exponents) -> np.ndarray:
        """chi evaluated on every unit residue (complex array, unit order)."""
        L = self.lcm_order
        if not self.orders:
            return np.ones(1, dtype=complex)
        w = np.array(
            [e * (L // m) for e, m in zip(chi_exponents, self.orders)],
            dtype=np.int64,
        )
        k = (self.dlog_exps @ w) % L
        return np.exp(2j * np.pi * k / L)


def build_modulus(q: GaussInt, max_norm: int = DEFAULT_MAX_NORM) -> Modulus:
    return Modulus(q, max_norm=max_norm)


def characters(
    modulus: Modulus, odd_only: bool = False, primitive_only: bool = False
):
    """All characters mod q in lexicographic exponent-vector order,
    optionally restricted by parity/primitivity."""
    for idx in range(modulus.phi):
        chi = modulus.character_by_index(idx)
        if odd_only and not chi.is_odd:
            continue
        if primitive_only and not chi.is_primitive:
            continue
        yield chi


def eval_char(chi: Character, n: GaussInt) -> complex:
    """chi(n): 0 when gcd(n, q) != 1, else the root of unity from the
    exponent vector and the discrete log of n."""
    mod = chi.modulus
    if mod.n_q == 1:
        return 1.0 + 0.0j
    r = reduce_mod(n, mod.q)
    try:
        i = mod.unit_index_of(r)
    except KeyError:
        return 0.0 + 0.0j
    L = mod.lcm_order
    k = 0
    for e, d, m in zip(chi.exponents, mod.dlog_exps[i], mod.orders):
        k += e * int(d) * (L // m)
    return cmath.exp(2j * cmath.pi * (k % L) / L)


def is_primitive(chi: Character) -> bool:
    return chi.is_primitive


def psi(q: GaussInt) -> int:
    """Number of primitive characters mod q (multiplicative)."""
    if not q.is_primary():
        raise ValueError(f"{q} is not primary")
    out = 1
    for p, e in factor(q).factors:
        n = p.norm
        out *= (n - 2) if e == 1 else n ** (e - 2) * (n - 1) ** 2
    return out


def psi_star(q: GaussInt) -> int:
    """Number of primitive odd characters mod q: (psi(q) - mu(q)) / 2."""
    return (psi(q) - mobius(q)) // 2


def orthogonality_rhs(q: GaussInt, n: GaussInt, m: GaussInt, a: int) -> float:
    """Divisor-sum value of sum* over chi with chi(-1) = (-1)^a of
    chi(n) conj(chi)(m):

        1/2 sum_{d|q, n=m mod d} mu(q/d) phi(d)
      + (-1)^a/2 sum_{d|q, n=-m mod d} mu(q/d) phi(d)

    d running over primary divisors; requires gcd(nm, q) = 1.
    """
    if not (gcd(n, q).is_unit() and gcd(m, q).is_unit()):
        raise ValueError("orthogonality requires gcd(nm, q) = 1")
    s_plus = 0
    s_minus = 0
    for d in primary_divisors(q):
        mu_cof = mobius(exact_div(q, d))
        if mu_cof == 0:
            continue
        phi_d = euler_phi(d)
        if divides(d, n - m):
            s_plus += mu_cof * phi_d
        if divides(d, n + m):
            s_minus += mu_cof * phi_d
    sign = -1.0 if a % 2 else 1.0
    return 0.5 * s_plus + sign * 0.5 * s_minus
