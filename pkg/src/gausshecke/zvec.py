"""Vectorized Z[i] kernels for the hot loops.

Residues are carried as parallel int64 arrays (re, im).  The scalar
reference implementations live in zi_arith; these mirror them exactly so
that modulus construction, character sweeps and L-value sums stay inside
numpy.  reduce() here and zi_arith.reduce_mod agree element-for-element
(same rounding rule, same (norm, re, im) tie-break).
"""

from __future__ import annotations

import numpy as np

#: shifts with N(delta) <= 2, matching zi_arith._TIE_DELTAS
_DELTAS = np.array(
    [(0, 0), (1, 0), (-1, 0), (0, 1), (0, -1), (1, 1), (1, -1), (-1, 1), (-1, -1)],
    dtype=np.int64,
)


def mul(ar, ai, br, bi):
    return ar * br - ai * bi, ar * bi + ai * br


def norm(ar, ai):
    return ar * ar + ai * ai


def _round_half_up(t, n):
    return (2 * t + n) // (2 * n)


def rem_rounded(ar, ai, qre: int, qim: int, qnorm: int):
    """Remainder of nearest-integer division by q: N(r) <= N(q)/2."""
    t = ar * qre + ai * qim
    u = ai * qre - ar * qim
    x = _round_half_up(t, qnorm)
    y = _round_half_up(u, qnorm)
    return ar - (qre * x - qim * y), ai - (qre * y + qim * x)


def reduce(ar, ai, qre: int, qim: int, qnorm: int):
    """Canonical representative mod q: minimal norm, ties by (re, im).

    Works on arrays of any shape; matches zi_arith.reduce_mod.
    """
    r0r, r0i = rem_rounded(np.asarray(ar), np.asarray(ai), qre, qim, qnorm)
    # all candidates r0 - q*delta; the minimal-norm representative is among them
    cr = r0r[..., None] - (qre * _DELTAS[:, 0] - qim * _DELTAS[:, 1])
    ci = r0i[..., None] - (qre * _DELTAS[:, 1] + qim * _DELTAS[:, 0])
    # single int64 sort key encoding (norm, re, im);
    # |candidate| <= |r0| + sqrt(2)*|q| <= (0.71 + 1.42)*|q|, so 3*|q| bounds it
    comp = 3 * (int(qnorm**0.5) + 2)
    key = (cr * cr + ci * ci) * (4 * comp * comp) + (cr + comp) * (2 * comp) + (ci + comp)
    pick = np.argmin(key, axis=-1)
    idx = np.expand_dims(pick, -1)
    return (
        np.take_along_axis(cr, idx, axis=-1)[..., 0],
        np.take_along_axis(ci, idx, axis=-1)[..., 0],
    )


def pow_mod(ar, ai, k: int, qre: int, qim: int, qnorm: int):
    """Elementwise (a)^k reduced mod q, fixed integer exponent k >= 0."""
    outr = np.ones_like(ar)
    outi = np.zeros_like(ai)
    br, bi = reduce(ar, ai, qre, qim, qnorm)
    while k:
        if k & 1:
            outr, outi = mul(outr, outi, br, bi)
            outr, outi = reduce(outr, outi, qre, qim, qnorm)
        k >>= 1
        if k:
            br, bi = mul(br, bi, br, bi)
            br, bi = reduce(br, bi, qre, qim, qnorm)
    return outr, outi


def is_unit_mod(ar, ai, qre: int, qim: int):
    """Elementwise test gcd(a, q) is a unit, by a masked Euclid."""
    xr = np.array(ar, dtype=np.int64, copy=True)
    xi = np.array(ai, dtype=np.int64, copy=True)
    yr = np.full_like(xr, qre)
    yi = np.full_like(xi, qim)
    active = norm(yr, yi) > 0
    while active.any():
        qn = norm(yr[active], yi[active])
        # varying modulus: do the rounded remainder componentwise
        t = xr[active] * yr[active] + xi[active] * yi[active]
        u = xi[active] * yr[active] - xr[active] * yi[active]
        qx = _round_half_up(t, qn)
        qy = _round_half_up(u, qn)
        rr = xr[active] - (yr[active] * qx - yi[active] * qy)
        ri = xi[active] - (yr[active] * qy + yi[active] * qx)
        xr[active], xi[active] = yr[active], yi[active]
        yr[active], yi[active] = rr, ri
        sub = norm(yr[active], yi[active]) > 0
        nxt = active.copy()
        nxt[active] = sub
        active = nxt
    return norm(xr, xi) == 1


def encode(ar, ai, comp: int):
    """Injective int64 key for residues with |re|, |im| <= comp."""
    return (ar + comp) * (2 * comp + 1) + (ai + comp)


def primary_unit_index(ar, ai):
    """For odd a+bi, index u in {0:1, 1:i, 2:-1, 3:-i} with a = u * primary.

    Vectorized analogue of zi_arith.primary_decompose: checks which of the
    four associates a * conj(u) is primary (im even, re+im = 1 mod 4).
    """
    out = np.full(np.shape(ar), -1, dtype=np.int64)
    # conj(u) multipliers for u = 1, i, -1, -i are 1, -i, -1, i
    cands = ((ar, ai), (ai, -np.asarray(ar)), (-np.asarray(ar), -np.asarray(ai)),
             (-np.asarray(ai), ar))
    for k, (zr, zi) in enumerate(cands):
        good = (zi % 2 == 0) & ((zr + zi) % 4 == 1) & (out < 0)
        out[good] = k
    return out


def primary_part(ar, ai):
    """Primary associate of odd elements, vectorized."""
    k = primary_unit_index(ar, ai)
    zr = np.empty_like(ar)
    zi = np.empty_like(ai)
    for u, (mr, mi) in enumerate(((1, 0), (0, -1), (-1, 0), (0, 1))):
        # multiply by conj(unit_u)
        m = k == u
        zr[m] = ar[m] * mr - ai[m] * mi
        zi[m] = ar[m] * mi + ai[m] * mr
    return zr, zi
