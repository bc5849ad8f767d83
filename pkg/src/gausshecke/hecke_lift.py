"""The lifted Hecke character and its Gauss sum.

A primitive odd character chi mod q lifts to a character mod (1+i)^3 q that
kills units: every odd n factors uniquely as n = u * n0 with n0 primary, and

    chi~(n) = chi(n0 mod q),        chi~(n) = 0 when gcd(n, 2q) != 1.

Because chi~ is trivial on units and primitive (verified by kernel scans in
verify_lift_primitive), it is a primitive Hecke character mod (1+i)^3 q of
trivial infinite type; its L-function obeys the functional equation whose
root number is carried by the Gauss sum

    g(chi~) = sum_{x mod (1+i)^3 q} chi~(x) e~(x / ((1+i)^3 q)),

with the additive character e~(z) = e(tr(z/2i)).  Algebraically
tr(z/(2i)) = Im z; that reduction is re-verified numerically on first use.

|g(chi~)|^2 = 8 N(q) for every lift of a primitive odd chi, which the test
suite checks en masse.

Gauss sums for a whole modulus are computed in one pass: the additive
weights are accumulated per unit residue class of q and the character sums
fall out of a single multidimensional inverse FFT over the unit-group grid.
A slow direct summation is kept as the cross-check oracle, and per-modulus
results are cached on disk as JSON.
"""

from __future__ import annotations

import cmath
import json
import math
import os
import tempfile
import threading
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path

import numpy as np

from . import zvec
from .residue_chars import Character, Modulus
from .zi_arith import (
    ONE_PLUS_I_CUBED,
    GaussInt,
    exact_div,
    factor,
    gcd,
    primary_decompose,
    primary_divisors,
    reduce_mod,
)

#: residue representatives mod (1+i)^3 (Hermite box: 0 <= x < 4, 0 <= y < 2)
_EIGHT_RESIDUES = [(x, y) for x in range(4) for y in range(2)]


@dataclass(frozen=True)
class HeckeCharacter:
    """The lift chi~ of a primitive odd chi mod q; conductor (1+i)^3 q."""

    base: Character

    def __post_init__(self):
        if not self.base.is_primitive:
            raise ValueError("only primitive characters lift to primitive chi~")
        if not self.base.is_odd:
            raise ValueError(
                "lift requires chi(-1) = -1; even characters give imprimitive lifts"
            )

    @property
    def modulus(self) -> Modulus:
        return self.base.modulus

    @property
    def conductor_norm(self) -> int:
        return 8 * self.modulus.n_q

    def value(self, n: GaussInt) -> complex:
        """chi~(n); depends only on the ideal (n)."""
        if n.is_zero() or not n.is_odd():
            return 0.0 + 0.0j
        n0 = primary_decompose(n)[1]
        from .residue_chars import eval_char

        return eval_char(self.base, n0)

    def __call__(self, n: GaussInt) -> complex:
        return self.value(n)

    @cached_property
    def gauss_sum(self) -> complex:
        return complex(gauss_sums(self.modulus)[self.base.index])

    def conjugate(self) -> "HeckeCharacter":
        return HeckeCharacter(self.base.conjugate())


def lift(chi: Character) -> HeckeCharacter:
    """Lift a primitive odd chi mod q to the Hecke character mod (1+i)^3 q."""
    return HeckeCharacter(chi)


# -- additive character -------------------------------------------------------

_E_TILDE_CHECKED = False


def e_tilde_phase(im_part: float) -> complex:
    """e~(z) for Im z = im_part, using the reduction tr(z/(2i)) = Im z."""
    return cmath.exp(2j * cmath.pi * im_part)


def _e_tilde_literal(z: complex) -> complex:
    """The defining formula e(tr(z/2i)) with the trace taken literally."""
    w = z / 2j
    tr = w + w.conjugate()
    return cmath.exp(2j * cmath.pi * tr)


def _check_e_tilde(n: int = 10_000, seed: int = 20240901):
    """tr(z/(2i)) = Im z, checked on random Gaussian rationals before the
    reduced form is used in any Gauss sum."""
    global _E_TILDE_CHECKED
    rng = np.random.default_rng(seed)
    num = rng.integers(-10_000, 10_000, size=(n, 2))
    den = rng.integers(1, 500, size=n)
    zs = (num[:, 0] + 1j * num[:, 1]) / den
    worst = max(
        abs(e_tilde_phase(z.imag) - _e_tilde_literal(complex(z))) for z in zs[:n]
    )
    if worst > 1e-12:
        raise AssertionError(f"e~ reduction failed: max deviation {worst}")
    _E_TILDE_CHECKED = True


# -- Gauss sums ---------------------------------------------------------------

_GAUSS_MEMO: dict[tuple[int, int], np.ndarray] = {}
_GAUSS_LOCK = threading.Lock()


def _conductor(q: GaussInt) -> GaussInt:
    return ONE_PLUS_I_CUBED * q


def _gauss_weight_array(mod: Modulus) -> np.ndarray:
    """Additive weights summed per unit residue class of q:
    W(r) = sum over x mod (1+i)^3 q, x odd, x0 = r (q), of e~(x / ((1+i)^3 q)).

    Then g(chi) = sum_r chi(r) W(r) for every chi at once via ifftn.
    """
    q = mod.q
    m = _conductor(q)
    nm = m.norm  # 8 N(q)
    # CRT enumeration x = a + q t: a over unit residues of q (non-units give
    # chi~ = 0), t over the eight residues mod (1+i)^3
    ar = np.repeat(mod.unit_re, 8)
    ai = np.repeat(mod.unit_im, 8)
    tr = np.tile(np.array([t[0] for t in _EIGHT_RESIDUES], dtype=np.int64), mod.phi)
    ti = np.tile(np.array([t[1] for t in _EIGHT_RESIDUES], dtype=np.int64), mod.phi)
    xr = ar + q.re * tr - q.im * ti
    xi = ai + q.re * ti + q.im * tr
    odd = (xr + xi) % 2 != 0
    xr, xi = xr[odd], xi[odd]

    pr, pi = zvec.primary_part(xr, xi)
    idx, found = mod.reduce_lookup(pr, pi)
    assert found.all()  # x was built coprime to q

    # e~(x/m) = e(Im(x conj(m)) / N(m))
    k = (xi * m.re - xr * m.im) % nm
    phase = np.exp(2j * np.pi * k / nm)
    flat = mod.dlog_flat[idx]
    w = np.bincount(flat, weights=phase.real, minlength=mod.phi) + 1j * np.bincount(
        flat, weights=phase.imag, minlength=mod.phi
    )
    return w


def gauss_sums(mod: Modulus, cache_dir: str | os.PathLike | None = None) -> np.ndarray:
    """Gauss sums of the lifts of ALL characters mod q, as a flat complex
    array over the character grid.  Only primitive odd entries are Hecke
    Gauss sums of primitive characters; the others are plain character sums
    and are zeroed in cached copies.

    cache_dir (or the HECKE_CACHE_DIR environment variable) enables a JSON
    disk cache, one document per modulus.
    """
    key = (mod.q.re, mod.q.im)
    memo = _GAUSS_MEMO.get(key)
    if memo is not None:
        return memo
    if not _E_TILDE_CHECKED:
        _check_e_tilde()

    cache_path = _cache_path(mod.q, cache_dir)
    if cache_path is not None and cache_path.exists():
        arr = _load_cache(mod, cache_path)
        if arr is not None:
            _GAUSS_MEMO[key] = arr
            return arr

    w = _gauss_weight_array(mod)
    if mod.orders:
        arr = np.fft.ifftn(w.reshape(mod.orders)).ravel() * mod.phi
    else:
        arr = w.astype(complex)
    mask = mod.primitive_mask & mod.odd_mask
    arr = np.where(mask, arr, 0.0)

    if cache_path is not None:
        _store_cache(mod, arr, cache_path)
    _GAUSS_MEMO[key] = arr
    return arr


def gauss_sum_direct(hc: HeckeCharacter) -> complex:
    """Oracle: the defining sum, term by term, no FFT."""
    mod = hc.modulus
    q = mod.q
    m = _conductor(q)
    nm = m.norm
    total = 0.0 + 0.0j
    phases = mod.char_phases(hc.base.exponents)
    ar = np.repeat(mod.unit_re, 8)
    ai = np.repeat(mod.unit_im, 8)
    tr = np.tile(np.array([t[0] for t in _EIGHT_RESIDUES], dtype=np.int64), mod.phi)
    ti = np.tile(np.array([t[1] for t in _EIGHT_RESIDUES], dtype=np.int64), mod.phi)
    xr = ar + q.re * tr - q.im * ti
    xi = ai + q.re * ti + q.im * tr
    for j in range(len(xr)):
        x = GaussInt(int(xr[j]), int(xi[j]))
        if not x.is_odd():
            continue
        r = reduce_mod(primary_decompose(x)[1], q)
        chi_val = phases[mod.unit_index_of(r)]
        k = (x.im * m.re - x.re * m.im) % nm
        total += chi_val * cmath.exp(2j * cmath.pi * k / nm)
    return total


def _cache_path(q: GaussInt, cache_dir) -> Path | None:
    if cache_dir is None:
        cache_dir = os.environ.get("HECKE_CACHE_DIR") or None
    if cache_dir is None:
        return None
    d = Path(cache_dir)
    d.mkdir(parents=True, exist_ok=True)
    return d / f"gauss_{q.re}_{q.im}.json"


def _store_cache(mod: Modulus, arr: np.ndarray, path: Path):
    mask = mod.primitive_mask & mod.odd_mask
    doc = {
        "q": [mod.q.re, mod.q.im],
        "characters": [
            {
                "exponents": [int(e) for e in
                              (np.unravel_index(i, mod.orders) if mod.orders else ())],
                "gauss_sum": [float(arr[i].real), float(arr[i].imag)],
            }
            for i in np.nonzero(mask)[0]
        ],
    }
    with _GAUSS_LOCK:
        fd, tmp = tempfile.mkstemp(dir=path.parent, suffix=".tmp")
        try:
            with os.fdopen(fd, "w") as fh:
                json.dump(doc, fh)
            os.replace(tmp, path)
        except BaseException:
            if os.path.exists(tmp):
                os.unlink(tmp)
            raise


def _load_cache(mod: Modulus, path: Path) -> np.ndarray | None:
    """Schema-checked load; any mismatch triggers a recompute."""
    try:
        doc = json.loads(path.read_text())
        if doc["q"] != [mod.q.re, mod.q.im]:
            return None
        mask = mod.primitive_mask & mod.odd_mask
        idx = np.nonzero(mask)[0]
        chars = doc["characters"]
        if len(chars) != len(idx):
            return None
        arr = np.zeros(mod.phi, dtype=complex)
        for i, entry in zip(idx, chars):
            expect = [int(e) for e in
                      (np.unravel_index(int(i), mod.orders) if mod.orders else ())]
            if entry["exponents"] != expect:
                return None
            arr[i] = entry["gauss_sum"][0] + 1j * entry["gauss_sum"][1]
        return arr
    except (KeyError, TypeError, ValueError, json.JSONDecodeError, OSError):
        return None


def clear_gauss_memo():
    """Drop the in-process Gauss sum memo (used by cache tests)."""
    _GAUSS_MEMO.clear()


# -- von Mangoldt -------------------------------------------------------------

def lambda_K(n: GaussInt) -> float:
    """Von Mangoldt on odd ideals: log N(w) when (n) = w^k, else 0."""
    if n.is_zero():
        raise ValueError("lambda_K needs n != 0")
    if not n.is_odd():
        raise ValueError("lambda_K is only used on odd n here")
    fact = factor(n)
    if len(fact.factors) != 1:
        return 0.0
    return math.log(fact.factors[0][0].norm)


# -- primitivity of the lift --------------------------------------------------

def primitive_scan(value_fn, q: GaussInt, max_norm: int = 500) -> bool:
    """Brute-force primitivity of a character mod (1+i)^3 q given by an
    evaluator: it must be non-trivial on the kernel of reduction to every
    proper submodulus (1+i)^3 q' (q' | q proper) and to (1+i)^2 q."""
    if q.norm > max_norm:
        raise ValueError(f"primitivity scan capped at norm {max_norm}")
    m = _conductor(q)
    xs = _residues(m)
    units = [x for x in xs if gcd(x, m).is_unit()]
    submoduli = [ONE_PLUS_I_CUBED * d for d in primary_divisors(q) if d != q]
    submoduli.append(GaussInt(0, 2) * q)  # (1+i)^2 q
    for s in submoduli:
        nontrivial = False
        for x in units:
            if reduce_mod(x - GaussInt(1, 0), s).is_zero():
                if abs(value_fn(x) - 1.0) > 1e-9:
                    nontrivial = True
                    break
        if not nontrivial:
            return False
    return True


def verify_lift_primitive(hc: HeckeCharacter, max_norm: int = 500) -> bool:
    """chi~ is primitive mod (1+i)^3 q (kernel scans; small moduli only)."""
    return primitive_scan(hc.value, hc.modulus.q, max_norm=max_norm)


def _residues(m: GaussInt) -> list[GaussInt]:
    """All residues mod m, canonical representatives."""
    g = math.gcd(m.re, m.im)
    n1 = m.norm // g
    out = []
    for x in range(n1):
        for y in range(g):
            out.append(reduce_mod(GaussInt(x, y), m))
    return out
