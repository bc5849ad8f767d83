"""Numerical experiments over the family of odd primitive characters.

The statements under test, per modulus q (primary, odd):

  * first moment   sum*_{chi odd} L(1/2, chi~)          vs  psi*(q)/2
  * second moment  sum*_{chi odd} |L(1/2, chi~)|^2      vs
                   (pi/16) (phi(q)/N(q)) psi*(q) log N(q)
  * non-vanishing  #{chi : |L(1/2, chi~)| > eps}        vs  psi*(q)/log N(q)
  * one-level density through the explicit formula's prime side

      s~ = sum*_{chi odd} sum_{n primary} Lambda_K(n) N(n)^(-1/2)
              phihat(log N(n) / log N(q)) (chi~(n) + conj(chi~)(n)),

      density = int(phi) - s~ / (psi*(q) log N(q)),

    where phihat is supported in [-sigma, sigma] so the n-sum stops at
    N(n) <= N(q)^sigma.  The character average has two routes: direct
    per-character summation, and the orthogonality identity, which turns it
    into divisor sums (the default; it never builds the character group).

Supporting lemma-scale checks, all exhaustive at desk scale:

  * N(m+n) >= N(m)/64 whenever N(m+n) >= N(n)  (box scan)
  * #{a primary : N(a) <= x} = (pi/8) x + small  (Gauss circle)
  * sum_{N(n)<=x, primary, (n,q)=1} 1/N(n)
      = (phi(q)/N(q)) ((pi/8) log x + C0 + (pi/8) sum_{w|q} log N(w)/(N(w)-1))
    with the constant C0 measured, not assumed: it is the average of
    (sum 1/N(a) - (pi/8) log x) over a grid of large x, and the spread over
    the grid is required to be tiny (<= 1e-3) before the value is trusted.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass

import numpy as np

from . import zvec
from .analytic_kernels import eval_V
from .hecke_lift import gauss_sums
from .l_values import V_ARG_CUTOFF, a_chi_family, family_l_values
from .residue_chars import Modulus, build_modulus, orthogonality_rhs, psi_star
from .zi_arith import (
    GaussInt,
    count_primary_up_to,
    euler_phi,
    exact_div,
    factor,
    mobius,
    primary_divisors,
    primary_elements_up_to,
    primary_moduli,
    primary_primes_up_to,
    sum_inverse_norm_primary,
)

DEFAULT_NONVANISHING_THRESHOLD = 1e-8


# -- test functions -----------------------------------------------------------

@dataclass(frozen=True)
class AdmissibleTestFunction:
    """Even test function with compactly supported Fourier transform.

    phi_hat is supported in [-sigma, sigma]; integral_phi = phi_hat(0) by
    Fourier inversion at 0.  Both evaluators accept numpy arrays.
    """

    name: str
    sigma: float
    phi_hat: object
    phi: object
    integral_phi: float

    def __post_init__(self):
        if not (0.0 < self.sigma < 2.0):
            raise ValueError("sigma must lie in (0, 2)")


def fejer(sigma: float) -> AdmissibleTestFunction:
    """Triangular phi_hat: phi_hat(u) = max(0, 1 - |u|/sigma);
    phi(x) = sigma (sin(pi sigma x) / (pi sigma x))^2."""

    def phi_hat(u):
        u = np.asarray(u, dtype=float)
        return np.maximum(0.0, 1.0 - np.abs(u) / sigma)

    def phi(x):
        x = np.asarray(x, dtype=float)
        t = np.pi * sigma * x
        small = np.abs(t) < 1e-8
        safe = np.where(small, 1.0, t)
        out = sigma * (np.sin(safe) / safe) ** 2
        return np.where(small, sigma, out)

    return AdmissibleTestFunction("fejer", sigma, phi_hat, phi, 1.0)


def raised_cosine(sigma: float) -> AdmissibleTestFunction:
    """phi_hat(u) = cos^2(pi u / (2 sigma)) on [-sigma, sigma];
    phi(x) = sin(2 pi sigma x) (pi/sigma)^2 /
             (2 pi x ((pi/sigma)^2 - (2 pi x)^2)), removable at x = 0
    (value sigma) and at x = 1/(2 sigma) (value sigma/2)."""

    def phi_hat(u):
        u = np.asarray(u, dtype=float)
        out = np.cos(np.pi * u / (2.0 * sigma)) ** 2
        return np.where(np.abs(u) >= sigma, 0.0, out)

    a = (np.pi / sigma) ** 2

    def phi(x):
        x = np.asarray(x, dtype=float)
        t = 2.0 * np.pi * x
        denom = t * (a - t * t)
        near0 = np.abs(t) < 1e-8
        nears = np.abs(a - t * t) < 1e-8
        safe = np.where(near0 | nears, 1.0, denom)
        out = np.sin(2.0 * np.pi * sigma * x) * a / safe
        out = np.where(near0, sigma, out)
        return np.where(nears, sigma / 2.0, out)

    return AdmissibleTestFunction("cosine", sigma, phi_hat, phi, 1.0)


TEST_FUNCTIONS = {"fejer": fejer, "cosine": raised_cosine}


# -- experiment rows ----------------------------------------------------------

@dataclass(frozen=True)
class ExperimentRow:
    """One record of a moment/density sweep."""

    q: GaussInt
    n_q: int
    psi_star: int
    statistic: complex
    main_term: float
    ratio: float
    wall_s: float


def _row(q, ps, stat, main, wall) -> ExperimentRow:
    ratio = stat.real / main if main != 0 else math.nan
    return ExperimentRow(q, q.norm, ps, complex(stat), float(main), float(ratio), wall)


@dataclass(frozen=True)
class FamilyValues:
    """Everything the moment experiments need for one modulus."""

    modulus: Modulus
    x_param: float
    lvals: np.ndarray  # flat over the character grid
    achi: np.ndarray | None
    mask: np.ndarray  # primitive & odd
    est_tail: float
    wall_s: float


def compute_family(
    q: GaussInt | Modulus,
    x: float | None = None,
    with_achi: bool = True,
    cache_dir=None,
) -> FamilyValues:
    t0 = time.perf_counter()
    mod = q if isinstance(q, Modulus) else build_modulus(q)
    lv, est_tail, _ = family_l_values(mod, x=x, cache_dir=cache_dir)
    achi = a_chi_family(mod) if with_achi else None
    mask = mod.primitive_mask & mod.odd_mask
    return FamilyValues(
        mod, float(mod.n_q if x is None else x), lv, achi, mask,
        est_tail, time.perf_counter() - t0,
    )


def first_moment(
    q: GaussInt | Modulus, family: FamilyValues | None = None, cache_dir=None
) -> ExperimentRow:
    """sum* L(1/2, chi~) against psi*(q)/2."""
    t0 = time.perf_counter()
    fam = family or compute_family(q, with_achi=False, cache_dir=cache_dir)
    mod = fam.modulus
    stat = complex(np.sum(fam.lvals[fam.mask]))
    ps = psi_star(mod.q)
    wall = fam.wall_s if family is None else time.perf_counter() - t0
    return _row(mod.q, ps, stat, ps / 2.0, wall)


def second_moment(
    q: GaussInt | Modulus, family: FamilyValues | None = None, cache_dir=None
) -> ExperimentRow:
    """sum* |L(1/2, chi~)|^2 = sum* 2 A(chi~) against
    (pi/16) (phi(q)/N(q)) psi*(q) log N(q)."""
    t0 = time.perf_counter()
    fam = family or compute_family(q, with_achi=True, cache_dir=cache_dir)
    mod = fam.modulus
    stat = complex(2.0 * np.sum(fam.achi[fam.mask]))
    ps = psi_star(mod.q)
    nq = mod.n_q
    main = (math.pi / 16.0) * (euler_phi(mod.q) / nq) * ps * math.log(nq)
    wall = fam.wall_s if family is None else time.perf_counter() - t0
    return _row(mod.q, ps, stat, main, wall)


def second_moment_cross(family: FamilyValues) -> float:
    """The same statistic through the AFE route, sum* |L|^2."""
    return float(np.sum(np.abs(family.lvals[family.mask]) ** 2))


def nonvanishing_count(
    q: GaussInt | Modulus,
    threshold: float = DEFAULT_NONVANISHING_THRESHOLD,
    family: FamilyValues | None = None,
) -> int:
    """#{primitive odd chi : |L(1/2, chi~)| > threshold}."""
    fam = family or compute_family(q, with_achi=False)
    return int(np.sum(np.abs(fam.lvals[fam.mask]) > threshold))


# -- one-level density --------------------------------------------------------

_LAMBDA_TABLE: dict[str, object] = {}


def lambda_table(max_norm: int):
    """Primary prime powers w^k with norm <= max_norm as arrays
    (re, im, norm, Lambda_K = log N(w)), sorted by (norm, re, im)."""
    cached = int(_LAMBDA_TABLE.get("limit", 0))
    if max_norm > cached:
        limit = max(max_norm, 2 * cached if cached else max_norm)
        pre, pim, pnrm = primary_primes_up_to(limit)
        res = [pre]
        ims = [pim]
        nrms = [pnrm]
        lams = [np.log(pnrm.astype(float))]
        k_re, k_im, k_nrm, k_lam = [], [], [], []
        for a, b, n in zip(pre.tolist(), pim.tolist(), pnrm.tolist()):
            if n * n > limit:
                break  # sorted by norm: no higher power fits
            p = GaussInt(a, b)
            pk, nk = p, n
            while nk * n <= limit:
                pk = pk * p
                nk *= n
                k_re.append(pk.re)
                k_im.append(pk.im)
                k_nrm.append(nk)
                k_lam.append(math.log(n))
        if k_re:
            res.append(np.array(k_re, dtype=np.int64))
            ims.append(np.array(k_im, dtype=np.int64))
            nrms.append(np.array(k_nrm, dtype=np.int64))
            lams.append(np.array(k_lam))
        re = np.concatenate(res)
        im = np.concatenate(ims)
        nrm = np.concatenate(nrms)
        lam = np.concatenate(lams)
        order = np.lexsort((im, re, nrm))
        _LAMBDA_TABLE.update(
            limit=limit, re=re[order], im=im[order], norm=nrm[order], lam=lam[order]
        )
    nrm = _LAMBDA_TABLE["norm"]
    k = int(np.searchsorted(nrm, max_norm, side="right"))
    return (
        _LAMBDA_TABLE["re"][:k],
        _LAMBDA_TABLE["im"][:k],
        nrm[:k],
        _LAMBDA_TABLE["lam"][:k],
    )


def _density_terms(q: GaussInt, f: AdmissibleTestFunction):
    """(re, im, a_n) of the prime-power sum: a_n = Lambda_K(n) N(n)^(-1/2)
    phihat(log N(n)/log N(q)), over primary prime powers coprime to q with
    N(n) <= N(q)^sigma."""
    nq = q.norm
    cutoff = int(nq**f.sigma)
    re, im, nrm, lam = lambda_table(cutoff)
    keep = np.ones(len(re), dtype=bool)
    for p, _ in factor(q).factors:
        rr, ri = zvec.rem_rounded(re, im, p.re, p.im, p.norm)
        keep &= (rr != 0) | (ri != 0)
    re, im, nrm, lam = re[keep], im[keep], nrm[keep], lam[keep]
    a_n = lam / np.sqrt(nrm.astype(float)) * f.phi_hat(
        np.log(nrm.astype(float)) / math.log(nq)
    )
    return re, im, a_n


def s_tilde_orthogonality(q: GaussInt, f: AdmissibleTestFunction) -> float:
    """The averaged prime sum via the orthogonality identity:
    sum*_{chi odd} (chi~(n) + conj chi~(n)) = 2 * rhs(q, n, 1, odd), giving
    divisor sums instead of a character loop."""
    re, im, a_n = _density_terms(q, f)
    total = 0.0
    for d in primary_divisors(q):
        mu_cof = mobius(exact_div(q, d))
        if mu_cof == 0 or d.norm == 1:
            continue  # d = 1 contributes 0 (the +1 and -1 sums cancel)
        phi_d = euler_phi(d)
        rr, ri = zvec.reduce(re, im, d.re, d.im, d.norm)
        one = zvec.reduce(
            np.array([1, -1], dtype=np.int64),
            np.array([0, 0], dtype=np.int64),
            d.re, d.im, d.norm,
        )
        plus = (rr == one[0][0]) & (ri == one[1][0])
        minus = (rr == one[0][1]) & (ri == one[1][1])
        total += mu_cof * phi_d * (float(a_n[plus].sum()) - float(a_n[minus].sum()))
    return total


def s_tilde_direct(mod: Modulus, f: AdmissibleTestFunction) -> float:
    """The same average by explicit per-character summation (verification
    route): one FFT gives sum_n a_n chi(n) for every chi, then the masked
    characters contribute 2 Re of it."""
    re, im, a_n = _density_terms(mod.q, f)
    idx, found = mod.reduce_lookup(re, im)
    arr = np.bincount(
        mod.dlog_flat[idx[found]], weights=a_n[found], minlength=mod.phi
    )
    if mod.orders:
        per_char = np.fft.ifftn(arr.reshape(mod.orders)).ravel() * mod.phi
    else:
        per_char = arr.astype(complex)
    mask = mod.primitive_mask & mod.odd_mask
    return float(np.sum(2.0 * per_char[mask].real))


def one_level_density(
    q: GaussInt | Modulus,
    f: AdmissibleTestFunction,
    route: str = "orthogonality",
) -> tuple[float, float]:
    """(density, s~): density = int(phi) - s~ / (psi*(q) log N(q))."""
    if not (0.0 < f.sigma < 2.0):
        raise ValueError("admissible support requires sigma in (0, 2)")
    mod = q if isinstance(q, Modulus) else None
    qq = q.q if isinstance(q, Modulus) else q
    if route == "orthogonality":
        s = s_tilde_orthogonality(qq, f)
    elif route == "direct":
        s = s_tilde_direct(mod or build_modulus(qq), f)
    else:
        raise ValueError("route must be 'orthogonality' or 'direct'")
    ps = psi_star(qq)
    density = f.integral_phi - s / (ps * math.log(qq.norm))
    return density, s


# -- two-route check for the first moment --------------------------------------

def first_moment_via_orthogonality(q: GaussInt, x: float | None = None) -> complex:
    """The first-moment statistic with the summation order swapped: apply
    the orthogonality identity term-by-term to both AFE sums (the Gauss sum
    expanded as its defining exponential sum).  Independent of the
    per-character route; agreement is a structural check on everything."""
    from .hecke_lift import _conductor, _EIGHT_RESIDUES

    nq = q.norm
    x = float(nq) if x is None else float(x)
    cut1 = int(math.ceil(V_ARG_CUTOFF * x))
    cut2 = int(math.ceil(V_ARG_CUTOFF * 32.0 * nq / x))
    divs = [
        (d, mobius(exact_div(q, d)), euler_phi(d))
        for d in primary_divisors(q)
    ]
    divs = [(d, mu, ph) for d, mu, ph in divs if mu != 0]

    def coprime_terms(cut, arg_scale):
        re, im, nrm = primary_elements_up_to(cut)
        keep = np.ones(len(re), dtype=bool)
        for p, _ in factor(q).factors:
            rr, ri = zvec.rem_rounded(re, im, p.re, p.im, p.norm)
            keep &= (rr != 0) | (ri != 0)
        re, im, nrm = re[keep], im[keep], nrm[keep]
        nf = nrm.astype(float)
        return re, im, eval_V(nf * arg_scale) / np.sqrt(nf)

    # first AFE sum: sum_n c_n * rhs(q, n, 1, odd)
    re1, im1, c_n = coprime_terms(cut1, 1.0 / x)
    term1 = 0.0
    for d, mu, ph in divs:
        rr, ri = zvec.reduce(re1, im1, d.re, d.im, d.norm)
        pm = zvec.reduce(
            np.array([1, -1], dtype=np.int64), np.array([0, 0], dtype=np.int64),
            d.re, d.im, d.norm,
        )
        plus = (rr == pm[0][0]) & (ri == pm[1][0])
        minus = (rr == pm[0][1]) & (ri == pm[1][1])
        term1 += 0.5 * mu * ph * (float(c_n[plus].sum()) - float(c_n[minus].sum()))

    # second AFE sum: expand g(chi~) and pair chi~(x) with conj(chi~)(n)
    m = _conductor(q)
    nm = m.norm
    mod_units_needed = build_modulus(q)
    ar = np.repeat(mod_units_needed.unit_re, 8)
    ai = np.repeat(mod_units_needed.unit_im, 8)
    tr = np.tile(np.array([t[0] for t in _EIGHT_RESIDUES], dtype=np.int64),
                 mod_units_needed.phi)
    ti = np.tile(np.array([t[1] for t in _EIGHT_RESIDUES], dtype=np.int64),
                 mod_units_needed.phi)
    xr = ar + q.re * tr - q.im * ti
    xi = ai + q.re * ti + q.im * tr
    odd = (xr + xi) % 2 != 0
    xr, xi = xr[odd], xi[odd]
    pr, pi = zvec.primary_part(xr, xi)
    k = (xi * m.re - xr * m.im) % nm
    ephase = np.exp(2j * np.pi * k / nm)

    re2, im2, d_n = coprime_terms(cut2, x / (32.0 * nq))
    term2 = 0.0 + 0.0j
    for d, mu, ph in divs:
        # bucket e~ phases by the class of x0 mod d
        br, bi = zvec.reduce(pr, pi, d.re, d.im, d.norm)
        comp = 3 * (math.isqrt(d.norm) + 2)
        keys = zvec.encode(br, bi, comp)
        order = np.argsort(keys, kind="stable")
        ks, starts = np.unique(keys[order], return_index=True)
        sums = np.add.reduceat(ephase[order], starts)
        bucket = dict(zip(ks.tolist(), sums.tolist()))
        rr, ri = zvec.reduce(re2, im2, d.re, d.im, d.norm)
        kp = zvec.encode(rr, ri, comp)
        rrm, rim = zvec.reduce(-re2, -im2, d.re, d.im, d.norm)
        km = zvec.encode(rrm, rim, comp)
        acc = 0.0 + 0.0j
        for j in range(len(d_n)):
            bp = bucket.get(int(kp[j]), 0.0)
            bm = bucket.get(int(km[j]), 0.0)
            acc += d_n[j] * (bp - bm)
        term2 += 0.5 * mu * ph * acc
    term2 /= math.sqrt(8.0 * nq)
    return term1 + term2


# -- lemma-scale checks --------------------------------------------------------

def norm_inequality_scan(B: int = 40):
    """Exhaustive check over |re|, |im| <= B: whenever N(m+n) >= N(n),
    N(m+n) >= N(m)/64.  Returns the first violating (m, n) or None."""
    if B > 100:
        raise ValueError("scan is intended for B <= 100")
    rng = np.arange(-B, B + 1, dtype=np.int64)
    nre, nim = np.meshgrid(rng, rng, indexing="ij")
    nre, nim = nre.ravel(), nim.ravel()
    nn = nre * nre + nim * nim
    for mr in rng.tolist():
        for mi in rng.tolist():
            nm = mr * mr + mi * mi
            sr = mr + nre
            si = mi + nim
            ns = sr * sr + si * si
            bad = (ns >= nn) & (64 * ns < nm)
            if bad.any():
                j = int(np.argmax(bad))
                return GaussInt(mr, mi), GaussInt(int(nre[j]), int(nim[j]))
    return None


def gauss_circle_primary(x: float) -> int:
    """#{a primary : N(a) <= x}, exhaustive; compare against (pi/8) x."""
    if x < 1:
        raise ValueError("x >= 1 required")
    return count_primary_up_to(x)


_C0_CACHE: dict[tuple, "C0Estimate"] = {}

C0_GRID = (10**6, 2 * 10**6, 4 * 10**6, 10**7)


@dataclass(frozen=True)
class C0Estimate:
    value: float
    spread: float
    samples: tuple[tuple[int, float], ...]


def estimate_c0_detail(grid=C0_GRID, max_spread: float = 1e-3) -> C0Estimate:
    """C0 measured as the average of sum_{N(a)<=x} 1/N(a) - (pi/8) log x
    over the grid; a spread above max_spread signals an enumeration bug."""
    key = tuple(grid)
    if key not in _C0_CACHE:
        samples = tuple(
            (x, sum_inverse_norm_primary(x) - (math.pi / 8.0) * math.log(x))
            for x in grid
        )
        vals = [v for _, v in samples]
        spread = max(vals) - min(vals)
        if spread > max_spread:
            raise RuntimeError(
                f"C0 spread {spread:.2e} over the x-grid exceeds {max_spread:.0e}"
            )
        _C0_CACHE[key] = C0Estimate(sum(vals) / len(vals), spread, samples)
    return _C0_CACHE[key]


def estimate_c0() -> float:
    return estimate_c0_detail().value


def harmonic_sum(x: float, q: GaussInt, c0: float | None = None):
    """(value, main): the coprime-to-q harmonic sum over primary elements,
    against its predicted main term with the measured C0."""
    if x < 2:
        raise ValueError("x >= 2 required")
    re, im, nrm = primary_elements_up_to(int(x))
    keep = np.ones(len(re), dtype=bool)
    for p, _ in factor(q).factors:
        rr, ri = zvec.rem_rounded(re, im, p.re, p.im, p.norm)
        keep &= (rr != 0) | (ri != 0)
    value = float(np.sum(1.0 / nrm[keep].astype(float)))
    if c0 is None:
        c0 = estimate_c0()
    prime_sum = sum(
        math.log(p.norm) / (p.norm - 1) for p, _ in factor(q).factors
    )
    main = (euler_phi(q) / q.norm) * (
        (math.pi / 8.0) * math.log(x) + c0 + (math.pi / 8.0) * prime_sum
    )
    return value, main


# -- sweeps --------------------------------------------------------------------

@dataclass(frozen=True)
class MomentSweepRow:
    q: GaussInt
    n_q: int
    psi_star: int
    stat1: complex
    main1: float
    ratio1: float
    stat2: float
    stat2_imag: float
    main2: float
    ratio2: float
    cross2: float
    nonvanishing: int
    wall_s: float


def _moment_worker(args) -> MomentSweepRow:
    qre, qim, cache_dir, threshold = args
    q = GaussInt(qre, qim)
    t0 = time.perf_counter()
    fam = compute_family(q, with_achi=True, cache_dir=cache_dir)
    mod = fam.modulus
    ps = psi_star(q)
    stat1 = complex(np.sum(fam.lvals[fam.mask]))
    ach = 2.0 * np.sum(fam.achi[fam.mask])
    nq = mod.n_q
    main1 = ps / 2.0
    main2 = (math.pi / 16.0) * (euler_phi(q) / nq) * ps * math.log(nq)
    cross = second_moment_cross(fam)
    nv = int(np.sum(np.abs(fam.lvals[fam.mask]) > threshold))
    wall = time.perf_counter() - t0
    return MomentSweepRow(
        q, nq, ps,
        stat1, main1, stat1.real / main1 if main1 else math.nan,
        float(ach), 0.0, main2, float(ach) / main2 if main2 else math.nan,
        cross, nv, wall,
    )


def moment_sweep(
    qnorm_min: int,
    qnorm_max: int,
    primes_only: bool = True,
    workers: int = 1,
    cache_dir=None,
    threshold: float = DEFAULT_NONVANISHING_THRESHOLD,
) -> list[MomentSweepRow]:
    """Both moments, the cross-route second moment and the non-vanishing
    count for every primary q in the norm band, in deterministic q order."""
    qs = primary_moduli(qnorm_min, qnorm_max, primes_only=primes_only)
    args = [(q.re, q.im, cache_dir, threshold) for q in qs]
    return _run_parallel(_moment_worker, args, workers)


@dataclass(frozen=True)
class DensitySweepRow:
    q: GaussInt
    n_q: int
    sigma: float
    testfn: str
    psi_star: int
    s_tilde: float
    density: float
    wall_s: float


def _density_worker(args) -> DensitySweepRow:
    qre, qim, sigma, name = args
    q = GaussInt(qre, qim)
    t0 = time.perf_counter()
    f = TEST_FUNCTIONS[name](sigma)
    density, s = one_level_density(q, f)
    return DensitySweepRow(
        q, q.norm, sigma, name, psi_star(q), s, density, time.perf_counter() - t0
    )


def density_sweep(
    qnorm_min: int,
    qnorm_max: int,
    sigma: float = 1.5,
    testfn: str = "fejer",
    primes_only: bool = True,
    workers: int = 1,
) -> list[DensitySweepRow]:
    if testfn not in TEST_FUNCTIONS:
        raise ValueError(f"unknown test function {testfn!r}")
    TEST_FUNCTIONS[testfn](sigma)  # validates sigma now
    qs = primary_moduli(qnorm_min, qnorm_max, primes_only=primes_only)
    args = [(q.re, q.im, sigma, testfn) for q in qs]
    return _run_parallel(_density_worker, args, workers)


def _run_parallel(worker, args, workers: int):
    if workers <= 1 or len(args) <= 1:
        return [worker(a) for a in args]
    import multiprocessing as mp

    ctx = mp.get_context("fork")
    with ctx.Pool(workers) as pool:
        return pool.map(worker, args, chunksize=1)


def dyadic_medians(norms, values, factor: float = 2.0):
    """Medians of |values| over dyadic norm bins [lo, lo*factor); returns
    (bin lower edges, medians), skipping empty bins."""
    norms = np.asarray(norms, dtype=float)
    values = np.abs(np.asarray(values, dtype=float))
    lo = float(norms.min())
    edges, meds = [], []
    while lo <= norms.max():
        hi = lo * factor
        pick = (norms >= lo) & (norms < hi)
        if pick.any():
            edges.append(lo)
            meds.append(float(np.median(values[pick])))
        lo = hi
    return edges, meds
