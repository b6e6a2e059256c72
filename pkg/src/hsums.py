import math
import itertools
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from sympy import divisor_count
from colorama import Fore

from src.errors import DomainError, PreconditionError
from src.expsums import SumReport, gauss_sum, g_sum_all, intermediate_sum, ramanujan_sum
from src.residues import (
    DirichletCharacter, character_table, char_angle, conductor, conjugate, divides_q_infinity,
    enumerate_all, euler_phi, factorize, finite, inverse_table, is_primitive, primitive_characters,
    primitivize, q_infinity_divisors, q_part, roots_of_unity, split_character, tolerance, valuation,
)
from src.scanner import ParameterScan, say

# G is evaluated by the quadruple-sum path up to this c, by the collapsed path above it.
NAIVE_G_MAX = 150

SUITES = ('gh', 'fourier', 'symmetry', 'closed-form', 'crt', 'zero-bound', 'psquared')


@dataclass(frozen=True)
class HArgs:
    m1: int
    m2: int
    m3: int
    r: int

    @property
    def coprime(self):
        return math.gcd(self.m1, self.r) == 1

    def as_tuple(self):
        return (self.m1, self.m2, self.m3, self.r)

    def satisfies_convention(self, q):
        return all(x >= 1 and divides_q_infinity(x, q) for x in self.as_tuple())

    def params(self):
        return {'m1': self.m1, 'm2': self.m2, 'm3': self.m3, 'r': self.r}


@dataclass(frozen=True)
class EllInvariant:
    p: int
    chi: DirichletCharacter
    ell: int

    @property
    def primitive(self):
        return self.ell % self.p != 0


def convention_grid(q, cap, coprime_only=False):
    """All (m1, m2, m3, r) with entries q^infinity-divisors <= cap."""
    grid = q_infinity_divisors(q, cap)
    for m1, m2, m3, r in itertools.product(grid, repeat=4):
        args = HArgs(m1, m2, m3, r)
        if not coprime_only or args.coprime:
            yield args


def _char_index(psi):
    orders = psi.basis.orders
    return int(np.ravel_multi_index(psi.exponents, orders)) if orders else 0


def _require_primitive(chi):
    if not is_primitive(chi):
        raise DomainError(f"character {chi.label} mod {chi.modulus} is not primitive")


def _same_modulus(psi, chi):
    if psi.modulus != chi.modulus:
        raise DomainError(f"moduli differ: {psi.modulus} vs {chi.modulus}")


# --- H_chi ------------------------------------------------------------------

@lru_cache(maxsize=1 << 16)
def _h_direct(chi, m1, m2, m3, r):
    q = chi.modulus
    u = np.arange(q)[:, None]
    t = np.arange(q)[None, :]
    v = chi.values
    terms = (v[(t + m2 * u) % q]
             * np.conj(v[(r * t + m1 * m2) % q])
             * np.conj(v[u])
             * v[(r * u - m1) % q]
             * roots_of_unity(q)[(m3 * t) % q])
    return finite(terms.sum())


def H_chi(chi, m1, m2, m3, r):
    """sum over u, t mod q of chi(t + m2 u) conj chi(r t + m1 m2) conj chi(u) chi(-m1 + r u) e_q(m3 t)."""
    q = chi.modulus
    return _h_direct(chi, *(int(x) % q for x in (m1, m2, m3, r)))


def H_chi_coprime(chi, m1, m2, m3, r):
    q = chi.modulus
    if math.gcd(q, r) != 1:
        raise DomainError(f"r = {r} is not coprime to {q}")
    rbar = pow(r, -1, q)
    t = np.arange(q)
    v = chi.values
    a = v[(t + m2) % q] * np.conj(v)
    b = np.conj(v[(t + m1) % q]) * v
    roots = roots_of_unity(q)
    kernel = roots[(m3 * rbar * np.outer(t, t)) % q]
    return finite(roots[(-m1 * m2 * m3 * rbar) % q] * (b @ kernel @ a))


@lru_cache(maxsize=1 << 14)
def _h_profile(chi, m1, m2, r):
    """f[t] = sum over u of the H_chi summand without its additive character."""
    q = chi.modulus
    u = np.arange(q)[:, None]
    t = np.arange(q)[None, :]
    v = chi.values
    f = (v[(t + m2 * u) % q] * np.conj(v[(r * t + m1 * m2) % q])
         * np.conj(v[u]) * v[(r * u - m1) % q]).sum(axis=0)
    f.setflags(write=False)
    return f


# --- G ----------------------------------------------------------------------

def G_bruteforce(chi, m1, m2, m3, c, method="naive"):
    """
    G(m1, m2, m3; c) = c^-3 sum over units y and x1, x2, x3 mod c of
    chi(x1) conj chi(x2 x3) chi^2(y) e_c(m1 x1 + m2 x2 + m3 x3 + x1 y + x2 x3 / y).

    "naive" performs the x1 and (x2, x3) sums numerically for every y;
    "collapsed" evaluates both as Gauss sums and needs chi primitive.
    """
    q = chi.modulus
    if c % q:
        raise DomainError(f"{q} does not divide c = {c}")
    if method == "collapsed":
        return _g_collapsed(chi, m1, m2, m3, c)
    if method != "naive":
        raise DomainError(f"unknown G method {method!r}")

    roots = roots_of_unity(c)
    x = np.arange(c)
    xv = chi.values[x % q]
    inv = inverse_table(c)
    y, ybar = x[inv >= 0], inv[inv >= 0]

    x1 = roots[np.outer(m1 + y, x) % c] @ xv
    left = np.conj(xv) * roots[(m2 * x) % c]
    right = np.conj(xv) * roots[(m3 * x) % c]
    square = np.outer(x, x) % c
    x23 = np.array([left @ roots[(square * yb) % c] @ right for yb in ybar])
    total = np.sum(xv[y] ** 2 * x1 * x23)
    return finite(total / c ** 3)


def _g_collapsed(chi, m1, m2, m3, c):
    _require_primitive(chi)
    q = chi.modulus
    r = c // q
    u = np.arange(q)
    y = -m1 + r * u
    z = -m3 + r * u
    units = np.gcd(y % c, c) == 1
    v = chi.values
    left = np.where(units, v[y % q] * np.conj(v), 0)
    right = np.conj(v[z % q]) * v
    kernel = roots_of_unity(c)[(m2 * np.outer(y, z)) % c]
    scale = r * r * gauss_sum(chi) * gauss_sum(conjugate(chi)) / c ** 3
    return finite(scale * (left @ kernel @ right))


def verify_GH_relation(chi, m1, m2, m3, r, method="auto", per_term=None):
    """[(m1, r) = 1] H_chi(m1, m2, m3, r) = c q G(m1, m2, m3; c) e_c(-m1 m2 m3) chi(-1), c = q r."""
    _require_primitive(chi)
    q = chi.modulus
    c = q * r
    if method == "auto":
        method = "naive" if c <= NAIVE_G_MAX else "collapsed"
    left = H_chi(chi, m1, m2, m3, r) if math.gcd(m1, r) == 1 else 0j
    g = G_bruteforce(chi, m1, m2, m3, c, method)
    right = c * q * g * roots_of_unity(c)[(-m1 * m2 * m3) % c] * chi(-1)
    params = {'q': q, 'chi': chi.label, 'm1': m1, 'm2': m2, 'm3': m3, 'r': r, 'method': method}
    return SumReport.compare('GH-relation', params, left, right,
                             tolerance(q * q + c * c, per_term=per_term))


# --- H hat ------------------------------------------------------------------

@lru_cache(maxsize=1024)
def _twisted_gauss_table(psi):
    """K[n] = sum over v of conj psi(v) e_q(n v), for n mod q."""
    q = psi.modulus
    n = np.arange(q)
    table = roots_of_unity(q)[np.outer(n, n) % q] @ np.conj(psi.values)
    table.setflags(write=False)
    return table


def H_hat(psi, chi, m1, m2, m3, r, method="fast"):
    """sum over v mod q of H_chi(m1, m2, m3 v, r) conj psi(v)."""
    _same_modulus(psi, chi)
    q = chi.modulus
    m1, m2, m3, r = (int(x) % q for x in (m1, m2, m3, r))
    if method == "naive":
        total = sum(np.conj(psi.values[v]) * H_chi(chi, m1, m2, m3 * v, r)
                    for v in range(q) if psi.values[v] != 0)
        return finite(total)
    if method != "fast":
        raise DomainError(f"unknown H_hat method {method!r}")
    f = _h_profile(chi, m1, m2, r)
    t = np.arange(q)
    return finite(f @ _twisted_gauss_table(psi)[(m3 * t) % q])


@lru_cache(maxsize=1 << 14)
def _h_hat_all(chi, m1, m2, m3, r):
    q = chi.modulus
    f = _h_profile(chi, m1, m2, r)
    n = np.arange(q)
    h = roots_of_unity(q)[(m3 * np.outer(n, n)) % q] @ f
    _, table = character_table(q)
    out = np.conj(table) @ h
    out.setflags(write=False)
    return out


def H_hat_all(chi, m1, m2, m3, r):
    """H_hat(psi, ...) for every psi mod q, rows in enumerate_all order."""
    q = chi.modulus
    return _h_hat_all(chi, *(int(x) % q for x in (m1, m2, m3, r)))


def verify_fourier_inversion(chi, m1, m2, m3, r, per_term=None):
    """H_chi(m1, m2, m3 w, r) = phi(q)^-1 sum over psi of H_hat(psi) psi(w) for all units w."""
    q = chi.modulus
    phi = euler_phi(q)
    _, table = character_table(q)
    hat = H_hat_all(chi, m1, m2, m3, r)
    units = np.flatnonzero(chi.basis.units)
    inverted = table[:, units].T @ hat / phi
    direct = np.array([H_chi(chi, m1, m2, m3 * w, r) for w in units])
    gaps = np.abs(direct - inverted)
    worst = int(np.argmax(gaps))
    params = {'q': q, 'chi': chi.label, 'm1': m1, 'm2': m2, 'm3': m3, 'r': r, 'w': int(units[worst])}
    scale = tolerance(q ** 3, per_term=per_term)
    return SumReport('fourier-inversion', params, direct[worst], inverted[worst],
                     gaps[worst], scale, gaps[worst] <= scale)


def verify_H_symmetries(chi, m1, m2, m3, r, psi=None, per_term=None):
    q = chi.modulus
    scale = tolerance(q * q, per_term=per_term)
    base = {'q': q, 'chi': chi.label, 'm1': m1, 'm2': m2, 'm3': m3, 'r': r}
    h = H_chi(chi, m1, m2, m3, r)
    reports = [SumReport.compare('H-symmetry-swap', base, h, H_chi(chi, m1, m3, m2, r), scale)]
    coprime = math.gcd(q, r) == 1
    if coprime:
        reports.append(SumReport.compare('H-symmetry-conjugate', base, h,
                                         H_chi(conjugate(chi), m2, m1, m3, r), scale))
        reports.append(SumReport.compare('H-coprime-form', base, h,
                                         H_chi_coprime(chi, m1, m2, m3, r), scale))
    if psi is not None:
        hat_scale = tolerance(q ** 3, per_term=per_term)
        hat_params = dict(base, psi=psi.label)
        hat = H_hat(psi, chi, m1, m2, m3, r)
        reports.append(SumReport.compare('H-hat-symmetry-swap', hat_params, hat,
                                         H_hat(psi, chi, m1, m3, m2, r), hat_scale))
        if coprime:
            reports.append(SumReport.compare('H-hat-symmetry-conjugate', hat_params,
                                             H_hat(psi, chi, m2, m1, m3, r),
                                             H_hat(psi, conjugate(chi), m1, m2, m3, r), hat_scale))
    return reports


# --- Closed forms for q = p^k -----------------------------------------------

@dataclass(frozen=True)
class HatCase:
    label: str
    vanishes: bool


def _convention(chi, args):
    q = chi.modulus
    fac = factorize(q)
    if not fac.is_prime_power:
        raise DomainError(f"closed forms need a prime-power modulus, got {q}")
    for name, x in zip(('m1', 'm2', 'm3', 'r'), args.as_tuple()):
        if x < 1 or not divides_q_infinity(x, q):
            raise DomainError(f"{name} = {x} does not divide {q}^infinity")
    if not args.coprime:
        raise DomainError(f"gcd(m1, r) = gcd({args.m1}, {args.r}) is not 1")
    return fac.factors[0]


def _trivial_parts(chi, args):
    q = chi.modulus
    m1, m2, m3, r = args.as_tuple()
    head = (ramanujan_sum(q, m1) * ramanujan_sum(q, m2) * ramanujan_sum(q, m3)
            if math.gcd(r, q) == 1 else 0)
    tail = ramanujan_sum(q, r) if math.gcd(m1 * m2 * m3, q) == 1 else 0
    return head, tail


def classify_H_hat(psi, chi, m1, m2, m3, r):
    """Which closed-form case applies, and whether it predicts H_hat = 0."""
    _same_modulus(psi, chi)
    args = HArgs(m1, m2, m3, r)
    p, k = _convention(chi, args)
    q = chi.modulus
    f = conductor(psi)
    if f == q:
        return HatCase('primitive', args.as_tuple() != (1, 1, 1, 1))
    if f == 1:
        head, tail = _trivial_parts(chi, args)
        sign = round(chi(-1).real)
        return HatCase('trivial', head + q * tail * sign == 0)
    j = valuation(f, p)
    p_r = r % p == 0
    p_m = (m1 * m2 * m3) % p == 0
    if not p_r and not p_m:
        return HatCase('coprime', True)
    if p_r and not p_m:
        return HatCase('r-power', valuation(r, p) != k - j)
    if p_m and not p_r:
        return HatCase('m-power', any(valuation(m, p) != k - j for m in (m1, m2, m3)))
    return HatCase('mixed', True)


@lru_cache(maxsize=4096)
def _tau_bar_star(psi):
    return gauss_sum(conjugate(primitivize(psi)))


@lru_cache(maxsize=4096)
def _intermediate(chi, psi):
    return intermediate_sum(chi, psi)


@lru_cache(maxsize=256)
def _g_row(chi):
    return g_sum_all(chi)


def H_hat_closed_form(psi, chi, m1, m2, m3, r):
    """
    H_hat for q = p^k, primitive chi and m1, m2, m3, r | q^infinity with (m1, r) = 1.

    psi primitive: tau(conj psi) g(chi, psi) at (1, 1, 1, 1), else 0.
    psi trivial: chi_0(r) R(m1) R(m2) R(m3) + q R(r) chi(-1) chi_0(m1 m2 m3).
    psi of conductor p^j, 1 <= j < k, M = p^(k-j), I the intermediate sum:
    chi(-1) M^2 tau(conj psi*) I(chi, psi) at r = M with all m = 1,
    M^3 tau(conj psi*) I(chi, conj psi) at m1 = m2 = m3 = M with r = 1, else 0.
    """
    _require_primitive(chi)
    case = classify_H_hat(psi, chi, m1, m2, m3, r)
    q = chi.modulus
    if case.label == 'trivial':
        head, tail = _trivial_parts(chi, HArgs(m1, m2, m3, r))
        return complex(head + q * tail * chi(-1))
    if case.vanishes:
        return 0j
    if case.label == 'primitive':
        return finite(gauss_sum(conjugate(psi)) * _g_row(chi)[_char_index(psi)])
    p, k = factorize(q).factors[0]
    big = p ** (k - valuation(conductor(psi), p))
    if case.label == 'r-power':
        return finite(chi(-1) * big ** 2 * _tau_bar_star(psi) * _intermediate(chi, psi))
    return finite(big ** 3 * _tau_bar_star(psi) * _intermediate(chi, conjugate(psi)))


# --- CRT twist --------------------------------------------------------------

def verify_crt_twist(q1, q2, chi, psi, args, per_term=None):
    """
    H_hat(psi, chi, a, b, c, d) = eps H_hat(psi1, chi1, a1, b1, c1, d1) H_hat(psi2, chi2, a2, b2, c2, d2)
    with eps = psi1(a2 b2 c2 / (q2 d2)) psi2(a1 b1 c1 / (q1 d1)).
    """
    if math.gcd(q1, q2) != 1:
        raise DomainError(f"{q1} and {q2} are not coprime")
    _same_modulus(psi, chi)
    q = chi.modulus
    if q1 * q2 != q:
        raise DomainError(f"{q1} * {q2} != {q}")
    args = args if isinstance(args, HArgs) else HArgs(*args)
    if not args.satisfies_convention(q):
        raise DomainError(f"{args.as_tuple()} do not all divide {q}^infinity")

    chi1, chi2 = split_character(chi, q1, q2)
    psi1, psi2 = split_character(psi, q1, q2)
    a1, b1, c1, d1 = (q_part(x, q1) for x in args.as_tuple())
    a2, b2, c2, d2 = (x // y for x, y in zip(args.as_tuple(), (a1, b1, c1, d1)))

    eps = (psi1(a2 * b2 * c2 * pow(q2 * d2, -1, q1))
           * psi2(a1 * b1 * c1 * pow(q1 * d1, -1, q2)))
    left = H_hat(psi, chi, *args.as_tuple())
    right = eps * H_hat(psi1, chi1, a1, b1, c1, d1) * H_hat(psi2, chi2, a2, b2, c2, d2)
    params = dict(args.params(), q=q, chi=chi.label, psi=psi.label, q1=q1, q2=q2)
    return SumReport.compare('crt-twist', params, left, right, tolerance(q ** 3, per_term=per_term))


# --- q = p^2 ----------------------------------------------------------------

def ell_of_char(chi):
    """The l with chi(1 + p t) = e_p(l t) for a character mod p^2, p odd."""
    q = chi.modulus
    fac = factorize(q)
    if len(fac.factors) != 1 or fac.factors[0][1] != 2 or fac.factors[0][0] == 2:
        raise DomainError(f"modulus {q} is not the square of an odd prime")
    p = fac.factors[0][0]
    turn = char_angle(chi, 1 + p) * p
    if turn.denominator != 1:
        raise DomainError(f"chi(1 + p) has order not dividing {p}")
    return EllInvariant(p, chi, int(turn) % p)


def g_sum_psquared(chi, psi):
    """
    g(chi, psi) for q = p^2 from the solutions a of a(a + 2) + A(a + 1) = 0 mod p,
    A = l_chi / l_psi, with c = -2 - a. Zero when psi is imprimitive.
    """
    _require_primitive(chi)
    _same_modulus(psi, chi)
    ell_chi = ell_of_char(chi)
    p = ell_chi.p
    ell_psi = ell_of_char(psi).ell
    if ell_psi % p == 0:
        return 0j
    big_a = ell_chi.ell * pow(ell_psi, -1, p) % p
    total = 0j
    for a in range(p):
        if (a * (a + 2) + big_a * (a + 1)) % p:
            continue
        c = (-2 - a) % p
        total += (chi(a) * np.conj(chi(a + 1)) * np.conj(chi(c)) * chi(c + 1)
                  * psi(a * c - 1))
    return finite(p * p * total)


def H_chi_zero_bound(chi, m1, m2, m3, r, kappa=1.0, soft=True, per_term=None):
    """|H_chi| <= kappa q^-1 (m1, q)(m2, q)(m3, q) d(q)^3 when some m_i = 0; ratio is |H| / bound."""
    if m1 * m2 * m3 != 0:
        raise PreconditionError("zero-bound check needs m1 m2 m3 = 0")
    q = chi.modulus
    limit = kappa * math.prod(math.gcd(m, q) for m in (m1, m2, m3)) / q * int(divisor_count(q)) ** 3
    value = abs(H_chi(chi, m1, m2, m3, r))
    params = {'q': q, 'chi': chi.label, 'm1': m1, 'm2': m2, 'm3': m3, 'r': r,
              'kappa': kappa, 'ratio': value / limit}
    return SumReport.bound('H-zero-bound', params, value, limit,
                           scale=tolerance(q * q, per_term=per_term), soft=soft)


# --- Verification suites ----------------------------------------------------

def _r_choices(q):
    return sorted({1, 2, 3, 5} | set(factorize(q).primes))


def _coprime_splits(q):
    powers = factorize(q).prime_powers
    for size in range(0, len(powers)):
        for group in itertools.combinations(powers, size):
            q1 = math.prod(group)
            yield q1, q // q1


def _suite_gh(q, rng, samples, cap, per_term):
    prims = primitive_characters(q)
    choices = _r_choices(q)
    reports = []
    for i in range(samples):
        chi = prims[rng.integers(len(prims))]
        m1, m2, m3 = (int(x) for x in rng.integers(1, 3 * q + 1, size=3))
        r = choices[rng.integers(len(choices))]
        if i % 10 == 9 and r > 1:
            m1 *= r
        reports.append(verify_GH_relation(chi, m1, m2, m3, r, per_term=per_term))
    return reports


def _suite_fourier(q, rng, samples, cap, per_term):
    return [verify_fourier_inversion(chi, *args.as_tuple(), per_term=per_term)
            for chi in primitive_characters(q)
            for args in convention_grid(q, cap)]


def _suite_symmetry(q, rng, samples, cap, per_term):
    prims = primitive_characters(q)
    chars = enumerate_all(q)
    choices = _r_choices(q)
    reports = []
    for _ in range(samples):
        chi = prims[rng.integers(len(prims))]
        psi = chars[rng.integers(len(chars))]
        m1, m2, m3 = (int(x) for x in rng.integers(0, 3 * q + 1, size=3))
        r = choices[rng.integers(len(choices))]
        reports.extend(verify_H_symmetries(chi, m1, m2, m3, r, psi=psi, per_term=per_term))
    return reports


def _suite_closed_form(q, rng, samples, cap, per_term):
    if not factorize(q).is_prime_power:
        return []
    chars, _ = character_table(q)
    scale = tolerance(q ** 3, per_term=per_term)
    reports = []
    for chi in primitive_characters(q):
        for args in convention_grid(q, cap, coprime_only=True):
            brute = H_hat_all(chi, *args.as_tuple())
            closed = np.array([H_hat_closed_form(psi, chi, *args.as_tuple()) for psi in chars])
            gaps = np.abs(brute - closed)
            worst = int(np.argmax(gaps))
            params = dict(args.params(), q=q, chi=chi.label, psi=chars[worst].label,
                          case=classify_H_hat(chars[worst], chi, *args.as_tuple()).label)
            reports.append(SumReport('closed-form', params, brute[worst], closed[worst],
                                     gaps[worst], scale, gaps[worst] <= scale))
    return reports


def _suite_crt(q, rng, samples, cap, per_term):
    if len(factorize(q).factors) < 2:
        return []
    chars = enumerate_all(q)
    grid = q_infinity_divisors(q, cap)
    reports = []
    for q1, q2 in _coprime_splits(q):
        for _ in range(samples):
            chi = chars[rng.integers(len(chars))]
            psi = chars[rng.integers(len(chars))]
            args = HArgs(*(grid[i] for i in rng.integers(len(grid), size=4)))
            reports.append(verify_crt_twist(q1, q2, chi, psi, args, per_term=per_term))
    return reports


def _suite_zero_bound(q, rng, samples, cap, per_term):
    prims = primitive_characters(q)
    choices = _r_choices(q)
    reports = []
    for _ in range(samples):
        chi = prims[rng.integers(len(prims))]
        m = [int(x) for x in rng.integers(0, 2 * q + 1, size=3)]
        m[int(rng.integers(3))] = 0
        r = choices[rng.integers(len(choices))]
        reports.append(H_chi_zero_bound(chi, *m, r, per_term=per_term))
    return reports


def _suite_psquared(q, rng, samples, cap, per_term):
    fac = factorize(q)
    if len(fac.factors) != 1 or fac.factors[0][1] != 2 or fac.factors[0][0] == 2:
        return []
    chars, _ = character_table(q)
    scale = tolerance(q * q, per_term=per_term)
    reports = []
    for chi in primitive_characters(q):
        row = _g_row(chi)
        for psi, g in zip(chars, row):
            params = {'q': q, 'chi': chi.label, 'psi': psi.label}
            reports.append(SumReport.compare('g-psquared', params, g, g_sum_psquared(chi, psi), scale))
    return reports


_SUITE_RUNNERS = {
    'gh': _suite_gh,
    'fourier': _suite_fourier,
    'symmetry': _suite_symmetry,
    'closed-form': _suite_closed_form,
    'crt': _suite_crt,
    'zero-bound': _suite_zero_bound,
    'psquared': _suite_psquared,
}


def run_suite(q, suite, seed, samples, cap, per_term):
    """One verification suite for one modulus; seeded by (seed, q, suite)."""
    if not primitive_characters(q):
        return []
    rng = np.random.default_rng([int(seed), int(q), SUITES.index(suite)])
    cap = q * q if cap is None else cap
    return _SUITE_RUNNERS[suite](q, rng, samples, cap, per_term)


def verify_identities(moduli, seed=42, samples=200, cap=None, suites=SUITES, jobs=1,
                      per_term=None, quiet=True):
    for q in moduli:
        if not primitive_characters(q):
            say(f"[!] No primitive characters mod {q}; skipping it.", Fore.YELLOW, quiet)
    cells = [(q, suite, seed, samples, cap, per_term) for q in moduli for suite in suites]
    scan = ParameterScan("identity suites", run_suite, cells, jobs, quiet)
    scan.run()
    return scan
