import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
import mpmath
from sympy import sieve

from src.errors import DomainError, PreconditionError
from src.expsums import SumReport, gauss_sum
from src.hsums import H_hat_all, _h_profile, _g_row, _char_index
from src.lfunc import dirichlet_L
from src.scanner import ParameterScan
from src.residues import (
    DirichletCharacter, character_table, conductor, conjugate, euler_phi, factorize, finite,
    induce, is_primitive, power, primitive_characters, primitivize, principal_character, product,
    q_infinity_divisors, roots_of_unity, tolerance, valuation,
)

# Re(s) below this is rejected by the truncation bookkeeping.
CONVERGENCE_GUARD = 2.0


@dataclass(frozen=True)
class EisensteinParams:
    chi1: DirichletCharacter
    chi2: DirichletCharacter
    t: float = 0.0

    def __post_init__(self):
        for chi in (self.chi1, self.chi2):
            if not is_primitive(chi):
                raise DomainError(f"Eisenstein data needs primitive characters, got {chi.label} mod {chi.modulus}")

    @property
    def level(self):
        return self.chi1.modulus * self.chi2.modulus


@dataclass(frozen=True)
class ZEvaluation:
    s: tuple
    caps: tuple
    value: complex
    tail_estimate: float


def _powers(n, s):
    """n^-s for an integer array n >= 1."""
    return np.exp(-complex(s) * np.log(n.astype(float)))


def _bin(residues, weights, q):
    """Complex weights summed per residue class mod q."""
    real = np.bincount(residues % q, weights=np.real(weights), minlength=q)
    imag = np.bincount(residues % q, weights=np.imag(weights), minlength=q)
    return real + 1j * imag


def _guard(s):
    for z in s:
        if complex(z).real < CONVERGENCE_GUARD:
            raise PreconditionError(f"Re(s) = {complex(z).real} is below {CONVERGENCE_GUARD}")


# --- Eisenstein series ------------------------------------------------------

def eisenstein_lambda(params, n):
    """lambda(n) = chi2(sgn n) * sum over ab = |n| of chi1(a) conj chi2(b) a^-it b^it."""
    if n == 0:
        raise DomainError("lambda(n) is undefined at n = 0")
    m = abs(int(n))
    a = np.arange(1, m + 1)
    a = a[m % a == 0]
    b = m // a
    t = params.t
    terms = (params.chi1.values[a % params.chi1.modulus]
             * np.conj(params.chi2.values[b % params.chi2.modulus])
             * np.exp(1j * t * (np.log(b) - np.log(a))))
    sign = params.chi2(-1) if n < 0 else 1
    return finite(sign * terms.sum())


def eisenstein_lambda_table(params, N):
    """lambda(1), ..., lambda(N) by Dirichlet convolution."""
    n = np.arange(1, N + 1)
    left = params.chi1.values[n % params.chi1.modulus] * np.exp(-1j * params.t * np.log(n))
    right = np.conj(params.chi2.values[n % params.chi2.modulus]) * np.exp(1j * params.t * np.log(n))
    lam = np.zeros(N, dtype=complex)
    for a in range(1, N + 1):
        if left[a - 1] != 0:
            lam[a - 1::a] += left[a - 1] * right[:N // a]
    return lam


def dirichlet_series_partial(chi, s, N):
    """(L_N(s, chi), N^(1 - sigma) / (sigma - 1)) for sigma > 1."""
    sigma = complex(s).real
    if sigma <= 1:
        raise PreconditionError(f"partial sums need Re(s) > 1, got {sigma}")
    n = np.arange(1, N + 1)
    value = np.sum(chi.values[n % chi.modulus] * _powers(n, s))
    return finite(value), N ** (1 - sigma) / (sigma - 1)


def _twists(params, chi):
    q = chi.modulus
    for part in (params.chi1, params.chi2):
        if q % part.modulus:
            raise PreconditionError(f"{part.modulus} does not divide {q}")
    twist = product(chi, induce(params.chi1, q))
    other = product(chi, conjugate(induce(params.chi2, q)))
    if other != conjugate(twist):
        raise PreconditionError("chi1 conj chi2 must equal conj chi^2")
    return twist, other


def verify_eisenstein_Lfactorization(params, chi, s, N):
    """Truncated lambda-series twisted by chi against L_N(s + it, chi chi1) L_N(s - it, conj chi chi1)."""
    _guard([s])
    twist, other = _twists(params, chi)
    n = np.arange(1, N + 1)
    lam = eisenstein_lambda_table(params, N)
    left = finite(np.sum(lam * chi.values[n % chi.modulus] * _powers(n, s)))
    first, _ = dirichlet_series_partial(twist, s + 1j * params.t, N)
    second, _ = dirichlet_series_partial(other, s - 1j * params.t, N)
    sigma = complex(s).real
    params_out = {'q': chi.modulus, 'chi': chi.label, 'chi1': params.chi1.label,
                  'chi2': params.chi2.label, 't': params.t, 's': str(complex(s)), 'N': N}
    return SumReport.compare('eisenstein-factorization', params_out, left, first * second,
                             10 * N ** (1 - sigma) * (1 + math.log(N)))


def eisenstein_central_value(params, chi, s=0.5):
    """L(s + it, chi chi1) L(s - it, conj chi chi1); |L(1/2 + it, chi)|^2 for chi1 trivial."""
    twist, other = _twists(params, chi)
    t = params.t
    return finite(dirichlet_L(s + 1j * t, twist).value * dirichlet_L(s - 1j * t, other).value)


# --- Z ----------------------------------------------------------------------

@lru_cache(maxsize=64)
def _h_grid(chi):
    """T[a1, a2, a3, rho] = H_chi(a1, a2, a3, rho) over residues mod q."""
    q = chi.modulus
    n = np.arange(q)
    kernel = roots_of_unity(q)[np.outer(n, n) % q]
    profiles = np.array([[[_h_profile(chi, a1, a2, rho) for rho in range(q)]
                          for a2 in range(q)] for a1 in range(q)])
    grid = np.ascontiguousarray(np.moveaxis(profiles @ kernel, 3, 2))
    grid.setflags(write=False)
    return grid


def _coprime_pair_weights(q, s1, s4, M, R):
    """D[a, b] = sum over m <= M, r <= R, (m, r) = 1, m = a, r = b mod q of m^-s1 r^-s4."""
    out = np.zeros((q, q), dtype=complex)
    top = min(M, R)
    for e, mu in enumerate(sieve.mobiusrange(1, top + 1), start=1):
        if mu == 0:
            continue
        m = np.arange(1, M // e + 1)
        r = np.arange(1, R // e + 1)
        left = _bin(e * m, _powers(m, s1), q)
        right = _bin(e * r, _powers(r, s4), q)
        out += mu * _powers(np.array([e]), s1 + s4)[0] * np.outer(left, right)
    return out


def z_truncated(chi, s, caps):
    """
    Partial sum of H_chi(m1, m2, m3, r) m1^-s1 m2^-s2 m3^-s3 r^-s4 over m_j <= M, r <= R
    with (m1, r) = 1. The tail certificate uses |H_chi| <= q^2.
    """
    s = tuple(complex(z) for z in s)
    _guard(s)
    M, R = caps
    q = chi.modulus
    grid = _h_grid(chi)
    pair = _coprime_pair_weights(q, s[0], s[3], M, R)
    m = np.arange(1, M + 1)
    second = _bin(m, _powers(m, s[1]), q)
    third = _bin(m, _powers(m, s[2]), q)
    value = finite(np.einsum('abcd,ad,b,c->', grid, pair, second, third))

    full, partial = 1.0, 1.0
    for z, cap in zip(s, (M, M, M, R)):
        full *= float(mpmath.zeta(z.real))
        partial *= float(np.sum(np.arange(1, cap + 1, dtype=float) ** -z.real))
    return ZEvaluation(s, (M, R), value, q * q * max(full - partial, 0.0))


# --- Z_fin ------------------------------------------------------------------

def _zfin_from_weights(chi, pair, second, third):
    """
    Z_fin(psi) for every psi from residue-class weights of (m1, r), m2 and m3.
    Only residues carrying weight are visited.
    """
    total = np.zeros(euler_phi(chi.modulus), dtype=complex)
    middle, last = np.flatnonzero(second), np.flatnonzero(third)
    for a, d in zip(*np.nonzero(pair)):
        for b in middle:
            for c in last:
                total += pair[a, d] * second[b] * third[c] * H_hat_all(chi, a, b, c, d)
    return total


def zfin_truncated(chi, s, cap):
    """(Z_fin(psi) for all psi, tail) over m1, m2, m3, r | q^infinity, each <= cap, (m1, r) = 1."""
    s = tuple(complex(z) for z in s)
    q = chi.modulus
    grid = np.array(q_infinity_divisors(q, cap))
    coprime = np.gcd.outer(grid, grid) == 1
    pair = np.zeros((q, q), dtype=complex)
    weights = np.where(coprime, np.outer(_powers(grid, s[0]), _powers(grid, s[3])), 0)
    np.add.at(pair, (grid[:, None] % q, grid[None, :] % q), weights)
    second = _bin(grid, _powers(grid, s[1]), q)
    third = _bin(grid, _powers(grid, s[2]), q)
    values = _zfin_from_weights(chi, pair, second, third)

    full = math.prod(1.0 / (1.0 - p ** -z.real) for z in s for p in factorize(q).primes)
    partial = math.prod(float(np.sum(grid.astype(float) ** -z.real)) for z in s)
    return values, euler_phi(q) * q * q * max(full - partial, 0.0)


def zfin_local(chi, s):
    """
    Exact Z_fin(psi) for q = p^k. Exponents a >= k fall into one residue class
    (m = 0 mod q) whose weight is the geometric series p^(-k s) / (1 - p^-s).
    """
    s = tuple(complex(z) for z in s)
    q = chi.modulus
    fac = factorize(q)
    if not fac.is_prime_power:
        raise DomainError(f"local Z_fin needs a prime-power modulus, got {q}")
    p, k = fac.factors[0]
    classes = np.array([p ** a for a in range(k + 1)])

    def class_weights(z):
        w = np.array([p ** (-a * z) for a in range(k + 1)], dtype=complex)
        w[k] /= 1 - p ** -z
        return w

    first, fourth = class_weights(s[0]), class_weights(s[3])
    pair = np.zeros((q, q), dtype=complex)
    for a in range(k + 1):
        for b in range(k + 1):
            if a and b:
                continue
            pair[classes[a] % q, classes[b] % q] += first[a] * fourth[b]
    second = _bin(classes, class_weights(s[1]), q)
    third = _bin(classes, class_weights(s[2]), q)
    return _zfin_from_weights(chi, pair, second, third)


def _zeta_away_from(q, s):
    """zeta^(q)(s): zeta(s) with the Euler factors at p | q removed."""
    out = complex(mpmath.zeta(s))
    for p in factorize(q).primes:
        out *= 1 - p ** -s
    return out


def verify_Z_factorization(chi, s, caps):
    """
    z_truncated against phi(q)^-1 sum over psi of
    L(s1, psi) L(s2, psi) L(s3, psi) L(s4, conj psi) Z_fin(psi) / zeta^(q)(s1 + s4),
    every series truncated; passes when the gap is within both tail certificates.
    """
    s = tuple(complex(z) for z in s)
    _guard(s)
    M, R = caps
    q = chi.modulus
    z = z_truncated(chi, s, caps)
    if factorize(q).is_prime_power:
        fin, fin_tail = zfin_local(chi, s), 0.0
    else:
        fin, fin_tail = zfin_truncated(chi, s, max(M, R))
    zeta_q = _zeta_away_from(q, s[0] + s[3])

    chars, _ = character_table(q)
    total, tail = 0j, 0.0
    for psi, zf in zip(chars, fin):
        factors = [dirichlet_series_partial(psi, s[0], M), dirichlet_series_partial(psi, s[1], M),
                   dirichlet_series_partial(psi, s[2], M),
                   dirichlet_series_partial(conjugate(psi), s[3], R),
                   (1 / zeta_q, 0.0), (zf, fin_tail)]
        total += math.prod(v for v, _ in factors)
        tail += (math.prod(abs(v) + d for v, d in factors) - math.prod(abs(v) for v, _ in factors))
    phi = euler_phi(q)
    right = total / phi
    params = {'q': q, 'chi': chi.label, 'M': M, 'R': R, 's': str(s)}
    return SumReport.compare('Z-factorization', params, z.value, right,
                             z.tail_estimate + tail / phi)


# --- Z_fin bounds -----------------------------------------------------------

def _geometric_mass(p, k, sigma):
    """S(sigma) = sum over a >= 0 of min(p^a, p^k) p^(-a sigma)."""
    head = sum(p ** (a * (1 - sigma)) for a in range(k))
    return head + p ** k * p ** (-k * sigma) / (1 - p ** -sigma)


def zfin_bound_scan(chi, sigmas, threshold=1.0, per_term=None):
    """Per-psi checks of |Z_fin| on the diagonal s = (sigma, sigma, sigma, sigma), q = p^k, k <= 3."""
    q = chi.modulus
    fac = factorize(q)
    if not fac.is_prime_power:
        raise DomainError(f"Z_fin bounds need a prime-power modulus, got {q}")
    p, k = fac.factors[0]
    if k > 3:
        raise PreconditionError(f"k = {k} exceeds 3")
    if not is_primitive(chi):
        raise DomainError(f"character {chi.label} mod {q} is not primitive")
    chars, _ = character_table(q)
    row = _g_row(chi)
    reports = []
    for sigma in sigmas:
        if not 0.5 < sigma <= 2:
            raise PreconditionError(f"sigma = {sigma} is outside (1/2, 2]")
        fin = zfin_local(chi, (sigma,) * 4)
        mass = _geometric_mass(p, k, sigma)
        scale = tolerance(q ** 3 * (k + 1) ** 4, magnitude=mass ** 4, per_term=per_term)
        for psi, value in zip(chars, fin):
            f = conductor(psi)
            params = {'q': q, 'chi': chi.label, 'psi': psi.label, 'sigma': sigma}
            if f == q:
                expected = gauss_sum(conjugate(psi)) * row[_char_index(psi)]
                reports.append(SumReport.compare('zfin-primitive', params, value, expected, scale))
            elif f == 1:
                limit = q * mass + mass ** 3
                params.update(hypothesis_met=sigma > 1, ratio=abs(value) / limit)
                reports.append(SumReport.bound('zfin-trivial', params, abs(value), limit, scale))
            else:
                j = valuation(f, p)
                limit = (p ** (2 * k - j / 2 - (k - j) * sigma)
                         + p ** (3 * k - 1.5 * j - 3 * (k - j) * sigma))
                params.update(j=j, ratio=abs(value) / limit)
                reports.append(SumReport.bound('zfin-intermediate', params, abs(value),
                                               threshold * limit, scale, soft=(k, j) != (2, 1)))
    return reports


def _zfin_cell(q, chi_exponents, sigmas, threshold, per_term):
    return zfin_bound_scan(DirichletCharacter(q, chi_exponents), sigmas, threshold, per_term)


def scan_zfin(moduli, sigmas, threshold=1.0, jobs=1, per_term=None, quiet=True):
    cells = [(q, chi.exponents, tuple(sigmas), threshold, per_term)
             for q in moduli for chi in primitive_characters(q)]
    scan = ParameterScan("Z_fin bounds", _zfin_cell, cells, jobs, quiet)
    scan.run()
    return scan


def _factorization_cell(q, chi_exponents, s, caps):
    chi = DirichletCharacter(q, chi_exponents)
    eisenstein = EisensteinParams(principal_character(1), primitivize(power(chi, 2)))
    return [verify_Z_factorization(chi, (s,) * 4, (caps, caps)),
            verify_eisenstein_Lfactorization(eisenstein, chi, s, caps)]


def scan_factorizations(moduli, s=3.0, caps=1000, jobs=1, quiet=True):
    """Z and Eisenstein factorization checks for every primitive chi mod each q."""
    cells = [(q, chi.exponents, complex(s), caps)
             for q in moduli for chi in primitive_characters(q)]
    scan = ParameterScan("Dirichlet series factorizations", _factorization_cell, cells, jobs, quiet)
    scan.run()
    return scan
