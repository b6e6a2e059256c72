import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from sympy import divisors, mobius, divisor_count

from src.errors import DomainError
from src.residues import (
    DirichletCharacter, character_table, conductor, conjugate, enumerate_all,
    factorize, finite, inverse_table, is_prime_power, is_primitive, primitive_characters, primitivize,
    roots_of_unity, tolerance, valuation,
)
from src.scanner import ParameterScan

CORE_KEYS = ('q', 'chi', 'psi', 'm1', 'm2', 'm3', 'r')


def _plain(value):
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        return float(value)
    return str(value)


def _label_key(label):
    body = str(label).strip("[]")
    return tuple(int(x) for x in body.split(",") if x != "")


@dataclass
class SumReport:
    identity: str
    params: dict
    left: complex
    right: complex
    residual: float
    scale: float
    passed: bool
    soft: bool = False

    def __post_init__(self):
        self.params = {str(k): _plain(v) for k, v in self.params.items()}
        self.left = complex(self.left)
        self.right = complex(self.right)
        self.residual = float(self.residual)
        self.scale = float(self.scale)
        self.passed = bool(self.passed)
        self.soft = bool(self.soft)

    @classmethod
    def compare(cls, identity, params, left, right, scale, soft=False):
        residual = abs(complex(left) - complex(right))
        return cls(identity, params, left, right, residual, scale, residual <= scale, soft)

    @classmethod
    def bound(cls, identity, params, value, limit, scale=0.0, soft=False):
        """One-sided check value <= limit (+ scale)."""
        residual = max(0.0, float(value) - float(limit))
        return cls(identity, params, value, limit, residual, scale, residual <= scale, soft)

    def sort_key(self):
        p = self.params
        core = (
            p.get('q', -1),
            _label_key(p.get('chi', '')),
            _label_key(p.get('psi', '')),
            p.get('m1', -1), p.get('m2', -1), p.get('m3', -1), p.get('r', -1),
        )
        rest = tuple(sorted((k, repr(v)) for k, v in p.items() if k not in CORE_KEYS))
        return core + (self.identity, rest)

    def param_string(self):
        return " ".join(f"{k}={v}" for k, v in sorted(self.params.items()))

    def to_row(self):
        row = dict(self.params)
        row.update({
            'identity': self.identity,
            'left_re': self.left.real, 'left_im': self.left.imag,
            'right_re': self.right.real, 'right_im': self.right.imag,
            'residual': self.residual,
            'scale': self.scale,
            'passed': self.passed,
            'soft': self.soft,
        })
        return row


# --- Classical sums ---------------------------------------------------------

def gauss_sum(chi):
    q = chi.modulus
    return finite(np.dot(chi.values, roots_of_unity(q)))


@lru_cache(maxsize=65536)
def ramanujan_sum(q, n):
    """R_q(n) via sum over d | (q, n) of d * mu(q/d); exact integer."""
    g = math.gcd(q, n)
    return int(sum(d * mobius(q // d) for d in divisors(g)))


def ramanujan_sum_direct(q, n):
    y = np.arange(q)
    units = np.gcd(y, q) == 1
    return float(np.sum(roots_of_unity(q)[(n * y[units]) % q]).real)


def kloosterman_twisted(psi, m, n, c):
    """S_psi(m, n; c) = sum over units y of conj(psi(y)) e_c(m y + n y^{-1})."""
    if psi.modulus != c:
        raise DomainError(f"character modulus {psi.modulus} differs from c = {c}; induce first")
    y = np.arange(c)
    inv = inverse_table(c)
    units = inv >= 0
    y, ybar = y[units], inv[units]
    phases = roots_of_unity(c)[(m * y + n * ybar) % c]
    return finite(np.dot(np.conj(psi.values[y]), phases))


def weil_bound(psi, m, n, c):
    g = math.gcd(math.gcd(m, n), c)
    return math.sqrt(g) * int(divisor_count(c)) * math.sqrt(c) * math.sqrt(conductor(psi))


def gauss_sum_imprimitive(psi, n):
    """
    sum over v mod q of e_q(n v) conj(psi(v)), q = p^k, psi of conductor p^j.

    Equals p^{k-j} tau(conj psi*) [p^{k-j} | n] psi*(n / p^{k-j}), where psi*
    is the primitive character inducing psi.
    """
    q = psi.modulus
    if not is_prime_power(q):
        raise DomainError(f"modulus {q} is not a prime power")
    if psi.is_principal:
        return ramanujan_sum(q, n)
    star = primitivize(psi)
    drop = q // star.modulus
    if n % drop:
        return 0j
    return drop * gauss_sum(conjugate(star)) * star(n // drop)


def partial_progression_sum(chi, a, d):
    """sum over t mod q, t = a mod d of chi(t)."""
    q = chi.modulus
    if q % d:
        raise DomainError(f"{d} does not divide {q}")
    t = (a + d * np.arange(q // d)) % q
    return finite(np.sum(chi.values[t]))


def progression_pair_sum(chi, a):
    """sum over t mod p^k, t = a mod p of chi(t) conj(chi(t+1))."""
    q = chi.modulus
    p = factorize(q).factors[0][0]
    t = (a + p * np.arange(q // p)) % q
    return finite(np.sum(chi.values[t] * np.conj(chi.values[(t + 1) % q])))


def linear_fractional_sum(chi, a, b, c, d):
    """sum over t mod q of chi(a t + b) conj(chi(c t + d))."""
    q = chi.modulus
    t = np.arange(q)
    return finite(np.sum(chi.values[(a * t + b) % q] * np.conj(chi.values[(c * t + d) % q])))


def linear_fractional_closed_form(chi, a, b, c, d):
    q = chi.modulus
    if math.gcd(math.gcd(a, c), q) != 1:
        raise DomainError("closed form needs gcd(a, c, q) = 1")
    return chi(a) * np.conj(chi(c)) * ramanujan_sum(q, a * d - b * c)


# --- g(chi, psi) ------------------------------------------------------------

@lru_cache(maxsize=512)
def _g_kernel(chi):
    """W[n] = sum over ut - 1 = n of A(t) B(u), A(t) = chi(t) conj chi(t+1), B = conj A."""
    q = chi.modulus
    t = np.arange(q)
    row = chi.values * np.conj(chi.values[(t + 1) % q])
    idx = (np.outer(t, t) - 1) % q
    weights = np.outer(row, np.conj(row))
    kernel = (np.bincount(idx.ravel(), weights=weights.real.ravel(), minlength=q)
              + 1j * np.bincount(idx.ravel(), weights=weights.imag.ravel(), minlength=q))
    kernel.setflags(write=False)
    return kernel


def _require_primitive(chi):
    if not is_primitive(chi):
        raise DomainError(f"character {chi.label} mod {chi.modulus} is not primitive")


def g_sum(chi, psi):
    """g(chi, psi) = sum over t, u of chi(t) conj chi(t+1) conj chi(u) chi(u+1) psi(ut - 1)."""
    _require_primitive(chi)
    if psi.modulus != chi.modulus:
        raise DomainError(f"moduli differ: {chi.modulus} vs {psi.modulus}")
    return finite(np.dot(_g_kernel(chi), psi.values))


def g_sum_all(chi):
    """g(chi, psi) for every psi mod q, in enumerate_all order."""
    _require_primitive(chi)
    _, table = character_table(chi.modulus)
    return table @ _g_kernel(chi)


def g_sum_trivial_psi(chi):
    """Single-loop evaluation of g(chi, psi_0) for prime-power moduli."""
    _require_primitive(chi)
    q = chi.modulus
    fac = factorize(q)
    if not fac.is_prime_power:
        raise DomainError(f"modulus {q} is not a prime power")
    if fac.factors[0][1] >= 2:
        return 0j
    t = np.arange(q)
    row = chi.values * np.conj(chi.values[(t + 1) % q])
    inv = inverse_table(q)
    units = inv >= 0
    return finite(1 - np.sum(row[units] * np.conj(row[inv[units]])))


def intermediate_sum(chi, psi):
    """
    sum over u, y mod p^j of psi(uy) chi(1 + p^{k-j} y) chi(1 - p^{k-j} u)
    conj chi(1 + uy p^{2(k-j)}) for chi of conductor p^k, psi of conductor p^j.
    """
    p, k, j = _intermediate_shape(chi, psi)
    q, pj, step = chi.modulus, p ** j, p ** (k - j)
    star = primitivize(psi)
    y = np.arange(pj)
    uy = np.outer(y, y)
    vals = chi.values
    terms = (star.values[uy % pj]
             * vals[(1 + step * y) % q][None, :]
             * vals[(1 - step * y) % q][:, None]
             * np.conj(vals[(1 + step * step * uy) % q]))
    return finite(np.sum(terms))


def _intermediate_shape(chi, psi):
    q = chi.modulus
    fac = factorize(q)
    if not fac.is_prime_power:
        raise DomainError(f"modulus {q} is not a prime power")
    p, k = fac.factors[0]
    if conductor(chi) != q:
        raise DomainError(f"chi must have conductor {q}")
    f = conductor(psi)
    if psi.modulus not in (q, f) or q % f:
        raise DomainError(f"psi of modulus {psi.modulus} is not a character mod {q}")
    j = valuation(f, p) if f > 1 else 0
    if not 1 <= j < k:
        raise DomainError(f"psi conductor p^{j} outside 1 <= j < {k}")
    return p, k, j


# --- Scans ------------------------------------------------------------------

def _gbound_cell(q, chi_exponents, threshold, per_term):
    chi = DirichletCharacter(q, chi_exponents)
    chars, _ = character_table(q)
    values = g_sum_all(chi)
    limit = q * q if threshold is None else threshold * q
    reports = []
    for psi, g in zip(chars, values):
        ratio = abs(g) / q
        params = {'q': q, 'chi': chi.label, 'psi': psi.label, 'ratio': ratio}
        reports.append(SumReport.bound('g-bound', params, abs(g), limit,
                                       scale=tolerance(q * q, per_term=per_term)))
    return reports


def scan_g_bound(primes, mode="prime", threshold=None, jobs=1, per_term=None, quiet=True):
    """
    |g(chi, psi)| / q over all primitive chi and all psi, q = p or p^2.

    threshold bounds the ratio; None asserts only |g| <= q^2 for q = p and
    the proved |g| <= 2q for q = p^2.
    """
    if mode not in ("prime", "prime-square"):
        raise DomainError(f"unknown g-bound mode {mode!r}")
    if threshold is None and mode == "prime-square":
        threshold = 2.0
    cells = []
    for p in primes:
        q = p if mode == "prime" else p * p
        cells.extend((q, chi.exponents, threshold, per_term) for chi in primitive_characters(q))
    scan = ParameterScan(f"g-bound ({mode})", _gbound_cell, cells, jobs, quiet)
    scan.run()
    return scan


def _intermediate_cell(q, chi_exponents, j, threshold, soft, per_term):
    chi = DirichletCharacter(q, chi_exponents)
    p, k = factorize(q).factors[0]
    if threshold is None:
        threshold = float(p ** j)
    reports = []
    for psi in enumerate_all(q):
        if conductor(psi) != p ** j:
            continue
        value = intermediate_sum(chi, psi)
        ratio = abs(value) / p ** j
        params = {'q': q, 'chi': chi.label, 'psi': psi.label, 'k': k, 'j': j, 'ratio': ratio}
        reports.append(SumReport.bound('intermediate-sum', params, ratio, threshold,
                                       scale=tolerance(p ** (2 * j), per_term=per_term), soft=soft))
    return reports


def scan_intermediate(primes, k, j, threshold=None, soft=None, jobs=1, per_term=None, quiet=True):
    """
    Ratios |S(chi, psi)| / p^j of the intermediate sum.

    For (k, j) = (2, 1) the sum is a product of two Gauss sums of modulus
    sqrt(p), so the ratio is exactly 1 and is asserted; other shapes are soft.
    """
    if not 1 <= j < k:
        raise DomainError(f"need 1 <= j < k, got k={k}, j={j}")
    proven = (k, j) == (2, 1)
    if soft is None:
        soft = not proven
    if threshold is None and proven:
        threshold = 1.0
    cells = [(p ** k, chi.exponents, j, threshold, soft, per_term)
             for p in primes for chi in primitive_characters(p ** k)]
    scan = ParameterScan(f"intermediate sum (k={k}, j={j})", _intermediate_cell, cells, jobs, quiet)
    scan.run()
    return scan
