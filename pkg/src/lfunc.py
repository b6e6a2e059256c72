import math
from dataclasses import dataclass

import numpy as np
import mpmath
import pandas as pd

from src.config import EM_DEPTH, EM_TERMS
from src.errors import DomainError, NumericalError, PoleError, PreconditionError
from src.expsums import SumReport, gauss_sum
from src.residues import (
    DirichletCharacter, character_table, conductor, conjugate, finite, is_cube_free, is_primitive,
    parity, primitive_characters,
)
from src.scanner import ParameterScan


@dataclass(frozen=True)
class LValue:
    s: complex
    chi: DirichletCharacter
    value: complex
    method: str
    error_budget: float


@dataclass(frozen=True)
class VWeightParams:
    j: int = 1
    delta: int = 0
    sigma: float = 1.2
    step: float = 0.02

    def __post_init__(self):
        if self.j not in (1, 2):
            raise DomainError(f"j must be 1 or 2, got {self.j}")
        if self.delta not in (0, 1):
            raise DomainError(f"delta must be 0 or 1, got {self.delta}")
        if self.sigma <= 0 or self.step <= 0:
            raise DomainError("contour abscissa and step must be positive")

    def cutoff(self, sigma, log_y):
        """|u| beyond which |y^-s G_j(s)| < 1e-18 on Re(s) = sigma."""
        excess = max(0.0, -sigma * log_y)
        return math.sqrt(sigma ** 2 + (45.0 + excess) / (2 * self.j)) + 1.0


# V-weights for y below this are taken on a line left of s = 0.
SHIFT_BELOW = 1e-3


# --- Hurwitz zeta -----------------------------------------------------------

def _euler_maclaurin(s, a, terms, depth):
    """(values, first omitted correction) of zeta(s, a) for an array of a > 0."""
    n = np.arange(terms)
    values = np.exp(-s * np.log(n[None, :] + a[:, None])).sum(axis=1)
    x = terms + a
    values = values + np.power(x, 1 - s) / (s - 1) + np.power(x, -s) / 2

    rising = s
    power = np.power(x, -s - 1)
    for k in range(1, depth + 2):
        term = float(mpmath.bernoulli(2 * k)) / math.factorial(2 * k) * rising * power
        if k == depth + 1:
            return values, np.abs(term)
        values = values + term
        rising *= (s + 2 * k - 1) * (s + 2 * k)
        power = power / (x * x)


def hurwitz_zeta(s, a, terms=None, depth=None):
    """
    zeta(s, a) = sum over n >= 0 of (n + a)^-s by Euler-Maclaurin summation.

    `a` may be a scalar or an array; the result has the same shape.
    """
    s = complex(s)
    if s == 1:
        raise PoleError("zeta(s, a) has a pole at s = 1")
    arr = np.atleast_1d(np.asarray(a, dtype=float))
    if np.any(arr <= 0):
        raise DomainError("Hurwitz parameter must be positive")
    values, _ = _euler_maclaurin(s, arr, terms or EM_TERMS, depth or EM_DEPTH)
    return complex(values[0]) if np.ndim(a) == 0 else values


# --- Dirichlet L-functions --------------------------------------------------

def dirichlet_L(s, chi, terms=None, depth=None):
    """L(s, chi) = q^-s sum over a <= q of chi(a) zeta(s, a / q)."""
    s = complex(s)
    q = chi.modulus
    a = np.arange(1, q + 1)
    weights = chi.values[a % q]
    if s == 1:
        if chi.is_principal:
            raise PoleError(f"L(s, chi) for principal chi mod {q} has a pole at s = 1")
        value = -sum(complex(w) * complex(mpmath.digamma(int(x) / q))
                     for x, w in zip(a, weights) if w != 0) / q
        return LValue(s, chi, finite(value), "digamma", 1e-15 * q)

    units = weights != 0
    values, errors = _euler_maclaurin(s, a[units] / q, terms or EM_TERMS, depth or EM_DEPTH)
    scale = q ** -s
    value = finite(scale * np.sum(weights[units] * values))
    budget = abs(scale) * float(np.sum(errors)) + np.finfo(float).eps * max(abs(value), 1.0)
    return LValue(s, chi, value, "euler_maclaurin", budget)


def dirichlet_L_all(s, q):
    """L(s, chi) for every chi mod q from one Hurwitz vector, rows in enumerate_all order."""
    s = complex(s)
    if s == 1:
        raise PoleError("L(1, chi) for the principal character is infinite")
    _, table = character_table(q)
    a = np.arange(1, q + 1)
    values, _ = _euler_maclaurin(s, a / q, EM_TERMS, EM_DEPTH)
    return q ** -s * (table[:, a % q] @ values)


def root_number(chi):
    """epsilon(chi) = tau(chi) / (i^delta sqrt(q)) for primitive chi."""
    if not is_primitive(chi):
        raise DomainError(f"root number needs a primitive character, got {chi.label} mod {chi.modulus}")
    return gauss_sum(chi) / (1j ** parity(chi) * math.sqrt(chi.modulus))


def dirichlet_L_derivative(s, chi):
    """L'(s, chi) = q^-s sum over a <= q of chi(a) (zeta'(s, a / q) - log(q) zeta(s, a / q))."""
    s = complex(s)
    q = chi.modulus
    if s == 1:
        raise PoleError("L'(s, chi) is not taken at s = 1")
    slope, level = mpmath.mpc(0), mpmath.mpc(0)
    for a in range(1, q + 1):
        w = complex(chi.values[a % q])
        if w == 0:
            continue
        x = mpmath.mpf(a) / q
        slope += w * mpmath.zeta(s, x, 1)
        level += w * mpmath.zeta(s, x)
    return finite(complex(mpmath.power(q, -s) * (slope - mpmath.log(q) * level)))


def _gamma_pole(z):
    """n when z = -n for an integer n >= 0, else None."""
    if z.imag != 0 or z.real > 0 or z.real != math.floor(z.real):
        return None
    return int(-z.real)


def completed_L(s, chi):
    """
    Lambda(s, chi) = (q / pi)^((s + delta) / 2) Gamma((s + delta) / 2) L(s, chi).

    At a pole -n of Gamma the trivial zero of L cancels it and
    Lambda(s, chi) = (q / pi)^-n 2 (-1)^n / n! L'(s, chi).
    """
    s = complex(s)
    q = chi.modulus
    half = (s + parity(chi)) / 2
    n = _gamma_pole(half)
    if n is None:
        factor = complex(mpmath.power(q / mpmath.pi, half) * mpmath.gamma(half))
        return finite(factor * dirichlet_L(s, chi).value)
    if q == 1 and n == 0:
        raise PoleError("Lambda(s) for zeta has a pole at s = 0")
    factor = (q / math.pi) ** -n * 2 * (-1) ** n / math.factorial(n)
    return finite(factor * dirichlet_L_derivative(s, chi))


def verify_functional_equation(chi, s):
    if not is_primitive(chi):
        raise DomainError(f"functional equation needs a primitive character, got {chi.label} mod {chi.modulus}")
    s = complex(s)
    left = completed_L(s, chi)
    right = root_number(chi) * completed_L(1 - s, conjugate(chi))
    params = {'q': chi.modulus, 'chi': chi.label, 's': str(s)}
    return SumReport.compare('functional-equation', params, left, right, 1e-8 * max(1.0, abs(left)))


# --- Approximate functional equation weights --------------------------------

def _log_gamma_r(z):
    return -z / 2 * mpmath.log(mpmath.pi) + mpmath.loggamma(z / 2)


def _v_sum(params, y, t, step, sigma):
    j, shift = params.j, mpmath.mpf(1) / 2 + params.delta
    t = mpmath.mpc(t)
    it = 1j * t
    base = _log_gamma_r(shift + it) + _log_gamma_r(shift - it)
    log_y = mpmath.log(y)
    steps = int(math.ceil(params.cutoff(sigma, math.log(y)) / step))
    total = mpmath.mpf(0)
    for n in range(-steps, steps + 1):
        s = mpmath.mpc(sigma, n * step)
        log_term = (-s * log_y
                    + j * (_log_gamma_r(shift + s + it) + _log_gamma_r(shift + s - it) - base)
                    + 2 * j * s * s - mpmath.log(s))
        total += mpmath.exp(log_term)
    return total * step / (2 * mpmath.pi)


def _left_abscissa(params, t):
    """Midpoint between s = 0 and the first Gamma_R pole to its left, or None if they touch."""
    room = 0.5 + params.delta - abs(complex(t).imag)
    return -room / 2 if room > 0 else None


def v_weight(params, y, t):
    """
    V_j(y, t) = (2 pi i)^-1 integral over Re(s) = sigma of
    y^-s gamma(1/2 + s + it) gamma(1/2 + s - it) / (gamma(1/2 + it) gamma(1/2 - it)) G_j(s) ds / s
    with gamma(z) = Gamma_R(z + delta)^j and G_j(s) = exp(2 j s^2), by the trapezoid rule.

    Below SHIFT_BELOW the line moves left of s = 0 and the residue 1 there is added back.
    """
    if y <= 0:
        raise DomainError(f"y must be positive, got {y}")
    t = complex(t)
    for z in (0.5 + params.delta + 1j * t, 0.5 + params.delta - 1j * t):
        if abs(z.imag) < 1e-14 and z.real <= 0 and abs(z.real / 2 - round(z.real / 2)) < 1e-14:
            raise DomainError(f"Gamma_R has a pole at {z}")

    sigma, residue = params.sigma, 0
    left = _left_abscissa(params, t) if y < SHIFT_BELOW else None
    if left is not None:
        sigma, residue = left, 1
    with mpmath.workdps(30):
        fine = _v_sum(params, y, t, params.step, sigma)
        coarse = _v_sum(params, y, t, 2 * params.step, sigma)
        gap = float(abs(fine - coarse))
        value = residue + complex(fine)
    if gap > 1e-10 * max(1.0, abs(value)):
        raise NumericalError("V-weight quadrature did not settle",
                             {'y': y, 't': t, 'sigma': sigma, 'step': params.step, 'gap': gap})
    return value


V_GRID_Y = (0.1, 0.5, 1.0, 3.0, 10.0)
V_GRID_T = (0.0, 0.5, 1.0, 2.0)
V_LIMIT_Y = 1e-20


def verify_v_weights(params, ys=V_GRID_Y, ts=V_GRID_T):
    """Evenness in t, V -> 1 as y -> 0 and independence of the contour abscissa."""
    far = VWeightParams(params.j, params.delta, params.sigma + 0.8, params.step)
    base = {'j': params.j, 'delta': params.delta}
    reports = []
    for t in ts:
        limit = v_weight(params, V_LIMIT_Y, t)
        reports.append(SumReport.compare('v-weight-limit', dict(base, y=V_LIMIT_Y, t=t), limit, 1.0, 1e-3))
        for y in ys:
            value = v_weight(params, y, t)
            cell = dict(base, y=y, t=t)
            reports.append(SumReport.compare('v-weight-even', cell, value, v_weight(params, y, -t), 1e-8))
            reports.append(SumReport.compare('v-weight-contour', cell, value, v_weight(far, y, t), 1e-8))
    return reports


# --- Scans ------------------------------------------------------------------

def _weyl_cell(q, t, threshold):
    chars, _ = character_table(q)
    values = np.abs(dirichlet_L_all(0.5 + 1j * t, q)) / q ** (1 / 6)
    primitive = [i for i, chi in enumerate(chars) if conductor(chi) == q]
    best = max(primitive, key=lambda i: (values[i], -i))
    ratio = float(values[best])
    params = {'q': q, 'chi': chars[best].label, 't': t, 'ratio': ratio}
    if threshold is None:
        return [SumReport('weyl-ratio', params, ratio, ratio, 0.0, 0.0, True, soft=True)]
    return [SumReport.bound('weyl-ratio', params, ratio, threshold)]


def weyl_ratio_scan(q_max, t=0.0, threshold=None, jobs=1, quiet=True):
    """max over primitive chi of |L(1/2 + it, chi)| / q^(1/6), cube-free q <= q_max."""
    cells = [(q, float(t), threshold) for q in range(1, q_max + 1)
             if is_cube_free(q) and q % 4 != 2]
    scan = ParameterScan(f"Weyl ratios (t={t})", _weyl_cell, cells, jobs, quiet)
    scan.run()
    return scan


def weyl_ratio_table(reports):
    rows = [{'q': r.params['q'], 'chi': r.params['chi'], 'ratio': r.params['ratio']}
            for r in reports if r.identity == 'weyl-ratio']
    return pd.DataFrame(rows, columns=['q', 'chi', 'ratio'])


def sixth_moment(chi, T, panels=8):
    """integral over [-T, T] of |L(1/2 + it, chi)|^6 dt."""
    if T > 10:
        raise PreconditionError(f"T = {T} is beyond 10")
    if T <= 0:
        return 0.0

    def integrand(t):
        return abs(dirichlet_L(0.5 + 1j * float(t), chi).value) ** 6

    points = [float(x) for x in np.linspace(-T, T, panels + 1)]
    value, error = mpmath.quad(integrand, points, error=True)
    value, error = float(value), float(error)
    if error > 1e-6 * max(1.0, value):
        raise NumericalError("sixth-moment quadrature did not converge",
                             {'q': chi.modulus, 'T': T, 'value': value, 'error': error})
    return value


def _functional_equation_cell(q, chi_exponents, s_values):
    chi = DirichletCharacter(q, chi_exponents)
    return [verify_functional_equation(chi, s) for s in s_values]


def scan_functional_equation(moduli, s_values, jobs=1, quiet=True):
    cells = [(q, chi.exponents, tuple(complex(s) for s in s_values))
             for q in moduli for chi in primitive_characters(q)]
    scan = ParameterScan("functional equation", _functional_equation_cell, cells, jobs, quiet)
    scan.run()
    return scan


def _v_weight_cell(j, delta):
    return verify_v_weights(VWeightParams(j=j, delta=delta))


def scan_v_weights(jobs=1, quiet=True):
    cells = [(j, delta) for j in (1, 2) for delta in (0, 1)]
    scan = ParameterScan("V-weights", _v_weight_cell, cells, jobs, quiet)
    scan.run()
    return scan


def _moment_cell(q, chi_exponents, T):
    chi = DirichletCharacter(q, chi_exponents)
    value = sixth_moment(chi, T)
    params = {'q': q, 'chi': chi.label, 'T': T, 'moment': value}
    return [SumReport('sixth-moment', params, value, value, 0.0, 0.0, True, soft=True)]


def scan_sixth_moment(moduli, T, jobs=1, quiet=True):
    """Recorded sixth moments over [-T, T] for every primitive chi mod q."""
    cells = [(q, chi.exponents, float(T)) for q in moduli for chi in primitive_characters(q)]
    scan = ParameterScan(f"sixth moment (T={T})", _moment_cell, cells, jobs, quiet)
    scan.run()
    return scan
