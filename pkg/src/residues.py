import math
import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache, cached_property

import numpy as np
from sympy import factorint, divisors, totient
from sympy.ntheory.modular import crt

from src.config import TABLE_CAP, TOL_PER_TERM
from src.errors import CapacityError, DomainError, NumericalError


# --- Tolerance policy -------------------------------------------------------
# Values are plain Python complex numbers.

def tolerance(terms, magnitude=1.0, per_term=None):
    """Absolute tolerance for a sum of `terms` summands of size <= magnitude."""
    per_term = TOL_PER_TERM if per_term is None else per_term
    return per_term * max(int(terms), 1) * max(float(magnitude), 1.0)


def finite(z):
    z = complex(z)
    if not (math.isfinite(z.real) and math.isfinite(z.imag)):
        raise NumericalError("non-finite value produced", {"value": z})
    return z


# --- Integers ---------------------------------------------------------------

@dataclass(frozen=True)
class Factorization:
    n: int
    factors: tuple

    @property
    def primes(self):
        return tuple(p for p, _ in self.factors)

    @property
    def prime_powers(self):
        return tuple(p ** e for p, e in self.factors)

    @property
    def is_prime_power(self):
        return len(self.factors) == 1

    @property
    def is_cube_free(self):
        return all(e < 3 for _, e in self.factors)


@lru_cache(maxsize=8192)
def factorize(n):
    n = int(n)
    if n < 1:
        raise DomainError(f"cannot factor {n}: positive integer required")
    return Factorization(n, tuple(sorted((int(p), int(e)) for p, e in factorint(n).items())))


def is_prime_power(n):
    return n > 1 and factorize(n).is_prime_power


def is_cube_free(n):
    return factorize(n).is_cube_free


@lru_cache(maxsize=8192)
def euler_phi(n):
    return int(totient(n))


def valuation(n, p):
    """p-adic valuation of a nonzero integer."""
    n, v = abs(int(n)), 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def q_part(n, q):
    """Largest divisor of n supported on the primes of q."""
    out = 1
    for p in factorize(q).primes:
        out *= p ** valuation(n, p)
    return out


def divides_q_infinity(n, q):
    return n >= 1 and q_part(n, q) == n


def q_infinity_divisors(q, cap):
    """Sorted integers <= cap whose prime factors all divide q."""
    out = [1]
    for p in factorize(q).primes:
        grown = []
        for m in out:
            while m <= cap:
                grown.append(m)
                m *= p
        out = grown
    return sorted(m for m in out if m <= cap)


@lru_cache(maxsize=256)
def inverse_table(c):
    """inv[y] = y^{-1} mod c for units y, -1 elsewhere."""
    inv = np.full(c, -1, dtype=np.int64)
    for y in range(c):
        if math.gcd(y, c) == 1:
            inv[y] = pow(y, -1, c) if c > 1 else 0
    inv.setflags(write=False)
    return inv


@lru_cache(maxsize=1024)
def roots_of_unity(n):
    """exp(2*pi*i*k/n) for k < n, with the quarter turns exact."""
    k = np.arange(n)
    roots = np.exp(2j * np.pi * k / n)
    quarter = (4 * k) % n == 0
    roots[quarter] = np.array([1, 1j, -1, -1j])[(4 * k[quarter]) // n]
    roots.setflags(write=False)
    return roots


# --- Unit group -------------------------------------------------------------

@lru_cache(maxsize=None)
def smallest_primitive_root(p, e=1):
    pe = p ** e
    phi = (p - 1) * p ** (e - 1)
    order_primes = sorted(factorint(phi))
    for g in range(2, pe):
        if g % p and all(pow(g, phi // r, pe) != 1 for r in order_primes):
            return g
    return 1


def _local_logs(p, e):
    """Generators, orders and discrete-log tables of (Z/p^e)^x."""
    pe = p ** e
    if p != 2:
        g = smallest_primitive_root(p, e)
        d = (p - 1) * p ** (e - 1)
        table = np.full(pe, -1, dtype=np.int64)
        x = 1
        for k in range(d):
            table[x] = k
            x = x * g % pe
        return (g,), (d,), (table,)
    if e == 1:
        return (), (), ()
    if e == 2:
        table = np.full(4, -1, dtype=np.int64)
        table[1], table[3] = 0, 1
        return (3,), (2,), (table,)
    # (Z/2^e)^x = <-1> x <5>
    half = 2 ** (e - 2)
    sign = np.full(pe, -1, dtype=np.int64)
    five = np.full(pe, -1, dtype=np.int64)
    x = 1
    for y in range(half):
        sign[x], five[x] = 0, y
        sign[pe - x], five[pe - x] = 1, y
        x = x * 5 % pe
    return (pe - 1, 5), (2, half), (sign, five)


@dataclass(frozen=True, eq=False)
class UnitGroupBasis:
    modulus: int
    factorization: Factorization
    generators: tuple
    orders: tuple
    components: tuple
    logs: np.ndarray = field(repr=False)
    units: np.ndarray = field(repr=False)

    @property
    def rank(self):
        return len(self.generators)

    @property
    def phi(self):
        return math.prod(self.orders)

    @property
    def exponent(self):
        return math.lcm(*self.orders) if self.orders else 1

    def dlog(self, a):
        a %= self.modulus
        if not self.units[a]:
            return None
        return tuple(int(x) for x in self.logs[:, a])


@lru_cache(maxsize=512)
def build_unit_basis(q, cap=None):
    q = int(q)
    cap = TABLE_CAP if cap is None else int(cap)
    if q < 1:
        raise DomainError(f"modulus must be positive, got {q}")
    if q > cap:
        raise CapacityError(f"modulus {q} exceeds the discrete-log table cap {cap}")

    fac = factorize(q)
    residues = np.arange(q, dtype=np.int64)
    gens, orders, comps, rows = [], [], [], []
    for p, e in fac.factors:
        pe = p ** e
        for g, d, table in zip(*_local_logs(p, e)):
            lifted = g if pe == q else int(crt([pe, q // pe], [g, 1])[0])
            gens.append(lifted)
            orders.append(d)
            comps.append(pe)
            rows.append(table[residues % pe])

    units = np.gcd(residues, q) == 1
    logs = np.vstack(rows) if rows else np.zeros((0, q), dtype=np.int64)
    logs[:, ~units] = -1
    logs.setflags(write=False)
    units.setflags(write=False)
    return UnitGroupBasis(q, fac, tuple(gens), tuple(orders), tuple(comps), logs, units)


# --- Characters -------------------------------------------------------------

@dataclass(frozen=True)
class DirichletCharacter:
    """Character mod q as an exponent vector against build_unit_basis(q)."""

    modulus: int
    exponents: tuple

    def __post_init__(self):
        basis = build_unit_basis(self.modulus)
        exps = tuple(int(x) for x in self.exponents)
        if len(exps) != basis.rank:
            raise DomainError(
                f"modulus {self.modulus} needs {basis.rank} exponents, got {len(exps)}")
        object.__setattr__(self, "modulus", int(self.modulus))
        object.__setattr__(self, "exponents", tuple(x % d for x, d in zip(exps, basis.orders)))

    @property
    def basis(self):
        return build_unit_basis(self.modulus)

    @property
    def label(self):
        return "[" + ",".join(str(x) for x in self.exponents) + "]"

    @cached_property
    def angles(self):
        """Numerators of chi(a) = e(angle / N), N the group exponent; -1 off units."""
        basis = self.basis
        n = basis.exponent
        if basis.rank:
            weights = np.array([x * (n // d) for x, d in zip(self.exponents, basis.orders)],
                               dtype=np.int64)
            out = (weights @ basis.logs) % n
        else:
            out = np.zeros(self.modulus, dtype=np.int64)
        out[~basis.units] = -1
        out.setflags(write=False)
        return out

    @cached_property
    def values(self):
        roots = roots_of_unity(self.basis.exponent)
        out = np.where(self.angles >= 0, roots[np.clip(self.angles, 0, None)], 0).astype(complex)
        out.setflags(write=False)
        return out

    @property
    def is_principal(self):
        return not any(self.exponents)

    @property
    def order(self):
        return math.lcm(1, *(d // math.gcd(x, d) for x, d in zip(self.exponents, self.basis.orders)))

    def __call__(self, a):
        return char_eval(self, a)


def char_eval(chi, a):
    return complex(chi.values[int(a) % chi.modulus])


def char_angle(chi, a):
    """Exact angle of chi(a) in [0, 1) as a Fraction, or None off the units."""
    k = int(chi.angles[int(a) % chi.modulus])
    if k < 0:
        return None
    return Fraction(k, chi.basis.exponent)


def _from_angles(q, angle_at):
    """Character mod q whose value at each basis generator has the given angle."""
    basis = build_unit_basis(q)
    exps = []
    for g, d in zip(basis.generators, basis.orders):
        x = angle_at(g) * d
        if x.denominator != 1:
            raise DomainError(f"angle {angle_at(g)} is not of order dividing {d}")
        exps.append(int(x))
    return DirichletCharacter(q, tuple(exps))


def principal_character(q):
    return DirichletCharacter(q, (0,) * build_unit_basis(q).rank)


def enumerate_all(q):
    basis = build_unit_basis(q)
    return [DirichletCharacter(q, e) for e in itertools.product(*(range(d) for d in basis.orders))]


def product(chi, psi):
    if chi.modulus != psi.modulus:
        raise DomainError(f"moduli differ: {chi.modulus} vs {psi.modulus}")
    return DirichletCharacter(chi.modulus, tuple(a + b for a, b in zip(chi.exponents, psi.exponents)))


def conjugate(chi):
    return DirichletCharacter(chi.modulus, tuple(-x for x in chi.exponents))


def power(chi, n):
    return DirichletCharacter(chi.modulus, tuple(n * x for x in chi.exponents))


def induce(chi, modulus):
    if modulus % chi.modulus:
        raise DomainError(f"cannot induce from {chi.modulus} to {modulus}")
    return _from_angles(modulus, lambda g: char_angle(chi, g))


def parity(chi):
    return 0 if chi.angles[(chi.modulus - 1) % chi.modulus] == 0 else 1


def conductor(chi):
    basis = chi.basis
    f = 1
    for p, e in basis.factorization.factors:
        idx = [i for i, c in enumerate(basis.components) if c == p ** e]
        xs = [chi.exponents[i] for i in idx]
        if p != 2:
            if xs[0]:
                f *= p ** (e - min(valuation(xs[0], p), e - 1))
        elif e == 2:
            f *= 4 if xs[0] else 1
        elif e >= 3:
            sign, five = xs
            if five:
                f *= 2 ** (e - valuation(five, 2))
            elif sign:
                f *= 4
    return f


def conductor_bruteforce(chi):
    q = chi.modulus
    for d in divisors(q):
        a = 1 + d * np.arange(q // d)
        a = a[np.gcd(a, q) == 1] % q
        if np.all(chi.angles[a] == 0):
            return int(d)
    return q


def is_primitive(chi):
    return conductor(chi) == chi.modulus


def primitivize(chi):
    """The primitive character inducing chi."""
    f, q = conductor(chi), chi.modulus

    def angle_at(g):
        a = g
        while math.gcd(a, q) != 1:
            a += f
        return char_angle(chi, a)

    return _from_angles(f, angle_at)


def primitive_characters(q):
    return [chi for chi in enumerate_all(q) if conductor(chi) == q]


def split_character(chi, q1, q2):
    """(chi1 mod q1, chi2 mod q2) with chi = chi1 * chi2, q1, q2 coprime."""
    if q1 * q2 != chi.modulus or math.gcd(q1, q2) != 1:
        raise DomainError(f"{q1} * {q2} is not a coprime factorisation of {chi.modulus}")

    def lift(g, m, other):
        return int(crt([m, other], [g % m, 1])[0]) if other > 1 else g

    chi1 = _from_angles(q1, lambda g: char_angle(chi, lift(g, q1, q2)))
    chi2 = _from_angles(q2, lambda g: char_angle(chi, lift(g, q2, q1)))
    return chi1, chi2


def combine_characters(chi1, chi2):
    q1, q2 = chi1.modulus, chi2.modulus
    if math.gcd(q1, q2) != 1:
        raise DomainError(f"moduli {q1} and {q2} are not coprime")
    return _from_angles(q1 * q2, lambda g: (char_angle(chi1, g) + char_angle(chi2, g)) % 1)


@lru_cache(maxsize=64)
def character_table(q):
    """(characters, values) with values[i, a] = chars[i](a), rows in enumerate_all order."""
    basis = build_unit_basis(q)
    chars = tuple(enumerate_all(q))
    n = basis.exponent
    if basis.rank:
        exps = np.array([c.exponents for c in chars], dtype=np.int64)
        weights = exps * (n // np.array(basis.orders, dtype=np.int64))
        angles = (weights @ basis.logs) % n
    else:
        angles = np.zeros((1, q), dtype=np.int64)
    values = roots_of_unity(n)[angles] * basis.units
    values.setflags(write=False)
    return chars, values
