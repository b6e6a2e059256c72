import math

import numpy as np
import pytest

from src.errors import DomainError, PreconditionError
from src.hsums import H_chi
from src.lfunc import dirichlet_L
from src.residues import (
    character_table, enumerate_all, factorize, power, primitive_characters, primitivize,
    principal_character,
)
from src.zseries import (
    EisensteinParams, dirichlet_series_partial, eisenstein_central_value, eisenstein_lambda,
    eisenstein_lambda_table, scan_factorizations, scan_zfin, verify_eisenstein_Lfactorization,
    _h_grid, verify_Z_factorization, z_truncated, zfin_bound_scan, zfin_local, zfin_truncated,
)


def _eisenstein_for(chi, t=0.0):
    return EisensteinParams(principal_character(1), primitivize(power(chi, 2)), t)


@pytest.fixture
def legendre7():
    return next(chi for chi in primitive_characters(7) if chi.order == 2)


def test_lambda_small_values(legendre7):
    params = EisensteinParams(principal_character(1), legendre7)
    assert eisenstein_lambda(params, 1) == pytest.approx(1)
    for p in (2, 3, 5, 11, 13):
        assert eisenstein_lambda(params, p) == pytest.approx(np.conj(legendre7(p)) + 1)
    assert eisenstein_lambda(params, -3) == pytest.approx(legendre7(-1) * eisenstein_lambda(params, 3))
    with pytest.raises(DomainError):
        eisenstein_lambda(params, 0)


def test_lambda_is_multiplicative():
    chi2 = primitive_characters(5)[1]
    params = EisensteinParams(principal_character(1), chi2, t=0.4)
    for m, n in [(2, 3), (4, 9), (5, 7), (8, 15)]:
        assert abs(eisenstein_lambda(params, m * n)
                   - eisenstein_lambda(params, m) * eisenstein_lambda(params, n)) < 1e-12


def test_lambda_table_matches_pointwise():
    chi1, chi2 = primitive_characters(3)[0], primitive_characters(5)[2]
    params = EisensteinParams(chi1, chi2, t=0.7)
    table = eisenstein_lambda_table(params, 60)
    for n in range(1, 61):
        assert abs(table[n - 1] - eisenstein_lambda(params, n)) < 1e-12


def test_eisenstein_needs_primitive_data():
    with pytest.raises(DomainError):
        EisensteinParams(principal_character(5), primitive_characters(5)[0])


@pytest.mark.parametrize("q", [5, 7])
def test_eisenstein_factorization(q):
    for chi in primitive_characters(q):
        for t in (0.0, 1.5):
            report = verify_eisenstein_Lfactorization(_eisenstein_for(chi, t), chi, 3.0, 2000)
            assert report.passed, report.param_string()


def test_eisenstein_factorization_single_term():
    chi = primitive_characters(5)[0]
    report = verify_eisenstein_Lfactorization(_eisenstein_for(chi), chi, 2.5, 1)
    assert report.residual == pytest.approx(0, abs=1e-15)


def test_eisenstein_preconditions():
    chi = primitive_characters(5)[0]
    with pytest.raises(PreconditionError):
        verify_eisenstein_Lfactorization(_eisenstein_for(chi), chi, 1.5, 100)
    with pytest.raises(PreconditionError):
        verify_eisenstein_Lfactorization(EisensteinParams(principal_character(1), primitive_characters(7)[0]),
                                         chi, 3.0, 100)
    wrong = next(x for x in primitive_characters(5) if x != primitivize(power(chi, 2)))
    with pytest.raises(PreconditionError):
        verify_eisenstein_Lfactorization(EisensteinParams(principal_character(1), wrong), chi, 3.0, 100)


def test_central_value_is_a_squared_modulus():
    for chi in primitive_characters(7):
        value = eisenstein_central_value(_eisenstein_for(chi), chi)
        expected = abs(dirichlet_L(0.5, chi).value) ** 2
        assert abs(value - expected) < 1e-8


def test_partial_dirichlet_series():
    chi = principal_character(1)
    value, tail = dirichlet_series_partial(chi, 2.0, 1000)
    assert abs(value - math.pi ** 2 / 6) <= tail
    with pytest.raises(PreconditionError):
        dirichlet_series_partial(chi, 1.0, 10)


def test_z_truncated_single_term():
    chi = primitive_characters(7)[1]
    z = z_truncated(chi, (3, 3, 3, 3), (1, 1))
    assert abs(z.value - H_chi(chi, 1, 1, 1, 1)) < 1e-9


@pytest.mark.parametrize("q", [5, 9])
def test_z_truncated_matches_quadruple_loop(q):
    s = (2.5, 3.0, 2.2, 3.5)
    M, R = 4, 3
    chi = primitive_characters(q)[0]
    literal = 0j
    for m1 in range(1, M + 1):
        for r in range(1, R + 1):
            if math.gcd(m1, r) != 1:
                continue
            for m2 in range(1, M + 1):
                for m3 in range(1, M + 1):
                    literal += (H_chi(chi, m1, m2, m3, r)
                                * m1 ** -s[0] * m2 ** -s[1] * m3 ** -s[2] * r ** -s[3])
    assert abs(z_truncated(chi, s, (M, R)).value - literal) < 1e-9


def test_z_truncation_refines():
    chi = primitive_characters(5)[0]
    coarse = z_truncated(chi, (3, 3, 3, 3), (50, 50))
    fine = z_truncated(chi, (3, 3, 3, 3), (400, 400))
    assert fine.tail_estimate < coarse.tail_estimate
    assert abs(fine.value - coarse.value) <= coarse.tail_estimate


def test_z_truncated_guard():
    chi = primitive_characters(5)[0]
    with pytest.raises(PreconditionError):
        z_truncated(chi, (3, 3, 1.5, 3), (10, 10))


@pytest.mark.parametrize("q, cap", [(5, 5 ** 12), (9, 3 ** 20)])
def test_zfin_local_matches_truncation(q, cap):
    s = (2.5, 2.0, 3.0, 2.25)
    chi = primitive_characters(q)[0]
    local = zfin_local(chi, s)
    truncated, tail = zfin_truncated(chi, s, cap)
    assert np.all(np.abs(local - truncated) <= tail + 1e-9)


@pytest.mark.parametrize("q", [5, 9])
def test_zfin_local_matches_dense_grid(q):
    s = (2.5, 2.0, 3.0, 2.25)
    chi = primitive_characters(q)[0]
    p, k = factorize(q).factors[0]
    weights = []
    for z in s:
        w = np.zeros(q, dtype=complex)
        for a in range(k + 1):
            w[p ** a % q] += p ** (-a * z) / (1 - p ** -z if a == k else 1)
        weights.append(w)
    first, second, third, fourth = weights
    pair = np.outer(first, fourth)
    away = np.arange(q) != 1
    pair[np.ix_(away, away)] = 0
    grid = _h_grid(chi)
    n = np.arange(q)
    inner = np.einsum('abcd,ad,b->c', grid, pair, second)
    twisted = inner[np.outer(n, n) % q] @ third
    _, table = character_table(q)
    dense = np.conj(table) @ twisted
    assert np.allclose(zfin_local(chi, s), dense, atol=1e-9)


def test_zfin_bounds_at_q_121():
    chi = primitive_characters(121)[0]
    reports = zfin_bound_scan(chi, (1.5,))
    assert len(reports) == len(enumerate_all(121))
    assert all(r.passed for r in reports if not r.soft)


def test_zfin_local_needs_prime_power():
    with pytest.raises(DomainError):
        zfin_local(primitive_characters(15)[0], (2, 2, 2, 2))


@pytest.mark.parametrize("q", [5, 9, 15])
def test_z_factorization(q):
    for chi in primitive_characters(q):
        report = verify_Z_factorization(chi, (3, 3, 3, 3), (200, 200))
        assert report.passed, report.param_string()


def test_z_factorization_certificate_shrinks():
    chi = primitive_characters(9)[0]
    small = verify_Z_factorization(chi, (3, 3, 3, 3), (40, 40))
    large = verify_Z_factorization(chi, (3, 3, 3, 3), (400, 400))
    assert small.passed and large.passed
    assert large.scale < small.scale


@pytest.mark.slow
@pytest.mark.parametrize("q", [5, 9, 15])
def test_z_factorization_residual_halves(q):
    for chi in primitive_characters(q):
        coarse = verify_Z_factorization(chi, (3, 3, 3, 3), (5000, 5000))
        fine = verify_Z_factorization(chi, (3, 3, 3, 3), (10 ** 4, 10 ** 4))
        assert coarse.passed and fine.passed
        assert fine.residual <= coarse.residual / 2


@pytest.mark.slow
@pytest.mark.parametrize("q", [5, 7])
def test_eisenstein_factorization_at_ten_thousand_terms(q):
    for chi in primitive_characters(q):
        for t in (0.0, 1.5):
            report = verify_eisenstein_Lfactorization(_eisenstein_for(chi, t), chi, 3.0, 10 ** 4)
            assert report.passed, report.param_string()


@pytest.mark.slow
def test_zfin_scan_over_prime_powers():
    scan = scan_zfin([27, 49], (0.6, 1.0, 1.5, 2.0), jobs=4)
    assert scan.reports and scan.summarize()["failures"] == 0
    assert scan_zfin([121], (1.5, 2.0), jobs=4).summarize()["failures"] == 0


@pytest.mark.parametrize("q", [5, 9, 25])
def test_zfin_bounds_hold(q):
    for chi in primitive_characters(q):
        reports = zfin_bound_scan(chi, (0.6, 1.0, 1.5, 2.0))
        assert reports
        assert all(r.passed for r in reports if not r.soft)


def test_zfin_bound_preconditions():
    with pytest.raises(PreconditionError):
        zfin_bound_scan(primitive_characters(81)[0], (1.0,))
    with pytest.raises(PreconditionError):
        zfin_bound_scan(primitive_characters(9)[0], (0.4,))
    with pytest.raises(DomainError):
        zfin_bound_scan(primitive_characters(15)[0], (1.0,))
    with pytest.raises(DomainError):
        zfin_bound_scan(enumerate_all(9)[0], (1.0,))


def test_zfin_trivial_records_hypothesis():
    chi = primitive_characters(5)[0]
    trivial = [r for r in zfin_bound_scan(chi, (0.75, 1.5)) if r.identity == 'zfin-trivial']
    assert [r.params['hypothesis_met'] for r in trivial] == [False, True]


def test_scans_are_layout_independent():
    serial = scan_zfin([5, 9], (1.0, 2.0), jobs=1)
    pooled = scan_zfin([5, 9], (1.0, 2.0), jobs=2)
    assert [r.to_row() for r in serial.reports] == [r.to_row() for r in pooled.reports]
    assert serial.summarize()["failures"] == 0


def test_scan_factorizations():
    scan = scan_factorizations([5, 7], s=3.0, caps=300)
    assert len(scan.reports) == 2 * (len(primitive_characters(5)) + len(primitive_characters(7)))
    assert all(r.passed for r in scan.reports)
