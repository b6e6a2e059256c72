import math

import mpmath
import numpy as np
import pytest

from src.errors import DomainError, PoleError, PreconditionError
from src.lfunc import (
    SHIFT_BELOW, VWeightParams, completed_L, dirichlet_L, dirichlet_L_all, dirichlet_L_derivative,
    hurwitz_zeta, root_number, scan_functional_equation, scan_sixth_moment, scan_v_weights,
    sixth_moment, v_weight, verify_functional_equation, verify_v_weights, weyl_ratio_scan,
    weyl_ratio_table,
)
from src.residues import (
    character_table, enumerate_all, is_cube_free, parity, principal_character, primitive_characters,
)

S_VALUES = [0.5, 0.5 + 3j, 2 + 1j, -0.5 + 1j]


def test_hurwitz_at_one_is_riemann_zeta():
    assert abs(hurwitz_zeta(2, 1) - math.pi ** 2 / 6) < 1e-12
    assert abs(hurwitz_zeta(0.5, 1) - complex(mpmath.zeta(0.5))) < 1e-12


@pytest.mark.parametrize("s", [3, 0.5 + 3j, 2 + 1j, -0.5 + 1j, -1.5])
@pytest.mark.parametrize("a", [0.2, 0.5, 1.0, 2.75])
def test_hurwitz_matches_mpmath(s, a):
    expected = complex(mpmath.zeta(s, a))
    assert abs(hurwitz_zeta(s, a) - expected) <= 1e-10 * max(1.0, abs(expected))


def test_hurwitz_accepts_arrays():
    a = np.array([0.25, 0.5, 1.0, 3.0])
    values = hurwitz_zeta(1.5 + 2j, a)
    assert values.shape == a.shape
    for x, v in zip(a, values):
        assert abs(v - hurwitz_zeta(1.5 + 2j, float(x))) < 1e-13


def test_hurwitz_errors():
    with pytest.raises(PoleError):
        hurwitz_zeta(1, 0.5)
    with pytest.raises(DomainError):
        hurwitz_zeta(2, 0)


@pytest.mark.parametrize("q", [3, 4, 5, 7, 8, 12])
def test_dirichlet_L_matches_mpmath(q):
    for chi in enumerate_all(q):
        periodic = [complex(chi(a)) for a in range(q)]
        for s in S_VALUES[:3]:
            expected = complex(mpmath.dirichlet(s, periodic))
            value = dirichlet_L(s, chi)
            assert abs(value.value - expected) <= 1e-9 * max(1.0, abs(expected))
            assert value.method == "euler_maclaurin"


def test_L_at_one():
    chi4 = enumerate_all(4)[1]
    value = dirichlet_L(1, chi4)
    assert value.method == "digamma"
    assert abs(value.value - math.pi / 4) < 1e-12
    with pytest.raises(PoleError):
        dirichlet_L(1, principal_character(4))


def test_L_all_follows_enumeration():
    chars, _ = character_table(15)
    row = dirichlet_L_all(0.5 + 2j, 15)
    for chi, value in zip(chars, row):
        assert abs(value - dirichlet_L(0.5 + 2j, chi).value) < 1e-10


def test_root_numbers_have_modulus_one():
    for q in range(3, 30):
        for chi in primitive_characters(q):
            eps = root_number(chi)
            assert abs(abs(eps) - 1) < 1e-12
            if chi.order == 2:
                assert abs(eps - 1) < 1e-10
    with pytest.raises(DomainError):
        root_number(principal_character(9))


@pytest.mark.parametrize("q", range(3, 13))
def test_functional_equation(q):
    for chi in primitive_characters(q):
        for s in S_VALUES:
            report = verify_functional_equation(chi, s)
            assert report.passed, report.param_string()


@pytest.mark.slow
@pytest.mark.parametrize("q", range(13, 51))
def test_functional_equation_larger_moduli(q):
    for chi in primitive_characters(q):
        for s in S_VALUES:
            report = verify_functional_equation(chi, s)
            assert report.passed, report.param_string()


def test_completed_L_is_real_for_real_characters_on_the_critical_point(quadratic5):
    assert abs(completed_L(0.5, quadratic5).imag) < 1e-12


@pytest.mark.parametrize("q", [3, 4, 5, 7, 8])
def test_L_derivative_matches_mpmath(q):
    for chi in primitive_characters(q):
        periodic = [complex(chi(a)) for a in range(q)]
        for s in (-1, 0, 0.5 + 2j, 3):
            expected = complex(mpmath.dirichlet(s, periodic, 1))
            assert abs(dirichlet_L_derivative(s, chi) - expected) <= 1e-10 * max(1.0, abs(expected))


@pytest.mark.parametrize("q", [3, 4, 5, 7, 8, 11])
def test_functional_equation_at_trivial_zeros(q):
    for chi in primitive_characters(q):
        points = (2, 4, -1, -3) if parity(chi) else (3, 5, 0, -2)
        for s in points:
            report = verify_functional_equation(chi, s)
            assert report.passed, report.param_string()


def test_completed_L_is_continuous_at_a_trivial_zero():
    chi = next(x for x in primitive_characters(5) if parity(x) == 1)
    periodic = [complex(chi(a)) for a in range(5)]
    h = mpmath.mpf('1e-8')
    nearby = complex(mpmath.power(5 / mpmath.pi, h / 2) * mpmath.gamma(h / 2)
                     * mpmath.dirichlet(-1 + h, periodic))
    value = completed_L(-1, chi)
    assert abs(value - nearby) <= 1e-5 * abs(value)


def test_completed_zeta_keeps_its_poles():
    zeta = principal_character(1)
    with pytest.raises(PoleError):
        completed_L(0, zeta)
    with pytest.raises(PoleError):
        completed_L(1, zeta)
    assert verify_functional_equation(zeta, -2).passed


def test_functional_equation_scan():
    scan = scan_functional_equation([5, 7], [0.5, 2 + 1j], jobs=1)
    assert len(scan.reports) == 2 * (len(primitive_characters(5)) + len(primitive_characters(7)))
    assert scan.summarize()["failures"] == 0
    with pytest.raises(DomainError):
        verify_functional_equation(principal_character(5), 0.5)


@pytest.mark.parametrize("j, delta", [(1, 0), (1, 1), (2, 0), (2, 1)])
def test_v_weight_is_even_in_t(j, delta):
    params = VWeightParams(j=j, delta=delta)
    for y in (0.1, 1.0, 10.0):
        for t in (0.5, 2.0):
            assert abs(v_weight(params, y, t) - v_weight(params, y, -t)) < 1e-8


@pytest.mark.parametrize("j, delta", [(1, 0), (1, 1), (2, 0), (2, 1)])
def test_v_weight_tends_to_one_near_zero(j, delta):
    params = VWeightParams(j=j, delta=delta)
    for t in (0.0, 1.0):
        assert abs(v_weight(params, 1e-20, t) - 1) < 1e-3


@pytest.mark.parametrize("y", [1e-8, 1e-12, 1e-20])
def test_v_weight_small_y_settles(y):
    assert y < SHIFT_BELOW
    for j in (1, 2):
        coarse = v_weight(VWeightParams(j=j), y, 0.5)
        fine = v_weight(VWeightParams(j=j, step=0.01), y, 0.5)
        assert abs(coarse - fine) < 1e-9


def test_v_weight_at_1e8():
    assert abs(v_weight(VWeightParams(j=1, delta=1), 1e-8, 0) - 1) < 1e-3
    assert abs(v_weight(VWeightParams(j=1), 1e-8, 0) - 1) < 1e-2


def test_v_weight_is_continuous_across_the_shift():
    for j in (1, 2):
        params = VWeightParams(j=j)
        below = v_weight(params, SHIFT_BELOW * (1 - 1e-9), 1.0)
        above = v_weight(params, SHIFT_BELOW * (1 + 1e-9), 1.0)
        assert abs(below - above) < 1e-7


@pytest.mark.slow
@pytest.mark.parametrize("j", [1, 2])
def test_v_weight_grid(j):
    for delta in (0, 1):
        reports = verify_v_weights(VWeightParams(j=j, delta=delta))
        assert len(reports) == 4 * (1 + 2 * 5)
        failed = [r.param_string() for r in reports if not r.passed]
        assert not failed, failed


def test_v_weight_decays():
    for j in (1, 2):
        assert abs(v_weight(VWeightParams(j=j), 100.0, 0.0)) < 1e-3


def test_v_weight_contour_independence():
    for j in (1, 2):
        near = VWeightParams(j=j, sigma=1.2)
        far = VWeightParams(j=j, sigma=2.0)
        for y in (0.5, 1.0, 3.0):
            for t in (0.0, 2.0):
                assert abs(v_weight(near, y, t) - v_weight(far, y, t)) < 1e-8


def test_v_weight_domain():
    with pytest.raises(DomainError):
        v_weight(VWeightParams(), 0.0, 0.0)
    with pytest.raises(DomainError):
        v_weight(VWeightParams(delta=0), 1.0, -0.5j)
    with pytest.raises(DomainError):
        VWeightParams(j=3)
    with pytest.raises(DomainError):
        VWeightParams(delta=2)


def test_weyl_ratio_for_zeta():
    scan = weyl_ratio_scan(1)
    (report,) = scan.reports
    assert report.params['ratio'] == pytest.approx(1.4603545088, abs=1e-8)
    assert report.soft


def test_weyl_scan_keeps_cube_free_moduli():
    scan = weyl_ratio_scan(30)
    expected = [q for q in range(1, 31) if is_cube_free(q) and q % 4 != 2]
    assert [r.params['q'] for r in scan.reports] == expected
    assert 8 not in expected and 27 not in expected


def test_weyl_scan_threshold_and_table():
    scan = weyl_ratio_scan(20, threshold=0.1)
    assert scan.summarize(ratio_key="ratio")["failures"] > 0
    table = weyl_ratio_table(scan.reports)
    assert list(table.columns) == ['q', 'chi', 'ratio']
    assert len(table) == len(scan.reports)
    assert table['ratio'].max() == pytest.approx(max(r.params['ratio'] for r in scan.reports))


def test_weyl_scan_is_deterministic():
    serial = weyl_ratio_scan(40, t=1.0, jobs=1)
    pooled = weyl_ratio_scan(40, t=1.0, jobs=2)
    assert [r.to_row() for r in serial.reports] == [r.to_row() for r in pooled.reports]


def test_sixth_moment_of_zeta():
    zeta = principal_character(1)
    expected = float(mpmath.quad(lambda t: abs(mpmath.zeta(0.5 + 1j * t)) ** 6, [-1, 0, 1]))
    assert sixth_moment(zeta, 1.0) == pytest.approx(expected, rel=1e-6)


def test_sixth_moment_edges():
    chi = primitive_characters(5)[0]
    assert sixth_moment(chi, 0) == 0.0
    with pytest.raises(PreconditionError):
        sixth_moment(chi, 11)


def test_sixth_moment_scan_records_values():
    scan = scan_sixth_moment([5], 0.5)
    assert [r.identity for r in scan.reports] == ['sixth-moment'] * len(primitive_characters(5))
    assert all(r.soft and r.passed for r in scan.reports)
    chi = primitive_characters(5)[0]
    first = next(r for r in scan.reports if r.params['chi'] == chi.label)
    assert first.params['moment'] == pytest.approx(sixth_moment(chi, 0.5))


@pytest.mark.slow
def test_v_weight_scan_covers_both_families():
    scan = scan_v_weights(jobs=2)
    assert {(r.params['j'], r.params['delta']) for r in scan.reports} == {(1, 0), (1, 1), (2, 0), (2, 1)}
    assert scan.summarize()["failures"] == 0


@pytest.mark.slow
def test_weyl_ratios_up_to_1000():
    scan = weyl_ratio_scan(1000, jobs=4)
    summary = scan.summarize(ratio_key="ratio")
    assert summary['max_ratio'] == pytest.approx(2.950504402032749, abs=1e-9)
    pinned = weyl_ratio_scan(1000, threshold=2.950504402032749 + 1e-9, jobs=4)
    assert pinned.summarize(ratio_key="ratio")["failures"] == 0
