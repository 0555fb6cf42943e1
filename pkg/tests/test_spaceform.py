import json
import math
from fractions import Fraction

import numpy as np
import pytest

from curlspec import (
    ClosureCapError,
    FixedPointError,
    GroupElement,
    ValidationError,
    assert_fixed_point_free,
    asymmetry_certificate,
    auxiliary_G,
    chi_pm,
    close_group,
    det_one_minus_z,
    lens_group,
    poincare_F,
    smallest_eigenvalue_multiplicities,
    spaceform_spectrum,
    sphere_multiplicity,
    symmetry_defect,
)
from curlspec.spaceform import group_from_json, load_group, parse_angles

from oracles import (
    ICOSA_GENS,
    Q8_GENS,
    TETRA_GENS,
    fixed_point_free_lens_triples,
    lens_multiplicities,
    quaternion_left,
    quaternion_right,
    random_so4,
)

THIRD = Fraction(1, 3)
MINUS_I = GroupElement.from_matrix(-np.eye(4))


def rp3():
    return close_group([MINUS_I])


def test_closure_examples():
    lens = close_group([GroupElement.rotation(THIRD, THIRD)])
    assert lens.order == 3
    assert {g.angles for g in lens} == {(0, 0), (THIRD, THIRD), (2 * THIRD, 2 * THIRD)}
    assert rp3().order == 2
    assert close_group([]).order == 1


@pytest.mark.parametrize("gens,order", [(Q8_GENS, 8), (TETRA_GENS, 24), (ICOSA_GENS, 120)])
@pytest.mark.parametrize("build", [quaternion_left, quaternion_right])
def test_binary_polyhedral_orders(gens, order, build):
    group = group_from_json({"type": "matrices", "generators": [build(g) for g in gens]})
    assert group.order == order
    assert_fixed_point_free(group)
    F = poincare_F(group, 12)
    assert F.residual < 1e-6


def test_closure_cap():
    with pytest.raises(ClosureCapError):
        close_group([GroupElement.rotation(Fraction(1, 50), Fraction(3, 50))], cap=10)


def test_fixed_point_checks():
    assert_fixed_point_free(rp3())
    assert_fixed_point_free(lens_group(3, 1, 1))
    with pytest.raises(FixedPointError) as info:
        assert_fixed_point_free(lens_group(3, 1, 0))
    assert info.value.element is not None


@pytest.mark.parametrize(
    "g,expected",
    [(GroupElement.identity(), (3, 3)), (GroupElement.rotation(THIRD, THIRD), (0, 3)), (MINUS_I, (3, 3))],
)
def test_chi_examples(g, expected):
    assert np.allclose(chi_pm(g), expected, atol=1e-12)


def test_chi_is_a_class_function(rng):
    g = random_so4(rng)
    for _ in range(10):
        h = random_so4(rng)
        assert np.allclose(chi_pm(h @ g @ h.T), chi_pm(g), atol=1e-9)


@pytest.mark.parametrize(
    "g,coeffs",
    [
        (GroupElement.identity(), (1, -4, 6, -4, 1)),
        (GroupElement.rotation(THIRD, THIRD), (1, 2, 3, 2, 1)),
        (MINUS_I, (1, 4, 6, 4, 1)),
    ],
)
def test_det_one_minus_z(g, coeffs):
    assert np.allclose(det_one_minus_z(g), coeffs, atol=1e-12)


def test_det_one_minus_z_random(rng):
    g = random_so4(rng)
    for z in (0.3, -0.7, 1.9):
        direct = np.linalg.det(np.eye(4) - z * g)
        assert math.isclose(np.polyval(det_one_minus_z(g)[::-1], z), direct, rel_tol=1e-9, abs_tol=1e-12)


def test_poincare_examples():
    F = poincare_F(close_group([]), 3)
    assert F.plus == F.minus == (3, 8, 15, 24)
    F = poincare_F(rp3(), 4)
    assert F.plus == F.minus == (3, 0, 15, 0, 35)
    G = auxiliary_G(rp3(), 2)
    assert G.plus == (3, 0, 18)


def test_lens_small_multiplicities():
    # constant terms: the independent spin-character count gives (1, 3)
    lens = lens_group(3, 1, 1)
    F = poincare_F(lens, 0)
    G = auxiliary_G(lens, 0)
    assert (F.plus[0], F.minus[0]) == (1, 3)
    assert (G.plus[0], G.minus[0]) == (1, 3)
    assert smallest_eigenvalue_multiplicities(lens) == (1, 3)
    assert smallest_eigenvalue_multiplicities(close_group([])) == (3, 3)
    assert smallest_eigenvalue_multiplicities(rp3()) == (3, 3)


@pytest.mark.parametrize("q,p1,p2", [t for t in fixed_point_free_lens_triples(9)])
def test_lens_against_spin_characters(q, p1, p2):
    F = poincare_F(lens_group(q, p1, p2), 24)
    plus, minus = lens_multiplicities(q, p1, p2, 24)
    assert list(F.plus) == plus
    assert list(F.minus) == minus


def test_spectrum_examples():
    assert spaceform_spectrum(close_group([]), 1).as_pairs() == [(-3, 8), (-2, 3), (2, 3), (3, 8)]
    assert spaceform_spectrum(rp3(), 2).as_pairs() == [(-4, 15), (-2, 3), (2, 3), (4, 15)]
    lens = spaceform_spectrum(lens_group(3, 1, 1), 0)
    assert lens.as_pairs() == [(-2, 3), (2, 1)]
    assert symmetry_defect(lens) == [(2.0, -2)]


def test_total_multiplicity_averages_sphere():
    # sum over +- of m on the quotient, summed over all k, approaches sphere / |G|
    group = lens_group(7, 1, 3)
    F = poincare_F(group, 60)
    quotient = sum(F.plus) + sum(F.minus)
    sphere = 2 * sum(sphere_multiplicity(3, k) for k in range(61))
    assert abs(quotient / sphere - 1 / 7) < 0.02


def test_asymmetry_certificates():
    lens = asymmetry_certificate(lens_group(3, 1, 1), 4)
    assert not lens.symmetric and lens.certificate_symmetric is False
    assert lens.defect == (-2, 4, -2, -4, 8)
    for group in (rp3(), close_group([])):
        cert = asymmetry_certificate(group, 8)
        assert cert.symmetric and cert.certificate_symmetric
        assert all(d == 0 for d in cert.defect)


def test_reflection_symmetric_lens_is_symmetric():
    # L(5;1,1) and L(5;1,4) are mirror images; L(5;1,2) is amphichiral
    assert asymmetry_certificate(lens_group(5, 1, 2), 20).symmetric
    F1, F4 = poincare_F(lens_group(5, 1, 1), 20), poincare_F(lens_group(5, 1, 4), 20)
    assert F1.plus == F4.minus and F1.minus == F4.plus


def test_precision_argument():
    a = poincare_F(lens_group(11, 1, 5), 30, dps=30)
    b = poincare_F(lens_group(11, 1, 5), 30, dps=80)
    assert a.plus == b.plus and a.minus == b.minus


def test_parsers(tmp_path):
    g = parse_angles("3:1,1")
    assert g.angles == (THIRD, THIRD)
    for bad in ("3:1", "x:1,1", "0:1,1"):
        with pytest.raises(ValidationError):
            parse_angles(bad)
    group = group_from_json({"type": "angles", "q": 5, "pairs": [[1, 2]]})
    assert group.order == 5
    path = tmp_path / "g.json"
    path.write_text(json.dumps({"type": "matrices", "generators": [(-np.eye(4)).ravel().tolist()]}))
    assert load_group(path).order == 2
    with pytest.raises(ValidationError):
        group_from_json({"type": "matrices", "generators": [[1] * 16]})
    with pytest.raises(ValidationError):
        group_from_json({"type": "matrices", "generators": [np.diag([-1, 1, 1, 1]).ravel().tolist()]})
    with pytest.raises(ValidationError):
        group_from_json({"type": "cubes"})
    with pytest.raises(ValidationError):
        load_group(tmp_path / "none.json")


def test_mixed_generators_close_by_matrix():
    group = close_group([GroupElement.rotation(Fraction(1, 4), Fraction(1, 4)), MINUS_I])
    assert group.order == 4
