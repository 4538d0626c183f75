import json

import numpy as np
import pytest

from quasikit import cauchy, faber
from quasikit.catalog import CatalogCurve, build_map
from quasikit.errors import BoundaryRegularityError, DomainError
from quasikit.faber import Verdict
from quasikit.maps import Identity, JoukowskiExterior, TaylorInterior, moebius_compose
from quasikit.series import HarmonicDiskFunction


def test_exterior_expansion__joukowski(ellipse) -> None:
    expansion = faber.exterior_expansion(ellipse, depth=8)
    assert expansion.leading == pytest.approx(1)
    assert expansion.normalized.coeff(1) == pytest.approx(1)
    assert expansion.normalized.coeff(-1) == pytest.approx(0.5)
    assert abs(expansion.normalized.coeff(-2)) < 1e-12


def test_exterior_expansion__sampling_radius(ellipse) -> None:
    with pytest.raises(DomainError, match="inside the domain boundary"):
        faber.exterior_expansion(ellipse, depth=8, radius=1.0)


def test_faber_polynomials__joukowski(ellipse) -> None:
    table = faber.faber_polynomials(ellipse, 3)
    assert np.allclose(table.polys[1][:2], [0, 1], atol=1e-12)
    # Phi_2 = omega^2 - 2t
    assert np.allclose(table.polys[2][:3], [-1, 0, 1], atol=1e-12)
    assert table.evaluate([0, 1], 0.4) == pytest.approx(0.16 - 1)


def test_faber_polynomials__interior_map_in_standard_coordinate(quadratic) -> None:
    table = faber.faber_polynomials(quadratic, 2)
    # the exterior form is w - 0.2 + O(1/w), so Phi_1 = x + 0.2 with x = 1/omega
    assert table.evaluate([1], 0.5) == pytest.approx(2.2)
    assert table.value_at([1], complex(np.inf, 0)) == pytest.approx(0.2)


def test_faber_compositions__chebyshev_tails(ellipse) -> None:
    compositions = faber.faber_compositions(ellipse, 6)
    tails = compositions.tails()
    assert np.allclose(np.diag(tails), 0.5 ** np.arange(1, 7), atol=1e-12)
    assert np.allclose(tails - np.diag(np.diag(tails)), 0, atol=1e-12)


def test_faber_compositions__quadratic(quadratic) -> None:
    compositions = faber.faber_compositions(quadratic, 4)
    assert compositions.b(1, 1) == pytest.approx(0.04)


def test_grunsky_norm__joukowski() -> None:
    for t in (0.2, 0.5, 0.8, 0.95):
        matrix = faber.grunsky_matrix(JoukowskiExterior(t=t), 16)
        assert faber.grunsky_norm(matrix) == pytest.approx(t, abs=1e-9)


def test_grunsky_norm__identity(unit_disk) -> None:
    assert faber.grunsky_norm(faber.grunsky_matrix(unit_disk, 8)) < 1e-12


@pytest.mark.parametrize("curve", [CatalogCurve.ellipse_0_8, CatalogCurve.quadratic_0_4, CatalogCurve.cardioid])
def test_grunsky_matrix__symmetry(curve) -> None:
    matrix = faber.grunsky_matrix(build_map(curve.value), 24)
    assert np.allclose(matrix.normalized, matrix.normalized.T, atol=1e-9)


@pytest.mark.parametrize("q", [0.1 + 0.05j, -0.3j])
def test_grunsky_coeffs__read_at_q(ellipse, q) -> None:
    assert np.allclose(faber.grunsky_coeffs(ellipse, 8, q=q), np.diag(0.5 ** np.arange(1, 9)), atol=1e-10)


def test_grunsky_coeffs__do_not_depend_on_q(quadratic) -> None:
    recurrence = faber.grunsky_coeffs(quadratic, 8)
    for q in (-3 + 1j, 2.5, complex(np.inf, 0)):
        assert np.allclose(faber.grunsky_coeffs(quadratic, 8, q=q), recurrence, atol=1e-10)


def test_normalization_constants(ellipse, quadratic) -> None:
    # Phi_1 = omega, Phi_2 = omega^2 - 1
    assert np.allclose(faber.normalization_constants(faber.faber_polynomials(ellipse, 2), 0), [0, -1])
    assert faber.normalization_constants(faber.faber_polynomials(quadratic, 1), complex(np.inf, 0))[0] == (
        pytest.approx(0.2)
    )
    with pytest.raises(DomainError, match="pole"):
        faber.normalization_constants(faber.faber_polynomials(quadratic, 1), 0)


def test_faber_residue(ellipse, quadratic) -> None:
    assert faber.faber_residue(ellipse, 16) < 1e-10
    assert faber.faber_residue(quadratic, 16) < 1e-10


def test_grunsky_matrix__moebius_invariance(ellipse) -> None:
    moved = moebius_compose([[2, 0.3], [0.1, 1]], ellipse)
    original = faber.grunsky_matrix(ellipse, 12).normalized
    assert np.allclose(faber.grunsky_matrix(moved, 12).normalized, original, atol=1e-7)


def test_classify_quasicircle() -> None:
    assert faber.classify_quasicircle(Identity(), 16).verdict == Verdict.QUASICIRCLE
    assert faber.classify_quasicircle(JoukowskiExterior(t=0.5), 16).verdict == Verdict.QUASICIRCLE
    assert faber.classify_quasicircle(JoukowskiExterior(t=0.98), 32).verdict == Verdict.INDETERMINATE


def test_classify_quasicircle__joukowski_0_8() -> None:
    classification = faber.classify_quasicircle(JoukowskiExterior(t=0.8), 32)
    assert classification.verdict == Verdict.QUASICIRCLE
    assert classification.norm == pytest.approx(0.8, abs=1e-8)
    assert "<= 1 - 0.02" in classification.reason


def test_classify_quasicircle__cusp_trend() -> None:
    classification = faber.classify_quasicircle(build_map(CatalogCurve.cardioid.value), 48)
    assert classification.verdict == Verdict.NON_QUASICIRCLE_TREND
    assert classification.half_norm < classification.norm < 1
    assert "grew" in classification.reason
    assert json.loads(classification.to_json())["reason"] == classification.reason


def test_classify_quasicircle__indeterminate_reason() -> None:
    classification = faber.classify_quasicircle(JoukowskiExterior(t=0.98), 32)
    assert "without growth" in classification.reason


def test_classify_quasicircle__rejects_non_univalent_map() -> None:
    with pytest.raises(DomainError, match="univalence screen"):
        faber.classify_quasicircle(TaylorInterior(coeffs=(1, 1), jordan_required=False), 8)


def test_grunsky_norm__cusp_grows_below_one() -> None:
    cardioid = build_map(CatalogCurve.cardioid.value)
    small = faber.grunsky_norm(faber.grunsky_matrix(cardioid, 16))
    large = faber.grunsky_norm(faber.grunsky_matrix(cardioid, 48))
    assert small < large < 1


def test_energy_identity__random_inputs(ellipse) -> None:
    rng = np.random.default_rng(7)
    for _ in range(20):
        hbar = rng.normal(size=4) + 1j * rng.normal(size=4)
        check = faber.energy_identity_check(ellipse, hbar)
        assert check.residual <= 1e-6 * max(1.0, abs(check.rhs))
        assert check.lhs > 0


def test_energy_identity__random_degree_ten(ellipse) -> None:
    rng = np.random.default_rng(11)
    for _ in range(20):
        hbar = rng.normal(size=10) + 1j * rng.normal(size=10)
        check = faber.energy_identity_check(ellipse, hbar)
        assert check.residual <= 1e-6 * max(1.0, abs(check.rhs))


def test_grunsky_inequalities(quadratic) -> None:
    hbar = np.array([1, -0.5j, 0.25, 0.1])
    assert faber.weak_grunsky_check(quadratic, hbar).holds
    assert faber.strong_grunsky_check(quadratic, hbar).holds


def test_faber_apply__normalized_at_q(ellipse) -> None:
    series = faber.faber_apply(ellipse, [0, 1], q=0)
    assert series.constant == pytest.approx(1)
    assert series(0.3) == pytest.approx(0.09)
    with pytest.raises(DomainError, match="outside the complementary domain"):
        series(5.0)


def test_faber_inverse(ellipse) -> None:
    coeffs, constant = faber.faber_inverse(ellipse, lambda w: w**2 - 1 + 2 * w, 4, with_constant=True)
    assert np.allclose(coeffs, [2, 1, 0, 0], atol=1e-9)
    assert abs(constant) < 1e-9


def test_faber_inverse__round_trip(ellipse, quadratic) -> None:
    hbar = np.array([0.3, -0.2j, 0.1, 0.05 + 0.05j])
    for univalent_map in (ellipse, quadratic):
        series = faber.faber_apply(univalent_map, hbar)
        assert np.allclose(faber.faber_inverse(univalent_map, series.unchecked, 4), hbar, atol=1e-9)


def test_faber_inverse__thin_ellipse() -> None:
    thin = JoukowskiExterior(t=0.95)
    s = 1.05
    pole = complex(thin.value(s))
    # g'(s) / (g(s) - w) generates the Faber polynomials
    expected = s ** (-np.arange(2, 10, dtype=float)) / (1 - 0.95 / s**2)
    assert np.allclose(faber.faber_inverse(thin, lambda w: 1 / (pole - w), 8), expected, atol=1e-8)


def test_complementary_steps() -> None:
    assert faber.complementary_steps(JoukowskiExterior(t=0.5), faber.INVERSE_STEPS) == faber.INVERSE_STEPS

    steps = faber.complementary_steps(JoukowskiExterior(t=0.95), faber.INVERSE_STEPS)
    assert steps[0] < faber.INVERSE_STEPS[0]
    assert all(np.exp(-2 * step) > 0.95 for step in steps)

    with pytest.raises(BoundaryRegularityError, match="complementary side"):
        faber.complementary_steps(JoukowskiExterior(t=1, jordan_required=False), faber.INVERSE_STEPS)


def test_faber_apply__matches_cauchy_J(quadratic) -> None:
    hbar = np.array([0.5, 0.25j, -0.1])
    z = np.array([2.0, -1.5j, -2 + 1j])
    series = faber.faber_apply(quadratic, hbar, q=complex(np.inf, 0))
    J = cauchy.cauchy_J(quadratic, HarmonicDiskFunction.from_antiholo(hbar), z)
    assert np.allclose(J, -series(z), atol=1e-6)


def test_faber_approximation__geometric_decay(ellipse) -> None:
    pole = complex(ellipse.value(1 / 0.3))
    coeffs, steps = faber.faber_approximation(ellipse, lambda w: 1 / (pole - w), orders=[2, 4, 8, 12], N=32)
    ratios = np.abs(coeffs[9:13] / coeffs[8:12])
    assert np.allclose(ratios, 0.3, atol=0.03)
    errors = [step.error for step in steps]
    assert all(a > b for a, b in zip(errors, errors[1:]))
    assert errors[-1] > 0


def test_grunsky_integral_column(ellipse) -> None:
    assert faber.grunsky_integral_column(ellipse, 1, 0.3)[0] == pytest.approx(0.5, abs=1e-8)
    assert faber.grunsky_integral_column(ellipse, 2, 0.3)[0] == pytest.approx(0.075, abs=1e-8)


def test_complement_contains(ellipse, unit_disk) -> None:
    assert list(faber.complement_contains(ellipse, [0, 3])) == [True, False]
    assert list(faber.complement_contains(unit_disk, [0, 3])) == [False, True]
