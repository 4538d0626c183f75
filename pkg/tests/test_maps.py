import numpy as np
import pytest

from quasikit import maps
from quasikit.errors import DomainError, InversionError
from quasikit.maps import (
    ExteriorForm,
    Identity,
    JoukowskiExterior,
    MoebiusComposite,
    ReflectedMap,
    Side,
    TaylorInterior,
)


def test_taylor_interior__admissibility() -> None:
    with pytest.raises(DomainError, match="not admissible"):
        TaylorInterior(coeffs=(1, 0.6))
    with pytest.raises(DomainError, match="nonzero linear coefficient"):
        TaylorInterior(coeffs=(0, 1))
    assert TaylorInterior(coeffs=(1, 0.6), jordan_required=False).side == Side.INTERIOR


def test_joukowski__admissibility() -> None:
    with pytest.raises(DomainError, match="not admissible"):
        JoukowskiExterior(t=1.0)
    with pytest.raises(DomainError, match="not admissible"):
        JoukowskiExterior(t=1.2, jordan_required=False)
    assert JoukowskiExterior(t=1.0, jordan_required=False).basepoint == maps.INF


def test_eval__enforces_domain(unit_disk, ellipse) -> None:
    assert unit_disk.eval(0.5) == 0.5
    with pytest.raises(DomainError, match="outside the interior domain"):
        unit_disk.eval([0.5, 2.0])
    with pytest.raises(DomainError, match="outside the exterior domain"):
        ellipse.deriv(0.5)
    assert ellipse.value(0.5) == pytest.approx(1.5)


def test_quadratic__values(quadratic) -> None:
    assert quadratic.value(0.5) == pytest.approx(0.55)
    assert quadratic.derivative(0.5) == pytest.approx(1.2)
    assert quadratic.basepoint == 0


def test_moebius_composite(ellipse) -> None:
    with pytest.raises(DomainError, match="singular"):
        MoebiusComposite((1, 2, 2, 4), ellipse)

    composite = MoebiusComposite((2, 0.3, 0.1, 1), ellipse)
    w = 2.0 + 0.5j
    g = ellipse.value(w)
    assert composite.value(w) == pytest.approx((2 * g + 0.3) / (0.1 * g + 1))
    h = 1e-6
    numeric = (composite.value(w + h) - composite.value(w - h)) / (2 * h)
    assert composite.derivative(w) == pytest.approx(numeric, rel=1e-7)
    assert composite.basepoint == pytest.approx(20)
    assert composite.side == Side.EXTERIOR


def test_moebius_compose__collapses(ellipse) -> None:
    assert maps.moebius_compose(np.eye(2) * 3, ellipse) is ellipse
    twice = maps.moebius_compose([[1, 1], [0, 1]], maps.moebius_compose([[1, 1], [0, 1]], ellipse))
    assert isinstance(twice.inner, JoukowskiExterior)
    assert np.allclose(twice.matrix, [[1, 2], [0, 1]])


def test_moebius_point() -> None:
    matrix = [[1, 2], [1, -1]]
    assert maps.moebius_point(matrix, maps.INF) == 1
    assert maps.is_infinite(maps.moebius_point(matrix, 1))
    assert maps.moebius_point(matrix, 0) == -2


def test_reflected_map(ellipse) -> None:
    reflected = ReflectedMap(ellipse)
    assert reflected.side == Side.INTERIOR
    assert reflected.value(0.5) == pytest.approx(0.5 / 1.125)
    assert reflected.basepoint == 0
    # g(w) = w + t/w gives 1/g(1/z) = z - t z^3 + ..., so the derivative at 0 is 1
    assert reflected.derivative(0.0) == pytest.approx(1, abs=1e-6)
    assert reflected.value(0.0) == pytest.approx(0, abs=1e-12)


def test_to_interior(unit_disk, ellipse) -> None:
    assert maps.to_interior(unit_disk) is unit_disk
    assert isinstance(maps.to_interior(ellipse), ReflectedMap)


def test_exterior_form(quadratic, ellipse) -> None:
    assert ExteriorForm(quadratic)(2.0) == pytest.approx(4 / 2.2)
    assert ExteriorForm(ellipse)(2.0) == pytest.approx(2.25)
    assert ExteriorForm(quadratic).coordinate(0.5) == pytest.approx(2)
    assert ExteriorForm(ellipse).coordinate(0.5) == pytest.approx(0.5)


def test_level_curve__winding(ellipse) -> None:
    curve = maps.level_curve(ellipse, 1.5, 64)
    assert curve.M == 64
    assert list(curve.winding_number([0, 5])) == [1, 0]


def test_level_curve__nested(ellipse, quadratic) -> None:
    for univalent_map, (small, large) in ((ellipse, (1.2, 1.5)), (quadratic, (0.5, 0.9))):
        inner, outer = maps.level_curve(univalent_map, small, 128), maps.level_curve(univalent_map, large, 128)
        assert np.all(outer.winding_number(inner.nodes) == 1)
        assert np.all(inner.winding_number(outer.nodes) == 0)


def test_level_curve__radius_side(unit_disk, ellipse) -> None:
    with pytest.raises(DomainError, match="0 < r < 1"):
        maps.level_curve(unit_disk, 1.2, 64)
    with pytest.raises(DomainError, match="r > 1"):
        maps.level_curve(ellipse, 0.9, 64)
    with pytest.raises(DomainError, match="power of two"):
        maps.level_curve(unit_disk, 0.5, 48)


def test_invert(ellipse, quadratic) -> None:
    w = np.array([2 + 1j, -1.5 + 0.2j, 3j])
    assert np.allclose(maps.invert(ellipse, ellipse.value(w)), w)
    z = 0.3 - 0.4j
    assert maps.invert(quadratic, quadratic.value(z)) == pytest.approx(z)


def test_invert__round_trip_on_random_points(ellipse, quadratic) -> None:
    rng = np.random.default_rng(3)
    z = rng.uniform(0.3, 0.9, 20) * np.exp(2j * np.pi * rng.uniform(size=20))
    assert np.max(np.abs(maps.invert(quadratic, quadratic.value(z)) - z)) < 1e-10
    assert np.max(np.abs(maps.invert(ellipse, ellipse.value(1 / z)) - 1 / z)) < 1e-10


def test_invert__no_convergence(quadratic) -> None:
    with pytest.raises(InversionError, match="did not converge") as excinfo:
        maps.invert(quadratic, 0.5, guess=0.9, max_iter=1)
    assert excinfo.value.residual > 0


def test_univalence_check(quadratic) -> None:
    assert maps.univalence_check(quadratic).passed
    assert maps.univalence_check(Identity(side=Side.EXTERIOR)).passed

    report = maps.univalence_check(TaylorInterior(coeffs=(1, 1), jordan_required=False))
    assert not report.passed
    assert report.witness is not None


def test_univalence_check__folded_quadratic() -> None:
    # f'(z) = 1 + 1.2 z vanishes at z = -5/6 inside the disk
    report = maps.univalence_check(TaylorInterior(coeffs=(1, 0.6), jordan_required=False))
    assert not report.passed
    assert report.witness is not None
    assert min(report.min_ratio, report.min_derivative) <= report.threshold
