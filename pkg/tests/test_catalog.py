import pytest
from pydantic import ValidationError

from quasikit import catalog
from quasikit.catalog import CatalogCurve, ExperimentConfig, MoebiusSpec
from quasikit.maps import JoukowskiExterior, MoebiusComposite, Side, TaylorInterior


def test_parse_complex() -> None:
    assert catalog.parse_complex({"re": 1, "im": -2}) == 1 - 2j
    assert catalog.parse_complex({"im": 0.5}) == 0.5j
    assert catalog.parse_complex([0.3, 0.1]) == 0.3 + 0.1j
    assert catalog.parse_complex("1 + 2j") == 1 + 2j
    assert catalog.parse_complex(3) == 3


def test_verify_configured_curve_is_supported() -> None:
    # supported curve
    catalog.verify_configured_curve_is_supported("ellipse_0_5")

    # unsupported curve
    with pytest.raises(ValueError, match="Catalog curve 'koch' is not supported. Supported curves are: "):
        catalog.verify_configured_curve_is_supported("koch")


def test_catalog_curves_build() -> None:
    for curve in CatalogCurve:
        univalent_map = catalog.build_map(curve.value)
        assert univalent_map.certificate


def test_catalog_spec__unknown_name() -> None:
    with pytest.raises(ValidationError, match="Catalog curve 'koch' is not supported"):
        catalog.CatalogSpec(name="koch")


def test_map_specs__parsed_from_json() -> None:
    config = ExperimentConfig.parse_obj({"map": {"kind": "taylor", "coeffs": [{"re": 1}, [0.2, 0.1]]}})
    univalent_map = config.build_map()
    assert isinstance(univalent_map, TaylorInterior)
    assert univalent_map.coeffs == (1, 0.2 + 0.1j)

    config = ExperimentConfig.parse_obj({"map": {"kind": "joukowski", "t": "0.3"}})
    assert config.build_map() == JoukowskiExterior(t=0.3)


def test_moebius_spec() -> None:
    spec = MoebiusSpec(matrix=[2, 0.3, 0.1, 1], inner={"kind": "catalog", "name": "ellipse_0_5"})
    univalent_map = catalog.build_map(spec)
    assert isinstance(univalent_map, MoebiusComposite)
    assert univalent_map.side == Side.EXTERIOR

    with pytest.raises(ValidationError, match="4 row-major entries"):
        MoebiusSpec(matrix=[1, 0, 1], inner={"kind": "identity"})


def test_experiment_config__defaults() -> None:
    config = ExperimentConfig()
    assert config.N == 32
    assert config.q is None
    assert config.build_map() == JoukowskiExterior(t=0.5)
    assert config.tolerances.jump == 1e-5
    assert config.schedule.M == 512


def test_experiment_config__validation() -> None:
    with pytest.raises(ValidationError, match="at least 2"):
        ExperimentConfig(N=1)
    with pytest.raises(ValidationError, match="Tolerances must be positive"):
        ExperimentConfig(tolerances={"jump": 0})
    with pytest.raises(ValidationError, match="must exceed 1"):
        ExperimentConfig(quadrature={"sampling_radius": 0.9})
    with pytest.raises(ValidationError, match="power of two"):
        ExperimentConfig(quadrature={"fft_grid": 1000})
    assert ExperimentConfig(quadrature={"fft_grid": 2048}).quadrature.fft_grid == 2048


def test_experiment_config__echo() -> None:
    config = ExperimentConfig(q="2+1j", N=8)
    echo = config.echo()
    assert echo["q"] == {"re": 2.0, "im": 1.0}
    assert echo["N"] == 8
    assert echo["map"] == {"kind": "catalog", "name": "ellipse_0_5"}
    assert ExperimentConfig.parse_obj(echo).q == 2 + 1j


def test_load_config(config_file) -> None:
    path = config_file(map={"kind": "catalog", "name": "quadratic_0_2"}, N=16, q={"re": 0, "im": 3})
    config = catalog.load_config(path)
    assert config.N == 16
    assert config.q == 3j
    assert config.build_map() == TaylorInterior(coeffs=(1, 0.2))


def test_load_config__overrides(config_file, tmp_path) -> None:
    path = config_file(map={"kind": "catalog", "name": "ellipse_0_5"}, N=16, tolerances={"jump": 1e-4})
    overrides = {"map": {"name": "ellipse_0_8"}, "tolerances": {"anchor": 1e-5}, "out": str(tmp_path)}
    config = catalog.load_config(path, overrides)
    assert config.N == 16
    assert config.build_map() == JoukowskiExterior(t=0.8)
    assert config.tolerances.jump == 1e-4
    assert config.tolerances.anchor == 1e-5
    assert config.out == tmp_path


def test_merge__nested() -> None:
    base = {"map": {"kind": "catalog", "name": "ellipse_0_5"}, "N": 32}
    merged = catalog.merge(base, {"map": {"name": "cardioid"}})
    assert merged == {"map": {"kind": "catalog", "name": "cardioid"}, "N": 32}
    assert base["map"]["name"] == "ellipse_0_5"
