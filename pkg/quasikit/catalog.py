import json
import logging
from enum import Enum
from pathlib import Path
from typing import Any, Dict, List, Literal, Optional, Union

from pydantic import BaseModel, Field, validator

from quasikit.cauchy import ExtrapolationSchedule
from quasikit.faber import SAMPLING_RADIUS
from quasikit.maps import Identity, JoukowskiExterior, MoebiusComposite, Side, TaylorInterior, UnivalentMap

log = logging.getLogger(__name__)


def parse_complex(value: Any) -> complex:
    """Accepts {"re": x, "im": y}, a bare number, a [re, im] pair or a Python complex literal string."""
    if isinstance(value, dict):
        return complex(float(value.get("re", 0.0)), float(value.get("im", 0.0)))
    if isinstance(value, (list, tuple)) and len(value) == 2:
        return complex(float(value[0]), float(value[1]))
    if isinstance(value, str):
        return complex(value.replace(" ", ""))
    return complex(value)


def _complex_json(z: complex) -> Dict[str, float]:
    return {"re": z.real, "im": z.imag}


class ComplexModel(BaseModel):
    class Config:
        arbitrary_types_allowed = True
        json_encoders = {complex: _complex_json}


class IdentitySpec(ComplexModel):
    kind: Literal["identity"] = "identity"
    side: Side = Side.INTERIOR

    def build(self) -> UnivalentMap:
        return Identity(side=self.side)


class TaylorSpec(ComplexModel):
    kind: Literal["taylor"] = "taylor"
    coeffs: List[complex]
    offset: complex = 0j
    jordan_required: bool = True
    side: Side = Side.INTERIOR

    @validator("coeffs", pre=True)
    def parse_coeffs(cls, coeffs: List[Any]) -> List[complex]:
        return [parse_complex(c) for c in coeffs]

    @validator("offset", pre=True)
    def parse_offset(cls, offset: Any) -> complex:
        return parse_complex(offset)

    def build(self) -> UnivalentMap:
        return TaylorInterior(
            coeffs=tuple(self.coeffs), offset=self.offset, jordan_required=self.jordan_required, side=self.side
        )


class JoukowskiSpec(ComplexModel):
    kind: Literal["joukowski"] = "joukowski"
    t: complex
    jordan_required: bool = True

    @validator("t", pre=True)
    def parse_t(cls, t: Any) -> complex:
        return parse_complex(t)

    def build(self) -> UnivalentMap:
        return JoukowskiExterior(t=self.t, jordan_required=self.jordan_required)


class MoebiusSpec(ComplexModel):
    kind: Literal["moebius"] = "moebius"
    matrix: List[complex]
    inner: "MapSpec"

    @validator("matrix", pre=True)
    def parse_matrix(cls, matrix: List[Any]) -> List[complex]:
        if len(matrix) != 4:
            raise ValueError(f"A Moebius matrix needs 4 row-major entries, got {len(matrix)}")
        return [parse_complex(e) for e in matrix]

    def build(self) -> UnivalentMap:
        return MoebiusComposite(entries=tuple(self.matrix), inner=build_map(self.inner))


class CatalogSpec(ComplexModel):
    kind: Literal["catalog"] = "catalog"
    name: str

    @validator("name")
    def verify_name_is_in_catalog(cls, name: str) -> str:
        verify_configured_curve_is_supported(name)
        return name

    def build(self) -> UnivalentMap:
        return build_map(CatalogCurve[self.name].value)


MapSpec = Union[IdentitySpec, TaylorSpec, JoukowskiSpec, MoebiusSpec, CatalogSpec]
MoebiusSpec.update_forward_refs(MapSpec=MapSpec)


unit_circle = IdentitySpec()
unit_circle_exterior = IdentitySpec(side=Side.EXTERIOR)
ellipse_0_2 = JoukowskiSpec(t=0.2)
ellipse_0_5 = JoukowskiSpec(t=0.5)
ellipse_0_8 = JoukowskiSpec(t=0.8)
ellipse_0_95 = JoukowskiSpec(t=0.95)
ellipse_0_98 = JoukowskiSpec(t=0.98)
quadratic_0_2 = TaylorSpec(coeffs=[1, 0.2])
quadratic_0_4 = TaylorSpec(coeffs=[1, 0.4])
# z + z^2/2 has a cusp at z = -1
cardioid = TaylorSpec(coeffs=[1, 0.5], jordan_required=False)


class CatalogCurve(Enum):
    unit_circle: IdentitySpec = unit_circle
    unit_circle_exterior: IdentitySpec = unit_circle_exterior
    ellipse_0_2: JoukowskiSpec = ellipse_0_2
    ellipse_0_5: JoukowskiSpec = ellipse_0_5
    ellipse_0_8: JoukowskiSpec = ellipse_0_8
    ellipse_0_95: JoukowskiSpec = ellipse_0_95
    ellipse_0_98: JoukowskiSpec = ellipse_0_98
    quadratic_0_2: TaylorSpec = quadratic_0_2
    quadratic_0_4: TaylorSpec = quadratic_0_4
    cardioid: TaylorSpec = cardioid


def verify_configured_curve_is_supported(name: str) -> None:
    if name not in CatalogCurve.__annotations__.keys():
        supported_curves = [c for c in CatalogCurve.__annotations__.keys()]
        raise ValueError(f"Catalog curve '{name}' is not supported. Supported curves are: {supported_curves}")


def build_map(spec: MapSpec) -> UnivalentMap:
    univalent_map = spec.build()
    log.debug(f"built {spec.kind} map: {univalent_map.certificate}")
    return univalent_map


class QuadratureConfig(BaseModel):
    radial: int = 64
    angular: int = 256
    fft_grid: Optional[int] = None
    sampling_radius: float = SAMPLING_RADIUS
    douglas_grid: int = 512

    @validator("radial", "angular", "douglas_grid")
    def verify_size_is_positive(cls, size: int) -> int:
        if size < 1:
            raise ValueError(f"Quadrature sizes must be positive, got {size}")
        return size

    @validator("fft_grid")
    def verify_fft_grid_is_power_of_two(cls, M: Optional[int]) -> Optional[int]:
        if M is not None and (M < 2 or M & (M - 1)):
            raise ValueError(f"The FFT grid must be a power of two, got {M}")
        return M

    @validator("sampling_radius")
    def verify_sampling_radius_is_outside_circle(cls, radius: float) -> float:
        if radius <= 1:
            raise ValueError(f"The exterior sampling radius must exceed 1, got {radius}")
        return radius


class Tolerances(BaseModel):
    symmetry: float = 1e-9
    q_independence: float = 1e-8
    moebius: float = 1e-7
    energy_identity: float = 1e-6
    schiffer: float = 1e-6
    wirtinger: float = 1e-5
    jump: float = 1e-5
    transmitted_jump: float = 1e-5
    two_sided: float = 1e-5
    anchor: float = 1e-6
    moebius_operators: float = 1e-5
    composition: float = 1e-8
    round_trip: float = 1e-6
    douglas: float = 1e-3
    faber_residue: float = 1e-10
    inversion: float = 1e-10
    vanishing: float = 1e-8

    @validator("*")
    def verify_tolerance_is_positive(cls, tol: float) -> float:
        if tol <= 0:
            raise ValueError(f"Tolerances must be positive, got {tol}")
        return tol


class ExperimentConfig(ComplexModel):
    map: MapSpec = Field(default_factory=lambda: CatalogSpec(name="ellipse_0_5"))
    N: int = 32
    q: Optional[complex] = None
    quadrature: QuadratureConfig = QuadratureConfig()
    schedule: ExtrapolationSchedule = ExtrapolationSchedule()
    tolerances: Tolerances = Tolerances()
    params: Dict[str, Any] = {}
    out: Path = Path("quasikit-out")

    @validator("N")
    def verify_truncation_order(cls, N: int) -> int:
        if N < 2:
            raise ValueError(f"Truncation order N must be at least 2, got {N}")
        return N

    @validator("q", pre=True)
    def parse_q(cls, q: Any) -> Optional[complex]:
        return None if q is None else parse_complex(q)

    def build_map(self) -> UnivalentMap:
        return build_map(self.map)

    def echo(self) -> Dict[str, Any]:
        """JSON-ready copy of the configuration with complex numbers as {re, im}."""
        return json.loads(self.json())


def merge(base: Dict[str, Any], overrides: Dict[str, Any]) -> Dict[str, Any]:
    merged = dict(base)
    for key, value in overrides.items():
        if isinstance(value, dict) and isinstance(merged.get(key), dict):
            merged[key] = merge(merged[key], value)
        else:
            merged[key] = value
    return merged


def load_config(path: Path, overrides: Optional[Dict[str, Any]] = None) -> ExperimentConfig:
    """Experiment config from a JSON file, with nested overrides merged over the file's values."""
    log.info(f"loading experiment config from '{path}'...")
    return ExperimentConfig.parse_obj(merge(json.loads(Path(path).read_text()), overrides or {}))
