import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
from pydantic import BaseModel, validator

from quasikit.errors import (
    ConfigError,
    ConvergenceError,
    DecompositionQualityError,
    DomainError,
    NodeCollisionError,
    ResolutionError,
)
from quasikit.faber import (
    FaberSeries,
    bergman_schiffer_kernel,
    complement_contains,
    complement_radius,
    faber_inverse,
    faber_polynomials,
)
from quasikit.maps import INF, Side, UnivalentMap, invert, is_infinite, moebius_compose, moebius_point
from quasikit.numerics import disk_quadrature, neville_extrapolate
from quasikit.series import (
    ArrayLike,
    FourierBoundaryData,
    HarmonicDiskFunction,
    LaurentSeries,
    circle_points,
    harmonic_extension,
)
from quasikit.transmission import transmit

log = logging.getLogger(__name__)

LEVEL_STEPS = (4e-4, 2e-4, 1e-4, 5e-5)
COARSE_RADII = (0.90, 0.95, 0.975)
NODE_COLLISION_DISTANCE = 1e-6
COLLISION_STRETCH = 1.1
COLLAR_STEP = 0.1
INNER_READ_STEP = 0.15
INNER_READ_SIZE = 256
INNER_READ_TERMS = 64
NOISE_FLOOR = 1e-14
RESIDUAL_GRID = 256
QUADRATURE_RADIAL = 64
QUADRATURE_ANGULAR = 256
RESOLUTION_TOLERANCE = 1e-8
FD_STEP = 1e-4


class ExtrapolationSchedule(BaseModel):
    """Level curves |zeta| = exp(-+eps) approaching the unit circle, one trapezoid grid of M points per curve."""

    eps: List[float] = list(LEVEL_STEPS)
    M: int = 512
    tol: float = 1e-6

    @validator("eps")
    def verify_eps_is_strictly_decreasing(cls, eps: List[float]) -> List[float]:
        if len(eps) < 2:
            raise ValueError(f"An extrapolation schedule needs at least 2 steps, got {eps}")
        if any(e <= 0 for e in eps) or any(a <= b for a, b in zip(eps, eps[1:])):
            raise ValueError(f"Schedule steps must be positive and strictly decreasing, got {eps}")
        return eps

    @validator("M")
    def verify_grid_is_power_of_two(cls, M: int) -> int:
        if M < 16 or M & (M - 1):
            raise ValueError(f"Schedule grid size must be a power of two >= 16, got {M}")
        return M

    @validator("tol")
    def verify_tolerance_is_positive(cls, tol: float) -> float:
        if tol <= 0:
            raise ValueError(f"Schedule tolerance must be positive, got {tol}")
        return tol

    @classmethod
    def from_radii(cls, radii: Sequence[float], **kwargs) -> "ExtrapolationSchedule":
        return cls(eps=[-float(np.log(r)) for r in radii], **kwargs)

    @classmethod
    def coarse(cls) -> "ExtrapolationSchedule":
        return cls.from_radii(COARSE_RADII)

    @property
    def radii(self) -> List[float]:
        return [float(np.exp(-e)) for e in self.eps]

    def stretched(self, factor: float) -> "ExtrapolationSchedule":
        return ExtrapolationSchedule(eps=[e * factor for e in self.eps], M=self.M, tol=self.tol)


def domain_radius(univalent_map: UnivalentMap, step: float) -> float:
    return float(np.exp(-step if univalent_map.side == Side.INTERIOR else step))


def pulled_back_eval(h: HarmonicDiskFunction, zeta: ArrayLike) -> np.ndarray:
    """Disk data at |zeta| <= 1, reflected data h(1/conj(zeta)) outside."""
    zeta = np.atleast_1d(np.asarray(zeta, dtype=complex))
    outside = np.abs(zeta) > 1
    values = np.empty_like(zeta)
    if np.any(~outside):
        values[~outside] = h(zeta[~outside])
    if np.any(outside):
        values[outside] = h(1 / np.conj(zeta[outside]))
    return values


def collar_representative(h: HarmonicDiskFunction) -> LaurentSeries:
    """Laurent series equal to h on the unit circle: sum a_n zeta^n + sum b_n zeta^-n."""
    N = h.N
    coeffs = np.concatenate([h.antiholo[1:][::-1], h.holo])
    return LaurentSeries(coeffs, -N)


def _scalar_or_array(z: np.ndarray, scalar: bool) -> Union[complex, np.ndarray]:
    return complex(z[0]) if scalar else z


def _contour_sums(
    univalent_map: UnivalentMap,
    values: np.ndarray,
    zeta: np.ndarray,
    orientation: float,
    z: np.ndarray,
    q: complex,
) -> Tuple[np.ndarray, np.ndarray]:
    nodes = univalent_map.value(zeta)
    dw = univalent_map.derivative(zeta) * 1j * zeta * (2 * np.pi / len(zeta)) * orientation
    weighted = values * dw / (2j * np.pi)
    result = np.sum(weighted[None, :] / (nodes[None, :] - z[:, None]), axis=1)
    if not is_infinite(q):
        result = result - np.sum(weighted / (nodes - q))
    return result, nodes


def _level_integrals(
    univalent_map: UnivalentMap,
    h: HarmonicDiskFunction,
    z: np.ndarray,
    q: complex,
    schedule: ExtrapolationSchedule,
    approach: str,
) -> Tuple[np.ndarray, float]:
    rows, closest = [], np.inf
    for step in schedule.eps:
        if approach == "domain":
            radius = domain_radius(univalent_map, step)
        else:
            radius = complement_radius(univalent_map, step)
        zeta = circle_points(schedule.M, radius)[1]
        orientation = 1.0 if radius < 1 else -1.0
        sums, nodes = _contour_sums(univalent_map, pulled_back_eval(h, zeta), zeta, orientation, z, q)
        targets = z if is_infinite(q) else np.append(z, q)
        closest = min(closest, float(np.min(np.abs(nodes[None, :] - targets[:, None]))))
        rows.append(sums)
    return np.array(rows), closest


def cauchy_J(
    univalent_map: UnivalentMap,
    h: HarmonicDiskFunction,
    z: ArrayLike,
    q: complex = INF,
    schedule: Optional[ExtrapolationSchedule] = None,
    approach: str = "domain",
    contour_radius: Optional[float] = None,
) -> Union[complex, np.ndarray]:
    """Limiting Cauchy integral J^q h at physical points z off the curve.

    ``approach="domain"`` integrates over level curves inside the map's domain, positively oriented with
    respect to it; ``"complement"`` integrates the reflected data over curves on the far side, positively
    oriented with respect to that side. With ``contour_radius`` the Laurent collar representative of h is
    integrated once on that circle instead; the circle must separate z from the unit circle's image or lie
    on the other side of it.
    """
    schedule = schedule or ExtrapolationSchedule()
    z = np.asarray(z, dtype=complex)
    scalar = z.ndim == 0
    z = np.atleast_1d(z)
    if approach not in ("domain", "complement"):
        raise ConfigError(f"Approach '{approach}' is not supported. Supported approaches are: ['domain', 'complement']")

    if contour_radius is not None:
        zeta = circle_points(schedule.M, contour_radius)[1]
        orientation = 1.0 if univalent_map.side == Side.INTERIOR else -1.0
        sums, _ = _contour_sums(univalent_map, collar_representative(h)(zeta), zeta, orientation, z, q)
        return _scalar_or_array(sums, scalar)

    rows, closest = _level_integrals(univalent_map, h, z, q, schedule, approach)
    if closest < NODE_COLLISION_DISTANCE:
        log.warning(f"evaluation point within {closest:.1e} of a quadrature node, stretching the schedule")
        schedule = schedule.stretched(COLLISION_STRETCH)
        rows, closest = _level_integrals(univalent_map, h, z, q, schedule, approach)
        if closest < NODE_COLLISION_DISTANCE:
            raise NodeCollisionError(f"Evaluation point remains within {closest:.1e} of the level curves")

    estimate = neville_extrapolate(schedule.eps, rows)
    allowed = schedule.tol * np.maximum(1.0, np.abs(estimate.value))
    if np.any(estimate.error > allowed):
        worst = float(np.max(estimate.error))
        raise ConvergenceError(f"Level-curve extrapolation residual {worst:.3e} exceeds tolerance", residual=worst)
    return _scalar_or_array(estimate.value, scalar)


def collar_cauchy(
    univalent_map: UnivalentMap,
    h: HarmonicDiskFunction,
    z: ArrayLike,
    q: complex = INF,
    toward: Side = Side.EXTERIOR,
    M: int = 512,
) -> Union[complex, np.ndarray]:
    """J^q h on one side of the curve from a single collar contour pushed onto the other side.

    ``toward`` names the side of the unit circle (pulled-back plane) the contour is moved to.
    """
    radius = float(np.exp(COLLAR_STEP if toward == Side.EXTERIOR else -COLLAR_STEP))
    return cauchy_J(univalent_map, h, z, q, ExtrapolationSchedule(M=M), contour_radius=radius)


def side_of_point(univalent_map: UnivalentMap, q: complex) -> str:
    if is_infinite(q):
        return "omega2" if univalent_map.side == Side.INTERIOR else "omega1"
    boundary = univalent_map.value(circle_points(2048)[1])
    if float(np.min(np.abs(boundary - q))) < 1e-9:
        raise DomainError(f"Normalization point {q} lies on the curve")
    return "omega2" if bool(complement_contains(univalent_map, q)[0]) else "omega1"


@dataclass(frozen=True, eq=False)
class JumpPair:
    """u = u1 - u2 with h1 a Laurent series in pulled-back coordinates and h2 a Faber series on the far side."""

    h1: LaurentSeries
    h2: FaberSeries
    q: complex
    side_of_q: str
    residual: float

    def to_dict(self) -> Dict:
        return {
            "h1": self.h1.to_dict(),
            "h2_faber": {"re": self.h2.coeffs.real.tolist(), "im": self.h2.coeffs.imag.tolist()},
            "h2_constant": {"re": float(self.h2.constant.real), "im": float(self.h2.constant.imag)},
            "q": None if is_infinite(self.q) else {"re": float(self.q.real), "im": float(self.q.imag)},
            "side_of_q": self.side_of_q,
            "residual": self.residual,
        }


def _read_inner_series(univalent_map: UnivalentMap, values: np.ndarray, radius: float) -> LaurentSeries:
    spectrum = np.fft.fft(values) / len(values)
    spectrum[np.abs(spectrum) < NOISE_FLOOR * np.max(np.abs(spectrum))] = 0
    if univalent_map.side == Side.INTERIOR:
        orders = np.arange(0, INNER_READ_TERMS + 1)
        return LaurentSeries(spectrum[orders] * radius ** (-orders.astype(float)), 0)
    orders = np.arange(-INNER_READ_TERMS, 1)
    return LaurentSeries(spectrum[orders % len(values)] * radius ** (-orders.astype(float)), -INNER_READ_TERMS)


def jump_decompose(
    univalent_map: UnivalentMap,
    u: FourierBoundaryData,
    q: Optional[complex] = None,
    schedule: Optional[ExtrapolationSchedule] = None,
    tol: float = 1e-5,
) -> JumpPair:
    """Split boundary data into holomorphic pieces on both sides of the curve, normalized at q."""
    if q is None:
        if univalent_map.side == Side.EXTERIOR:
            raise ConfigError("A normalization point q is required when the map's domain is unbounded")
        q = INF
    side = side_of_point(univalent_map, q)
    schedule = schedule or ExtrapolationSchedule()
    h = harmonic_extension(u)
    log.info(f"decomposing boundary data of order {u.N} with normalization at {q}...")

    def evaluate_J(points: np.ndarray) -> np.ndarray:
        return np.asarray(cauchy_J(univalent_map, h, points, q, schedule))

    radius = domain_radius(univalent_map, INNER_READ_STEP)
    inner = circle_points(INNER_READ_SIZE, radius)[1]
    h1 = _read_inner_series(univalent_map, evaluate_J(univalent_map.value(inner)), radius)
    h2_coeffs, h2_constant = faber_inverse(univalent_map, evaluate_J, max(u.N, 1), with_constant=True)
    h2 = FaberSeries(
        univalent_map=univalent_map,
        table=faber_polynomials(univalent_map, max(u.N, 1)),
        coeffs=h2_coeffs,
        constant=h2_constant,
    )

    theta, boundary = circle_points(RESIDUAL_GRID)
    u1 = h1(boundary)
    u2 = h2.unchecked(univalent_map.value(boundary))
    residual = float(np.max(np.abs(u(theta) - (u1 - u2))))
    log.info(f"jump decomposition residual {residual:.3e}")
    if residual > tol:
        raise DecompositionQualityError(f"Jump residual {residual:.3e} exceeds tolerance {tol:.1e}")
    return JumpPair(h1=h1, h2=h2, q=complex(q), side_of_q=side, residual=residual)


def _area_quadrature(side: Side, radial: int, angular: int) -> Tuple[np.ndarray, np.ndarray]:
    nodes, weights = disk_quadrature(radial, angular)
    if side == Side.INTERIOR:
        return nodes, weights
    return 1 / nodes, weights / np.abs(nodes) ** 4


def antiholomorphic_density(h: HarmonicDiskFunction, side: Side) -> LaurentSeries:
    """Coefficient of d conj(zeta) in the pulled-back derivative dbar h, as a series in conj(zeta)."""
    n = np.arange(1, h.N + 1)
    if side == Side.INTERIOR:
        return LaurentSeries(n * h.antiholo[1:], 0)
    coeffs = np.zeros(h.N + 1, dtype=complex)
    coeffs[h.N - n] = -n * h.holo[1:]
    return LaurentSeries(coeffs, -h.N - 1)


def holomorphic_density(h: HarmonicDiskFunction, side: Side) -> LaurentSeries:
    """Coefficient of d zeta in the pulled-back derivative d h."""
    n = np.arange(1, h.N + 1)
    if side == Side.INTERIOR:
        return LaurentSeries(n * h.holo[1:], 0)
    coeffs = np.zeros(h.N + 1, dtype=complex)
    coeffs[h.N - n] = -n * h.antiholo[1:]
    return LaurentSeries(coeffs, -h.N - 1)


def _with_resolution_check(compute, radial: int, angular: int, check: bool) -> np.ndarray:
    values = compute(radial, angular)
    if check:
        refined = compute(2 * radial, 2 * angular)
        gap = float(np.max(np.abs(refined - values) / np.maximum(1.0, np.abs(refined))))
        if gap > RESOLUTION_TOLERANCE:
            raise ResolutionError(f"Area quadrature changed by {gap:.3e} when the grid was doubled")
    return values


def schiffer_T12(
    f: UnivalentMap,
    density: LaurentSeries,
    z: ArrayLike,
    radial: int = QUADRATURE_RADIAL,
    angular: int = QUADRATURE_ANGULAR,
    check_resolution: bool = True,
) -> Union[complex, np.ndarray]:
    """dz-coefficient of T12 applied to the pulled-back density at physical points z off the closed domain."""
    z = np.asarray(z, dtype=complex)
    scalar = z.ndim == 0
    z = np.atleast_1d(z)

    def compute(n_radial: int, n_angular: int) -> np.ndarray:
        nodes, weights = _area_quadrature(f.side, n_radial, n_angular)
        weighted = density(np.conj(nodes)) * f.derivative(nodes) * weights
        images = f.value(nodes)
        return np.sum(weighted[None, :] / (images[None, :] - z[:, None]) ** 2, axis=1) / np.pi

    return _scalar_or_array(_with_resolution_check(compute, radial, angular, check_resolution), scalar)


def schiffer_T11(
    f: UnivalentMap,
    density: LaurentSeries,
    z: ArrayLike,
    radial: int = QUADRATURE_RADIAL,
    angular: int = QUADRATURE_ANGULAR,
    check_resolution: bool = True,
    pulled_back: bool = False,
) -> Union[complex, np.ndarray]:
    """dz-coefficient of T11 at physical points z in the domain, from the desingularized kernel.

    With ``pulled_back`` the output is the d zeta coefficient at zeta = f^-1(z).
    """
    z = np.asarray(z, dtype=complex)
    scalar = z.ndim == 0
    zeta = np.atleast_1d(invert(f, np.atleast_1d(z)))

    def compute(n_radial: int, n_angular: int) -> np.ndarray:
        nodes, weights = _area_quadrature(f.side, n_radial, n_angular)
        weighted = density(np.conj(nodes)) * weights
        kernels = np.array([bergman_schiffer_kernel(f, nodes, point) for point in zeta]) * 2j * np.pi
        return kernels @ weighted / np.pi

    values = _with_resolution_check(compute, radial, angular, check_resolution)
    if not pulled_back:
        values = values / f.derivative(zeta)
    return _scalar_or_array(values, scalar)


@dataclass(frozen=True)
class WirtingerResiduals:
    domain: float
    complement: float
    antiholomorphic: float

    @property
    def max(self) -> float:
        return max(self.domain, self.complement, self.antiholomorphic)


def _wirtinger_derivatives(evaluate, z: np.ndarray, step: float) -> Tuple[np.ndarray, np.ndarray]:
    shifts = np.array([step, -step, 1j * step, -1j * step])
    values = np.asarray(evaluate((z[:, None] + shifts[None, :]).ravel())).reshape(len(z), 4)
    dx = (values[:, 0] - values[:, 1]) / (2 * step)
    dy = (values[:, 2] - values[:, 3]) / (2 * step)
    return (dx - 1j * dy) / 2, (dx + 1j * dy) / 2


def verify_wirtinger_identities(
    univalent_map: UnivalentMap,
    h: HarmonicDiskFunction,
    domain_points: ArrayLike,
    complement_points: ArrayLike,
    q: complex = INF,
    step: float = FD_STEP,
    schedule: Optional[ExtrapolationSchedule] = None,
) -> WirtingerResiduals:
    """dJ = dh + T11 dbar h in the domain, dJ = T12 dbar h on the far side, dbar J = 0 off the curve."""
    domain_points = np.atleast_1d(np.asarray(domain_points, dtype=complex))
    complement_points = np.atleast_1d(np.asarray(complement_points, dtype=complex))
    side = univalent_map.side
    alpha = antiholomorphic_density(h, side)

    def evaluate(points: np.ndarray) -> np.ndarray:
        return np.asarray(cauchy_J(univalent_map, h, points, q, schedule))

    d_domain, dbar_domain = _wirtinger_derivatives(evaluate, domain_points, step)
    d_complement, dbar_complement = _wirtinger_derivatives(evaluate, complement_points, step)

    zeta = np.atleast_1d(invert(univalent_map, domain_points))
    dh = holomorphic_density(h, side)(zeta) / univalent_map.derivative(zeta)
    expected_domain = dh + np.atleast_1d(schiffer_T11(univalent_map, alpha, domain_points))
    expected_complement = np.atleast_1d(schiffer_T12(univalent_map, alpha, complement_points))

    residuals = WirtingerResiduals(
        domain=float(np.max(np.abs(d_domain - expected_domain))),
        complement=float(np.max(np.abs(d_complement - expected_complement))),
        antiholomorphic=float(max(np.max(np.abs(dbar_domain)), np.max(np.abs(dbar_complement)))),
    )
    log.info(f"wirtinger residuals: {residuals}")
    return residuals


@dataclass(frozen=True, eq=False)
class CollarFunction:
    """h(zeta) = holo(zeta) + antiholo(conj(zeta)) + log_coeff log|zeta| on an annulus at the unit circle."""

    holo: LaurentSeries
    antiholo: LaurentSeries = field(default_factory=lambda: LaurentSeries([0]))
    log_coeff: complex = 0j

    @classmethod
    def from_disk(cls, h: HarmonicDiskFunction) -> "CollarFunction":
        return cls(holo=LaurentSeries(h.holo, 0), antiholo=LaurentSeries(h.antiholo, 0))

    def __call__(self, zeta: ArrayLike) -> np.ndarray:
        zeta = np.atleast_1d(np.asarray(zeta, dtype=complex))
        return self.holo(zeta) + self.antiholo(np.conj(zeta)) + self.log_coeff * np.log(np.abs(zeta))

    def decomposition(self) -> Tuple[LaurentSeries, LaurentSeries, complex]:
        """Holomorphic part, antiholomorphic part without constant, and the log|zeta| coefficient."""
        constant = self.antiholo.coeff(0)
        holo = _add_constant(self.holo, constant)
        antiholo = _add_constant(self.antiholo, -constant)
        return holo, antiholo, complex(self.log_coeff)

    def trace(self) -> FourierBoundaryData:
        """Boundary values on the unit circle; log|zeta| vanishes there."""
        N = max(abs(self.holo.n_min), abs(self.holo.n_max), abs(self.antiholo.n_min), abs(self.antiholo.n_max))
        modes = {m: self.holo.coeff(m) + self.antiholo.coeff(-m) for m in range(-N, N + 1)}
        return FourierBoundaryData.from_modes(modes, N)

    def bounce(self, side: Side = Side.INTERIOR) -> "CollarFunction":
        """Harmonic extension of the boundary trace to the whole disk (interior) or its complement."""
        trace = self.trace()
        N = trace.N
        if side == Side.INTERIOR:
            return CollarFunction(
                holo=LaurentSeries(trace.coeffs[N:], 0),
                antiholo=LaurentSeries(np.concatenate([[0], trace.coeffs[:N][::-1]]), 0),
            )
        # c_m e^{im theta} extends as conj(zeta)^-m for m > 0 and zeta^m for m <= 0
        return CollarFunction(
            holo=LaurentSeries(trace.coeffs[: N + 1], -N),
            antiholo=LaurentSeries(np.concatenate([trace.coeffs[N + 1 :][::-1], [0]]), -N),
        )


def _add_constant(series: LaurentSeries, constant: complex) -> LaurentSeries:
    low, high = min(series.n_min, 0), max(series.n_max, 0)
    coeffs = np.array([series.coeff(n) for n in range(low, high + 1)])
    coeffs[-low] += constant
    return LaurentSeries(coeffs, low)


def anchor_limit(
    univalent_map: UnivalentMap,
    h: CollarFunction,
    alpha: LaurentSeries,
    schedule: Optional[ExtrapolationSchedule] = None,
    bounce: bool = False,
) -> complex:
    """Extrapolated limit of the level-curve integral of h times the one-form alpha(w) dw."""
    schedule = schedule or ExtrapolationSchedule()
    if bounce:
        h = h.bounce(univalent_map.side)
    orientation = 1.0 if univalent_map.side == Side.INTERIOR else -1.0
    values = []
    for step in schedule.eps:
        zeta = circle_points(schedule.M, domain_radius(univalent_map, step))[1]
        dw = univalent_map.derivative(zeta) * 1j * zeta * (2 * np.pi / schedule.M) * orientation
        values.append(np.sum(h(zeta) * alpha(univalent_map.value(zeta)) * dw))
    estimate = neville_extrapolate(schedule.eps, np.array(values))
    if float(estimate.error) > schedule.tol * max(1.0, abs(estimate.value)):
        raise ConvergenceError(f"Anchor limit did not converge (gap {float(estimate.error):.3e})", float(estimate.error))
    return complex(estimate.value)


def mobius_invariance_suite(
    univalent_map: UnivalentMap,
    matrix: Union[Sequence, np.ndarray],
    inputs: Sequence[HarmonicDiskFunction],
    domain_points: ArrayLike,
    complement_points: ArrayLike,
    q: complex = INF,
    schedule: Optional[ExtrapolationSchedule] = None,
) -> float:
    """Largest pointwise defect of the Moebius covariance of J^q, T12 and T11."""
    matrix = np.asarray(matrix, dtype=complex).reshape(2, 2)
    moved = moebius_compose(matrix, univalent_map)
    (a, b), (c, d) = matrix
    domain_points = np.atleast_1d(np.asarray(domain_points, dtype=complex))
    complement_points = np.atleast_1d(np.asarray(complement_points, dtype=complex))
    all_points = np.concatenate([domain_points, complement_points])
    moved_points = np.array([moebius_point(matrix, p) for p in all_points])
    if not np.all(np.isfinite(moved_points)):
        raise DomainError("Moebius transformation sends a sample point to infinity")
    moved_q = moebius_point(matrix, q)
    jacobian = (a * d - b * c) / (c * all_points + d) ** 2

    worst = 0.0
    for h in inputs:
        original = np.asarray(cauchy_J(univalent_map, h, all_points, q, schedule))
        transformed = np.asarray(cauchy_J(moved, h, moved_points, moved_q, schedule))
        worst = max(worst, float(np.max(np.abs(original - transformed))))

        alpha = antiholomorphic_density(h, univalent_map.side)
        n1 = len(domain_points)
        t12 = np.atleast_1d(schiffer_T12(univalent_map, alpha, complement_points))
        t12_moved = np.atleast_1d(schiffer_T12(moved, alpha, moved_points[n1:])) * jacobian[n1:]
        t11 = np.atleast_1d(schiffer_T11(univalent_map, alpha, domain_points))
        t11_moved = np.atleast_1d(schiffer_T11(moved, alpha, moved_points[:n1])) * jacobian[:n1]
        worst = max(worst, float(np.max(np.abs(t12 - t12_moved))), float(np.max(np.abs(t11 - t11_moved))))
    log.info(f"moebius invariance defect {worst:.3e}")
    return worst


def two_sided_residual(
    univalent_map: UnivalentMap,
    h: HarmonicDiskFunction,
    z: ArrayLike,
    q: complex = INF,
    schedule: Optional[ExtrapolationSchedule] = None,
) -> float:
    """Defect of J from the domain side against minus J of the transmitted data from the far side."""
    inside = np.asarray(cauchy_J(univalent_map, h, z, q, schedule, approach="domain"))
    outside = np.asarray(cauchy_J(univalent_map, h, z, q, schedule, approach="complement"))
    return float(np.max(np.abs(inside + outside)))


def transmitted_jump_residual(
    univalent_map: UnivalentMap,
    h: HarmonicDiskFunction,
    z: ArrayLike,
    q: Optional[complex] = None,
    order: int = 64,
) -> float:
    """Defect of h = J h - O(J h restricted to the far side) at physical points z of the domain."""
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    if q is None:
        if univalent_map.side == Side.EXTERIOR:
            raise ConfigError("A normalization point q is required when the map's domain is unbounded")
        q = INF
    far = univalent_map.side.flipped
    near = univalent_map.side

    def far_side_J(points: np.ndarray) -> np.ndarray:
        return np.asarray(collar_cauchy(univalent_map, h, points, q, toward=near))

    transmitted = transmit(univalent_map, far_side_J, order).function
    zeta = np.atleast_1d(invert(univalent_map, z))
    inside_J = np.asarray(collar_cauchy(univalent_map, h, z, q, toward=far))
    defect = pulled_back_eval(h, zeta) - (inside_J - pulled_back_eval(transmitted, zeta))
    return float(np.max(np.abs(defect)))
