import logging
from dataclasses import dataclass
from typing import Callable, Dict, List, Optional, Sequence

import numpy as np
import scipy.linalg
from scipy.interpolate import PchipInterpolator

from quasikit.errors import (
    BoundaryRegularityError,
    ConditioningError,
    DomainError,
    InversionError,
    PairingError,
    ResolutionError,
    UndersamplingError,
)
from quasikit.faber import complement_radius
from quasikit.maps import Side, UnivalentMap, invert
from quasikit.numerics import neville_extrapolate, power_iteration
from quasikit.series import (
    ArrayLike,
    FourierBoundaryData,
    GridSamples,
    HarmonicDiskFunction,
    circle_points,
    grid_size,
    harmonic_extension,
)

log = logging.getLogger(__name__)

TWO_PI = 2 * np.pi
SPILLOVER_LIMIT = 0.1
SINGULAR_GRAM = 1e-12
TRANSMIT_STEPS = (4e-3, 2e-3, 1e-3, 5e-4)
TRANSMIT_GRID = 256
COLLAR_WIDTH = 0.1
RADIAL_STEP = 1e-5
BISECTION_STEPS = 60
PAIRING_TOLERANCE = 1e-8
NORM_GROWTH_LIMIT = 0.05


def _lift_value(kind: str, params: Dict, theta: np.ndarray) -> np.ndarray:
    if kind == "identity":
        return theta.copy()
    if kind == "rotation":
        return theta + params["alpha"]
    if kind == "sine":
        return theta + params["a"] * np.sin(theta)
    if kind == "automorphism":
        a = complex(params["re"], params["im"])
        return theta + np.angle((1 - a * np.exp(-1j * theta)) / (1 - np.conj(a) * np.exp(1j * theta)))
    raise ValueError(f"Circle homeomorphism kind '{kind}' is not supported")


@dataclass(frozen=True, eq=False)
class CircleHomeo:
    """Lift psi of an orientation preserving circle homeomorphism, psi(theta + 2 pi) = psi(theta) + 2 pi.

    ``psi`` holds samples at theta_j = 2 pi j / M; between samples the lift is a monotone cubic (PCHIP).
    When ``analytic`` names a closed form it is used for evaluation instead.
    """

    psi: np.ndarray
    analytic: Optional[Dict] = None

    def __post_init__(self) -> None:
        psi = np.asarray(self.psi, dtype=float)
        object.__setattr__(self, "psi", psi)
        steps = np.diff(np.append(psi, psi[0] + TWO_PI))
        if np.any(steps <= 0):
            raise DomainError("Circle homeomorphism samples are not strictly increasing")
        lead = 2
        extended_theta = TWO_PI * np.arange(-lead, self.M + lead + 1) / self.M
        extended_psi = np.concatenate([psi[-lead:] - TWO_PI, psi, psi[: lead + 1] + TWO_PI])
        object.__setattr__(self, "_interpolant", PchipInterpolator(extended_theta, extended_psi))

    @property
    def M(self) -> int:
        return len(self.psi)

    @property
    def theta(self) -> np.ndarray:
        return TWO_PI * np.arange(self.M) / self.M

    @classmethod
    def from_analytic(cls, kind: str, M: int = 512, **params) -> "CircleHomeo":
        analytic = {"kind": kind, **params}
        return cls(psi=_lift_value(kind, params, TWO_PI * np.arange(M) / M), analytic=analytic)

    @classmethod
    def identity(cls, M: int = 512) -> "CircleHomeo":
        return cls.from_analytic("identity", M)

    @classmethod
    def rotation(cls, alpha: float, M: int = 512) -> "CircleHomeo":
        return cls.from_analytic("rotation", M, alpha=float(alpha))

    @classmethod
    def sine(cls, a: float, M: int = 512) -> "CircleHomeo":
        if abs(a) >= 1:
            raise DomainError(f"theta + a sin(theta) is a homeomorphism only for |a| < 1, got {a}")
        return cls.from_analytic("sine", M, a=float(a))

    @classmethod
    def automorphism(cls, a: complex, M: int = 512) -> "CircleHomeo":
        """Boundary map of the disk automorphism z -> (z - a)/(1 - conj(a) z)."""
        a = complex(a)
        if abs(a) >= 1:
            raise DomainError(f"Disk automorphisms need |a| < 1, got {abs(a)}")
        return cls.from_analytic("automorphism", M, re=a.real, im=a.imag)

    def __call__(self, theta: ArrayLike) -> np.ndarray:
        theta = np.asarray(theta, dtype=float)
        if self.analytic is not None:
            params = {k: v for k, v in self.analytic.items() if k != "kind"}
            return _lift_value(self.analytic["kind"], params, theta)
        turns = np.floor(theta / TWO_PI)
        return self._interpolant(theta - TWO_PI * turns) + TWO_PI * turns

    def on_circle(self, theta: ArrayLike) -> np.ndarray:
        return np.exp(1j * self(theta))

    def inverse(self) -> "CircleHomeo":
        if self.analytic is not None:
            kind = self.analytic["kind"]
            if kind == "identity":
                return CircleHomeo.identity(self.M)
            if kind == "rotation":
                return CircleHomeo.rotation(-self.analytic["alpha"], self.M)
            if kind == "automorphism":
                return CircleHomeo.automorphism(-complex(self.analytic["re"], self.analytic["im"]), self.M)

        # bisection on psi(x) = theta_j, bracketed by the range of psi(x) - x
        fine = TWO_PI * np.arange(8 * self.M) / (8 * self.M)
        drift = self(fine) - fine
        targets = self.theta
        low = targets - drift.max() - 0.1
        high = targets - drift.min() + 0.1
        for _ in range(BISECTION_STEPS):
            middle = (low + high) / 2
            above = self(middle) > targets
            high = np.where(above, middle, high)
            low = np.where(above, low, middle)
        return CircleHomeo(psi=(low + high) / 2)

    def to_dict(self) -> Dict:
        return {"grid": self.M, "psi": self.psi.tolist(), "analytic": self.analytic}

    @classmethod
    def from_dict(cls, data: Dict) -> "CircleHomeo":
        if len(data["psi"]) != data["grid"]:
            raise ValueError(f"Expected {data['grid']} lift samples, got {len(data['psi'])}")
        return cls(psi=np.asarray(data["psi"], dtype=float), analytic=data.get("analytic"))


@dataclass(frozen=True, eq=False)
class BoundaryComposition:
    data: FourierBoundaryData
    spillover: float


def compose_boundary(
    u: FourierBoundaryData, phi: CircleHomeo, M: Optional[int] = None, order: Optional[int] = None
) -> BoundaryComposition:
    """Fourier data of u o phi read from M samples, truncated to ``order`` (default: the order of u)."""
    M = M or grid_size(u.N)
    if M < 4 * u.N:
        raise ResolutionError(f"Composition needs M >= 4N, got M={M} for N={u.N}")
    order = u.N if order is None else order
    full = FourierBoundaryData.from_samples(GridSamples(values=u(phi(TWO_PI * np.arange(M) / M))), M // 2 - 1)
    data, spillover = full.truncate(order)
    energy = u.energy()
    if spillover > SPILLOVER_LIMIT * energy and spillover > 0:
        raise UndersamplingError(
            f"Composition spills energy {spillover:.3e} beyond order {order} (input energy {energy:.3e})"
        )
    if spillover > 0:
        log.debug(f"composition spillover energy {spillover:.3e}")
    return BoundaryComposition(data=data, spillover=spillover)


def qs_modulus(phi: CircleHomeo, samples: int = 256) -> float:
    """Empirical symmetric-arc distortion; a lower bound for the quasisymmetry constant."""
    alpha = TWO_PI * np.arange(samples) / samples
    beta = np.pi * np.arange(1, samples) / samples
    centre = phi.on_circle(alpha)[:, None]
    ahead = phi.on_circle(alpha[:, None] + beta[None, :])
    behind = phi.on_circle(alpha[:, None] - beta[None, :])
    ratio = np.abs(ahead - centre) / np.abs(centre - behind)
    return float(max(np.max(ratio), np.max(1 / ratio)))


def _composition_columns(phi: CircleHomeo, N: int, M: int) -> np.ndarray:
    modes = np.concatenate([np.arange(-N, 0), np.arange(1, N + 1)])
    lifted = phi(TWO_PI * np.arange(M) / M)
    samples = np.exp(1j * np.outer(lifted, modes))
    return np.fft.fft(samples, axis=0) / M


def energy_ratio_norm(phi: CircleHomeo, N: int, M: Optional[int] = None) -> float:
    """Largest ratio D(e(u o phi)) / D(e(u)) over trigonometric u with modes 1 <= |n| <= N."""
    M = M or max(1024, grid_size(8 * N))
    if M < 4 * N:
        raise ResolutionError(f"Energy ratio needs M >= 4N, got M={M} for N={N}")
    columns = _composition_columns(phi, N, M)
    frequencies = np.fft.fftfreq(M, d=1.0 / M)
    gram = columns.conj().T @ (np.abs(frequencies)[:, None] * columns)
    weights = np.abs(np.concatenate([np.arange(-N, 0), np.arange(1, N + 1)])).astype(float)
    scaled = gram / np.sqrt(np.outer(weights, weights))
    scaled = (scaled + scaled.conj().T) / 2

    spectrum = scipy.linalg.eigh(scaled, eigvals_only=True)
    if spectrum[0] <= SINGULAR_GRAM * spectrum[-1]:
        raise ConditioningError(f"Energy Gram matrix is numerically singular at N={N}", spectrum[-1] / spectrum[0])
    largest = power_iteration(lambda x: scaled @ x, len(weights))
    if abs(largest - spectrum[-1]) > 1e-9 * spectrum[-1]:
        log.warning(f"power iteration eigenvalue {largest} disagrees with eigh {spectrum[-1]}, using eigh")
        largest = spectrum[-1]
    return float(np.sqrt(largest))


@dataclass(frozen=True)
class NormTrend:
    orders: List[int]
    norms: List[float]
    label: str

    def rows(self) -> List[Dict]:
        return [{"N": N, "C_hat": norm} for N, norm in zip(self.orders, self.norms)]


def quasisymmetry_diagnostic(phi: CircleHomeo, orders: Sequence[int] = (8, 16, 32)) -> NormTrend:
    """Energy ratio norms over doubling orders; steady growth is reported as an empirical verdict only."""
    norms = [energy_ratio_norm(phi, N) for N in orders]
    growth = [b / a - 1 for a, b in zip(norms, norms[1:])]
    bounded = all(g < NORM_GROWTH_LIMIT for g in growth)
    label = "bounded (empirical)" if bounded else "not quasisymmetric (empirical)"
    log.info(f"energy ratio norms {norms} at orders {list(orders)}: {label}")
    return NormTrend(orders=list(orders), norms=norms, label=label)


@dataclass(frozen=True, eq=False)
class TransmissionResult:
    function: HarmonicDiskFunction
    boundary: FourierBoundaryData
    energy_out: float
    collar_energy_in: float
    truncation_loss: float


def _radial_flux(
    univalent_map: UnivalentMap, evaluator: Callable[[np.ndarray], np.ndarray], radius: float, M: int
) -> float:
    zeta = circle_points(M, radius)[1]
    outward = evaluator(univalent_map.value(zeta * (1 + RADIAL_STEP / radius)))
    inward = evaluator(univalent_map.value(zeta * (1 - RADIAL_STEP / radius)))
    values = evaluator(univalent_map.value(zeta))
    radial = (outward - inward) / (2 * RADIAL_STEP)
    return float(np.real(np.sum(np.conj(values) * radial)) * radius * TWO_PI / M)


def collar_energy(
    univalent_map: UnivalentMap,
    evaluator: Callable[[np.ndarray], np.ndarray],
    inner_step: float,
    outer_step: float = COLLAR_WIDTH,
    M: int = TRANSMIT_GRID,
) -> float:
    """Dirichlet energy of a harmonic function on the far-side collar between two level curves (Green's identity)."""
    radii = sorted([complement_radius(univalent_map, inner_step), complement_radius(univalent_map, outer_step)])
    flux = _radial_flux(univalent_map, evaluator, radii[1], M) - _radial_flux(univalent_map, evaluator, radii[0], M)
    return abs(flux) / TWO_PI


def transmit(
    univalent_map: UnivalentMap,
    evaluator: Callable[[np.ndarray], np.ndarray],
    order: int = 64,
    steps: Sequence[float] = TRANSMIT_STEPS,
    M: int = TRANSMIT_GRID,
    tol: float = 1e-6,
) -> TransmissionResult:
    """Harmonic function on the map's domain with the boundary values of a far-side function.

    The result is in pulled-back coordinates; for exterior maps it is read at 1/conj(zeta).
    """
    if M < 2 * order + 1:
        raise ResolutionError(f"Transmission grid of {M} points cannot carry order {order}")
    reads = []
    for step in steps:
        zeta = circle_points(M, complement_radius(univalent_map, step))[1]
        reads.append(np.asarray(evaluator(univalent_map.value(zeta)), dtype=complex))
    estimate = neville_extrapolate(steps, np.array(reads))
    gap = float(np.max(estimate.error))
    if gap > tol * max(1.0, float(np.max(np.abs(estimate.value)))):
        raise BoundaryRegularityError(f"Boundary values did not converge under extrapolation (gap {gap:.3e})")

    full = FourierBoundaryData.from_samples(GridSamples(values=estimate.value), M // 2 - 1)
    boundary, loss = full.truncate(order)
    if loss > 0:
        log.debug(f"transmission truncation loss {loss:.3e}")
    function = harmonic_extension(boundary)
    energy_in = collar_energy(univalent_map, evaluator, steps[-1], M=M)
    log.info(f"transmitted boundary data of order {order}, energy {function.energy():.6e} (collar {energy_in:.6e})")
    return TransmissionResult(
        function=function,
        boundary=boundary,
        energy_out=function.energy(),
        collar_energy_in=energy_in,
        truncation_loss=loss,
    )


def welding_phi(f: UnivalentMap, g: UnivalentMap, M: int = 256) -> CircleHomeo:
    """g^-1 o f on the circle for an interior and an exterior map of the same curve."""
    if f.side != Side.INTERIOR or g.side != Side.EXTERIOR:
        raise PairingError("Welding needs an interior map followed by an exterior map")
    theta, circle = circle_points(M)
    try:
        zeta = invert(g, f.value(circle), guess=circle)
    except InversionError as e:
        raise PairingError(f"Curve of the interior map is not reached by the exterior map (residual {e.residual:.3e})")
    off_circle = float(np.max(np.abs(np.abs(zeta) - 1)))
    if off_circle > PAIRING_TOLERANCE:
        raise PairingError(f"Maps do not share a boundary curve: preimages leave the circle by {off_circle:.3e}")
    psi = np.unwrap(np.angle(zeta))
    if psi[-1] < psi[0]:
        raise PairingError("Welding homeomorphism reverses orientation")
    try:
        return CircleHomeo(psi=psi)
    except DomainError as e:
        raise PairingError(f"Welding samples do not form a circle homeomorphism: {e}")
