import logging
from abc import ABC, abstractmethod
from dataclasses import dataclass
from enum import Enum
from typing import Optional, Sequence, Tuple, Union

import numpy as np

from quasikit.errors import DomainError, InversionError
from quasikit.series import ArrayLike, circle_points

log = logging.getLogger(__name__)

INF = complex(np.inf, 0)
DOMAIN_TOLERANCE = 1e-12
NEWTON_TOLERANCE = 1e-12
NEWTON_MAX_ITER = 50
UNIVALENCE_THRESHOLD = 0.02
SMALL_CIRCLE = 1e-3


def is_infinite(z: complex) -> bool:
    return bool(np.isinf(np.real(z)) or np.isinf(np.imag(z)))


class Side(str, Enum):
    INTERIOR = "interior"
    EXTERIOR = "exterior"

    @property
    def flipped(self) -> "Side":
        return Side.EXTERIOR if self == Side.INTERIOR else Side.INTERIOR


def _as_array(z: ArrayLike) -> np.ndarray:
    return np.asarray(z, dtype=complex)


class UnivalentMap(ABC):
    """Conformal map of the unit disk (interior) or of its complement (exterior).

    ``eval`` and ``deriv`` enforce the closed domain; ``value`` and ``derivative`` evaluate the analytic
    continuation and are used wherever curves on the far side of the circle are sampled.
    """

    side: Side

    @abstractmethod
    def value(self, z: ArrayLike) -> np.ndarray:
        ...

    @abstractmethod
    def derivative(self, z: ArrayLike) -> np.ndarray:
        ...

    @property
    @abstractmethod
    def basepoint(self) -> complex:
        """F(0) for interior maps, the value at infinity for exterior maps."""

    @property
    def certificate(self) -> str:
        return ""

    def in_domain(self, z: ArrayLike) -> np.ndarray:
        modulus = np.abs(_as_array(z))
        if self.side == Side.INTERIOR:
            return modulus <= 1 + DOMAIN_TOLERANCE
        return modulus >= 1 - DOMAIN_TOLERANCE

    def _check_domain(self, z: ArrayLike) -> None:
        if not np.all(self.in_domain(z)):
            raise DomainError(f"Point outside the {self.side.value} domain of {self!r}")

    def eval(self, z: ArrayLike) -> np.ndarray:
        self._check_domain(z)
        return self.value(z)

    def deriv(self, z: ArrayLike) -> np.ndarray:
        self._check_domain(z)
        return self.derivative(z)


@dataclass(frozen=True)
class Identity(UnivalentMap):
    side: Side = Side.INTERIOR

    def value(self, z: ArrayLike) -> np.ndarray:
        return _as_array(z).copy()

    def derivative(self, z: ArrayLike) -> np.ndarray:
        return np.ones_like(_as_array(z))

    @property
    def basepoint(self) -> complex:
        return 0j if self.side == Side.INTERIOR else INF

    @property
    def certificate(self) -> str:
        return "identity"


@dataclass(frozen=True)
class TaylorInterior(UnivalentMap):
    """f(z) = offset + a_1 z + ... + a_K z^K."""

    coeffs: Tuple[complex, ...]
    offset: complex = 0j
    jordan_required: bool = True
    side: Side = Side.INTERIOR

    def __post_init__(self) -> None:
        object.__setattr__(self, "coeffs", tuple(complex(c) for c in self.coeffs))
        if not self.coeffs or self.coeffs[0] == 0:
            raise DomainError("TaylorInterior needs a nonzero linear coefficient a_1")
        if len(self.coeffs) == 2:
            ratio = abs(self.coeffs[1] / self.coeffs[0])
            if self.jordan_required and ratio >= 0.5:
                raise DomainError(f"Quadratic map with |c| = {ratio} is not admissible (jordan_required={self.jordan_required})")

    @property
    def _poly(self) -> np.ndarray:
        return np.array((self.offset,) + self.coeffs, dtype=complex)

    def value(self, z: ArrayLike) -> np.ndarray:
        return np.polynomial.polynomial.polyval(_as_array(z), self._poly)

    def derivative(self, z: ArrayLike) -> np.ndarray:
        return np.polynomial.polynomial.polyval(_as_array(z), np.polynomial.polynomial.polyder(self._poly))

    @property
    def basepoint(self) -> complex:
        return complex(self.offset)

    @property
    def certificate(self) -> str:
        if len(self.coeffs) == 2 and abs(self.coeffs[1] / self.coeffs[0]) <= 0.5:
            return "z + c z^2 with |c| <= 1/2 has Re f'/a_1 > 0 on the disk"
        return "grid screen only"


@dataclass(frozen=True)
class JoukowskiExterior(UnivalentMap):
    """g(w) = w + t/w on |w| > 1; the image of the circle is an ellipse (a segment when |t| = 1)."""

    t: complex
    jordan_required: bool = True
    side: Side = Side.EXTERIOR

    def __post_init__(self) -> None:
        object.__setattr__(self, "t", complex(self.t))
        if abs(self.t) > 1 or (self.jordan_required and abs(self.t) >= 1):
            raise DomainError(f"Joukowski parameter |t| = {abs(self.t)} is not admissible (jordan_required={self.jordan_required})")

    def value(self, z: ArrayLike) -> np.ndarray:
        z = _as_array(z)
        return z + self.t / z

    def derivative(self, z: ArrayLike) -> np.ndarray:
        z = _as_array(z)
        return 1 - self.t / z**2

    @property
    def basepoint(self) -> complex:
        return INF

    @property
    def certificate(self) -> str:
        return "w + t/w is univalent on |w| > 1 for |t| <= 1"


def _moebius_apply(matrix: np.ndarray, x: np.ndarray) -> np.ndarray:
    (a, b), (c, d) = matrix
    denominator = c * x + d
    if np.any(denominator == 0):
        raise DomainError("Evaluation at a pole of the Moebius transformation")
    return (a * x + b) / denominator


def moebius_point(matrix: np.ndarray, x: complex) -> complex:
    """Moebius image of a point of the Riemann sphere."""
    (a, b), (c, d) = np.asarray(matrix, dtype=complex)
    if is_infinite(x):
        return INF if c == 0 else a / c
    if c * x + d == 0:
        return INF
    return (a * x + b) / (c * x + d)


@dataclass(frozen=True)
class MoebiusComposite(UnivalentMap):
    """M o inner with M given by its row-major entries (a, b, c, d)."""

    entries: Tuple[complex, complex, complex, complex]
    inner: UnivalentMap

    def __post_init__(self) -> None:
        object.__setattr__(self, "entries", tuple(complex(e) for e in self.entries))
        a, b, c, d = self.entries
        if a * d - b * c == 0:
            raise DomainError("Moebius matrix is singular")

    @property
    def matrix(self) -> np.ndarray:
        return np.array(self.entries, dtype=complex).reshape(2, 2)

    @property
    def side(self) -> Side:
        return self.inner.side

    def value(self, z: ArrayLike) -> np.ndarray:
        return _moebius_apply(self.matrix, self.inner.value(z))

    def derivative(self, z: ArrayLike) -> np.ndarray:
        a, b, c, d = self.entries
        inner_value = self.inner.value(z)
        denominator = c * inner_value + d
        if np.any(denominator == 0):
            raise DomainError("Evaluation at a pole of the Moebius transformation")
        return (a * d - b * c) / denominator**2 * self.inner.derivative(z)

    @property
    def basepoint(self) -> complex:
        return moebius_point(self.matrix, self.inner.basepoint)

    @property
    def certificate(self) -> str:
        return f"Moebius image of: {self.inner.certificate}"


@dataclass(frozen=True)
class ReflectedMap(UnivalentMap):
    """z -> 1/inner(1/z); swaps the interior and exterior conventions."""

    inner: UnivalentMap

    @property
    def side(self) -> Side:
        return self.inner.side.flipped

    def _near_origin(self, z: np.ndarray) -> np.ndarray:
        return np.abs(z) < 1e-8

    def value(self, z: ArrayLike) -> np.ndarray:
        z = _as_array(z)
        small = self._near_origin(z)
        safe = np.where(small, 1.0, z)
        result = 1 / self.inner.value(1 / safe)
        if np.any(small):
            result = np.where(small, self._origin_value(), result)
        return result

    def derivative(self, z: ArrayLike) -> np.ndarray:
        z = _as_array(z)
        small = self._near_origin(z)
        safe = np.where(small, 1.0, z)
        inner_value = self.inner.value(1 / safe)
        result = self.inner.derivative(1 / safe) / (inner_value**2 * safe**2)
        if np.any(small):
            result = np.where(small, self._origin_derivative(), result)
        return result

    def _small_circle_samples(self) -> Tuple[np.ndarray, np.ndarray]:
        _, points = circle_points(64, SMALL_CIRCLE)
        return points, 1 / self.inner.value(1 / points)

    def _origin_value(self) -> complex:
        _, values = self._small_circle_samples()
        return complex(np.mean(values))

    def _origin_derivative(self) -> complex:
        points, values = self._small_circle_samples()
        return complex(np.mean(values / points))

    @property
    def basepoint(self) -> complex:
        inner_base = self.inner.basepoint
        if is_infinite(inner_base):
            return 0j
        if inner_base == 0:
            return INF
        return 1 / inner_base

    @property
    def certificate(self) -> str:
        return f"inversion of: {self.inner.certificate}"


def moebius_compose(matrix: Union[Sequence, np.ndarray], univalent_map: UnivalentMap) -> UnivalentMap:
    matrix = np.asarray(matrix, dtype=complex).reshape(2, 2)
    if np.allclose(matrix, np.eye(2) * matrix[0, 0]) and matrix[0, 0] != 0:
        return univalent_map
    if isinstance(univalent_map, MoebiusComposite):
        return MoebiusComposite(tuple((matrix @ univalent_map.matrix).ravel()), univalent_map.inner)
    return MoebiusComposite(tuple(matrix.ravel()), univalent_map)


def to_interior(univalent_map: UnivalentMap) -> UnivalentMap:
    if univalent_map.side == Side.INTERIOR:
        return univalent_map
    return ReflectedMap(univalent_map)


@dataclass(frozen=True, eq=False)
class LevelCurve:
    r: float
    nodes: np.ndarray
    tangents: np.ndarray

    @property
    def M(self) -> int:
        return len(self.nodes)

    def winding_number(self, points: ArrayLike) -> np.ndarray:
        """Winding number of the closed polygon through the nodes around each point."""
        points = np.atleast_1d(_as_array(points))
        shifted = self.nodes[None, :] - points[:, None]
        increments = np.angle(np.roll(shifted, -1, axis=1) / shifted)
        return np.rint(np.sum(increments, axis=1) / (2 * np.pi)).astype(int)


def level_curve(univalent_map: UnivalentMap, r: float, M: int) -> LevelCurve:
    if M < 2 or M & (M - 1):
        raise DomainError(f"Level curve size must be a power of two, got {M}")
    if univalent_map.side == Side.INTERIOR and not 0 < r < 1:
        raise DomainError(f"Interior level curves need 0 < r < 1, got {r}")
    if univalent_map.side == Side.EXTERIOR and not r > 1:
        raise DomainError(f"Exterior level curves need r > 1, got {r}")
    _, zeta = circle_points(M, r)
    return LevelCurve(
        r=r, nodes=univalent_map.value(zeta), tangents=univalent_map.derivative(zeta) * 1j * zeta
    )


def _search_guess(univalent_map: UnivalentMap, w: np.ndarray) -> np.ndarray:
    if univalent_map.side == Side.INTERIOR:
        radii = np.linspace(0.02, 1.0, 50)
    else:
        radii = np.geomspace(1.0, 8.0, 60)
    theta = 2 * np.pi * np.arange(128) / 128
    grid = (radii[:, None] * np.exp(1j * theta)[None, :]).ravel()
    images = univalent_map.value(grid)
    nearest = np.argmin(np.abs(images[None, :] - w.ravel()[:, None]), axis=1)
    return grid[nearest].reshape(w.shape)


def invert(
    univalent_map: UnivalentMap,
    w: ArrayLike,
    guess: Optional[ArrayLike] = None,
    tol: float = NEWTON_TOLERANCE,
    max_iter: int = NEWTON_MAX_ITER,
) -> np.ndarray:
    """Damped Newton iteration for F(z) = w, vectorized over w."""
    w = _as_array(w)
    scalar = w.ndim == 0
    w = np.atleast_1d(w)
    z = _search_guess(univalent_map, w) if guess is None else np.broadcast_to(_as_array(guess), w.shape).copy()
    target = tol * np.maximum(1.0, np.abs(w))

    residual = np.abs(univalent_map.value(z) - w)
    iteration = 0
    for iteration in range(max_iter):
        active = residual >= target
        if not np.any(active):
            break
        step = (univalent_map.value(z) - w) / univalent_map.derivative(z)
        damping = np.ones(w.shape)
        for _ in range(20):
            candidate = z - damping * step
            candidate_residual = np.abs(univalent_map.value(candidate) - w)
            worse = active & (candidate_residual > residual)
            if not np.any(worse):
                break
            damping = np.where(worse, damping / 2, damping)
        z = np.where(active, candidate, z)
        residual = np.where(active, candidate_residual, residual)
    log.debug(f"newton inversion finished after {iteration} iterations")

    worst = float(np.max(residual / np.maximum(1.0, np.abs(w))))
    if worst >= tol:
        raise InversionError(f"Newton inversion did not converge, final residual {worst:.3e}", residual=worst)
    return z[0] if scalar else z


@dataclass(frozen=True)
class UnivalenceReport:
    passed: bool
    min_ratio: float
    min_derivative: float
    threshold: float
    witness: Optional[Tuple[complex, complex]] = None


def _validation_grid(univalent_map: UnivalentMap, density: int) -> np.ndarray:
    if univalent_map.side == Side.INTERIOR:
        radii = np.arange(1, density + 1) / (density + 1)
    else:
        radii = (density + 1) / np.arange(density, 0, -1) * 1.0
    n_angles = 4 * density
    theta = 2 * np.pi * np.arange(n_angles) / n_angles
    grid = (radii[:, None] * np.exp(1j * theta)[None, :]).ravel()
    return np.concatenate([[0j], grid]) if univalent_map.side == Side.INTERIOR else grid


def univalence_check(univalent_map: UnivalentMap, density: int = 24) -> UnivalenceReport:
    """Necessary-condition screen: injectivity ratio and nonvanishing derivative on a polar grid."""
    grid = _validation_grid(univalent_map, density)
    images = univalent_map.value(grid)
    derivatives = np.abs(univalent_map.derivative(grid))
    scale = float(np.median(derivatives))
    threshold = UNIVALENCE_THRESHOLD * scale

    min_ratio, witness = np.inf, None
    for start in range(0, len(grid), 256):
        block = slice(start, start + 256)
        distance = np.abs(grid[block, None] - grid[None, :])
        np.fill_diagonal(distance[:, start : start + 256], np.inf)
        ratio = np.abs(images[block, None] - images[None, :]) / distance
        index = np.unravel_index(np.argmin(ratio), ratio.shape)
        if ratio[index] < min_ratio:
            min_ratio = float(ratio[index])
            witness = (complex(grid[start + index[0]]), complex(grid[index[1]]))

    worst_point = int(np.argmin(derivatives))
    min_derivative = float(derivatives[worst_point])
    if min_derivative <= threshold:
        witness = (complex(grid[worst_point]), complex(grid[worst_point]))
    passed = min_ratio > threshold and min_derivative > threshold
    if not passed:
        log.info(f"univalence screen failed with witness {witness}")
    return UnivalenceReport(
        passed=passed,
        min_ratio=min_ratio,
        min_derivative=min_derivative,
        threshold=threshold,
        witness=None if passed else witness,
    )


@dataclass(frozen=True)
class ExteriorForm:
    """Exterior standard form g(w) = S(F(1/w)) (interior F) or S(F(w)) (exterior F), |w| >= 1.

    S is the identity when the basepoint of F is infinite and x -> 1/(x - p) otherwise, so g has a simple
    pole at infinity. Physical points omega map to the standard coordinate by S.
    """

    source: UnivalentMap

    @property
    def pole(self) -> complex:
        return self.source.basepoint

    @property
    def _standardizer(self) -> np.ndarray:
        if is_infinite(self.pole):
            return np.eye(2, dtype=complex)
        return np.array([[0, 1], [1, -self.pole]], dtype=complex)

    def _split(self) -> Tuple[np.ndarray, UnivalentMap]:
        if isinstance(self.source, MoebiusComposite):
            return self._standardizer @ self.source.matrix, self.source.inner
        return self._standardizer, self.source

    def __call__(self, w: ArrayLike) -> np.ndarray:
        w = _as_array(w)
        matrix, core = self._split()
        argument = core.value(1 / w) if self.source.side == Side.INTERIOR else core.value(w)
        return _moebius_apply(matrix, argument)

    def coordinate(self, omega: ArrayLike) -> np.ndarray:
        """Standard coordinate x = S(omega) of physical points."""
        return _moebius_apply(self._standardizer, _as_array(omega))

    def coordinate_derivative(self, omega: ArrayLike) -> np.ndarray:
        omega = _as_array(omega)
        if is_infinite(self.pole):
            return np.ones_like(omega)
        return -1 / (omega - self.pole) ** 2
