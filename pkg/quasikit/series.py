import csv
import logging
import math
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Dict, Optional, Sequence, Tuple, Union

import numpy as np

from quasikit.errors import DomainError, ResolutionError

log = logging.getLogger(__name__)

ArrayLike = Union[complex, Sequence[complex], np.ndarray]

MAX_GRID = 2**16
POISSON_ACCURACY = 1e-16
REAL_TOLERANCE = 1e-12


def grid_size(N: int) -> int:
    """Smallest power of two that is at least 4N+1 (and at least 8)."""
    return max(8, 1 << (4 * N).bit_length())


def circle_points(M: int, radius: float = 1.0) -> Tuple[np.ndarray, np.ndarray]:
    theta = 2 * np.pi * np.arange(M) / M
    return theta, radius * np.exp(1j * theta)


def _as_complex(values: ArrayLike) -> np.ndarray:
    return np.atleast_1d(np.asarray(values, dtype=complex))


def _series_to_dict(coeffs: np.ndarray, n_min: int) -> Dict:
    return {
        "n_min": int(n_min),
        "n_max": int(n_min + len(coeffs) - 1),
        "re": [float(c.real) for c in coeffs],
        "im": [float(c.imag) for c in coeffs],
    }


def _series_from_dict(data: Dict) -> Tuple[np.ndarray, int]:
    coeffs = np.asarray(data["re"], dtype=float) + 1j * np.asarray(data["im"], dtype=float)
    if len(coeffs) != data["n_max"] - data["n_min"] + 1:
        raise ValueError(f"Series length {len(coeffs)} does not match the range [{data['n_min']}, {data['n_max']}]")
    return coeffs, int(data["n_min"])


@dataclass(frozen=True, eq=False)
class GridSamples:
    """Samples at M equispaced angles on the circle of the given radius."""

    values: np.ndarray
    radius: float = 1.0

    def __post_init__(self) -> None:
        object.__setattr__(self, "values", _as_complex(self.values))
        M = len(self.values)
        if M & (M - 1):
            raise ValueError(f"Grid size must be a power of two, got {M}")

    @property
    def M(self) -> int:
        return len(self.values)

    @property
    def theta(self) -> np.ndarray:
        return 2 * np.pi * np.arange(self.M) / self.M

    @property
    def points(self) -> np.ndarray:
        return self.radius * np.exp(1j * self.theta)

    def to_csv(self, path: Path) -> None:
        with open(path, "w", newline="") as f:
            writer = csv.writer(f)
            writer.writerow(["theta", "re", "im"])
            for theta, value in zip(self.theta, self.values):
                writer.writerow([repr(float(theta)), repr(float(value.real)), repr(float(value.imag))])

    @classmethod
    def from_csv(cls, path: Path, radius: float = 1.0) -> "GridSamples":
        with open(path, newline="") as f:
            rows = list(csv.DictReader(f))
        values = np.array([float(row["re"]) + 1j * float(row["im"]) for row in rows])
        return cls(values=values, radius=radius)


@dataclass(frozen=True, eq=False)
class LaurentSeries:
    """Finite Laurent series sum_k coeffs[k] z^(n_min + k)."""

    coeffs: np.ndarray
    n_min: int = 0

    def __post_init__(self) -> None:
        object.__setattr__(self, "coeffs", _as_complex(self.coeffs))

    @property
    def n_max(self) -> int:
        return self.n_min + len(self.coeffs) - 1

    @property
    def indices(self) -> np.ndarray:
        return np.arange(self.n_min, self.n_max + 1)

    def coeff(self, n: int) -> complex:
        if self.n_min <= n <= self.n_max:
            return complex(self.coeffs[n - self.n_min])
        return 0j

    def __call__(self, z: ArrayLike) -> np.ndarray:
        z = _as_complex(z)
        if self.n_min < 0 and np.any(z == 0):
            raise DomainError("Laurent series with negative powers cannot be evaluated at 0")
        return np.polynomial.polynomial.polyval(z, self.coeffs) * z ** float(self.n_min)

    def derivative(self) -> "LaurentSeries":
        return LaurentSeries(self.coeffs * self.indices, self.n_min - 1)

    def to_dict(self) -> Dict:
        return _series_to_dict(self.coeffs, self.n_min)

    @classmethod
    def from_dict(cls, data: Dict) -> "LaurentSeries":
        coeffs, n_min = _series_from_dict(data)
        return cls(coeffs, n_min)


@dataclass(frozen=True, eq=False)
class FourierBoundaryData:
    """Truncated Fourier coefficients of a boundary function; coeffs[n + N] holds c_n."""

    coeffs: np.ndarray

    def __post_init__(self) -> None:
        coeffs = _as_complex(self.coeffs)
        if len(coeffs) % 2 == 0:
            raise ValueError(f"Fourier data needs 2N+1 coefficients, got {len(coeffs)}")
        object.__setattr__(self, "coeffs", coeffs)

    @classmethod
    def from_modes(cls, modes: Dict[int, complex], N: Optional[int] = None) -> "FourierBoundaryData":
        N = max([abs(n) for n in modes] + [0]) if N is None else N
        coeffs = np.zeros(2 * N + 1, dtype=complex)
        for n, c in modes.items():
            coeffs[n + N] = c
        return cls(coeffs)

    @property
    def N(self) -> int:
        return (len(self.coeffs) - 1) // 2

    @property
    def indices(self) -> np.ndarray:
        return np.arange(-self.N, self.N + 1)

    def coeff(self, n: int) -> complex:
        if abs(n) <= self.N:
            return complex(self.coeffs[n + self.N])
        return 0j

    def energy(self) -> float:
        return float(np.sum(np.abs(self.indices) * np.abs(self.coeffs) ** 2))

    @property
    def is_real(self) -> bool:
        scale = max(1.0, float(np.max(np.abs(self.coeffs))))
        return bool(np.max(np.abs(self.coeffs - np.conj(self.coeffs[::-1]))) < REAL_TOLERANCE * scale)

    def __call__(self, theta: ArrayLike) -> np.ndarray:
        theta = np.atleast_1d(np.asarray(theta, dtype=float))
        return np.exp(1j * np.outer(theta, self.indices)) @ self.coeffs

    def derivative_values(self, M: int) -> np.ndarray:
        return FourierBoundaryData(1j * self.indices * self.coeffs).sample(M).values

    def sample(self, M: int) -> GridSamples:
        if M < 2 * self.N + 1:
            raise ResolutionError(f"Grid of {M} points cannot carry Fourier data of order {self.N}")
        spectrum = np.zeros(M, dtype=complex)
        spectrum[self.indices % M] = self.coeffs
        return GridSamples(values=M * np.fft.ifft(spectrum))

    @classmethod
    def from_samples(cls, samples: GridSamples, N: int) -> "FourierBoundaryData":
        if samples.M < 2 * N + 1:
            raise ResolutionError(f"Grid of {samples.M} points cannot resolve Fourier data of order {N}")
        spectrum = np.fft.fft(samples.values) / samples.M
        return cls(spectrum[np.arange(-N, N + 1) % samples.M])

    def truncate(self, N: int) -> Tuple["FourierBoundaryData", float]:
        """Restrict to order N; also returns the energy carried by the dropped modes."""
        if N >= self.N:
            return FourierBoundaryData.from_modes(dict(zip(self.indices.tolist(), self.coeffs)), N), 0.0
        kept = self.coeffs[self.N - N : self.N + N + 1]
        loss = self.energy() - FourierBoundaryData(kept).energy()
        if loss > 0:
            log.debug(f"truncation to order {N} drops energy {loss:.3e}")
        return FourierBoundaryData(kept), loss

    def to_dict(self) -> Dict:
        return _series_to_dict(self.coeffs, -self.N)

    @classmethod
    def from_dict(cls, data: Dict) -> "FourierBoundaryData":
        coeffs, n_min = _series_from_dict(data)
        if n_min != -(len(coeffs) - 1) // 2:
            raise ValueError(f"Fourier data must be indexed symmetrically, got n_min={n_min}")
        return cls(coeffs)


@dataclass(frozen=True, eq=False)
class HarmonicDiskFunction:
    """h(z) = sum a_n z^n + sum b_n conj(z)^n on the unit disk; antiholo[0] is always zero."""

    holo: np.ndarray
    antiholo: np.ndarray

    def __post_init__(self) -> None:
        holo = _as_complex(self.holo)
        antiholo = _as_complex(self.antiholo) if len(np.atleast_1d(self.antiholo)) else np.zeros(1, dtype=complex)
        size = max(len(holo), len(antiholo), 1)
        holo = np.pad(holo, (0, size - len(holo)))
        antiholo = np.pad(antiholo, (0, size - len(antiholo)))
        antiholo[0] = 0
        object.__setattr__(self, "holo", holo)
        object.__setattr__(self, "antiholo", antiholo)

    @classmethod
    def from_antiholo(cls, hbar: ArrayLike) -> "HarmonicDiskFunction":
        """Build from b_1, b_2, ... (the coefficient list starts at n = 1)."""
        return cls(holo=[0], antiholo=np.concatenate([[0], _as_complex(hbar)]))

    @property
    def N(self) -> int:
        return len(self.holo) - 1

    def __call__(self, z: ArrayLike) -> np.ndarray:
        z = _as_complex(z)
        return np.polynomial.polynomial.polyval(z, self.holo) + np.polynomial.polynomial.polyval(
            np.conj(z), self.antiholo
        )

    def dz(self, z: ArrayLike) -> np.ndarray:
        """Wirtinger derivative d/dz."""
        return np.polynomial.polynomial.polyval(_as_complex(z), np.polynomial.polynomial.polyder(self.holo))

    def dzbar(self, z: ArrayLike) -> np.ndarray:
        """Wirtinger derivative d/dzbar."""
        return np.polynomial.polynomial.polyval(
            np.conj(_as_complex(z)), np.polynomial.polynomial.polyder(self.antiholo)
        )

    def antiholo_density(self) -> np.ndarray:
        """Coefficients alpha_n (n >= 1) of dzbar h = sum alpha_n conj(z)^(n-1) dzbar."""
        n = np.arange(1, self.N + 1)
        return n * self.antiholo[1:]

    def energy(self) -> float:
        return dirichlet_energy(self)


class Part(str, Enum):
    HOLO = "holo"
    ANTIHOLO = "antiholo"


def dirichlet_energy(h: HarmonicDiskFunction) -> float:
    n = np.arange(h.N + 1)
    return float(np.sum(n * (np.abs(h.holo) ** 2 + np.abs(h.antiholo) ** 2)))


def harmonic_extension(u: FourierBoundaryData) -> HarmonicDiskFunction:
    N = u.N
    holo = u.coeffs[N:]
    antiholo = np.concatenate([[0], u.coeffs[:N][::-1]])
    return HarmonicDiskFunction(holo=holo, antiholo=antiholo)


def boundary_trace(h: HarmonicDiskFunction) -> FourierBoundaryData:
    coeffs = np.concatenate([h.antiholo[1:][::-1], h.holo])
    return FourierBoundaryData(coeffs)


def project(h: HarmonicDiskFunction, part: Part, normalization: Part) -> HarmonicDiskFunction:
    """Holomorphic or anti-holomorphic part of h.

    ``normalization`` names the summand that vanishes at 0; the constant a_0 is carried by the other one.
    """
    part, normalization = Part(part), Part(normalization)
    constant = h.holo[0] if part != normalization else 0
    if part == Part.HOLO:
        return HarmonicDiskFunction(holo=np.concatenate([[constant], h.holo[1:]]), antiholo=[0])
    return HarmonicDiskFunction(holo=[constant], antiholo=h.antiholo)


def douglas_constant(M: int) -> float:
    """Calibration kappa_D: reciprocal of the raw Douglas quadrature of e^{i theta} on the same grid."""
    return 1.0 / _douglas_raw(FourierBoundaryData.from_modes({1: 1}), M)


def _douglas_raw(u: FourierBoundaryData, M: int) -> float:
    theta = 2 * np.pi * np.arange(M) / M
    values = u.sample(M).values
    derivative = u.derivative_values(M)
    points = np.exp(1j * theta)
    total = 0.0
    # row blocks keep the pair grid bounded in memory
    for start in range(0, M, 256):
        stop = min(M, start + 256)
        diff = np.abs(values[start:stop, None] - values[None, :]) ** 2
        chord = np.abs(points[start:stop, None] - points[None, :]) ** 2
        rows = np.arange(start, stop)
        chord[rows - start, rows] = 1.0
        diff[rows - start, rows] = np.abs(derivative[start:stop]) ** 2
        total += float(np.sum(diff / chord))
    return total * (2 * np.pi / M) ** 2


def douglas_energy(u: FourierBoundaryData, M: int) -> float:
    if M < 4 * u.N:
        raise ResolutionError(f"Douglas quadrature needs M >= 4N, got M={M} for N={u.N}")
    return douglas_constant(M) * _douglas_raw(u, M)


def poisson_eval(u: FourierBoundaryData, z: complex) -> complex:
    radius = abs(z)
    if radius >= 1:
        raise DomainError(f"Poisson integral needs |z| < 1, got |z|={radius}")
    M = grid_size(u.N)
    if radius > 0:
        needed = u.N + math.log(POISSON_ACCURACY) / math.log(radius)
        while M < needed and M < MAX_GRID:
            M *= 2
        if M < needed:
            log.warning(f"poisson grid capped at {MAX_GRID} points for |z| = {radius}, needs {math.ceil(needed)}")
    theta, points = circle_points(M)
    kernel = (1 - radius**2) / np.abs(points - z) ** 2
    return complex(np.mean(kernel * u.sample(M).values))


def compose_series(
    outer: LaurentSeries,
    inner: Union[LaurentSeries, GridSamples],
    radius: float = 1.0,
    M: Optional[int] = None,
    n_min: Optional[int] = None,
    n_max: Optional[int] = None,
    valid_annulus: Tuple[float, float] = (0.0, math.inf),
) -> LaurentSeries:
    """Laurent coefficients of outer(inner(z)) read from samples on |z| = radius."""
    if isinstance(inner, GridSamples):
        radius, M = inner.radius, inner.M
    if n_min is None or n_max is None:
        low, high = _composition_range(outer, inner)
        n_min = low if n_min is None else n_min
        n_max = high if n_max is None else n_max
    if M is None:
        M = grid_size(max(abs(n_min), abs(n_max), 1))
    if n_max - n_min + 1 > M:
        raise ResolutionError(f"Grid of {M} points cannot hold the coefficient range [{n_min}, {n_max}]")

    if isinstance(inner, GridSamples):
        inner_values = inner.values
    else:
        inner_values = inner(circle_points(M, radius)[1])
    modulus = np.abs(inner_values)
    low_radius, high_radius = valid_annulus
    if outer.n_min < 0:
        low_radius = max(low_radius, 0.0)
        if np.any(modulus <= low_radius):
            raise DomainError("Sampling circle reaches the singularity of the outer series")
    if np.any(modulus < low_radius) or np.any(modulus > high_radius):
        raise DomainError(f"Sampling circle of radius {radius} leaves the domain of validity of the outer series")

    spectrum = np.fft.fft(outer(inner_values)) / M
    indices = np.arange(n_min, n_max + 1)
    coeffs = spectrum[indices % M] * float(radius) ** (-indices.astype(float))
    return LaurentSeries(coeffs, n_min)


def _composition_range(outer: LaurentSeries, inner: Union[LaurentSeries, GridSamples]) -> Tuple[int, int]:
    if isinstance(inner, LaurentSeries) and outer.n_min >= 0:
        powers = np.arange(outer.n_min, outer.n_max + 1)
        low = int(min(0, np.min(powers * inner.n_min)))
        high = int(max(0, np.max(powers * inner.n_max)))
        return low, high
    M = inner.M if isinstance(inner, GridSamples) else grid_size(max(abs(outer.n_min), abs(outer.n_max), 1))
    return -(M // 2 - 1), M // 2 - 1
