import json
import logging
from dataclasses import dataclass
from enum import Enum
from typing import Callable, List, Optional, Sequence, Tuple, Union

import numpy as np
import scipy.linalg

from quasikit.errors import BoundaryRegularityError, ConditioningError, ConsistencyError, DomainError
from quasikit.maps import ExteriorForm, Side, UnivalentMap, is_infinite, to_interior, univalence_check
from quasikit.numerics import disk_quadrature, neville_extrapolate, power_iteration
from quasikit.series import ArrayLike, GridSamples, LaurentSeries, circle_points, compose_series, grid_size

log = logging.getLogger(__name__)

SAMPLING_RADIUS = 1.05
ALIAS_RADIUS_FACTOR = 1.5
ALIAS_CHECK_DEPTH = 16
MIN_FFT_SIZE = 1024
SYMMETRY_TOLERANCE = 1e-9
CONDITION_LIMIT = 1e13
SVD_CROSS_CHECK_LIMIT = 64
CLASSIFIER_MARGIN = 0.02
NORM_SLACK = 1e-8
KERNEL_TAYLOR_RADIUS = 1e-3
KERNEL_TAYLOR_CIRCLE = 1e-2
ENERGY_STEPS = (4e-4, 2e-4, 1e-4, 5e-5)
INVERSE_STEPS = (0.15, 0.10)
MAX_STEP_HALVINGS = 8
EXTRA_TAIL = 40


@dataclass(frozen=True, eq=False)
class ExteriorExpansion:
    """Laurent coefficients of the normalized exterior form G = g/a on indices [-depth, 1]."""

    form: ExteriorForm
    leading: complex
    normalized: LaurentSeries

    @property
    def depth(self) -> int:
        return -self.normalized.n_min


def _read_exterior(form: ExteriorForm, depth: int, radius: float, M: int) -> LaurentSeries:
    points = circle_points(M, radius)[1]
    samples = GridSamples(values=form(points), radius=radius)
    return compose_series(LaurentSeries([0, 1]), samples, n_min=-depth, n_max=3)


def exterior_expansion(
    univalent_map: UnivalentMap, depth: int, radius: float = SAMPLING_RADIUS, M: Optional[int] = None
) -> ExteriorExpansion:
    if radius <= 1:
        raise DomainError(f"Sampling radius {radius} lies inside the domain boundary")
    form = ExteriorForm(univalent_map)
    M = M or max(MIN_FFT_SIZE, grid_size(depth + 4))
    series = _read_exterior(form, depth, radius, M)

    leading = series.coeff(1)
    scale = float(np.max(np.abs(series.coeffs)))
    if abs(leading) < 1e-12 * max(scale, 1.0):
        raise ConditioningError("Exterior form has a vanishing leading coefficient", estimate=np.inf)
    if max(abs(series.coeff(2)), abs(series.coeff(3))) > 1e-8 * scale * radius**3:
        raise DomainError("Exterior form of the map is not a simple pole at infinity")

    check = _read_exterior(form, min(depth, ALIAS_CHECK_DEPTH), radius * ALIAS_RADIUS_FACTOR, M)
    second = radius * ALIAS_RADIUS_FACTOR
    for n in range(-min(depth, ALIAS_CHECK_DEPTH), 2):
        gap = abs(series.coeff(n) - check.coeff(n))
        allowed = 1e-11 * scale * second ** max(-n, 1)
        if gap > allowed:
            raise ConsistencyError(f"Aliasing detected in the exterior read at index {n}: gap {gap:.3e}")

    coeffs = series.coeffs[: depth + 2] / leading
    return ExteriorExpansion(form=form, leading=complex(leading), normalized=LaurentSeries(coeffs, -depth))


@dataclass(frozen=True, eq=False)
class FaberCompositions:
    """Laurent coefficients of Phi_n(g(z)) for n = 0..N on indices [-tail, N].

    For exterior maps Phi_n(F(zeta)) = zeta^n + sum_k b_nk zeta^-k; for interior maps the same expansion
    holds in 1/zeta.
    """

    side: Side
    N: int
    tail: int
    coeffs: np.ndarray

    def b(self, n: int, k: int) -> complex:
        return complex(self.coeffs[n, self.tail - k])

    def tails(self, rows: Optional[int] = None, columns: Optional[int] = None) -> np.ndarray:
        """Matrix of b_nk for 1 <= n <= rows, 1 <= k <= columns."""
        rows = rows or self.N
        columns = columns or self.tail
        return self.coeffs[1 : rows + 1, self.tail - 1 :: -1][:, :columns]

    def on_disk(self, weights: ArrayLike, zeta: ArrayLike) -> np.ndarray:
        """sum_n weights[n-1] Phi_n(F(zeta)) from the Laurent tails."""
        weights = np.asarray(weights, dtype=complex)
        combined = weights @ self.coeffs[1 : len(weights) + 1]
        zeta = np.asarray(zeta, dtype=complex)
        variable = zeta if self.side == Side.EXTERIOR else 1 / zeta
        return LaurentSeries(combined, -self.tail)(variable)


def _truncated_product(left: np.ndarray, left_min: int, right: np.ndarray, right_min: int, low: int, high: int):
    product = np.convolve(left, right)
    start = left_min + right_min
    return product[low - start : high - start + 1]


def faber_compositions(
    univalent_map: UnivalentMap,
    N: int,
    tail: Optional[int] = None,
    radius: float = SAMPLING_RADIUS,
    M: Optional[int] = None,
) -> FaberCompositions:
    """Phi_n o g by the recurrence Phi_{n+1} = (w - beta_0) Phi_n - sum_m p_m Phi_m - p_0.

    Only coefficient arrays are multiplied, so no cancellation between large polynomial terms occurs.
    """
    tail = max(tail or N, N)
    guard = tail + N + 2
    expansion = exterior_expansion(univalent_map, depth=guard + N + 2, radius=radius, M=M)
    beta0 = expansion.normalized.coeff(0)
    shifted = expansion.normalized.coeffs.copy()
    shifted[-2] -= beta0
    shifted_min = expansion.normalized.n_min

    low, high = -guard, N + 1
    width = high - low + 1
    compositions = np.zeros((N + 1, width), dtype=complex)
    compositions[0, -low] = 1
    for n in range(N):
        product = _truncated_product(shifted, shifted_min, compositions[n], low, low, high)
        following = product.copy()
        for m in range(1, n + 1):
            following -= product[m - low] * compositions[m]
        following[-low] -= product[-low]
        compositions[n + 1] = following
    log.debug(f"faber compositions up to order {N} with tail {tail}")
    window = compositions[:, -tail - low : N - low + 1]
    return FaberCompositions(side=univalent_map.side, N=N, tail=tail, coeffs=window)


@dataclass(frozen=True, eq=False)
class FaberTable:
    """Faber polynomials P_n in the standard coordinate x = S(omega); row n holds ascending coefficients."""

    form: ExteriorForm
    polys: np.ndarray
    condition: float

    @property
    def N(self) -> int:
        return self.polys.shape[0] - 1

    def combined(self, weights: ArrayLike) -> np.ndarray:
        weights = np.asarray(weights, dtype=complex)
        return weights @ self.polys[1 : len(weights) + 1]

    def evaluate(self, weights: ArrayLike, omega: ArrayLike) -> np.ndarray:
        """sum_n weights[n-1] Phi_n(omega) at physical points."""
        x = self.form.coordinate(np.asarray(omega, dtype=complex))
        return np.polynomial.polynomial.polyval(x, self.combined(weights))

    def evaluate_derivative(self, weights: ArrayLike, omega: ArrayLike) -> np.ndarray:
        omega = np.asarray(omega, dtype=complex)
        x = self.form.coordinate(omega)
        derivative = np.polynomial.polynomial.polyder(self.combined(weights))
        return np.polynomial.polynomial.polyval(x, derivative) * self.form.coordinate_derivative(omega)

    def value_at(self, weights: ArrayLike, q: complex) -> complex:
        """Value at a point of the sphere; infinity maps to x = 0 when the basepoint is finite."""
        if is_infinite(q):
            if not is_infinite(self.form.pole):
                return complex(self.combined(weights)[0])
            raise DomainError("Faber polynomials of this map are unbounded at infinity")
        return complex(np.ravel(self.evaluate(weights, q))[0])

    def to_json(self) -> str:
        return json.dumps(
            [{"re": row.real.tolist(), "im": row.imag.tolist()} for row in self.polys[1:]], separators=(",", ":")
        )


def faber_polynomials(
    univalent_map: UnivalentMap, N: int, radius: float = SAMPLING_RADIUS, M: Optional[int] = None
) -> FaberTable:
    """Solve the triangular system sum_j phi_nj [G^j]_m = delta_mn, 0 <= m <= n."""
    expansion = exterior_expansion(univalent_map, depth=2 * N + 2, radius=radius, M=M)
    G, G_min = expansion.normalized.coeffs, expansion.normalized.n_min
    low = -(2 * N + 2)
    powers = np.zeros((N + 1, N - low + 1), dtype=complex)
    powers[0, -low] = 1
    for j in range(1, N + 1):
        powers[j] = _truncated_product(G, G_min, powers[j - 1], low, low, N)
    system = powers[:, -low : -low + N + 1].T

    condition = float(np.linalg.cond(system))
    if not np.isfinite(condition) or condition > CONDITION_LIMIT:
        raise ConditioningError(f"Faber system of order {N} is ill-conditioned (cond {condition:.2e})", condition)
    solution = scipy.linalg.solve_triangular(system, np.eye(N + 1, dtype=complex), lower=False)

    scaling = expansion.leading ** -np.arange(N + 1, dtype=float)
    polys = solution.T * scaling[None, :]
    log.info(f"computed faber polynomials up to order {N} (condition {condition:.2e})")
    return FaberTable(form=expansion.form, polys=polys, condition=condition)


@dataclass(frozen=True, eq=False)
class GrunskyMatrix:
    N: int
    raw: np.ndarray
    normalized: np.ndarray

    def to_json(self) -> str:
        return json.dumps(
            {"N": self.N, "re": self.normalized.real.ravel().tolist(), "im": self.normalized.imag.ravel().tolist()},
            separators=(",", ":"),
        )

    def leading(self, size: int) -> "GrunskyMatrix":
        return GrunskyMatrix(N=size, raw=self.raw[:size, :size], normalized=self.normalized[:size, :size])


def _composed_spectrum(table: FaberTable, constants: np.ndarray, radius: float, M: int) -> np.ndarray:
    """FFT of Phi_n(g(w)) - constants[n-1] on |w| = radius; row n-1, column j holds order j mod M."""
    w = circle_points(M, radius)[1]
    values = np.polynomial.polynomial.polyval(table.form(w), table.polys[1:].T) - constants[:, None]
    return np.fft.fft(values, axis=1) / M


def normalization_constants(table: FaberTable, q: complex) -> np.ndarray:
    """Phi_n(q) for n = 1..N; zero at infinity when the polynomials have their pole there."""
    if is_infinite(q):
        if is_infinite(table.form.pole):
            return np.zeros(table.N, dtype=complex)
        return table.polys[1:, 0].copy()
    x = complex(np.ravel(table.form.coordinate(q))[0])
    if not np.isfinite(x):
        raise DomainError(f"Normalization point {q} is the pole of the Faber polynomials")
    return np.polynomial.polynomial.polyval(x, table.polys[1:].T)


def grunsky_coeffs(
    univalent_map: UnivalentMap,
    N: int,
    q: Optional[complex] = None,
    radius: float = SAMPLING_RADIUS,
    M: Optional[int] = None,
) -> np.ndarray:
    """Raw b_nk (row n-1, column k-1).

    Without q the tails come from the composition recurrence. With q the Faber polynomials are shifted to
    vanish at q, composed with g on |w| = radius and the tails read by FFT.
    """
    if q is None:
        return faber_compositions(univalent_map, N, radius=radius, M=M).tails(N, N)
    table = faber_polynomials(univalent_map, N, radius=radius, M=M)
    constants = normalization_constants(table, q)
    M = M or max(MIN_FFT_SIZE, grid_size(4 * N))
    spectrum = _composed_spectrum(table, constants, radius, M)
    k = np.arange(1, N + 1)
    log.debug(f"grunsky coefficients of order {N} read with normalization point {q}")
    return spectrum[:, (-k) % M] * radius ** k.astype(float)[None, :]


def faber_residue(
    univalent_map: UnivalentMap, N: int, radius: float = SAMPLING_RADIUS, M: Optional[int] = None
) -> float:
    """Largest defect of Phi_n(g(w)) = w^n + (negative powers) over the orders 1..n, n <= N.

    Each row's defect is relative to the largest sum of monomial magnitudes on the sampling circle, the scale
    at which evaluating P_n loses digits.
    """
    table = faber_polynomials(univalent_map, N, radius=radius, M=M)
    M = M or max(MIN_FFT_SIZE, grid_size(4 * N))
    spectrum = _composed_spectrum(table, np.zeros(N, dtype=complex), radius, M)
    x = np.abs(table.form(circle_points(M, radius)[1]))
    worst = 0.0
    for n in range(1, N + 1):
        m = np.arange(1, n + 1)
        coeffs = spectrum[n - 1, m] * radius ** (-m.astype(float))
        coeffs[-1] -= 1
        terms = float(np.max(np.polynomial.polynomial.polyval(x, np.abs(table.polys[n]))))
        worst = max(worst, float(np.max(np.abs(coeffs))) / max(1.0, terms))
    log.info(f"faber residue up to order {N}: {worst:.3e}")
    return worst


def grunsky_matrix(
    univalent_map: UnivalentMap, N: int, radius: float = SAMPLING_RADIUS, M: Optional[int] = None
) -> GrunskyMatrix:
    log.info(f"computing grunsky matrix of order {N}...")
    raw = grunsky_coeffs(univalent_map, N, radius=radius, M=M)
    n = np.arange(1, N + 1)
    normalized = raw * np.sqrt(n)[None, :] / np.sqrt(n)[:, None]
    scale = max(1.0, float(np.max(np.abs(normalized))))
    asymmetry = float(np.max(np.abs(normalized - normalized.T)))
    if asymmetry > SYMMETRY_TOLERANCE * scale:
        raise ConsistencyError(f"Grunsky matrix violates symmetry by {asymmetry:.3e}")
    return GrunskyMatrix(N=N, raw=raw, normalized=normalized)


def grunsky_norm(matrix: GrunskyMatrix, tol: float = 1e-12) -> float:
    B = matrix.normalized
    eigenvalue = power_iteration(lambda x: B.conj().T @ (B @ x), B.shape[0], tol=tol)
    norm = float(np.sqrt(max(eigenvalue, 0.0)))
    if matrix.N <= SVD_CROSS_CHECK_LIMIT:
        reference = float(scipy.linalg.svdvals(B)[0]) if matrix.N else 0.0
        if abs(norm - reference) > 1e-9 * max(1.0, reference):
            log.warning(f"power iteration norm {norm} disagrees with svd {reference}, using svd")
            norm = reference
    return norm


class Verdict(str, Enum):
    QUASICIRCLE = "quasicircle"
    INDETERMINATE = "indeterminate"
    NON_QUASICIRCLE_TREND = "non-quasicircle-trend"


@dataclass(frozen=True)
class Classification:
    verdict: Verdict
    N: int
    norm: float
    half_N: int
    half_norm: float
    margin: float
    reason: str = ""

    def to_json(self) -> str:
        return json.dumps(
            {
                "verdict": self.verdict.value,
                "N": self.N,
                "norm": self.norm,
                "half_N": self.half_N,
                "half_norm": self.half_norm,
                "margin": self.margin,
                "reason": self.reason,
            },
            separators=(",", ":"),
        )


def classify_quasicircle(
    univalent_map: UnivalentMap,
    N: int,
    margin: float = CLASSIFIER_MARGIN,
    radius: float = SAMPLING_RADIUS,
    M: Optional[int] = None,
) -> Classification:
    """Strict Grunsky inequality screen at truncations N and N/2; reports trends, never certificates.

    Growth of at least margin/10 between the truncations is reported as a trend toward norm 1 whatever the
    current norm; the reason string says which rule fired.
    """
    screen = univalence_check(univalent_map)
    if not screen.passed:
        raise DomainError(f"Map failed the univalence screen, witness {screen.witness}")
    matrix = grunsky_matrix(univalent_map, N, radius=radius, M=M)
    half_N = max(1, N // 2)
    norm = grunsky_norm(matrix)
    half_norm = grunsky_norm(matrix.leading(half_N))
    if half_norm > norm + NORM_SLACK:
        log.warning(f"truncated norms are not monotone: {half_norm} at {half_N} > {norm} at {N}")

    growth = norm - half_norm
    if norm <= 1 - margin - NORM_SLACK and growth < margin / 10:
        verdict = Verdict.QUASICIRCLE
        reason = f"norm {norm:.6f} <= 1 - {margin} and growth {growth:.2e} < {margin / 10:.1e}"
    elif growth >= margin / 10:
        verdict = Verdict.NON_QUASICIRCLE_TREND
        reason = (
            f"norm grew by {growth:.2e} >= {margin / 10:.1e} from N={half_N} to N={N}; "
            f"distance to 1 is {1 - norm:.2e}"
        )
    else:
        verdict = Verdict.INDETERMINATE
        reason = f"norm {norm:.6f} within {margin} of 1 without growth"
    log.info(f"classified as {verdict.value}: norm {norm:.6f} at N={N}, {half_norm:.6f} at N={half_N}")
    return Classification(
        verdict=verdict, N=N, norm=norm, half_N=half_N, half_norm=half_norm, margin=margin, reason=reason
    )


def complement_contains(univalent_map: UnivalentMap, omega: ArrayLike, M: int = 2048) -> np.ndarray:
    """True where omega lies in the complementary domain (the side the Faber series lives on)."""
    boundary = univalent_map.value(circle_points(M)[1])
    omega = np.atleast_1d(np.asarray(omega, dtype=complex))
    shifted = boundary[None, :] - omega[:, None]
    winding = np.rint(np.sum(np.angle(np.roll(shifted, -1, axis=1) / shifted), axis=1) / (2 * np.pi))
    inside = winding != 0
    return ~inside if univalent_map.side == Side.INTERIOR else inside


@dataclass(frozen=True, eq=False)
class FaberSeries:
    """H = sum_n coeffs[n-1] Phi_n + constant, holomorphic on the complementary domain."""

    univalent_map: UnivalentMap
    table: FaberTable
    coeffs: np.ndarray
    constant: complex = 0j

    def unchecked(self, omega: ArrayLike) -> np.ndarray:
        return self.table.evaluate(self.coeffs, omega) + self.constant

    def derivative(self, omega: ArrayLike) -> np.ndarray:
        return self.table.evaluate_derivative(self.coeffs, omega)

    def __call__(self, omega: ArrayLike) -> np.ndarray:
        if not np.all(complement_contains(self.univalent_map, omega)):
            raise DomainError("Faber series evaluated outside the complementary domain")
        return self.unchecked(omega)


def faber_apply(univalent_map: UnivalentMap, hbar: ArrayLike, q: Optional[complex] = None) -> FaberSeries:
    """sum h_n Phi_n; with q given the series is shifted to vanish at q."""
    hbar = np.atleast_1d(np.asarray(hbar, dtype=complex))
    table = faber_polynomials(univalent_map, len(hbar))
    constant = 0j if q is None else -table.value_at(hbar, q)
    return FaberSeries(univalent_map=univalent_map, table=table, coeffs=hbar, constant=constant)


def complement_radius(univalent_map: UnivalentMap, step: float) -> float:
    return float(np.exp(step if univalent_map.side == Side.INTERIOR else -step))


def complementary_steps(univalent_map: UnivalentMap, steps: Sequence[float], M: int = 512) -> Tuple[float, ...]:
    """Steps whose continued level curves f(|zeta| = r) all land on the complementary side, halving as needed.

    Continuing f across the unit circle can fold back over the curve (Joukowski t > r^2 for instance); samples
    taken there would read the target on the wrong side.
    """
    scaled = tuple(float(step) for step in steps)
    for _ in range(MAX_STEP_HALVINGS + 1):
        landed = all(
            np.all(complement_contains(univalent_map, univalent_map.value(circle_points(M, radius)[1])))
            for radius in (complement_radius(univalent_map, step) for step in scaled)
        )
        if landed:
            return scaled
        log.debug(f"sampling circles for steps {scaled} leave the complementary domain, halving")
        scaled = tuple(step / 2 for step in scaled)
    raise BoundaryRegularityError(
        f"No sampling circle down to step {scaled[-1] * 2:.1e} stays on the complementary side of the curve"
    )


def faber_inverse(
    univalent_map: UnivalentMap,
    target: Callable[[np.ndarray], np.ndarray],
    N: int,
    steps: Sequence[float] = INVERSE_STEPS,
    M: int = 512,
    tol: float = 1e-7,
    with_constant: bool = False,
) -> Union[np.ndarray, Tuple[np.ndarray, complex]]:
    """Antiholomorphic data h_1..h_N with sum h_n Phi_n = target - constant.

    The target is sampled on circles just across the unit circle (the complementary side), read as Laurent
    coefficients and extrapolated to the boundary; the two reads must agree for data regular up to the curve.
    """
    steps = complementary_steps(univalent_map, steps, M)
    orders = np.arange(1, N + 1) if univalent_map.side == Side.EXTERIOR else -np.arange(1, N + 1)
    reads, constants = [], []
    for step in steps:
        radius = complement_radius(univalent_map, step)
        points = circle_points(M, radius)[1]
        spectrum = np.fft.fft(target(univalent_map.value(points))) / M
        reads.append(spectrum[orders % M] * radius ** (-orders.astype(float)))
        constants.append(spectrum[0])
    estimate = neville_extrapolate(steps, np.array(reads))
    scale = max(1.0, float(np.max(np.abs(estimate.value))))
    if float(np.max(estimate.error)) > tol * scale:
        raise BoundaryRegularityError(
            f"Boundary extrapolation did not converge (gap {float(np.max(estimate.error)):.3e})"
        )
    coeffs = estimate.value
    if with_constant:
        return coeffs, complex(neville_extrapolate(steps, np.array(constants)).value)
    return coeffs


def _sequential_weights(hbar: np.ndarray) -> np.ndarray:
    return np.sqrt(np.arange(1, len(hbar) + 1)) * hbar


def grunsky_apply(compositions: FaberCompositions, hbar: ArrayLike) -> np.ndarray:
    """Gr hbar in the l2 basis: component k is sqrt(k) sum_n b_nk h_n."""
    hbar = np.asarray(hbar, dtype=complex)
    b = compositions.tails(len(hbar), compositions.tail)
    k = np.arange(1, compositions.tail + 1)
    return np.sqrt(k) * (hbar @ b)


def faber_energy(univalent_map: UnivalentMap, series: FaberSeries, steps: Sequence[float] = ENERGY_STEPS, M: int = 512):
    """Dirichlet energy of a Faber series on the complementary domain by extrapolated contour integrals."""
    values = []
    for step in steps:
        radius = complement_radius(univalent_map, step)
        zeta = circle_points(M, radius)[1]
        omega = univalent_map.value(zeta)
        orientation = 1.0 if radius < 1 else -1.0
        d_omega = univalent_map.derivative(zeta) * 1j * zeta * (2 * np.pi / M) * orientation
        integrand = np.conj(series.unchecked(omega)) * series.derivative(omega) * d_omega
        values.append(np.sum(integrand) / (2j * np.pi))
    return neville_extrapolate(steps, np.array(values))


@dataclass(frozen=True)
class EnergyIdentity:
    lhs: float
    rhs: float
    residual: float


def energy_identity_check(univalent_map: UnivalentMap, hbar: ArrayLike) -> EnergyIdentity:
    """D(I hbar) against ||hbar||^2 - ||Gr hbar||^2."""
    hbar = np.atleast_1d(np.asarray(hbar, dtype=complex))
    series = faber_apply(univalent_map, hbar)
    lhs = float(np.real(faber_energy(univalent_map, series).value))
    compositions = faber_compositions(univalent_map, len(hbar), tail=4 * len(hbar) + EXTRA_TAIL)
    x = _sequential_weights(hbar)
    rhs = float(np.sum(np.abs(x) ** 2) - np.sum(np.abs(grunsky_apply(compositions, hbar)) ** 2))
    return EnergyIdentity(lhs=lhs, rhs=rhs, residual=abs(lhs - rhs))


@dataclass(frozen=True)
class GrunskyInequality:
    lhs: float
    bound: float
    holds: bool


def weak_grunsky_check(univalent_map: UnivalentMap, hbar: ArrayLike, norm: Optional[float] = None) -> GrunskyInequality:
    """|x^T B x| <= ||B|| ||x||^2 with x_n = sqrt(n) h_n."""
    hbar = np.atleast_1d(np.asarray(hbar, dtype=complex))
    matrix = grunsky_matrix(univalent_map, len(hbar))
    norm = grunsky_norm(matrix) if norm is None else norm
    x = _sequential_weights(hbar)
    lhs = float(abs(x @ matrix.normalized @ x))
    bound = norm * float(np.sum(np.abs(x) ** 2))
    return GrunskyInequality(lhs=lhs, bound=bound, holds=lhs <= bound * (1 + 1e-10) + 1e-14)


def strong_grunsky_check(univalent_map: UnivalentMap, hbar: ArrayLike) -> GrunskyInequality:
    """||Gr hbar|| <= ||hbar|| with the full tail of the Grunsky operator."""
    hbar = np.atleast_1d(np.asarray(hbar, dtype=complex))
    compositions = faber_compositions(univalent_map, len(hbar), tail=4 * len(hbar) + EXTRA_TAIL)
    lhs = float(np.sum(np.abs(grunsky_apply(compositions, hbar)) ** 2))
    bound = float(np.sum(np.abs(_sequential_weights(hbar)) ** 2))
    return GrunskyInequality(lhs=lhs, bound=bound, holds=lhs <= bound * (1 + 1e-10))


@dataclass(frozen=True)
class ApproximationStep:
    order: int
    error: float


def faber_approximation(
    univalent_map: UnivalentMap, target: Callable[[np.ndarray], np.ndarray], orders: Sequence[int], N: int = 32
) -> Tuple[np.ndarray, List[ApproximationStep]]:
    """Faber coefficients of target and the Dirichlet error of each truncation, via the energy identity."""
    coeffs = faber_inverse(univalent_map, target, N)
    compositions = faber_compositions(univalent_map, N, tail=N + EXTRA_TAIL)
    steps = []
    for order in orders:
        rest = coeffs.copy()
        rest[:order] = 0
        x = _sequential_weights(rest)
        error = float(np.sum(np.abs(x) ** 2) - np.sum(np.abs(grunsky_apply(compositions, rest)) ** 2))
        steps.append(ApproximationStep(order=order, error=error))
    return coeffs, steps


def _kernel_raw(f: UnivalentMap, w: np.ndarray, z: complex) -> np.ndarray:
    difference = f.value(w) - f.value(np.asarray(z))
    return f.derivative(w) * f.derivative(np.asarray(z)) / difference**2 - 1 / (w - z) ** 2


def _kernel_taylor(f: UnivalentMap, z: complex) -> np.ndarray:
    points = KERNEL_TAYLOR_CIRCLE * np.exp(2j * np.pi * np.arange(32) / 32)
    spectrum = np.fft.fft(_kernel_raw(f, z + points, z)) / 32
    return spectrum[:4] * KERNEL_TAYLOR_CIRCLE ** -np.arange(4, dtype=float)


def bergman_schiffer_kernel(f: UnivalentMap, w: ArrayLike, z: complex) -> np.ndarray:
    """(1/2 pi i)(f'(w) f'(z)/(f(w) - f(z))^2 - 1/(w - z)^2) in pulled-back coordinates of either side."""
    w = np.atleast_1d(np.asarray(w, dtype=complex))
    near = np.abs(w - z) < KERNEL_TAYLOR_RADIUS
    kernel = np.empty_like(w)
    if np.any(~near):
        kernel[~near] = _kernel_raw(f, w[~near], z)
    if np.any(near):
        taylor = _kernel_taylor(f, z)
        kernel[near] = np.polynomial.polynomial.polyval(w[near] - z, taylor)
    return kernel / (2j * np.pi)


def grunsky_integral_column(f: UnivalentMap, n: int, z: ArrayLike, radial: int = 64, angular: int = 256) -> np.ndarray:
    """Area-integral form of the Grunsky operator applied to conj(w)^(n-1) d conj(w), at disk points z.

    With dA the positive area measure this is -2i times the kernel integral, and it equals
    (1/n) sum_k k b_nk z^(k-1).
    """
    f = to_interior(f)
    nodes, weights = disk_quadrature(radial, angular)
    density = np.conj(nodes) ** (n - 1) * weights
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    return np.array([-2j * np.sum(bergman_schiffer_kernel(f, nodes, point) * density) for point in z])
