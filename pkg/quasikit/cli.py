import argparse
import json
import logging
import sys
import time
from enum import IntEnum
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from quasikit import env_vars
from quasikit.catalog import CatalogCurve, ExperimentConfig, build_map, load_config, parse_complex
from quasikit.cauchy import (
    CollarFunction,
    anchor_limit,
    jump_decompose,
    mobius_invariance_suite,
    schiffer_T11,
    schiffer_T12,
    two_sided_residual,
    transmitted_jump_residual,
    verify_wirtinger_identities,
)
from quasikit.errors import ConfigError, DomainError, QuasikitError
from quasikit.faber import (
    CLASSIFIER_MARGIN,
    Verdict,
    bergman_schiffer_kernel,
    classify_quasicircle,
    complement_contains,
    energy_identity_check,
    faber_approximation,
    faber_compositions,
    faber_polynomials,
    faber_residue,
    grunsky_coeffs,
    grunsky_integral_column,
    grunsky_matrix,
    grunsky_norm,
)
from quasikit.maps import INF, Identity, JoukowskiExterior, Side, UnivalentMap, invert, is_infinite, moebius_compose
from quasikit.report import ResidualRow, RunReport, diff_reports, load_report, to_jsonable
from quasikit.series import (
    FourierBoundaryData,
    LaurentSeries,
    circle_points,
    douglas_constant,
    douglas_energy,
    harmonic_extension,
)
from quasikit.transmission import (
    CircleHomeo,
    compose_boundary,
    energy_ratio_norm,
    qs_modulus,
    quasisymmetry_diagnostic,
    transmit,
)

log = logging.getLogger(__name__)

Payload = Dict[str, Any]
Tables = Dict[str, List[Dict[str, Any]]]
CommandResult = Tuple[Payload, List[ResidualRow], Tables]

DEFAULT_MOEBIUS = [1.5, complex(0.2, 0.1), 0, 1]
SAMPLE_COUNT = 10
POLE_PREIMAGE = 0.3
ENERGY_SAMPLES = 20
Q_CHECK_ORDER = 16


class ExitCode(IntEnum):
    SUCCESS = 0
    ERROR = 1
    SERIES = 10
    GRUNSKY = 11
    FABER = 12
    SCHIFFER = 13
    CAUCHY = 14
    ANCHOR = 15
    TRANSMISSION = 16
    MAPS = 17


def exit_code(report: RunReport) -> ExitCode:
    failing = [ExitCode[suite.upper()] for suite in report.failing_suites]
    return min(failing) if failing else ExitCode.SUCCESS


def parse_overrides(overrides: Sequence[str]) -> Dict[str, Any]:
    """Nested dict from dotted key=value pairs; values are JSON with a plain string fallback."""
    nested: Dict[str, Any] = {}
    for override in overrides:
        if "=" not in override:
            raise ConfigError(f"Override '{override}' is not of the form key=value")
        key, raw = override.split("=", 1)
        try:
            value = json.loads(raw)
        except json.JSONDecodeError:
            value = raw
        target = nested
        *parents, leaf = key.split(".")
        for parent in parents:
            target = target.setdefault(parent, {})
        target[leaf] = value
    return nested


def build_config(config: Optional[str], overrides: Sequence[str] = (), out: Optional[str] = None) -> ExperimentConfig:
    nested = parse_overrides(overrides)
    out_dir = env_vars.output_dir(out)
    if out_dir is not None:
        nested["out"] = str(out_dir)
    return load_config(env_vars.config_path(config), nested)


def sampling(config: ExperimentConfig) -> Dict[str, Any]:
    """Exterior sampling circle and FFT grid for the Faber and Grunsky reads."""
    return {"radius": config.quadrature.sampling_radius, "M": config.quadrature.fft_grid}


def boundary_data(config: ExperimentConfig) -> FourierBoundaryData:
    """params.modes as {n: value}, else a fixed trigonometric polynomial of degree 8."""
    modes = config.params.get("modes")
    if modes is None:
        return FourierBoundaryData.from_modes({n: complex(1, 0.5 * n) / (1 + n * n) for n in range(-8, 9) if n})
    return FourierBoundaryData.from_modes({int(n): parse_complex(v) for n, v in modes.items()})


def pole_in_domain(univalent_map: UnivalentMap, preimage: float) -> complex:
    """Image of the pulled-back point at distance ``preimage`` from the domain's basepoint."""
    zeta = preimage if univalent_map.side == Side.INTERIOR else 1 / preimage
    return complex(univalent_map.value(np.array([zeta]))[0])


def normalization_point(config: ExperimentConfig, univalent_map: UnivalentMap) -> complex:
    if config.q is not None:
        return config.q
    if univalent_map.side == Side.INTERIOR:
        return INF
    return complex(domain_points(univalent_map, 1)[0])


def domain_points(univalent_map: UnivalentMap, count: int = SAMPLE_COUNT) -> np.ndarray:
    theta = 2 * np.pi * (np.arange(count) + 0.25) / count
    radius = 0.5 if univalent_map.side == Side.INTERIOR else 2.0
    return univalent_map.value(radius * np.exp(1j * theta))


def complement_points(univalent_map: UnivalentMap, count: int = SAMPLE_COUNT) -> np.ndarray:
    """Points on the far side of the curve, well separated from it."""
    theta = 2 * np.pi * (np.arange(count) + 0.25) / count
    boundary = univalent_map.value(circle_points(512)[1])
    center = np.mean(boundary)
    diameter = float(np.max(np.abs(boundary - center))) * 2
    if univalent_map.side == Side.INTERIOR:
        return center + diameter * np.exp(1j * theta)

    rings = [center + s * (univalent_map.value(np.exp(1j * theta)) - center) for s in (0.5, 0.3)]
    rings += [univalent_map.value(r * np.exp(1j * theta)) for r in (0.9, 0.8, 0.7)]
    for ring in rings:
        separation = np.min(np.abs(ring[:, None] - boundary[None, :]))
        if np.all(complement_contains(univalent_map, ring)) and separation > 0.02 * diameter:
            return ring
    raise DomainError("No well-separated sample points found on the far side of the curve")


def circle_homeo(spec: Dict[str, Any], M: int = 512) -> CircleHomeo:
    kind = spec.get("kind", "sine")
    if kind == "identity":
        return CircleHomeo.identity(M)
    if kind == "rotation":
        return CircleHomeo.rotation(float(spec["alpha"]), M)
    if kind == "sine":
        return CircleHomeo.sine(float(spec.get("a", 0.5)), M)
    if kind == "automorphism":
        return CircleHomeo.automorphism(parse_complex(spec["a"]), M)
    raise ConfigError(
        f"Circle homeomorphism '{kind}' is not supported. Supported kinds are: "
        "['identity', 'rotation', 'sine', 'automorphism']"
    )


def run_faber(config: ExperimentConfig, univalent_map: UnivalentMap) -> CommandResult:
    table = faber_polynomials(univalent_map, config.N, **sampling(config))
    rows = [
        {"n": n, "k": k, "re": float(c.real), "im": float(c.imag)}
        for n in range(1, config.N + 1)
        for k, c in enumerate(table.polys[n, : n + 1])
    ]
    residue = faber_residue(univalent_map, config.N, **sampling(config))
    payload = {
        "N": config.N,
        "condition": table.condition,
        "residue": residue,
        "polynomials": json.loads(table.to_json()),
    }
    residuals = [ResidualRow.check("faber", "residue", residue, config.tolerances.faber_residue)]
    return payload, residuals, {"faber_polynomials": rows}


def _symmetry_defect(raw: np.ndarray) -> float:
    k = np.arange(1, raw.shape[0] + 1)
    weighted = raw * k[None, :]
    return float(np.max(np.abs(weighted - weighted.T)) / max(1.0, float(np.max(np.abs(weighted)))))


def run_grunsky(config: ExperimentConfig, univalent_map: UnivalentMap) -> CommandResult:
    matrix = grunsky_matrix(univalent_map, config.N, **sampling(config))
    norm = grunsky_norm(matrix)
    sizes = sorted({max(2, config.N // 4), max(2, config.N // 2), config.N})
    rows = [{"N": size, "norm": grunsky_norm(matrix.leading(size))} for size in sizes]
    payload = {"N": config.N, "norm": norm, "matrix": json.loads(matrix.to_json())}
    residuals = [
        ResidualRow.check("grunsky", "symmetry", _symmetry_defect(matrix.raw), config.tolerances.symmetry)
    ]
    return payload, residuals, {"grunsky_norms": rows}


def run_classify(config: ExperimentConfig, univalent_map: UnivalentMap) -> CommandResult:
    margin = float(config.params.get("margin", CLASSIFIER_MARGIN))
    classification = classify_quasicircle(univalent_map, config.N, margin, **sampling(config))
    return json.loads(classification.to_json()), [], {}


def run_jump(config: ExperimentConfig, univalent_map: UnivalentMap) -> CommandResult:
    u = boundary_data(config)
    q = normalization_point(config, univalent_map)
    pair = jump_decompose(univalent_map, u, q, config.schedule, tol=config.tolerances.jump)
    residuals = [ResidualRow.check("cauchy", "jump", pair.residual, config.tolerances.jump)]
    return pair.to_dict(), residuals, {}


def run_approx(config: ExperimentConfig, univalent_map: UnivalentMap) -> CommandResult:
    pole = pole_in_domain(univalent_map, float(config.params.get("pole_preimage", POLE_PREIMAGE)))
    orders = [int(n) for n in config.params.get("orders", range(4, 25))]
    coeffs, steps = faber_approximation(univalent_map, lambda w: 1 / (w - pole), orders, N=config.N)

    magnitudes = np.abs(coeffs)
    significant = np.nonzero(magnitudes > 1e-12 * np.max(magnitudes))[0]
    slope = np.polyfit(significant + 1, np.log(magnitudes[significant]), 1)[0]
    payload = {
        "pole": pole,
        "coefficients": coeffs,
        "fitted_ratio": float(np.exp(slope)),
        "errors": [step.error for step in steps],
    }
    rows = [{"order": step.order, "error": step.error} for step in steps]
    return payload, [], {"approximation": rows}


def _round_trip_error(u: FourierBoundaryData, phi: CircleHomeo) -> float:
    there = compose_boundary(u, phi, M=phi.M, order=phi.M // 16).data
    back = compose_boundary(there, phi.inverse(), M=phi.M, order=u.N).data
    return FourierBoundaryData(back.coeffs - u.coeffs).energy() / u.energy()


def run_transmit(config: ExperimentConfig, univalent_map: UnivalentMap) -> CommandResult:
    pole = pole_in_domain(univalent_map, float(config.params.get("pole_preimage", POLE_PREIMAGE)))
    result = transmit(univalent_map, lambda w: 1 / (w - pole), order=int(config.params.get("order", 64)))

    phi_spec = config.params.get("phi", {"kind": "sine", "a": 0.5})
    phi = circle_homeo(phi_spec)
    trend = quasisymmetry_diagnostic(phi, [int(n) for n in config.params.get("norm_orders", (8, 16, 32))])
    payload = {
        "pole": pole,
        "energy_out": result.energy_out,
        "collar_energy_in": result.collar_energy_in,
        "truncation_loss": result.truncation_loss,
        "boundary": result.boundary.to_dict(),
        "phi": phi.analytic,
        "qs_modulus": qs_modulus(phi),
        "norm_trend": trend.label,
    }
    fine_phi = circle_homeo(phi_spec, M=1024)
    round_trip = _round_trip_error(boundary_data(config), fine_phi)
    residuals = [ResidualRow.check("transmission", "round_trip", round_trip, config.tolerances.round_trip)]
    return payload, residuals, {"energy_ratio_norms": trend.rows()}


def run_energy(config: ExperimentConfig, univalent_map: UnivalentMap) -> CommandResult:
    u = boundary_data(config)
    M = config.quadrature.douglas_grid
    coefficient = u.energy()
    douglas = douglas_energy(u, M)
    payload = {
        "coefficient_energy": coefficient,
        "douglas_energy": douglas,
        "extension_energy": harmonic_extension(u).energy(),
        "M": M,
    }
    residuals = [
        ResidualRow.check("series", "douglas", abs(douglas - coefficient) / coefficient, config.tolerances.douglas)
    ]
    return payload, residuals, {}


def _series_suite(config: ExperimentConfig, univalent_map: UnivalentMap) -> List[ResidualRow]:
    _, rows, _ = run_energy(config, univalent_map)
    # e^{i theta} + e^{2 i theta} carries energy 1 + 2
    calibration = douglas_energy(FourierBoundaryData.from_modes({1: 1, 2: 1}), config.quadrature.douglas_grid)
    return rows + [
        ResidualRow.check("series", "douglas_calibration", abs(calibration - 3) / 3, config.tolerances.douglas)
    ]


def _classifier_mismatches(config: ExperimentConfig) -> int:
    expected = [
        (Identity(), 8, Verdict.QUASICIRCLE),
        (JoukowskiExterior(t=0.8), 32, Verdict.QUASICIRCLE),
        (build_map(CatalogCurve.cardioid.value), 48, Verdict.NON_QUASICIRCLE_TREND),
    ]
    mismatches = 0
    for univalent_map, N, verdict in expected:
        classification = classify_quasicircle(univalent_map, N, CLASSIFIER_MARGIN, **sampling(config))
        if classification.verdict != verdict:
            found = classification.verdict.value
            log.warning(f"{univalent_map.certificate} classified {found}, expected {verdict.value}")
            mismatches += 1
    return mismatches


def _grunsky_suite(config: ExperimentConfig, univalent_map: UnivalentMap) -> List[ResidualRow]:
    tol = config.tolerances
    N = config.N
    matrix = grunsky_matrix(univalent_map, N, **sampling(config))
    moved = moebius_compose(
        np.array([parse_complex(e) for e in config.params.get("moebius", DEFAULT_MOEBIUS)]), univalent_map
    )
    # the FFT read of the q-normalized polynomials is compared at low order
    order = min(N, Q_CHECK_ORDER)
    leading = matrix.raw[:order, :order]
    q_gap = max(
        float(np.max(np.abs(grunsky_coeffs(univalent_map, order, q=complex(q), **sampling(config)) - leading)))
        for q in complement_points(univalent_map, 2)
    )
    return [
        ResidualRow.check("grunsky", "symmetry", _symmetry_defect(matrix.raw), tol.symmetry),
        ResidualRow.check("grunsky", "q_independence", q_gap, tol.q_independence),
        ResidualRow.check(
            "grunsky",
            "moebius",
            float(np.max(np.abs(grunsky_matrix(moved, N, **sampling(config)).normalized - matrix.normalized))),
            tol.moebius,
        ),
        ResidualRow.check("grunsky", "classifier", float(_classifier_mismatches(config)), 0.0),
    ]


def _faber_suite(config: ExperimentConfig, univalent_map: UnivalentMap) -> List[ResidualRow]:
    rng = np.random.default_rng(int(config.params.get("seed", 0)))
    worst = 0.0
    for _ in range(int(config.params.get("energy_samples", ENERGY_SAMPLES))):
        hbar = (rng.standard_normal(10) + 1j * rng.standard_normal(10)) / np.arange(1, 11)
        check = energy_identity_check(univalent_map, hbar)
        worst = max(worst, check.residual / max(1.0, abs(check.rhs)))
    residue = faber_residue(univalent_map, config.N, **sampling(config))
    return [
        ResidualRow.check("faber", "energy_identity", worst, config.tolerances.energy_identity),
        ResidualRow.check("faber", "residue", residue, config.tolerances.faber_residue),
    ]


def _disk_T12_error(config: ExperimentConfig) -> float:
    """T12 of conj(zeta)^(n-1) on the disk is z^(-n-1) off the closed disk."""
    worst = 0.0
    for n in range(1, 6):
        density = LaurentSeries(np.eye(n)[-1], 0)
        value = schiffer_T12(Identity(), density, 2.0, config.quadrature.radial, config.quadrature.angular)
        worst = max(worst, abs(value - 2.0 ** (-n - 1)) / 2.0 ** (-n - 1))
    return worst


def _moebius_T11(config: ExperimentConfig) -> float:
    """T11 and the Bergman-Schiffer kernel vanish identically for Moebius images of the disk."""
    density = LaurentSeries([0, 1])
    moved = moebius_compose([[1, 0], [-0.3, 1]], Identity())
    z = complex(moved.value(0.4 + 0.2j))
    nodes = circle_points(16, 0.6)[1]
    return max(
        abs(schiffer_T11(Identity(), density, 0.3)),
        abs(schiffer_T11(moved, density, z)),
        float(np.max(np.abs(bergman_schiffer_kernel(moved, nodes, 0.4 + 0.2j)))),
    )


def _schiffer_suite(config: ExperimentConfig, univalent_map: UnivalentMap) -> List[ResidualRow]:
    points = np.array([0.3, 0.4j, -0.2 + 0.2j])
    tail = 80
    b = faber_compositions(univalent_map, 2, tail=tail, **sampling(config)).tails(2, tail)
    k = np.arange(1, tail + 1)
    worst = 0.0
    for n in (1, 2):
        column = grunsky_integral_column(
            univalent_map, n, points, config.quadrature.radial, config.quadrature.angular
        )
        expected = np.array([np.sum(k * b[n - 1] * z ** (k - 1)) / n for z in points])
        worst = max(worst, float(np.max(np.abs(column - expected))))
    return [
        ResidualRow.check("schiffer", "grunsky_column", worst, config.tolerances.schiffer),
        ResidualRow.check("schiffer", "disk_T12", _disk_T12_error(config), config.tolerances.schiffer),
        ResidualRow.check("schiffer", "moebius_T11", _moebius_T11(config), config.tolerances.vanishing),
    ]


def _maps_suite(config: ExperimentConfig, univalent_map: UnivalentMap) -> List[ResidualRow]:
    rng = np.random.default_rng(int(config.params.get("seed", 0)))
    zeta = rng.uniform(0.3, 0.9, SAMPLE_COUNT) * np.exp(2j * np.pi * rng.uniform(size=SAMPLE_COUNT))
    if univalent_map.side == Side.EXTERIOR:
        zeta = 1 / zeta
    back = invert(univalent_map, univalent_map.value(zeta))
    error = float(np.max(np.abs(back - zeta) / np.maximum(1.0, np.abs(zeta))))
    return [ResidualRow.check("maps", "round_trip", error, config.tolerances.inversion)]


def _anchor_suite(config: ExperimentConfig, univalent_map: UnivalentMap) -> List[ResidualRow]:
    if univalent_map.side == Side.INTERIOR:
        alpha = LaurentSeries([1, 2], 0)
    elif bool(complement_contains(univalent_map, 0j)[0]):
        alpha = LaurentSeries([1], -2)
    else:
        log.warning("origin lies in the map's domain, skipping the anchor suite")
        return []
    # zeta - 1/conj(zeta) vanishes on the circle
    vanishing = CollarFunction(holo=LaurentSeries([0, 1], 0), antiholo=LaurentSeries([-1], -1))
    collar = CollarFunction(holo=LaurentSeries([1], -1), antiholo=LaurentSeries([0, 1], 0))
    limit = anchor_limit(univalent_map, vanishing, alpha, config.schedule)
    direct = anchor_limit(univalent_map, collar, alpha, config.schedule)
    bounced = anchor_limit(univalent_map, collar, alpha, config.schedule, bounce=True)
    return [
        ResidualRow.check("anchor", "vanishing_trace", abs(limit), config.tolerances.anchor),
        ResidualRow.check("anchor", "bounce", abs(direct - bounced), config.tolerances.anchor),
    ]


def _cauchy_suite(config: ExperimentConfig, univalent_map: UnivalentMap, q: complex) -> List[ResidualRow]:
    tol = config.tolerances
    u = boundary_data(config)
    h = harmonic_extension(u)
    inside, outside = domain_points(univalent_map), complement_points(univalent_map)
    wirtinger = verify_wirtinger_identities(univalent_map, h, inside, outside, q, schedule=config.schedule)
    pair = jump_decompose(univalent_map, u, q, config.schedule, tol=np.inf)
    moebius = np.array([parse_complex(e) for e in config.params.get("moebius", DEFAULT_MOEBIUS)])
    return [
        ResidualRow.check("cauchy", "wirtinger", wirtinger.max, tol.wirtinger),
        ResidualRow.check("cauchy", "jump", pair.residual, tol.jump),
        ResidualRow.check(
            "cauchy", "two_sided", two_sided_residual(univalent_map, h, outside[:5], q, config.schedule), tol.two_sided
        ),
        ResidualRow.check(
            "cauchy", "transmitted_jump", transmitted_jump_residual(univalent_map, h, inside, q), tol.transmitted_jump
        ),
        ResidualRow.check(
            "cauchy",
            "moebius",
            mobius_invariance_suite(univalent_map, moebius, [h], inside[:3], outside[:3], q, config.schedule),
            tol.moebius_operators,
        ),
    ]


def _transmission_suite(config: ExperimentConfig) -> List[ResidualRow]:
    automorphism = energy_ratio_norm(CircleHomeo.automorphism(0.3), 8)
    sine = CircleHomeo.sine(0.5, M=1024)
    return [
        ResidualRow.check("transmission", "automorphism_norm", abs(automorphism - 1), config.tolerances.composition),
        ResidualRow.check(
            "transmission", "round_trip", _round_trip_error(boundary_data(config), sine), config.tolerances.round_trip
        ),
    ]


def run_verify(config: ExperimentConfig, univalent_map: UnivalentMap) -> CommandResult:
    q = normalization_point(config, univalent_map)
    residuals = _series_suite(config, univalent_map)
    log.info("verifying grunsky identities...")
    residuals += _grunsky_suite(config, univalent_map)
    log.info("verifying faber identities...")
    residuals += _faber_suite(config, univalent_map)
    log.info("verifying schiffer operators...")
    residuals += _schiffer_suite(config, univalent_map)
    log.info("verifying anchor limits...")
    residuals += _anchor_suite(config, univalent_map)
    log.info("verifying cauchy identities...")
    residuals += _cauchy_suite(config, univalent_map, q)
    log.info("verifying composition operators...")
    residuals += _transmission_suite(config)
    log.info("verifying map inversion...")
    residuals += _maps_suite(config, univalent_map)
    payload = {"passed": all(row.passed for row in residuals), "q": None if is_infinite(q) else q}
    return payload, residuals, {}


COMMANDS: Dict[str, Callable[[ExperimentConfig, UnivalentMap], CommandResult]] = {
    "faber": run_faber,
    "grunsky": run_grunsky,
    "classify": run_classify,
    "jump": run_jump,
    "approx": run_approx,
    "transmit": run_transmit,
    "verify": run_verify,
    "energy": run_energy,
}


def run(command: str, config: ExperimentConfig) -> RunReport:
    if command not in COMMANDS:
        raise ConfigError(f"Command '{command}' is not supported. Supported commands are: {list(COMMANDS)}")
    univalent_map = config.build_map()
    log.info(f"running '{command}' on a {univalent_map.side.value} map ({univalent_map.certificate})...")
    start = time.perf_counter()
    payload, residuals, tables = COMMANDS[command](config, univalent_map)
    report = RunReport(
        command=command,
        config=config.echo(),
        kappa_D=douglas_constant(config.quadrature.douglas_grid),
        payload=to_jsonable(payload),
        residuals=residuals,
        tables=to_jsonable(tables),
        wall_clock=time.perf_counter() - start,
    )
    for row in residuals:
        level = logging.INFO if row.passed else logging.WARNING
        log.log(level, f"{row.suite}.{row.name}: {row.value:.3e} (tolerance {row.tolerance:.1e})")
    return report


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="quasikit", description="Operator checks for quasicircles.")
    subparsers = parser.add_subparsers(dest="command", required=True)
    for command in COMMANDS:
        sub = subparsers.add_parser(command)
        sub.add_argument("--config", help=f"experiment config (JSON), defaults to ${env_vars.EnvVars.QUASIKIT_CONFIG}")
        sub.add_argument("--set", dest="overrides", action="append", default=[], metavar="KEY=VALUE")
        sub.add_argument("--out", help=f"output directory, defaults to ${env_vars.EnvVars.QUASIKIT_OUT}")
    diff = subparsers.add_parser("diff", help="compare two reports")
    diff.add_argument("a")
    diff.add_argument("b")
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    logging.basicConfig(level=logging.INFO)
    args = build_parser().parse_args(argv)

    try:
        if args.command == "diff":
            diff = diff_reports(load_report(args.a), load_report(args.b))
            print(json.dumps(diff.dict(), indent=2, sort_keys=True))
            return ExitCode.SUCCESS

        config = build_config(args.config, args.overrides, args.out)
        report = run(args.command, config)
        report.write(config.out)
    except (QuasikitError, ValueError, OSError, env_vars.MissingEnvironmentVariable) as e:
        log.error(f"'{args.command}' failed: {e}")
        return ExitCode.ERROR

    code = exit_code(report)
    log.info(f"done with exit code {code.value} ({code.name.lower()}).")
    return code


if __name__ == "__main__":
    sys.exit(main())
