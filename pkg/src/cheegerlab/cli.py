"""Command-line front end.

Reads a domain from JSON, runs the requested analysis, and writes CSV
tables, JSON reports, and SVG drawings into an output directory.  All
numeric output uses shortest round-trip float formatting so identical
inputs produce byte-identical artifacts.

Exit codes: 0 success, 2 malformed input, 3 domain violates the no-neck
assumption, 4 numerical failure.
"""
from __future__ import annotations

import argparse
import json
import math
import os
import sys
from dataclasses import dataclass

import numpy as np

from .errors import (
    AssumptionError,
    CheegerlabError,
    InputError,
    NumericalError,
)
from .geometry import Domain, domain_from_json_dict
from .offsets import inradius, no_neck_check
from .pcheeger import multivalue_probe, solve_cheeger, volume_map_scan
from .profile import build_profile
from . import oracle as grid_oracle
from .svgio import atomic_write_text, write_svg

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_NECK = 3
EXIT_NUMERIC = 4


def fmt(x) -> str:
    """Shortest round-trip decimal form, stable across runs."""
    x = float(x)
    if x == 0.0:
        x = 0.0
    return repr(x)


@dataclass(frozen=True)
class RunConfig:
    command: str
    input_path: str
    out_dir: str = "."
    json_output: bool = False
    n_radii: int | None = None
    p: float | None = None
    p_grid: str | None = None
    kappas: tuple = ()
    volumes: tuple = ()
    p_values: tuple = ()
    h: float = 1.0 / 64.0
    stencil: str = "16"
    seed: int = 0
    tol_min: float | None = None
    selfcheck: int = 0
    multivalue: bool = False


def thread_cap() -> int:
    """Upper bound on internal parallelism from CHEEGERLAB_THREADS."""
    raw = os.environ.get("CHEEGERLAB_THREADS")
    if raw is None:
        return 1
    try:
        n = int(raw)
    except ValueError as exc:
        raise InputError(f"CHEEGERLAB_THREADS must be an integer, got {raw!r}") from exc
    if n < 1:
        raise InputError("CHEEGERLAB_THREADS must be at least 1")
    return n


def parse_float_list(raw: str) -> tuple:
    try:
        values = tuple(float(t) for t in raw.split(",") if t.strip())
    except ValueError as exc:
        raise InputError(f"malformed number list {raw!r}") from exc
    if not values:
        raise InputError(f"empty number list {raw!r}")
    return values


def parse_p_grid(raw: str) -> np.ndarray:
    """start:end:count grid specification."""
    parts = raw.split(":")
    if len(parts) != 3:
        raise InputError(f"p-grid must be start:end:count, got {raw!r}")
    try:
        start, end = float(parts[0]), float(parts[1])
        count = int(parts[2])
    except ValueError as exc:
        raise InputError(f"malformed p-grid {raw!r}") from exc
    if count < 2 or not start < end:
        raise InputError("p-grid needs start < end and count >= 2")
    return np.linspace(start, end, count)


def load_domain(path: str) -> Domain:
    try:
        with open(path, encoding="utf-8") as f:
            obj = json.load(f)
    except OSError as exc:
        raise InputError(f"cannot read input file: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"input is not valid JSON: {exc}") from exc
    try:
        return domain_from_json_dict(obj)
    except (ValueError, KeyError, TypeError) as exc:
        raise InputError(f"malformed domain JSON: {exc}") from exc


def _json_default(obj):
    if isinstance(obj, (np.floating, np.integer, np.bool_)):
        return obj.item()
    raise TypeError(f"not JSON serializable: {type(obj).__name__}")


def write_json(path: str, obj) -> None:
    text = json.dumps(obj, indent=2, sort_keys=True, default=_json_default)
    atomic_write_text(path, text + "\n")


def write_csv(path: str, header, rows) -> None:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(v if isinstance(v, str) else fmt(v) for v in row))
    atomic_write_text(path, "\n".join(lines) + "\n")


def _emit(config: RunConfig, human: str, machine: dict) -> None:
    if config.json_output:
        print(json.dumps(machine, sort_keys=True, default=_json_default))
    else:
        print(human)


def _outfile(config: RunConfig, name: str) -> str:
    os.makedirs(config.out_dir, exist_ok=True)
    return os.path.join(config.out_dir, name)


def _profile(domain: Domain, config: RunConfig):
    kwargs = {}
    if config.n_radii is not None:
        kwargs["n_radii"] = config.n_radii
    return build_profile(domain, **kwargs)


# ---------------------------------------------------------------------------
# subcommands


def cmd_inspect(config: RunConfig) -> int:
    domain = load_domain(config.input_path)
    inr = inradius(domain)
    report = no_neck_check(domain, inr=inr)
    machine = {
        "area": domain.area,
        "perimeter": domain.perimeter,
        "inradius": inr.radius,
        "incenter_witnesses": [list(map(float, w)) for w in inr.witnesses],
        "segment_kernel": (
            [list(map(float, q)) for q in inr.segment] if inr.segment else None
        ),
        "no_neck": {
            "passed": report.passed,
            "radii_tested": len(report.radii),
            "critical_radii": list(report.critical_radii),
        },
    }
    human = (
        f"area = {fmt(domain.area)}\n"
        f"perimeter = {fmt(domain.perimeter)}\n"
        f"inradius = {fmt(inr.radius)}\n"
        f"no-neck check: {'pass' if report.passed else 'FAIL'}"
        + (
            f" (erosion disconnects near r = "
            f"{', '.join(fmt(r) for r in report.critical_radii)})"
            if not report.passed
            else ""
        )
    )
    _emit(config, human, machine)
    return EXIT_OK if report.passed else EXIT_NECK


def cmd_profile(config: RunConfig) -> int:
    domain = load_domain(config.input_path)
    prof = _profile(domain, config)
    rows = []
    for r, v, per in zip(prof.r_grid, prof.volumes, prof.perimeters):
        kappa = 1.0 / float(r)
        rows.append((float(r), kappa, float(v), float(per), prof.curvature_energy(kappa)))
    csv_path = _outfile(config, "profile.csv")
    write_csv(csv_path, ("r", "kappa", "volume", "perimeter", "F"), rows)
    m_vol, big_m_vol = prof.cheeger_volume_range()
    summary = {
        "H1": prof.cheeger_constant,
        "mVol": m_vol,
        "MVol": big_m_vol,
        "kappaBar": "inf" if math.isinf(prof.kappa_bar()) else prof.kappa_bar(),
        "inradius": prof.R,
        "area": domain.area,
        "perimeter": domain.perimeter,
    }
    write_json(_outfile(config, "profile_summary.json"), summary)
    _emit(
        config,
        f"H(1) = {fmt(prof.cheeger_constant)}; volume range "
        f"[{fmt(m_vol)}, {fmt(big_m_vol)}]; wrote {csv_path}",
        summary,
    )
    return EXIT_OK


def cmd_cheeger(config: RunConfig) -> int:
    domain = load_domain(config.input_path)
    prof = _profile(domain, config)
    chains = prof.minimizer(prof.cheeger_radius)
    svg_path = _outfile(config, "cheeger_set.svg")
    write_svg(
        svg_path,
        [domain.as_chain()] + list(chains),
        labels=["domain"] + [f"cheeger_set_{i}" for i in range(len(chains))],
    )
    machine = {
        "H1": prof.cheeger_constant,
        "cheeger_radius": prof.cheeger_radius,
        "volume": prof.volume(prof.cheeger_radius),
        "svg": svg_path,
    }
    _emit(
        config,
        f"H(1) = {fmt(prof.cheeger_constant)}; wrote {svg_path}",
        machine,
    )
    return EXIT_OK


def cmd_pcheeger(config: RunConfig) -> int:
    if config.p is None:
        raise InputError("pcheeger requires --p")
    domain = load_domain(config.input_path)
    prof = _profile(domain, config)
    kwargs = {}
    if config.tol_min is not None:
        kwargs["tol_min"] = config.tol_min
    result = solve_cheeger(prof, config.p, **kwargs)
    rows = []
    for v, res in zip(result.volumes, result.curvature_residuals):
        kappa = prof.curvature_of_volume(v)
        rows.append(
            (
                result.p,
                result.constant,
                float(v),
                "inf" if math.isinf(kappa) else kappa,
                "inf" if math.isinf(res) else res,
            )
        )
    if result.volume_interval is not None and not rows:
        lo, hi = result.volume_interval
        rows.append((result.p, result.constant, hi, 1.0 / prof.R, ""))
    write_csv(
        _outfile(config, "pcheeger.csv"),
        ("p", "Hp", "volume", "kappa", "residual"),
        rows,
    )
    machine = {
        "p": result.p,
        "constant": result.constant,
        "volumes": [float(v) for v in result.volumes],
        "volume_interval": (
            list(result.volume_interval) if result.volume_interval else None
        ),
        "curvature_residuals": [
            "inf" if math.isinf(r) else float(r) for r in result.curvature_residuals
        ],
        "notes": list(result.notes),
    }
    write_json(_outfile(config, "pcheeger.json"), machine)
    chains = [domain.as_chain()]
    labels = ["domain"]
    for i, mins in enumerate(result.minimizers):
        if mins is None:
            continue
        for j, chain in enumerate(mins):
            chains.append(chain)
            labels.append(f"minimizer_{i}_{j}")
    svg_path = _outfile(config, "pcheeger_set.svg")
    if len(chains) > 1:
        write_svg(svg_path, chains, labels=labels)
        machine["svg"] = svg_path
    if config.multivalue:
        probe = multivalue_probe(prof, config.p)
        write_json(
            _outfile(config, "multivalue.json"),
            {
                "p": probe.p,
                "minima": [[float(v), float(q)] for v, q in probe.minima],
                "global_volumes": [float(v) for v in probe.global_volumes],
                "gap_to_second": (
                    "inf" if math.isinf(probe.gap_to_second) else probe.gap_to_second
                ),
            },
        )
    if result.volume_interval is not None:
        lo, hi = result.volume_interval
        vol_text = f"volume interval ({fmt(lo)}, {fmt(hi)}]"
    else:
        vol_text = "volumes " + ", ".join(fmt(v) for v in result.volumes)
    _emit(
        config,
        f"H({fmt(config.p)}) = {fmt(result.constant)}; {vol_text}",
        machine,
    )
    return EXIT_OK


def cmd_vmap(config: RunConfig) -> int:
    if config.p_grid is None:
        raise InputError("vmap requires --p-grid start:end:count")
    domain = load_domain(config.input_path)
    prof = _profile(domain, config)
    grid = parse_p_grid(config.p_grid)
    scan = volume_map_scan(prof, grid)
    rows = []
    for res in scan.results:
        if res.volume_interval is not None or len(res.volumes) != 1:
            vol: object = ""
            kappa: object = ""
            residual: object = ""
        else:
            vol = float(res.volume)
            k = prof.curvature_of_volume(res.volume)
            kappa = "inf" if math.isinf(k) else k
            r = max(res.curvature_residuals) if res.curvature_residuals else ""
            residual = "inf" if isinstance(r, float) and math.isinf(r) else r
        rows.append((res.p, res.constant, vol, kappa, residual))
    write_csv(
        _outfile(config, "vmap.csv"),
        ("p", "Hp", "volume", "kappa", "residual"),
        rows,
    )
    verdicts = {
        "monotonicity": {
            "passed": bool(scan.monotonicity),
            "detail": scan.monotonicity.detail,
        },
        "injectivity": {
            "passed": bool(scan.injectivity),
            "detail": scan.injectivity.detail,
        },
        "continuity": {
            "passed": bool(scan.continuity),
            "detail": scan.continuity.detail,
        },
        "p_bar": "inf" if math.isinf(scan.p_bar) else scan.p_bar,
        "ball_degenerate": scan.ball_degenerate,
    }
    write_json(_outfile(config, "vmap_verdicts.json"), verdicts)
    ok = all(
        (scan.monotonicity.passed, scan.injectivity.passed, scan.continuity.passed)
    )
    _emit(
        config,
        f"volume map on {len(grid)} exponents: "
        f"monotone={'pass' if scan.monotonicity.passed else 'FAIL'} "
        f"injective={'pass' if scan.injectivity.passed else 'FAIL'} "
        f"continuous={'pass' if scan.continuity.passed else 'FAIL'}",
        verdicts,
    )
    return EXIT_OK if ok else EXIT_NUMERIC


def cmd_oracle(config: RunConfig) -> int:
    if config.h <= 0.0:
        raise InputError("grid spacing --h must be positive")
    if any(k < 0.0 for k in config.kappas):
        raise InputError("curvatures must be nonnegative")
    domain = load_domain(config.input_path)
    report: dict = {"h": config.h, "stencil": config.stencil}
    oracle_h1 = grid_oracle.oracle_H1(domain, config.h, stencil=config.stencil)
    report["oracle_H1"] = oracle_h1
    prof = None
    try:
        prof = _profile(domain, config)
    except AssumptionError as exc:
        report["profile"] = f"skipped: {exc}"
    if prof is not None:
        verdict = grid_oracle.compare(
            prof.cheeger_constant,
            oracle_h1,
            config.h,
            scale=domain.scale,
            stencil=config.stencil,
        )
        report["profile_H1"] = prof.cheeger_constant
        report["H1_compare"] = {
            "passed": verdict.passed,
            "error": verdict.error,
            "tolerance": verdict.tolerance,
        }
    if config.kappas:
        sweep = grid_oracle.oracle_I(
            domain, config.h, sorted(set(config.kappas)), stencil=config.stencil
        )
        write_csv(
            _outfile(config, "oracle_sweep.csv"),
            ("kappa", "volume", "perimeter", "value"),
            sweep,
        )
        if prof is not None:
            checks = []
            for kappa, volume, perimeter, _value in sweep:
                if volume <= 0.0 or volume < prof.volume_lower:
                    continue
                verdict = grid_oracle.compare(
                    prof.least_perimeter(min(volume, prof.volume_upper)),
                    perimeter,
                    config.h,
                    scale=domain.scale,
                    stencil=config.stencil,
                )
                checks.append(
                    {
                        "kappa": kappa,
                        "passed": verdict.passed,
                        "error": verdict.error,
                        "tolerance": verdict.tolerance,
                    }
                )
            report["sweep_compare"] = checks
    if config.selfcheck > 0:
        report["selfcheck"] = _oracle_selfcheck(config.selfcheck, config.seed)
    write_json(_outfile(config, "oracle_report.json"), report)
    failed = [
        c for c in report.get("sweep_compare", []) if not c["passed"]
    ]
    if "H1_compare" in report and not report["H1_compare"]["passed"]:
        failed.append(report["H1_compare"])
    if report.get("selfcheck") not in (None, "pass"):
        failed.append({"selfcheck": report["selfcheck"]})
    _emit(
        config,
        f"oracle H(1) = {fmt(oracle_h1)} at h = {fmt(config.h)}"
        + (f"; {len(failed)} comparison(s) FAILED" if failed else "; checks pass"),
        report,
    )
    return EXIT_OK if not failed else EXIT_NUMERIC


def _oracle_selfcheck(n_grids: int, seed: int) -> str:
    """Cut value vs exhaustive enumeration on small random masks."""
    rng = np.random.default_rng(seed)
    for _ in range(n_grids):
        ny, nx = (int(v) for v in rng.integers(3, 13, size=2))
        mask = np.zeros((ny, nx), dtype=bool)
        picks = rng.choice(ny * nx, size=min(int(rng.integers(4, 15)), ny * nx), replace=False)
        mask.flat[picks] = True
        h = float(rng.uniform(0.05, 0.5))
        grid = grid_oracle.GridProblem(
            spacing=h,
            mask=mask,
            origin=(0.0, 0.0),
            stencil=grid_oracle.stencil_weights("16", h),
            kappa=float(rng.uniform(0.0, 25.0)),
        )
        cut = grid_oracle.min_cut_F(grid)
        n = int(mask.sum())
        best = math.inf
        for bits in range(1 << n):
            sel = np.zeros_like(mask)
            sel[mask] = [(bits >> k) & 1 for k in range(n)]
            best = min(best, grid_oracle.grid_energy(grid, sel))
        if best != cut.value:
            return f"mismatch: enumeration {best} vs cut {cut.value}"
    return "pass"


def cmd_render(config: RunConfig) -> int:
    domain = load_domain(config.input_path)
    if not (config.kappas or config.volumes or config.p_values):
        raise InputError("render needs --kappas, --volumes, or --p-values")
    prof = _profile(domain, config)
    chains = [domain.as_chain()]
    labels = ["domain"]
    for kappa in config.kappas:
        for j, chain in enumerate(prof.curvature_minimizer(kappa)):
            chains.append(chain)
            labels.append(f"kappa_{fmt(kappa)}_{j}")
    for volume in config.volumes:
        mins, note = prof.minimizer_of_volume(volume)
        if mins is None:
            print(f"volume {fmt(volume)}: {note}", file=sys.stderr)
            continue
        for j, chain in enumerate(mins):
            chains.append(chain)
            labels.append(f"volume_{fmt(volume)}_{j}")
    for p in config.p_values:
        result = solve_cheeger(prof, p)
        for i, mins in enumerate(result.minimizers):
            if mins is None:
                continue
            for j, chain in enumerate(mins):
                chains.append(chain)
                labels.append(f"p_{fmt(p)}_{i}_{j}")
    svg_path = _outfile(config, "render.svg")
    write_svg(svg_path, chains, labels=labels)
    _emit(
        config,
        f"wrote {svg_path} with {len(chains) - 1} minimizer chain(s)",
        {"svg": svg_path, "chains": labels},
    )
    return EXIT_OK


_COMMANDS = {
    "inspect": cmd_inspect,
    "profile": cmd_profile,
    "cheeger": cmd_cheeger,
    "pcheeger": cmd_pcheeger,
    "vmap": cmd_vmap,
    "oracle": cmd_oracle,
    "render": cmd_render,
}


def run(config: RunConfig) -> int:
    thread_cap()  # validate the environment override up front
    if config.command not in _COMMANDS:
        raise InputError(f"unknown command {config.command!r}")
    return _COMMANDS[config.command](config)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cheegerlab",
        description=__doc__,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(cmd, **kwargs):
        sp = sub.add_parser(cmd, **kwargs)
        sp.add_argument("--input", required=True, help="domain JSON file")
        sp.add_argument("--out", default=".", help="output directory")
        sp.add_argument("--json", action="store_true", help="machine JSON on stdout")
        sp.add_argument("--n-radii", type=int, default=None, help="profile grid size")
        return sp

    common("inspect", help="area, perimeter, inradius, no-neck report")
    common("profile", help="rolled-family CSV plus summary JSON")
    common("cheeger", help="Cheeger constant and Cheeger-set SVG")

    sp = common("pcheeger", help="p-Cheeger constant, volumes, minimizer SVG")
    sp.add_argument("--p", type=float, required=True, help="exponent p in [1/2, 16]")
    sp.add_argument("--tol-min", type=float, default=None, help="tie tolerance")
    sp.add_argument(
        "--multivalue",
        action="store_true",
        help="also write the local-minima report (p > 1)",
    )

    sp = common("vmap", help="volume map scan over a p grid")
    sp.add_argument("--p-grid", required=True, help="start:end:count")

    sp = common("oracle", help="grid min-cut checks against the exact profile")
    sp.add_argument("--h", type=float, default=1.0 / 64.0, help="grid spacing")
    sp.add_argument("--stencil", choices=("4", "8", "16"), default="16")
    sp.add_argument("--kappas", default=None, help="comma-separated curvature sweep")
    sp.add_argument("--selfcheck", type=int, default=0, help="run N enumeration checks")
    sp.add_argument("--seed", type=int, default=0, help="selfcheck RNG seed")

    sp = common("render", help="SVG of the domain with overlaid minimizers")
    sp.add_argument("--kappas", default=None, help="comma-separated curvatures")
    sp.add_argument("--volumes", default=None, help="comma-separated volumes")
    sp.add_argument("--p-values", default=None, help="comma-separated exponents")
    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    return RunConfig(
        command=args.command,
        input_path=args.input,
        out_dir=args.out,
        json_output=args.json,
        n_radii=args.n_radii,
        p=getattr(args, "p", None),
        p_grid=getattr(args, "p_grid", None),
        kappas=(
            parse_float_list(args.kappas)
            if getattr(args, "kappas", None)
            else ()
        ),
        volumes=(
            parse_float_list(args.volumes)
            if getattr(args, "volumes", None)
            else ()
        ),
        p_values=(
            parse_float_list(args.p_values)
            if getattr(args, "p_values", None)
            else ()
        ),
        h=getattr(args, "h", 1.0 / 64.0),
        stencil=getattr(args, "stencil", "16"),
        seed=getattr(args, "seed", 0),
        tol_min=getattr(args, "tol_min", None),
        selfcheck=getattr(args, "selfcheck", 0),
        multivalue=getattr(args, "multivalue", False),
    )


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return run(config_from_args(args))
    except InputError as exc:
        return _fail(EXIT_INPUT, exc)
    except AssumptionError as exc:
        return _fail(EXIT_NECK, exc)
    except NumericalError as exc:
        return _fail(EXIT_NUMERIC, exc)
    except CheegerlabError as exc:
        return _fail(EXIT_NUMERIC, exc)


def _fail(code: int, exc: Exception) -> int:
    payload = {
        "error": type(exc).__name__,
        "message": str(exc),
        "exit_code": code,
    }
    print(json.dumps(payload, sort_keys=True), file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
