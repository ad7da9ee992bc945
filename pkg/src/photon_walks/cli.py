"""Command-line front end.

Exit codes: 0 success, 2 usage or validation error, 3 numerical failure.
Files use 0-based site indices; messages on stderr use display labels.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import io, render
from .calibration import fit_coupling
from .correlations import (
    distinguishable_correlation,
    quantum_correlation,
    similarity,
    violation_map,
)
from .ensemble import ensemble_average
from .errors import NumericalError, ResourceError, ValidationError
from .evolution import propagator, propagators_over_z, single_photon_distribution
from .lattice import LatticeSpec, build_single_hamiltonian, hilbert_dim
from .measurement import estimate_gamma, violation_significance

EXIT_USAGE = 2
EXIT_NUMERICAL = 3


class UsageError(Exception):
    pass


def _sites(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected J or J,K, got {text!r}") from None


def _interval(text: str) -> tuple[float, float]:
    try:
        parts = [float(x) for x in text.split(",")]
    except ValueError:
        parts = []
    if len(parts) == 1:
        parts = parts * 2
    if len(parts) != 2:
        raise argparse.ArgumentTypeError(f"expected LO,HI or a single value, got {text!r}")
    return parts[0], parts[1]


def _add_lattice(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("device")
    g.add_argument("--spec", type=Path, help="LatticeSpec JSON file (overrides the flags below)")
    g.add_argument("--sites", type=int, default=21, help="number of waveguides (default 21)")
    g.add_argument("--coupling", type=float, default=5.0, help="coupling C in mm^-1 (default 5)")
    g.add_argument("--beta", type=float, default=0.0, help="propagation constant in mm^-1")
    g.add_argument("--length", type=float, default=0.782, help="propagation length in mm")
    g.add_argument("--label-offset", type=int, default=None,
                   help="display label of site 0 (default -(N//2))")


def _add_output(p: argparse.ArgumentParser, render_opt: bool = True) -> None:
    p.add_argument("--out", type=Path, help="output file (default stdout)")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    if render_opt:
        p.add_argument("--render", choices=("ppm",), help="also write a heatmap next to --out")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="photon-walks",
        description="Quantum walks of one and two photons in coupled waveguide arrays.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate-single", help="single-photon output distribution")
    _add_lattice(p)
    p.add_argument("--input", type=_sites, required=True, help="input waveguide J")
    p.add_argument("--z-slices", type=int, default=200,
                   help="rows of the propagation image, z from 0 to the length (default 200)")
    _add_output(p)

    p = sub.add_parser("correlate", help="two-photon correlation matrix")
    _add_lattice(p)
    p.add_argument("--input", type=_sites, required=True, help="input waveguides J,K")
    p.add_argument("--distinguishable", action="store_true")
    _add_output(p)

    p = sub.add_parser("violations", help="classical-limit violation map")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--gamma", type=Path, help="correlation matrix CSV (noiseless map)")
    src.add_argument("--counts", type=Path, help="coincidence counts CSV")
    p.add_argument("--sidecar", type=Path, help="JSON with singles and efficiency")
    p.add_argument("--singles-correction", action="store_true",
                   help="divide by normalized singles rates")
    _add_output(p)

    p = sub.add_parser("similarity", help="similarity of two correlation matrices")
    p.add_argument("a", type=Path)
    p.add_argument("b", type=Path)

    p = sub.add_parser("calibrate", help="fit C and z to a measured output pattern")
    _add_lattice(p)
    p.add_argument("--measured", type=Path, required=True, help="one value per line")
    p.add_argument("--input", type=_sites, default=None, help="input waveguide (default centre)")
    p.add_argument("--c-range", type=_interval, default=(1.0, 10.0))
    p.add_argument("--z-range", type=_interval, default=(0.1, 2.0))
    p.add_argument("--grid", type=int, default=64)
    p.add_argument("--rounds", type=int, default=6)
    _add_output(p, render_opt=False)

    p = sub.add_parser("ensemble", help="disorder-averaged statistics")
    _add_lattice(p)
    p.add_argument("--input", type=_sites, default=None,
                   help="J for single-photon statistics, J,K to also average correlations")
    p.add_argument("--distinguishable", action="store_true")
    p.add_argument("--sigma-beta", type=float, default=0.0)
    p.add_argument("--sigma-coupling", type=float, default=0.0)
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    _add_output(p)

    p = sub.add_parser("dim", help="Hilbert-space dimension")
    p.add_argument("--photons", type=int, required=True)
    p.add_argument("--sites", type=int, required=True)
    p.add_argument("--distinguishable", action="store_true")
    return parser


def _spec(args) -> LatticeSpec:
    if args.spec is not None:
        return LatticeSpec.load(args.spec)
    offset = -(args.sites // 2) if args.label_offset is None else args.label_offset
    return LatticeSpec.uniform(args.sites, args.coupling, args.beta, args.length, offset)


def _emit(text: str, out: Path | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        out.write_text(text)


def _sibling(out: Path, tag: str) -> Path:
    return out.with_name(f"{out.stem}_{tag}{out.suffix or '.csv'}")


def _render_path(args) -> Path | None:
    if getattr(args, "render", None) is None:
        return None
    if args.out is None:
        raise UsageError("--render needs --out")
    return args.out.with_suffix(".ppm")


def _note(msg: str) -> None:
    print(msg, file=sys.stderr)


def _one_site(args) -> int:
    if len(args.input) != 1:
        raise UsageError("--input takes a single waveguide here")
    return args.input[0]


def _pair(args) -> tuple[int, int]:
    if len(args.input) != 2:
        raise UsageError("--input takes two waveguides J,K here")
    return args.input[0], args.input[1]


def cmd_simulate_single(args) -> None:
    spec = _spec(args)
    site = _one_site(args)
    if args.z_slices < 1:
        raise UsageError("--z-slices must be >= 1")
    ppm = _render_path(args)
    u = propagator(build_single_hamiltonian(spec), spec.length_mm)
    p = single_photon_distribution(u, site)
    if args.format == "json":
        _emit(io.to_json({"input": site, "length_mm": spec.length_mm, "probabilities": p}), args.out)
    else:
        _emit(io.vector_csv(p), args.out)
    peak = int(np.argmax(p))
    _note(f"input {spec.label(site)}: peak at waveguide {spec.label(peak)} (p = {p[peak]:.4f})")
    if ppm is not None:
        if args.z_slices == 1:
            zs = np.array([spec.length_mm])
        else:
            zs = np.linspace(0.0, spec.length_mm, args.z_slices)
        image = np.abs(propagators_over_z(build_single_hamiltonian(spec), zs)[:, :, site]) ** 2
        render.write_ppm(ppm, render.to_rgb(image))


def cmd_correlate(args) -> None:
    spec = _spec(args)
    pair = _pair(args)
    ppm = _render_path(args)
    u = propagator(build_single_hamiltonian(spec), spec.length_mm)
    fn = distinguishable_correlation if args.distinguishable else quantum_correlation
    cm = fn(u, pair)
    if args.format == "json":
        _emit(io.to_json({**io.gamma_meta(cm), "gamma": cm.gamma}), args.out)
    else:
        _emit(io.gamma_csv(cm), args.out)
    vm = violation_map(cm)
    _note(
        f"input {spec.label(pair[0])},{spec.label(pair[1])}: "
        f"min V = {vm.min_v():.6g}, violating pairs = {int(np.sum(np.triu(vm.violated, 1)))}"
    )
    if ppm is not None:
        render.write_ppm(ppm, render.to_rgb(cm.gamma))


def cmd_violations(args) -> None:
    ppm = _render_path(args)
    if args.gamma is not None:
        vm = violation_map(io.read_gamma_csv(args.gamma))
        strength = -vm.v
    else:
        counts = io.read_counts(args.counts, args.sidecar)
        vm = violation_significance(estimate_gamma(counts, args.singles_correction))
        strength = vm.n_sigma
    if args.format == "json":
        payload = {"v": vm.v}
        if vm.n_sigma is not None:
            payload.update(sigma_v=vm.sigma_v, n_sigma=vm.n_sigma)
        _emit(io.to_json(payload), args.out)
    else:
        _emit(io.matrix_csv(vm.v, {"quantity": "V"}), args.out)
        if vm.n_sigma is not None and args.out is not None:
            _sibling(args.out, "sigma").write_text(io.matrix_csv(vm.sigma_v, {"quantity": "sigma_V"}))
            _sibling(args.out, "nsigma").write_text(io.matrix_csv(vm.n_sigma, {"quantity": "n_sigma"}))
    msg = f"min V = {vm.min_v():.6g}"
    if vm.n_sigma is not None:
        msg += f", max n_sigma = {np.nanmax(vm.n_sigma):.2f}"
    _note(msg)
    if ppm is not None:
        render.write_ppm(ppm, render.violation_rgb(strength, vm.violated))


def cmd_similarity(args) -> None:
    a = io.read_gamma_csv(args.a)
    b = io.read_gamma_csv(args.b)
    if a.gamma.shape != b.gamma.shape:
        raise UsageError(f"dimension mismatch: {a.gamma.shape} vs {b.gamma.shape}")
    print(f"{similarity(a, b):.4f}")


def cmd_calibrate(args) -> None:
    spec = _spec(args)
    measured = io.read_vector_csv(args.measured)
    site = spec.n_sites // 2 if args.input is None else _one_site(args)
    res = fit_coupling(measured, spec, site, args.c_range, args.z_range, args.grid, args.rounds)
    meta = {
        "c_fit": repr(res.c_fit),
        "z_eff_fit": repr(res.z_eff_fit),
        "cz_product": repr(res.cz_product),
        "residual": repr(res.residual),
        "degenerate": str(res.degenerate).lower(),
        "boundary_warning": str(res.boundary_warning).lower(),
    }
    if args.format == "json":
        payload = {
            "c_fit": res.c_fit, "z_eff_fit": res.z_eff_fit, "cz_product": res.cz_product,
            "residual": res.residual, "degenerate": res.degenerate,
            "boundary_warning": res.boundary_warning, "grid_trace": res.grid_trace,
        }
        _emit(io.to_json(payload), args.out)
    else:
        lines = [f"# {k}={v}" for k, v in meta.items()] + ["# columns=c,z,sse"]
        lines += [",".join(io.fmt(x) for x in row) for row in res.grid_trace]
        _emit("\n".join(lines) + "\n", args.out)
    print(f"Cz = {res.cz_product:.6f}", file=sys.stderr)
    if res.degenerate:
        _note("degenerate: only the product C*z is determined; pin one range to separate them")
    else:
        _note(f"C = {res.c_fit:.6f} mm^-1, z = {res.z_eff_fit:.6f} mm")
    if res.boundary_warning:
        _note("warning: best fit lies on the search range boundary")


def cmd_ensemble(args) -> None:
    spec = _spec(args)
    if args.trials < 1:
        raise UsageError("--trials must be >= 1")
    ppm = _render_path(args)
    sites = args.input or [spec.n_sites // 2]
    if len(sites) not in (1, 2):
        raise UsageError("--input takes J or J,K")
    pair = tuple(sites) if len(sites) == 2 else None
    res = ensemble_average(
        spec, args.sigma_beta, args.sigma_coupling, args.trials, args.seed,
        sites[0], pair, args.distinguishable,
    )
    meta = {
        "trials": args.trials,
        "seed": args.seed,
        "sigma_beta": repr(float(args.sigma_beta)),
        "sigma_coupling": repr(float(args.sigma_coupling)),
        "participation_ratio": repr(res.participation_ratio),
        "mean_participation_ratio": repr(res.mean_participation_ratio),
    }
    if args.format == "json":
        payload = {**meta, "single_input": sites[0], "single_distribution": res.single_distribution}
        if res.gamma is not None:
            payload.update(io.gamma_meta(res.gamma), gamma=res.gamma.gamma)
        _emit(io.to_json(payload), args.out)
    else:
        if res.gamma is not None:
            text = io.matrix_csv(res.gamma.gamma, {**io.gamma_meta(res.gamma), **meta}, absent="-1")
            _emit(text, args.out)
            if args.out is not None:
                _sibling(args.out, "single").write_text(io.vector_csv(res.single_distribution, meta))
        else:
            _emit(io.vector_csv(res.single_distribution, meta), args.out)
    _note(
        f"participation ratio of mean distribution = {res.participation_ratio:.4f}, "
        f"mean per-trial = {res.mean_participation_ratio:.4f}"
    )
    if ppm is not None:
        data = res.gamma.gamma if res.gamma is not None else res.single_distribution[None, :]
        render.write_ppm(ppm, render.to_rgb(data))


def cmd_dim(args) -> None:
    print(hilbert_dim(args.photons, args.sites, args.distinguishable))


COMMANDS = {
    "simulate-single": cmd_simulate_single,
    "correlate": cmd_correlate,
    "violations": cmd_violations,
    "similarity": cmd_similarity,
    "calibrate": cmd_calibrate,
    "ensemble": cmd_ensemble,
    "dim": cmd_dim,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        COMMANDS[args.command](args)
    except (UsageError, ValidationError, ResourceError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (NumericalError, np.linalg.LinAlgError, FloatingPointError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    return 0


if __name__ == "__main__":
    sys.exit(main())
