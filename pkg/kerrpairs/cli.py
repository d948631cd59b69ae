# kerrpairs/cli.py
"""
Command-line front end.

  kerrpairs continuum-bound | wigner-map | epr | lattice | pump-sweep | epr-linear
            [--config PATH] [--out PATH] [--format csv|json] [--reproducible]
            [--set section.key=value ...] [-v|-vv]

Exit statuses: 0 success, 2 invalid input, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import logging
import math
import sys
from pathlib import Path
from typing import Any, Callable, Dict, Optional, Sequence

import numpy as np
from pydantic import ValidationError

from kerrpairs import __version__
from kerrpairs.core import continuum, lattice, lindblad
from kerrpairs.core.errors import EXIT_OK, EXIT_VALIDATION, KerrPairsError
from kerrpairs.io.curve_file import CurveFile, CurveFileStore
from kerrpairs.models.schemas import (
    Command,
    DriveParams,
    FockBasis,
    LatticeParams,
    OutputFormat,
    PumpGridSpec,
    RunConfig,
    RunSettings,
    SweepWindow,
    WaveguideParams,
    WignerGridSpec,
)
from kerrpairs.shared import configure_logging, load_settings

logger = logging.getLogger("kerrpairs.cli")

_SECTIONS = {
    Command.CONTINUUM_BOUND: "continuum",
    Command.WIGNER_MAP: "wigner",
    Command.EPR: "epr",
    Command.LATTICE: "lattice",
    Command.PUMP_SWEEP: "pump_sweep",
    Command.EPR_LINEAR: "epr_linear",
}


def _yes(flag: bool) -> str:
    return "yes" if flag else "no"


class Runner:
    """One CLI invocation: validated settings, output store and the command handlers."""

    def __init__(self, run: RunConfig, settings: RunSettings):
        self.run = run
        self.settings = settings
        base = run.out.parent if run.out else None
        self.store = CurveFileStore(base_dir=base, fmt=run.format, reproducible=run.reproducible)

    def _target(self, suffix: str = "") -> Optional[Path]:
        out = self.run.out
        if out is None:
            return None
        return out.with_name(f"{out.stem}{suffix}{out.suffix}") if suffix else out

    def _emit(self, name: str, curve: CurveFile, suffix: str = "") -> Path:
        return self.store.write(f"{name}{suffix}", curve, self._target(suffix))

    def _metadata(self, **extra: Any) -> Dict[str, Any]:
        return {
            "command": self.run.command.value,
            "parameters": self.run.params,
            "tolerances": self.settings.numerics.model_dump(mode="json"),
            **extra,
        }

    # ── Continuum ────────────────────────────────────────

    def continuum_bound(self) -> str:
        c = self.settings.continuum
        params = WaveguideParams(omega_k0=c.omega_k0, v=c.v, beta=c.beta, kappa=c.kappa, L=c.L)
        bs = continuum.require_bound_state(params)
        samples = continuum.sample_amplitudes(bs, c.n_samples, c.dx_halfwidth, c.dk_halfwidth)
        dk_scaled, e_continuum, e_bound = continuum.spectrum_curve(params, samples["delta_k"])
        curve = CurveFile.from_arrays(
            ["delta_x [length]", "f_position [length^-1/2]", "delta_k [1/length]",
             "f_momentum [length^1/2]", "f_pair_difference [length^1/2]",
             "delta_k_over_xi [1]", "E_tilde_continuum [1]", "E_tilde_bound [1]"],
            [samples["delta_x"], samples["f_position"], samples["delta_k"],
             samples["f_momentum"], samples["f_pair_difference"],
             dk_scaled, e_continuum, e_bound],
            self._metadata(xi=bs.xi, E_b=bs.E_b,
                           prefactors=continuum.box_prefactors(bs.xi, params.L)),
        )
        path = self._emit("continuum-bound", curve)
        return f"xi={bs.xi:g} E_b_shifted={bs.binding_shift:g}\nE_b={bs.E_b:.12g}\nwrote {path}"

    def wigner_map(self) -> str:
        w = self.settings.wigner
        grid = WignerGridSpec(dx_halfwidth=w.dx_halfwidth, dk_halfwidth=w.dk_halfwidth,
                              n_dx=w.n_dx, n_dk=w.n_dk)
        result = continuum.wigner_map(w.xi, grid, with_oracle=w.with_oracle,
                                      oracle_abs_tol=self.settings.numerics.oracle_abs_tol)
        dx, dk = np.meshgrid(result.delta_x, result.delta_k, indexing="ij")
        columns = ["delta_x [length]", "delta_k [1/length]", "W [1]"]
        arrays = [dx, dk, result.values]
        if result.oracle is not None:
            columns.append("W_oracle [1]")
            arrays.append(result.oracle)
        lowest = result.minimum
        curve = CurveFile.from_arrays(columns, arrays, self._metadata(
            minimum=lowest.value, argmin=[lowest.delta_x, lowest.delta_k],
            max_discrepancy=result.max_discrepancy,
        ))
        path = self._emit("wigner-map", curve)
        lines = [
            f"min_W={lowest.value:.6e} at delta_x={lowest.delta_x:.6g} "
            f"delta_k={lowest.delta_k:.6g} negative={_yes(lowest.value < 0)}",
        ]
        if result.max_discrepancy is not None:
            lines.append(f"max_discrepancy={result.max_discrepancy:.3e}")
        lines.append(f"wrote {path}")
        return "\n".join(lines)

    def epr(self) -> str:
        e = self.settings.epr
        grid = PumpGridSpec(n_sum=e.n_sum, n_diff=e.n_diff, sum_halfwidth=e.sum_halfwidth,
                            diff_halfwidth=e.diff_halfwidth, refine_factor=e.refine_factor)
        state = continuum.gaussian_pump_state(e.xi, e.W_p, e.k0, grid)
        result = continuum.epr_uncertainty_product(state)
        curve = CurveFile.from_arrays(
            ["product [1]", "var_position_difference [length^2]",
             "var_momentum_sum [1/length^2]", "analytic_reference [1]"],
            [[result.product], [result.var_position_difference],
             [result.var_momentum_sum], [result.analytic_reference]],
            self._metadata(violates_separability=result.violates_separability,
                           violates_epr=result.violates_epr,
                           refinement_change=result.refinement_change),
        )
        path = self._emit("epr", curve)
        return (
            f"product={result.product:.6e} reference={result.analytic_reference:.6e}\n"
            f"separability bound (< 1) violated: {_yes(result.violates_separability)}, "
            f"EPR bound (< 1/4) violated: {_yes(result.violates_epr)}\n"
            f"wrote {path}"
        )

    def epr_linear(self) -> str:
        e = self.settings.epr_linear
        result = continuum.epr_linear_dispersion(e.M, e.kappa, e.L, e.omega_k0)
        vector = (result.bound_vector if result.bound_vector is not None
                  else np.full(result.spectrum.size, math.nan))
        curve = CurveFile.from_arrays(
            ["index [1]", "E [energy]", "bound_vector [1]"],
            [np.arange(result.spectrum.size), result.spectrum, vector],
            self._metadata(bound_energy=result.bound_energy, rank_residual=result.rank_residual,
                           degenerate=result.degenerate),
        )
        path = self._emit("epr-linear", curve)
        if result.degenerate:
            head = f"degenerate free spectrum: all {result.spectrum.size} levels at {result.spectrum[0]:g}"
        else:
            components = ", ".join(f"{v:.6g}" for v in result.bound_vector)
            head = (f"bound level E={result.bound_energy:.12g} rank_residual={result.rank_residual:.2e}\n"
                    f"bound vector=({components})")
        return f"{head}\nwrote {path}"

    # ── Lattice ──────────────────────────────────────────

    def lattice(self) -> str:
        l_cfg = self.settings.lattice
        scale = l_cfg.energy_scale()
        u = l_cfg.u
        params = LatticeParams.from_j0(l_cfg.J0 * scale, u, omega_c=l_cfg.omega_c * scale,
                                       N=l_cfg.N, b=l_cfg.b)
        spectrum = lattice.exact_diagonalize(params)
        analytic = lattice.bound_state_lattice(params)
        numeric = spectrum.bound_energy
        discrepancy = abs(numeric - analytic.E_b) if numeric is not None else math.nan

        rows_k, rows_level, rows_e, rows_bound = [], [], [], []
        for k0, sector in lattice.two_photon_band(params.J, u, params.omega_c, params.N, params.b):
            for level, energy in enumerate(sector.eigenvalues):
                rows_k.append(k0)
                rows_level.append(level)
                rows_e.append(energy)
                rows_bound.append(1.0 if level == sector.bound_index else 0.0)
        meta = self._metadata(E_b_analytic=analytic.E_b, E_b_numeric=numeric,
                              discrepancy=discrepancy, eta=analytic.eta, J0=params.J0)
        paths = [self._emit("lattice", CurveFile.from_arrays(
            ["k0 [1/b]", "level [1]", "E [energy]", "bound [flag]"],
            [rows_k, rows_level, rows_e, rows_bound], meta), "_spectrum")]

        j0_grid = np.linspace(0.0, l_cfg.gap_j0_max * abs(u), l_cfg.gap_points)
        j0_values, gaps = lattice.binding_gap_curve(u, j0_grid)
        paths.append(self._emit("lattice", CurveFile.from_arrays(
            ["J0 [energy]", "delta_E [energy]"], [j0_values, gaps], meta), "_gap"))

        curves = lattice.joint_probability_curves(u, l_cfg.ratios, N=params.N,
                                                  omega_c=params.omega_c)
        sites = next(iter(curves.values()))[0] if curves else np.arange(1)
        columns = ["j [sites]"] + [f"P(J0/u={ratio:g}) [1]" for ratio in curves]
        arrays = [sites] + [probability for _, probability in curves.values()]
        paths.append(self._emit("lattice", CurveFile.from_arrays(columns, arrays, meta),
                                "_probability"))

        found = f"{numeric:.12g}" if numeric is not None else "none"
        return (
            f"E_b analytic={analytic.E_b:.12g} numeric={found} discrepancy={discrepancy:.3e}\n"
            f"eta={analytic.eta:.6g} binding_gap={lattice.binding_gap(params):.6g}\n"
            + "\n".join(f"wrote {p}" for p in paths)
        )

    # ── Pump sweep ───────────────────────────────────────

    def pump_sweep(self) -> str:
        s = self.settings.pump_sweep
        if s.preset:
            params, drive = lindblad.ring_preset(s.preset)
            M = 3
            scale = abs(params.u)
        else:
            scale = s.energy_scale()
            M = s.M
            params = LatticeParams.from_j0(s.J0 * scale, s.u, omega_c=s.omega_c * scale,
                                           N=max(M, 3))
            drive = DriveParams.with_pair_momentum(F=s.F * scale, gamma=s.gamma * scale,
                                                   k0=s.k0, M=M)
        basis = FockBasis(M=M, n_max=s.n_max)

        if s.window is SweepWindow.AUTO:
            low, high = lindblad.sweep_window(params, M)
        else:
            low, high = s.omega_p_min * scale, s.omega_p_max * scale
        grid = np.linspace(low, high, s.n_points)

        result = lindblad.pump_sweep(
            params, drive, grid, basis,
            method=s.method, dense_limit=s.dense_limit,
            workers=s.workers, far_detuning_factor=s.far_detuning_factor,
            gap_tol=self.settings.numerics.kernel_gap_tol,
        )
        columns = ["omega_p [energy]"]
        columns += [f"N_{j + 1} [1]" for j in range(M)]
        columns += [f"g2_{j + 1} [1]" for j in range(M)]
        columns.append("residual [1]")
        arrays = [result.omega_p] + [result.N[:, j] for j in range(M)]
        arrays += [result.g2[:, j] for j in range(M)] + [result.residuals]
        curve = CurveFile.from_arrays(columns, arrays, self._metadata(
            preset=s.preset or None, J0=params.J0, u=params.u, F=drive.F, gamma=drive.gamma,
            n_max=basis.n_max, g2_peak=result.g2_peak, N_peak=result.N_peak,
            pair_resonance=result.pair_resonance,
            pair_resonance_infinite=result.pair_resonance_infinite,
            single_resonance=result.single_resonance, far_detuned_g2=result.far_detuned_g2,
        ))
        path = self._emit("pump-sweep", curve)

        def _fmt(value: Optional[float]) -> str:
            return "none" if value is None else f"{value:.6g}"

        return (
            f"g2 peak at omega_p={_fmt(result.g2_peak)} (ring pair resonance "
            f"{result.pair_resonance:.6g}, infinite chain {result.pair_resonance_infinite:.6g})\n"
            f"N peak at omega_p={_fmt(result.N_peak)} (single-photon resonance "
            f"{result.single_resonance:.6g})\n"
            f"far-detuned g2={_fmt(result.far_detuned_g2)}\n"
            f"wrote {path}"
        )


_HANDLERS: Dict[Command, Callable[[Runner], str]] = {
    Command.CONTINUUM_BOUND: Runner.continuum_bound,
    Command.WIGNER_MAP: Runner.wigner_map,
    Command.EPR: Runner.epr,
    Command.LATTICE: Runner.lattice,
    Command.PUMP_SWEEP: Runner.pump_sweep,
    Command.EPR_LINEAR: Runner.epr_linear,
}


# ── Argument parsing ─────────────────────────────────────

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, default=None,
                        help="TOML config file (default: $KERRPAIRS_CONFIG)")
    common.add_argument("--out", type=Path, default=None,
                        help="output file (default: $KERRPAIRS_OUTPUT_DIR/<command>.<format>)")
    common.add_argument("--format", choices=[f.value for f in OutputFormat], default=None)
    common.add_argument("--reproducible", action="store_true",
                        help="omit timestamps so identical runs give identical files")
    common.add_argument("--set", dest="overrides", action="append", default=[],
                        metavar="SECTION.KEY=VALUE", help="override one config value")
    common.add_argument("-v", "--verbose", action="count", default=0)

    parser = argparse.ArgumentParser(
        prog="kerrpairs",
        description="Two-photon bound states in Kerr wave-guides and resonator chains.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    commands = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    commands.add_parser(Command.CONTINUUM_BOUND.value, parents=[common],
                        help="bound state, amplitudes and pair spectrum")
    wigner = commands.add_parser(Command.WIGNER_MAP.value, parents=[common],
                                 help="relative-coordinate Wigner density on a grid")
    wigner.add_argument("--oracle", action="store_true",
                        help="also evaluate the quadrature oracle")
    commands.add_parser(Command.EPR.value, parents=[common],
                        help="uncertainty product of a Gaussian-pumped pair")
    commands.add_parser(Command.LATTICE.value, parents=[common],
                        help="resonator-chain spectrum, binding gap and P(j)")
    sweep = commands.add_parser(Command.PUMP_SWEEP.value, parents=[common],
                                help="driven-dissipative steady states versus pump frequency")
    sweep.add_argument("--preset", choices=lindblad.preset_names(aliases=True), default=None)
    commands.add_parser(Command.EPR_LINEAR.value, parents=[common],
                        help="linear-dispersion two-photon spectrum")
    return parser


def _prepare(args: argparse.Namespace) -> tuple[RunConfig, RunSettings]:
    """Merge and type-check the configuration; nothing is computed before this succeeds."""
    command = Command(args.command)
    overrides = list(args.overrides)
    if getattr(args, "oracle", False):
        overrides.append("wigner.with_oracle=true")
    if getattr(args, "preset", None):
        overrides.append(f'pump_sweep.preset="{args.preset}"')
    settings = load_settings(args.config, overrides)
    output = settings.output
    run = RunConfig(
        command=command,
        params=settings.section(_SECTIONS[command]).model_dump(mode="json"),
        out=args.out,
        format=args.format or output.format,
        reproducible=args.reproducible or output.reproducible,
    )
    return run, settings


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    configure_logging(args.verbose)
    try:
        run, settings = _prepare(args)
        summary = _HANDLERS[run.command](Runner(run, settings))
    except KerrPairsError as e:
        logger.debug("%s failed", args.command, exc_info=True)
        print(f"error: {e}", file=sys.stderr)
        return e.exit_status
    except ValidationError as e:
        print(f"error: invalid parameters\n{e}", file=sys.stderr)
        return EXIT_VALIDATION
    print(summary)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
