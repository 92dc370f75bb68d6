"""Scenario configuration and the command line front end.

A scenario bundles one material, the rod geometry, the transition
parameters and the simulation controls.  Scenarios live in JSON files with
the layout

    {
      "material": "aluminum",
      "materials": [{"name": ..., "lambda": ..., "rho": ..., "c": ...}],
      "geometry": {"length": 0.2},
      "trajectory": {"omega": 2.0, "T": 1000.0, "y0": 300.0,
                     "delta_y": 100.0, "N": "auto", "samples": 1001},
      "simulation": {"grid_points": 101, "dt": 0.1, "t_end": 1000.0,
                     "probes": [0.05, 0.1, 0.2], "store_every": null},
      "output": {"dir": "out", "field": false}
    }

Command line flags override file values.  Every command writes its CSV
artifacts plus one JSON summary that embeds the fully resolved scenario
and the tool version, so any output file can be traced back to the exact
inputs that produced it.  Exit codes: 0 success, 2 configuration error,
3 numerical failure.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import os
import sys
import tempfile
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .materials import (
    BUILTIN_MATERIALS,
    MaterialProperties,
    RodGeometry,
    gamma_coefficient,
    get_material,
    material_from_dict,
)
from .series import (
    EtaDiagnostics,
    eta_sequence,
    first_subunity_index,
    input_signal,
    mu_sequence,
    r_hat_sequence,
    select_truncation,
)
from .simulate import SimulationConfig, SimulationDivergedError, simulate
from .trajectory import (
    QuadratureError,
    TransitionSpec,
    bump_derivatives,
    transition_profile,
)

DEFAULT_PROBES = (0.05, 0.1, 0.2)
DEFAULT_DIAG_ORDERS = 40


class ConfigError(Exception):
    """Scenario or flag input the pipeline cannot act on."""


@dataclass
class Scenario:
    material: str = "aluminum"
    length: float = 0.2
    omega: float = 2.0
    T: float = 1000.0
    y0: float = 300.0
    delta_y: float = 100.0
    N: int | str = "auto"
    samples: int = 1001
    extra_materials: list[dict] = field(default_factory=list)
    simulation: dict = field(default_factory=dict)
    out_dir: str = "out"
    export_field: bool = False

    @classmethod
    def from_dict(cls, raw: dict) -> "Scenario":
        trajectory = raw.get("trajectory", {})
        geometry = raw.get("geometry", {})
        output = raw.get("output", {})
        scenario = cls(
            material=raw.get("material", cls.material),
            length=float(geometry.get("length", cls.length)),
            omega=float(trajectory.get("omega", cls.omega)),
            T=float(trajectory.get("T", cls.T)),
            y0=float(trajectory.get("y0", cls.y0)),
            delta_y=float(trajectory.get("delta_y", cls.delta_y)),
            N=trajectory.get("N", cls.N),
            samples=int(trajectory.get("samples", cls.samples)),
            extra_materials=list(raw.get("materials", [])),
            simulation=dict(raw.get("simulation", {})),
            out_dir=str(output.get("dir", cls.out_dir)),
            export_field=bool(output.get("field", False)),
        )
        scenario.validate()
        return scenario

    def to_dict(self) -> dict:
        return {
            "material": self.material,
            "materials": list(self.extra_materials),
            "geometry": {"length": self.length},
            "trajectory": {
                "omega": self.omega,
                "T": self.T,
                "y0": self.y0,
                "delta_y": self.delta_y,
                "N": self.N,
                "samples": self.samples,
            },
            "simulation": dict(self.simulation),
            "output": {"dir": self.out_dir, "field": self.export_field},
        }

    def validate(self) -> None:
        if not self.omega > 1.0:
            raise ConfigError(f"omega must exceed 1, got {self.omega!r}")
        if not self.T > 0.0:
            raise ConfigError(f"T must be positive, got {self.T!r}")
        if self.samples < 3 or self.samples % 2 == 0:
            raise ConfigError(f"samples must be an odd count >= 3, got {self.samples}")
        if isinstance(self.N, str):
            if self.N != "auto":
                raise ConfigError(f'N must be an integer or "auto", got {self.N!r}')
        elif not (isinstance(self.N, int) and self.N >= 0):
            raise ConfigError(f"N must be a nonnegative integer, got {self.N!r}")

    # -- resolution helpers -------------------------------------------------

    def registry(self) -> dict[str, MaterialProperties]:
        extra = {}
        for entry in self.extra_materials:
            try:
                mat = material_from_dict(entry)
            except (ValueError, TypeError) as exc:
                raise ConfigError(str(exc)) from exc
            extra[mat.name] = mat
        return extra

    def resolve_material(self) -> MaterialProperties:
        try:
            return get_material(self.material, self.registry())
        except KeyError as exc:
            raise ConfigError(exc.args[0]) from exc

    def resolve_geometry(self) -> RodGeometry:
        try:
            return RodGeometry(self.length)
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc

    def transition_spec(self) -> TransitionSpec:
        return TransitionSpec(omega=self.omega, T=self.T, y0=self.y0, delta_y=self.delta_y)

    def simulation_config(self, material: MaterialProperties, geometry: RodGeometry) -> SimulationConfig:
        sim = dict(self.simulation)
        probes = tuple(float(p) for p in sim.pop("probes", DEFAULT_PROBES))
        dt = float(sim.pop("dt", 0.1))
        t_end = float(sim.pop("t_end", self.T))
        theta0 = float(sim.pop("theta0", self.y0))
        grid_points = int(sim.pop("grid_points", 101))
        store_every = sim.pop("store_every", None)
        if sim:
            raise ConfigError(f"unknown simulation keys: {sorted(sim)}")
        try:
            return SimulationConfig(
                material=material,
                geometry=geometry,
                dt=dt,
                t_end=t_end,
                theta0=theta0,
                grid_points=grid_points,
                probes=probes,
                store_every=None if store_every is None else int(store_every),
            )
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc


def load_scenario(path: str | None, overrides: dict) -> Scenario:
    raw = {}
    if path is not None:
        try:
            raw = json.loads(Path(path).read_text())
        except OSError as exc:
            raise ConfigError(f"cannot read scenario file {path}: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise ConfigError(f"scenario file {path} is not valid JSON: {exc}") from exc
    scenario = Scenario.from_dict(raw)
    for key, value in overrides.items():
        if value is not None:
            setattr(scenario, key, value)
    scenario.validate()
    return scenario


def _write_atomic(path: Path, writer) -> None:
    """Write through a sibling temp file so readers never see partial output."""
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name, suffix=".tmp")
    os.close(fd)
    try:
        writer(tmp)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _write_json(path: Path, payload: dict) -> None:
    _write_atomic(path, lambda tmp: Path(tmp).write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n"))


def _summary(scenario: Scenario, extra: dict) -> dict:
    return {"version": __version__, "scenario": scenario.to_dict(), **extra}


def _sample_grid(scenario: Scenario) -> np.ndarray:
    return np.linspace(0.0, scenario.T, scenario.samples)


def _diagnostics(scenario: Scenario, orders: int) -> tuple[MaterialProperties, RodGeometry, EtaDiagnostics]:
    material = scenario.resolve_material()
    geometry = scenario.resolve_geometry()
    return material, geometry, eta_sequence(material, geometry, orders)


def _full_diagnostics(scenario: Scenario, orders: int):
    """Diagnostics with mu and r_hat populated, plus the derivative table."""
    material, geometry, diag = _diagnostics(scenario, orders)
    table = bump_derivatives(scenario.transition_spec(), _sample_grid(scenario), orders)
    diag = r_hat_sequence(mu_sequence(diag, table, material, scenario.delta_y))
    return material, geometry, diag, table


def _resolve_truncation(scenario: Scenario, diag: EtaDiagnostics) -> int:
    if scenario.N == "auto":
        return select_truncation(diag)
    return int(scenario.N)


def cmd_diagnose(scenario: Scenario, kind: str) -> dict:
    if kind not in ("eta", "mu", "rhat"):
        raise ConfigError(f"unknown diagnostic kind {kind!r}")
    out = Path(scenario.out_dir)
    if kind == "eta":
        material, geometry, diag = _diagnostics(scenario, DEFAULT_DIAG_ORDERS)
        sub_unity = first_subunity_index(material, geometry)
        info = {
            "kind": kind,
            "gamma": diag.gamma,
            "max_index": diag.max_index,
            "eta_max": float(diag.eta[diag.max_index]),
            "first_subunity_index": sub_unity,
        }
    else:
        material, geometry, diag, _table = _full_diagnostics(scenario, DEFAULT_DIAG_ORDERS)
        info = {
            "kind": kind,
            "gamma": diag.gamma,
            "max_index": diag.max_index,
            "eta_max": float(diag.eta[diag.max_index]),
            "selected_N": select_truncation(diag),
            "max_mu": float(diag.mu.max()),
        }
    stem = f"diagnostics_{scenario.material}_{kind}"
    _write_atomic(out / f"{stem}.csv", diag.to_csv)
    summary = _summary(scenario, info)
    _write_json(out / f"{stem}.json", summary)
    return summary


def cmd_signal(scenario: Scenario) -> dict:
    material, geometry, diag, table = _full_diagnostics(scenario, _table_orders(scenario))
    truncation = _resolve_truncation(scenario, diag)
    signal = input_signal(diag, table, material, scenario.transition_spec(), truncation)
    out = Path(scenario.out_dir)
    stem = f"signal_{scenario.material}_N{truncation}"
    _write_atomic(out / f"{stem}.csv", signal.to_csv)
    summary = _summary(
        scenario,
        {
            "gamma": diag.gamma,
            "omega_hat": table.omega_hat,
            "N": truncation,
            "max_abs_u": float(np.abs(signal.values).max()),
            "min_u": float(signal.values.min()),
        },
    )
    _write_json(out / f"{stem}.json", summary)
    return summary


def _table_orders(scenario: Scenario) -> int:
    if scenario.N == "auto":
        return DEFAULT_DIAG_ORDERS
    return max(int(scenario.N), DEFAULT_DIAG_ORDERS)


def cmd_simulate(scenario: Scenario) -> dict:
    material, geometry, diag, table = _full_diagnostics(scenario, _table_orders(scenario))
    truncation = _resolve_truncation(scenario, diag)
    spec = scenario.transition_spec()
    signal = input_signal(diag, table, material, spec, truncation)
    cfg = scenario.simulation_config(material, geometry)
    result = simulate(cfg, signal)

    # Reference trajectory on the stored frame times for the tracking error.
    profile = np.interp(result.times, table.times, transition_profile(table))
    profile[result.times <= 0.0] = 0.0
    profile[result.times >= spec.T] = 1.0
    reference = scenario.y0 + scenario.delta_y * profile
    tracking_error = float(np.abs(result.output_trace - reference).max())

    out = Path(scenario.out_dir)
    stem = f"simulation_{scenario.material}"
    _write_atomic(out / f"{stem}.csv", result.to_csv)
    if scenario.export_field:
        _write_atomic(out / f"{stem}_field.csv", result.field_to_csv)
    summary = _summary(
        scenario,
        {
            "N": truncation,
            "omega_hat": table.omega_hat,
            "y_end": float(result.output_trace[-1]),
            "tracking_error": tracking_error,
            "energy_residual": result.energy_residual,
            "min_field_temperature": float(result.field.min()),
            "below_zero_kelvin": bool(result.field.min() < 0.0),
        },
    )
    _write_json(out / f"{stem}.json", summary)
    return summary


def cmd_materials(scenario: Scenario | None = None, stream=None) -> int:
    stream = stream or sys.stdout
    registry = dict(BUILTIN_MATERIALS)
    if scenario is not None:
        registry.update(scenario.registry())
    stream.write(f"{'name':<16}{'lambda':>10}{'rho':>10}{'c':>10}{'alpha':>14}\n")
    for name in registry:
        mat = registry[name]
        stream.write(
            f"{name:<16}{mat.conductivity:>10g}{mat.density:>10g}"
            f"{mat.specific_heat:>10g}{mat.diffusivity:>14.3e}\n"
        )
    return len(registry)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="flatheat",
        description="Feedforward boundary-flux synthesis and verification for a 1-D rod.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--scenario", help="scenario JSON file")
        p.add_argument("--out", help="output directory (overrides scenario)")
        p.add_argument("--material", help="material name")
        p.add_argument("--length", type=float, help="rod length in meters")
        p.add_argument("--omega", type=float, help="transition steepness exponent")
        p.add_argument("--T", type=float, help="transition duration in seconds")
        p.add_argument("--delta-y", type=float, dest="delta_y", help="output rise in Kelvin")
        p.add_argument("--N", help='series truncation order or "auto"')
        p.add_argument("--samples", type=int, help="sample count for signal grids (odd)")

    p_diag = sub.add_parser("diagnose", help="write coefficient and convergence diagnostics")
    add_common(p_diag)
    p_diag.add_argument("--kind", choices=("eta", "mu", "rhat"), default="eta")

    p_signal = sub.add_parser("signal", help="synthesize the truncated boundary flux")
    add_common(p_signal)

    p_sim = sub.add_parser("simulate", help="synthesize a flux and verify it by PDE simulation")
    add_common(p_sim)

    p_mat = sub.add_parser("materials", help="list known materials")
    p_mat.add_argument("--scenario", help="scenario JSON file with extra materials")

    return parser


def _scenario_from_args(args: argparse.Namespace) -> Scenario:
    overrides = {
        "material": getattr(args, "material", None),
        "length": getattr(args, "length", None),
        "omega": getattr(args, "omega", None),
        "T": getattr(args, "T", None),
        "delta_y": getattr(args, "delta_y", None),
        "samples": getattr(args, "samples", None),
        "out_dir": getattr(args, "out", None),
    }
    n_flag = getattr(args, "N", None)
    if n_flag is not None:
        overrides["N"] = n_flag if n_flag == "auto" else _parse_n(n_flag)
    return load_scenario(args.scenario, overrides)


def _parse_n(text: str) -> int:
    try:
        return int(text)
    except ValueError:
        raise ConfigError(f'N must be an integer or "auto", got {text!r}') from None


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "materials":
            scenario = load_scenario(args.scenario, {}) if args.scenario else None
            cmd_materials(scenario)
            return 0
        scenario = _scenario_from_args(args)
        if args.command == "diagnose":
            summary = cmd_diagnose(scenario, args.kind)
        elif args.command == "signal":
            summary = cmd_signal(scenario)
        else:
            summary = cmd_simulate(scenario)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (QuadratureError, SimulationDivergedError, FloatingPointError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3
    printable = {k: v for k, v in summary.items() if k not in ("scenario", "version")}
    print(json.dumps(printable, sort_keys=True))
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
