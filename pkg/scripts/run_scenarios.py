#!/usr/bin/env python3
"""Run the aluminum / steel benchmark pair end to end.

For each scenario file this emits the coefficient diagnostics, the
convergence ratios, a family of truncated input signals, and the verified
simulation, all as CSV + JSON under --out.  The signal families use the
truncation orders that the convergence diagnostics bracket (low, selected,
and the high-quality N of the scenario file), so the artifact set is
enough to plot every comparison discussed in the README.
"""

from __future__ import annotations

import argparse
import json
from pathlib import Path

from flatheat.pipeline import Scenario, cmd_diagnose, cmd_signal, cmd_simulate, load_scenario

SCENARIO_DIR = Path(__file__).resolve().parent.parent / "scenarios"
SIGNAL_FAMILIES = {"aluminum": (1, 3, 7), "steel-38Si7": (5, 10, 15)}


def run_one(path: Path, out_dir: str) -> dict:
    scenario = load_scenario(str(path), {"out_dir": out_dir})
    print(f"== {scenario.material}")
    for kind in ("eta", "mu", "rhat"):
        info = cmd_diagnose(scenario, kind)
        print(f"  diagnose {kind}: gamma={info['gamma']:.1f} max_index={info['max_index']}")
    for n in SIGNAL_FAMILIES.get(scenario.material, ()) + (scenario.N,):
        sig_scenario = load_scenario(str(path), {"out_dir": out_dir, "N": n})
        info = cmd_signal(sig_scenario)
        print(f"  signal N={info['N']}: max|u|={info['max_abs_u']:.4g} W/m^2")
    summary = cmd_simulate(scenario)
    print(
        f"  simulate: y(t_end)={summary['y_end']:.3f} K"
        f" tracking={summary['tracking_error']:.2e} K"
        f" min_field={summary['min_field_temperature']:.1f} K"
    )
    return summary


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default="out", help="output directory")
    parser.add_argument(
        "--scenarios",
        nargs="*",
        default=[str(SCENARIO_DIR / "aluminum.json"), str(SCENARIO_DIR / "steel.json")],
    )
    args = parser.parse_args()

    results = {}
    for path in args.scenarios:
        summary = run_one(Path(path), args.out)
        results[summary["scenario"]["material"]] = summary
    (Path(args.out) / "batch_summary.json").write_text(json.dumps(results, indent=2, sort_keys=True) + "\n")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
