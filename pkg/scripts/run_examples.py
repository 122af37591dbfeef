"""Run both bundled demo systems end to end.

Simulates each system, runs every certificate check, searches for a
feasible Q, and drops trajectories/plots/reports under results/<name>/.

    python scripts/run_examples.py [out_root]
"""

import sys
from pathlib import Path

import numpy as np

from fpnni import cli, config

CHECKS = ("existence", "uniqueness", "boundedness", "eigenvalue", "lmi")


def run_one(name: str, out_root: Path) -> None:
    cfg_path = str(config.bundled_config_path(name))
    out_dir = out_root / name
    print(f"=== {name} ===")
    cli.main(["simulate", "--config", cfg_path, "--out-dir", str(out_dir)])
    cli.main(["equilibrium", "--config", cfg_path])
    for check in CHECKS:
        print(f"--- check: {check} ---")
        cli.main(["check", "--config", cfg_path, "--theorem", check,
                  "--out-dir", str(out_dir), "--slack", "0.0"])
    print("--- search-q ---")
    cli.main(["search-q", "--config", cfg_path, "--seed", "0",
              "--budget", "500"])
    print()


def main() -> int:
    out_root = Path(sys.argv[1]) if len(sys.argv) > 1 else Path("results")
    np.set_printoptions(precision=6, suppress=True)
    for name in ("example1", "example2"):
        run_one(name, out_root)
    print(f"artifacts under {out_root}/")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
