#!/usr/bin/env python3
"""Run the bundled two-room condition matrix and print the summary.

Equivalent to:

    simulate --config configs/two_room.yaml --out results.csv \
             --summary summary.csv

but prints the summary table to stdout as well, which is handy when
iterating on controller parameters.
"""

import argparse
import sys
from pathlib import Path

from sharednav.experiment import (
    load_config,
    results_to_csv,
    run_experiment,
    summarize,
    summary_to_csv,
)

REPO_ROOT = Path(__file__).resolve().parent.parent


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--config", default=str(REPO_ROOT / "configs" / "two_room.yaml"))
    ap.add_argument("--out", default="results.csv")
    ap.add_argument("--summary", default="summary.csv")
    args = ap.parse_args()

    config = load_config(args.config)
    # the config's map path is relative to the repo root
    if not Path(config.map_path).is_absolute():
        config.map_path = str(REPO_ROOT / config.map_path)
    results = run_experiment(config)
    Path(args.out).write_text(results_to_csv(results))
    summary = summary_to_csv(summarize(results))
    Path(args.summary).write_text(summary)
    print(summary)
    print(f"wrote {args.out} and {args.summary}", file=sys.stderr)
    return 0


if __name__ == "__main__":
    sys.exit(main())
