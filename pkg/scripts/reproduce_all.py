"""Print every published-vs-computed comparison and a one-line verdict per table."""

import argparse
import sys

from listintersect import reproduce as repro
from listintersect.cli import render_pretty


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--mc-reps", type=int, default=None, help="also rerun the simulated column")
    args = ap.parse_args(argv)
    verdicts, failed = [], False
    for table in repro.TABLES:
        cells = repro.reproduce(table, args.mc_reps if table == "4" else None)
        print(f"== {table} ==")
        print(render_pretty("reproduce", {"cells": [c.to_dict() for c in cells]}))
        bad = sum(c.ok is False for c in cells)
        failed |= bad > 0
        verdicts.append(f"{table}: {len(cells) - bad}/{len(cells)} within tolerance")
    print("\n".join(verdicts))
    return 1 if failed else 0


if __name__ == "__main__":
    sys.exit(main())
