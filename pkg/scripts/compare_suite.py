"""Score every suite instance under all objectives and print the tables.

Writes one JSON table per instance next to a combined summary when
--out is given; always prints the human-readable tables.
"""

from __future__ import annotations

import argparse
import glob
import json
import os

from storywiggle.instance import load_instance
from storywiggle.pipeline import compare_objectives, format_compare_table


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--instances", default="instances",
                        help="directory of instance files")
    parser.add_argument("--pattern", default="suite_*.json",
                        help="which files to score")
    parser.add_argument("--out", default=None,
                        help="directory for per-instance JSON tables")
    args = parser.parse_args(argv)

    paths = sorted(glob.glob(os.path.join(args.instances, args.pattern)))
    if not paths:
        print(f"no instances match {args.pattern!r} in {args.instances}")
        return 2
    if args.out:
        os.makedirs(args.out, exist_ok=True)

    for path in paths:
        name = os.path.splitext(os.path.basename(path))[0]
        inst, params = load_instance(path)
        table = compare_objectives(inst, params)
        print(f"\n== {name} ({len(inst.characters)} characters, "
              f"{inst.time_steps} steps) ==")
        print(format_compare_table(table))
        if args.out:
            with open(os.path.join(args.out, f"{name}.json"), "w",
                      encoding="utf-8") as fh:
                json.dump(table, fh, indent=2, sort_keys=True)
                fh.write("\n")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
