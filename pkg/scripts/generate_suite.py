"""Regenerate the committed instance files under instances/.

The suite is fixed by seed so results stay comparable across runs; the
hand-written instances pin down the solver edge cases (a plain crossing,
a pinched pair that cannot stay flat under nice spacing, and the demo
used in the README).
"""

from __future__ import annotations

import argparse
import os

from storywiggle.generate import generate_instance
from storywiggle.instance import (NicenessParams, parse_instance,
                                  save_instance)

SUITE = [
    ("suite_01", 3, 3, 101, 0.6, False),
    ("suite_02", 4, 3, 102, 0.6, False),
    ("suite_03", 4, 5, 103, 0.5, False),
    ("suite_04", 5, 4, 104, 0.6, False),
    ("suite_05", 5, 6, 105, 0.5, False),
    ("suite_06", 6, 5, 106, 0.5, False),
    ("suite_07", 6, 4, 107, 0.35, True),
    ("suite_08", 7, 5, 108, 0.5, False),
    ("suite_09", 7, 7, 109, 0.4, False),
    ("suite_10", 8, 6, 110, 0.4, False),
]

CROSSING_PAIR = """\
{"characters": [{"id": "a", "activeFrom": 1, "activeTo": 2},
                {"id": "b", "activeFrom": 1, "activeTo": 2}],
 "meetings": [],
 "orderings": [["a", "b"], ["b", "a"]],
 "params": {"delta": 1, "deltaBar": 1}}
"""

PINCHED_PAIR = """\
{"characters": [{"id": "a", "activeFrom": 1, "activeTo": 2},
                {"id": "b", "activeFrom": 1, "activeTo": 2},
                {"id": "u", "activeFrom": 2, "activeTo": 2},
                {"id": "v", "activeFrom": 2, "activeTo": 2}],
 "meetings": [{"t": 1, "members": ["a", "b"]}],
 "orderings": [["a", "b"], ["a", "u", "v", "b"]],
 "params": {"delta": 1, "deltaBar": 1}}
"""

DEMO = """\
{"characters": [{"id": "alice", "activeFrom": 1, "activeTo": 4, "group": "g1"},
                {"id": "bob", "activeFrom": 1, "activeTo": 4, "group": "g1"},
                {"id": "carol", "activeFrom": 2, "activeTo": 4, "group": "g2"},
                {"id": "dan", "activeFrom": 1, "activeTo": 3, "group": "g2"}],
 "meetings": [{"t": 1, "members": ["alice", "bob"]},
              {"t": 2, "members": ["bob", "carol"]},
              {"t": 3, "members": ["carol", "dan"]},
              {"t": 4, "members": ["alice", "carol"]}],
 "orderings": [["dan", "alice", "bob"],
               ["dan", "bob", "carol", "alice"],
               ["carol", "dan", "alice", "bob"],
               ["bob", "alice", "carol"]],
 "params": {"delta": 1, "deltaBar": 1}}
"""


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default="instances",
                        help="target directory (default: instances)")
    args = parser.parse_args(argv)
    os.makedirs(args.out, exist_ok=True)

    for name, text in (("crossing_pair", CROSSING_PAIR),
                       ("pinched_pair", PINCHED_PAIR),
                       ("demo", DEMO)):
        inst, params = parse_instance(text)
        save_instance(os.path.join(args.out, f"{name}.json"), inst, params)
        print(f"{name}: {len(inst.characters)} characters, "
              f"{inst.time_steps} steps, {len(inst.meetings)} meetings")

    for name, chars, steps, seed, prob, all_active in SUITE:
        inst, _ = generate_instance(chars, steps, seed=seed,
                                    meeting_prob=prob, all_active=all_active)
        params = NicenessParams(1.0, 1.0)
        save_instance(os.path.join(args.out, f"{name}.json"), inst, params)
        print(f"{name}: {len(inst.characters)} characters, "
              f"{inst.time_steps} steps, {len(inst.meetings)} meetings")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
