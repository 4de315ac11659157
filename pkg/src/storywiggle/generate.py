"""Seeded random instances for tests and experiments."""

from __future__ import annotations

import random

from .instance import (Meeting, NicenessParams, OrderedStorylineInstance,
                       validate_instance)


def generate_instance(num_characters: int, time_steps: int, *, seed: int,
                      meeting_prob: float = 0.6, all_active: bool = False,
                      max_meetings: int | None = None,
                      delta: float = 1.0, delta_bar: float = 1.0,
                      ) -> tuple[OrderedStorylineInstance, NicenessParams]:
    """Random ordered instance with contiguous activity and valid meetings.

    `all_active` keeps every character alive through all steps, the shape
    the two-step and wiggle-free analyses care about.  Meetings are drawn
    per step as runs of 2 or 3 consecutive characters, pairwise disjoint
    within the step, which keeps every generated instance valid; dropping
    the surplus beyond `max_meetings` preserves that.
    """
    if num_characters < 1 or time_steps < 1:
        raise ValueError("need at least one character and one time step")
    rng = random.Random(seed)
    ids = [f"c{i}" for i in range(num_characters)]
    activity: dict[str, tuple[int, int]] = {}
    for c in ids:
        if all_active:
            activity[c] = (1, time_steps)
        else:
            lo = rng.randint(1, time_steps)
            hi = rng.randint(lo, time_steps)
            activity[c] = (lo, hi)
    if not all_active:
        # keep step 1 and the last step inhabited so the span is real
        first = rng.choice(ids)
        activity[first] = (1, activity[first][1])
        last = rng.choice(ids)
        activity[last] = (min(activity[last][0], time_steps), time_steps)

    orderings: list[tuple[str, ...]] = []
    for t in range(1, time_steps + 1):
        active = [c for c in ids if activity[c][0] <= t <= activity[c][1]]
        rng.shuffle(active)
        orderings.append(tuple(active))

    meetings: list[Meeting] = []
    for t in range(1, time_steps + 1):
        order = orderings[t - 1]
        i = 0
        while i + 1 < len(order):
            if rng.random() < meeting_prob:
                size = min(rng.choice((2, 2, 3)), len(order) - i)
                meetings.append(Meeting(t, tuple(order[i:i + size])))
                i += size
            else:
                i += 1
    if max_meetings is not None:
        meetings = meetings[:max_meetings]

    inst = OrderedStorylineInstance(
        characters=tuple(ids),
        time_steps=time_steps,
        meetings=tuple(meetings),
        activity=activity,
        groups={},
        orderings=tuple(orderings),
    )
    validate_instance(inst)
    return inst, NicenessParams(delta, delta_bar)
