"""Exact optimum solvers and exhaustive enumeration for small instances.

The branch-and-bound solver is ground truth for every empirical check in
the package, so it favors correctness over cleverness: items are placed
in non-increasing order, branching is over one representative bin per
distinct (load, count) state plus a fresh bin, and an admissible bound
(bins used + overflow of the remaining size past the open free space)
prunes.  A transposition set collapses the huge symmetry of instances
with few distinct sizes, which the adversarial constructions all have.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Optional

from .core import (
    BinPackingError,
    Instance,
    Packing,
    nonincreasing_order,
    num_bins,
    total_size,
)
from .algorithms import run_ffd, run_mm, run_nfd
from .analysis import WeightFunction

DEFAULT_LIMIT = 16
ENUMERATION_LIMIT = 9


class InstanceTooLarge(BinPackingError):
    """The instance exceeds the configured exhaustive-search limit."""


@dataclass(frozen=True)
class OptResult:
    opt: int
    witness: Packing
    nodes: int


def _ceil(x: Fraction) -> int:
    return -((-x.numerator) // x.denominator)


def opt_exact(inst: Instance, cap: Optional[int] = None, limit: int = DEFAULT_LIMIT) -> OptResult:
    """Exact minimum bin count (optionally cardinality-capped) with witness."""
    n = len(inst)
    if n > limit:
        raise InstanceTooLarge(f"instance has {n} items, exhaustive limit is {limit}")
    if cap is not None and cap < 1:
        raise BinPackingError(f"cardinality cap must be >= 1, got {cap}")
    if n == 0:
        return OptResult(0, Packing((), cap), 0)

    order = nonincreasing_order(inst.items)
    a = [inst.items[i] for i in order]

    # Heuristic incumbent; the capped heuristics both respect the cap.
    if cap is None:
        candidates = [run_ffd(inst)]
    elif cap >= 2:
        candidates = [run_nfd(inst, cap), run_mm(inst, cap)[0]]
    else:  # cap == 1: every item is sole
        return OptResult(n, Packing(tuple(range(1, n + 1)), cap), 0)
    incumbent_pack = min(candidates, key=num_bins)
    incumbent = num_bins(incumbent_pack)

    root_lb = max(_ceil(total_size(inst)), 1)
    if cap is not None:
        root_lb = max(root_lb, -(-n // cap))
    if incumbent == root_lb:
        return OptResult(incumbent, incumbent_pack, 0)

    suffix = [Fraction(0)] * (n + 1)
    for i in range(n - 1, -1, -1):
        suffix[i] = suffix[i + 1] + a[i]

    loads: list[Fraction] = []
    counts: list[int] = []
    current = [0] * n
    best_sorted: Optional[list[int]] = None
    seen: set = set()
    nodes = 0

    def search(i: int) -> None:
        nonlocal incumbent, best_sorted, nodes
        nodes += 1
        bins = len(loads)
        if i == n:
            if bins < incumbent:
                incumbent = bins
                best_sorted = current.copy()
            return
        free = bins - sum(loads)
        lb = bins
        if suffix[i] > free:
            lb = bins + _ceil(suffix[i] - free)
        if cap is not None:
            free_slots = bins * cap - sum(counts)
            overflow = (n - i) - free_slots
            if overflow > 0:
                lb = max(lb, bins + -(-overflow // cap))
        if lb >= incumbent:
            return
        key = (i, tuple(sorted(zip(loads, counts))))
        if key in seen:
            return
        seen.add(key)

        size = a[i]
        tried = set()
        for j in sorted(range(bins), key=lambda b: loads[b], reverse=True):
            state = (loads[j], counts[j])
            if state in tried:
                continue
            tried.add(state)
            if loads[j] + size <= 1 and (cap is None or counts[j] < cap):
                loads[j] += size
                counts[j] += 1
                current[i] = j + 1
                search(i + 1)
                loads[j] -= size
                counts[j] -= 1
        loads.append(size)
        counts.append(1)
        current[i] = bins + 1
        search(i + 1)
        loads.pop()
        counts.pop()

    search(0)

    if best_sorted is None:
        return OptResult(incumbent, incumbent_pack, nodes)
    assignment = [0] * n
    for pos, orig in enumerate(order):
        assignment[orig] = best_sorted[pos]
    return OptResult(incumbent, Packing(tuple(assignment), cap), nodes)


def enumerate_packings(
    inst: Instance, cap: Optional[int] = None, limit: int = ENUMERATION_LIMIT
) -> Iterator[Packing]:
    """Yield every feasible packing exactly once, up to bin relabeling.

    Bins are numbered by their smallest contained item position, so each
    set partition of the items appears in exactly one labeling.
    """
    n = len(inst)
    if n > limit:
        raise InstanceTooLarge(f"instance has {n} items, enumeration limit is {limit}")
    if cap is not None and cap < 1:
        raise BinPackingError(f"cardinality cap must be >= 1, got {cap}")
    if n == 0:
        yield Packing((), cap)
        return
    items = inst.items
    assignment = [0] * n
    loads: list[Fraction] = []
    counts: list[int] = []

    def rec(i: int) -> Iterator[Packing]:
        if i == n:
            yield Packing(tuple(assignment), cap)
            return
        for j in range(len(loads)):
            if loads[j] + items[i] <= 1 and (cap is None or counts[j] < cap):
                loads[j] += items[i]
                counts[j] += 1
                assignment[i] = j + 1
                yield from rec(i + 1)
                loads[j] -= items[i]
                counts[j] -= 1
        loads.append(items[i])
        counts.append(1)
        assignment[i] = len(loads)
        yield from rec(i + 1)
        loads.pop()
        counts.pop()

    yield from rec(0)


def max_weight_config(w: WeightFunction, slots: Optional[int] = None) -> Fraction:
    """Exact supremum of a piecewise-constant weight over one feasible bin.

    A bin holds at most `slots` items of total size at most 1.  Because
    every class is left-open at its size infimum, a per-class count vector
    is realizable exactly when the infimum-weighted sum stays strictly
    below 1; the supremum is then a finite maximum over count vectors.
    """
    if slots is None:
        slots = w.k
    if slots is None:
        raise BinPackingError("a per-bin item budget is required for this weight scheme")
    if not 1 <= slots <= 12:
        raise BinPackingError(f"per-bin item budget must be in 1..12, got {slots}")
    classes = w.constant_classes()
    best = Fraction(0)

    def rec(idx: int, slots_left: int, size_budget: Fraction, acc: Fraction) -> None:
        nonlocal best
        if acc > best:
            best = acc
        if idx == len(classes) or slots_left == 0:
            return
        inf, weight = classes[idx]
        count = 0
        while count <= slots_left and count * inf < size_budget:
            rec(idx + 1, slots_left - count, size_budget - count * inf, acc + count * weight)
            count += 1

    rec(0, slots, Fraction(1), Fraction(0))
    return best
