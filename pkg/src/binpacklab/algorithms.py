"""Packing algorithms: next fit, first fit, decreasing variants, and the
head-tail greedy that packs as many of the largest remaining items as fit,
then as many of the smallest.

All of them accept an optional per-bin cardinality cap ``k >= 2`` (first
fit excepted, which has no capped variant here).  Returned packings are
aligned with the *input* order of the instance, so ``validate_packing``
applies directly even for the decreasing variants, which sort internally.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .core import (
    BinPackingError,
    Instance,
    Packing,
    nonincreasing_order,
)

HEAD = "head"
TAIL = "tail"


def check_cap(cap: Optional[int]) -> Optional[int]:
    """Validate a cardinality cap: None (unbounded) or an integer >= 2."""
    if cap is None:
        return None
    cap = int(cap)
    if cap < 2:
        raise BinPackingError(f"cardinality cap must be >= 2, got {cap}")
    return cap


@dataclass(frozen=True)
class TraceEvent:
    """One packing step: which item went where, taken from which end."""

    item: int  # 0-based position in the run's input instance
    source: str  # HEAD or TAIL
    bin: int  # 1-based bin index


@dataclass(frozen=True)
class Trace:
    events: tuple[TraceEvent, ...]

    def replay(self, n: int, cap: Optional[int] = None) -> Packing:
        """Rebuild the packing from the event list."""
        assignment = [0] * n
        for e in self.events:
            assignment[e.item] = e.bin
        return Packing(tuple(assignment), cap)


def _fits(load: Fraction, size: Fraction, count: int, cap: Optional[int]) -> bool:
    return load + size <= 1 and (cap is None or count < cap)


def run_nf(inst: Instance, cap: Optional[int] = None) -> Packing:
    """Next fit: one open bin; close it whenever the next item does not fit."""
    cap = check_cap(cap)
    assignment = []
    bin_index = 0
    load = Fraction(0)
    count = 0
    for size in inst.items:
        if bin_index == 0 or not _fits(load, size, count, cap):
            bin_index += 1
            load = Fraction(0)
            count = 0
        assignment.append(bin_index)
        load += size
        count += 1
    return Packing(tuple(assignment), cap)


def run_nfd(inst: Instance, cap: Optional[int] = None) -> Packing:
    """Next fit decreasing: sort non-increasing, then next fit."""
    cap = check_cap(cap)
    order = nonincreasing_order(inst.items)
    sorted_inst = Instance(tuple(inst.items[i] for i in order))
    packed = run_nf(sorted_inst, cap)
    assignment = [0] * len(inst)
    for pos, orig in enumerate(order):
        assignment[orig] = packed.assignment[pos]
    return Packing(tuple(assignment), cap)


def run_ff(inst: Instance) -> Packing:
    """First fit: each item goes into the lowest-indexed bin with room."""
    assignment = []
    loads: list[Fraction] = []
    for size in inst.items:
        for j, load in enumerate(loads):
            if load + size <= 1:
                loads[j] += size
                assignment.append(j + 1)
                break
        else:
            loads.append(size)
            assignment.append(len(loads))
    return Packing(tuple(assignment))


def run_ffd(inst: Instance) -> Packing:
    """First fit decreasing: sort non-increasing, then first fit."""
    order = nonincreasing_order(inst.items)
    sorted_inst = Instance(tuple(inst.items[i] for i in order))
    packed = run_ff(sorted_inst)
    assignment = [0] * len(inst)
    for pos, orig in enumerate(order):
        assignment[orig] = packed.assignment[pos]
    return Packing(tuple(assignment))


def run_mm(inst: Instance, cap: Optional[int] = None) -> tuple[Packing, Trace]:
    """Head-tail greedy over the sorted sequence, single open bin.

    Sort non-increasing; keep head and tail pointers.  Into the current
    bin, pack the head item while it fits, else the tail item while it
    fits; when neither fits (or the bin holds ``cap`` items) close the bin
    and open a new one.  The trace records, per item, whether it was taken
    from the head or the tail and into which bin it went.
    """
    cap = check_cap(cap)
    order = nonincreasing_order(inst.items)
    a = [inst.items[i] for i in order]
    n = len(a)
    assignment = [0] * n
    events: list[TraceEvent] = []

    h, t = 0, n - 1
    bin_index = 1
    load = Fraction(0)
    count = 0
    while h <= t:
        while h <= t:
            if cap is not None and count == cap:
                break
            if load + a[h] <= 1:
                assignment[order[h]] = bin_index
                events.append(TraceEvent(order[h], HEAD, bin_index))
                load += a[h]
                h += 1
            elif load + a[t] <= 1:
                assignment[order[t]] = bin_index
                events.append(TraceEvent(order[t], TAIL, bin_index))
                load += a[t]
                t -= 1
            else:
                break
            count += 1
        bin_index += 1
        load = Fraction(0)
        count = 0
    return Packing(tuple(assignment), cap), Trace(tuple(events))


ALGORITHMS = ("nf", "nfd", "ff", "ffd", "mm")


def run_algorithm(name: str, inst: Instance, cap: Optional[int] = None) -> Packing:
    """Dispatch by algorithm id; first fit variants reject a cap."""
    if name == "nf":
        return run_nf(inst, cap)
    if name == "nfd":
        return run_nfd(inst, cap)
    if name == "ff":
        if cap is not None:
            raise BinPackingError("ff has no cardinality-capped variant")
        return run_ff(inst)
    if name == "ffd":
        if cap is not None:
            raise BinPackingError("ffd has no cardinality-capped variant")
        return run_ffd(inst)
    if name == "mm":
        return run_mm(inst, cap)[0]
    raise BinPackingError(f"unknown algorithm {name!r} (expected one of {ALGORITHMS})")
