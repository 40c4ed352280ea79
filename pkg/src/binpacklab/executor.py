"""Generic executor for head/tail packing policies.

A policy is any callable ``Observation -> Action``.  The observation
deliberately exposes only the sizes at the two ends of the remaining
sequence plus the states of the currently open bins, never the rest of the
items; that is the whole information restriction of this algorithm class,
enforced by construction.

The executor checks every action (fit, cardinality, open-bin budget,
no reopening) and raises ``ProtocolError`` for an illegal one, so a policy
cannot cheat its way to a better packing.  Sessions are resumable: callers
may pull one packed-item event at a time, stop, and continue later, which
is what the adaptive adversary needs.

The executor consumes the instance in the order given.  Policies in this
class are defined on non-increasing sequences, so callers sort first (the
generators in :mod:`binpacklab.adversary` already emit sorted sequences).
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Optional, Union

from .core import BinPackingError, BinState, Instance, Packing
from .algorithms import HEAD, TAIL, Trace, TraceEvent


class ProtocolError(BinPackingError):
    """A policy requested an action the executor cannot honor."""


class StepBudgetExceeded(BinPackingError):
    """A policy burned through its action budget without packing everything."""


@dataclass(frozen=True)
class Observation:
    """What a policy is allowed to see before choosing its next action."""

    head: Optional[Fraction]
    tail: Optional[Fraction]
    remaining: int
    open_bins: tuple[BinState, ...]


@dataclass(frozen=True)
class PackHead:
    bin: int


@dataclass(frozen=True)
class PackTail:
    bin: int


@dataclass(frozen=True)
class OpenBin:
    pass


@dataclass(frozen=True)
class CloseBin:
    bin: int


Action = Union[PackHead, PackTail, OpenBin, CloseBin]
Policy = Callable[[Observation], Action]


class _Bin:
    __slots__ = ("index", "load", "count", "open")

    def __init__(self, index: int):
        self.index = index
        self.load = Fraction(0)
        self.count = 0
        self.open = True


class MaxMinSession:
    """A resumable run of one policy over one instance.

    ``next_event()`` advances the policy until exactly one item has been
    packed and returns that event, or returns None once every item is
    packed.  ``run()`` drains the rest and yields the final packing plus
    the full trace.
    """

    def __init__(
        self,
        policy: Policy,
        inst: Instance,
        space: Optional[int] = None,
        cap: Optional[int] = None,
        step_budget: Optional[int] = None,
    ):
        if space is not None and space < 1:
            raise BinPackingError(f"open-bin bound must be >= 1, got {space}")
        if cap is not None and cap < 1:
            raise BinPackingError(f"cardinality cap must be >= 1, got {cap}")
        self._policy = policy
        self._items = inst.items
        self._space = space
        self._cap = cap
        n = len(inst)
        self._budget = step_budget if step_budget is not None else 4 * n
        self._h = 0
        self._t = n - 1
        self._bins: list[_Bin] = []
        self._open: list[_Bin] = []
        self._assignment = [0] * n
        self._events: list[TraceEvent] = []
        self._actions_used = 0

    @property
    def done(self) -> bool:
        return self._h > self._t

    @property
    def events(self) -> tuple[TraceEvent, ...]:
        return tuple(self._events)

    def _observe(self) -> Observation:
        remaining = self._t - self._h + 1
        head = self._items[self._h] if remaining > 0 else None
        tail = self._items[self._t] if remaining > 0 else None
        states = tuple(BinState(b.index, b.load, b.count) for b in self._open)
        return Observation(head, tail, remaining, states)

    def _lookup_open(self, index: int, step: int) -> _Bin:
        for b in self._open:
            if b.index == index:
                return b
        raise ProtocolError(f"step {step}: bin {index} is not open")

    def _pack(self, b: _Bin, position: int, source: str, step: int) -> TraceEvent:
        size = self._items[position]
        if b.load + size > 1:
            raise ProtocolError(
                f"step {step}: item of size {size} overfills bin {b.index} "
                f"(load {b.load})"
            )
        if self._cap is not None and b.count >= self._cap:
            raise ProtocolError(
                f"step {step}: bin {b.index} already holds {b.count} items (cap {self._cap})"
            )
        b.load += size
        b.count += 1
        self._assignment[position] = b.index
        event = TraceEvent(position, source, b.index)
        self._events.append(event)
        return event

    def next_event(self) -> Optional[TraceEvent]:
        """Advance until one more item is packed; None when all are packed."""
        while not self.done:
            if self._actions_used >= self._budget:
                raise StepBudgetExceeded(
                    f"policy exceeded its budget of {self._budget} actions "
                    f"with {self._t - self._h + 1} items left"
                )
            action = self._policy(self._observe())
            self._actions_used += 1
            step = self._actions_used
            if isinstance(action, OpenBin):
                if self._space is not None and len(self._open) >= self._space:
                    raise ProtocolError(
                        f"step {step}: opening a bin would exceed the "
                        f"{self._space} open-bin bound"
                    )
                b = _Bin(len(self._bins) + 1)
                self._bins.append(b)
                self._open.append(b)
            elif isinstance(action, CloseBin):
                b = self._lookup_open(action.bin, step)
                if b.count == 0:
                    raise ProtocolError(f"step {step}: closing empty bin {b.index}")
                b.open = False
                self._open.remove(b)
            elif isinstance(action, PackHead):
                b = self._lookup_open(action.bin, step)
                event = self._pack(b, self._h, HEAD, step)
                self._h += 1
                return event
            elif isinstance(action, PackTail):
                b = self._lookup_open(action.bin, step)
                event = self._pack(b, self._t, TAIL, step)
                self._t -= 1
                return event
            else:
                raise ProtocolError(f"step {step}: unknown action {action!r}")
        return None

    def result(self) -> tuple[Packing, Trace]:
        if not self.done:
            raise BinPackingError("session has unpacked items")
        for b in self._bins:
            if b.count == 0:
                raise ProtocolError(f"bin {b.index} was opened but never used")
        return Packing(tuple(self._assignment), self._cap), Trace(tuple(self._events))

    def run(self) -> tuple[Packing, Trace]:
        while self.next_event() is not None:
            pass
        return self.result()


def run_maxmin(
    policy: Policy,
    inst: Instance,
    space: Optional[int] = None,
    cap: Optional[int] = None,
    step_budget: Optional[int] = None,
) -> tuple[Packing, Trace]:
    """Run a policy to completion under the given open-bin bound and cap."""
    return MaxMinSession(policy, inst, space, cap, step_budget).run()


# ---------------------------------------------------------------------------
# Reference policies
# ---------------------------------------------------------------------------

def mm_policy(cap: Optional[int] = None) -> Policy:
    """Single open bin; head while it fits, else tail, else close.

    With a finite cap, the bin is closed as soon as it holds ``cap``
    items.  On a sorted sequence this reproduces ``run_mm`` exactly.
    """

    def policy(obs: Observation) -> Action:
        if not obs.open_bins:
            return OpenBin()
        cur = obs.open_bins[-1]
        if cap is not None and cur.count >= cap:
            return CloseBin(cur.index)
        if cur.load + obs.head <= 1:
            return PackHead(cur.index)
        if cur.load + obs.tail <= 1:
            return PackTail(cur.index)
        return CloseBin(cur.index)

    return policy


def always_head_policy(cap: Optional[int] = None) -> Policy:
    """Single open bin, head only: next fit on the given order."""

    def policy(obs: Observation) -> Action:
        if not obs.open_bins:
            return OpenBin()
        cur = obs.open_bins[-1]
        if cap is not None and cur.count >= cap:
            return CloseBin(cur.index)
        if cur.load + obs.head <= 1:
            return PackHead(cur.index)
        return CloseBin(cur.index)

    return policy


def always_tail_policy(cap: Optional[int] = None) -> Policy:
    """Single open bin, tail only: next fit on the reversed order."""

    def policy(obs: Observation) -> Action:
        if not obs.open_bins:
            return OpenBin()
        cur = obs.open_bins[-1]
        if cap is not None and cur.count >= cap:
            return CloseBin(cur.index)
        if cur.load + obs.tail <= 1:
            return PackTail(cur.index)
        return CloseBin(cur.index)

    return policy


def random_policy(seed: int, cap: Optional[int] = None) -> Policy:
    """Uniformly random choice among all feasible pack actions.

    Opens a bin only when nothing fits anywhere, so it terminates well
    within the action budget.  Intended for unbounded open-bin runs; the
    same seed always reproduces the same run.
    """
    rng = random.Random(seed)

    def policy(obs: Observation) -> Action:
        choices: list[Action] = []
        for b in obs.open_bins:
            if cap is not None and b.count >= cap:
                continue
            if b.load + obs.head <= 1:
                choices.append(PackHead(b.index))
            if b.load + obs.tail <= 1:
                choices.append(PackTail(b.index))
        if not choices:
            return OpenBin()
        return rng.choice(choices)

    return policy
