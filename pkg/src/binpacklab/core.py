"""Exact-rational model of items, instances, and packings.

Everything is a ``fractions.Fraction``: item sizes, bin loads, parameters.
No packing decision anywhere in the package goes through floating point,
because the adversarial constructions separate cases by margins like
``1/126`` that floats happily misclassify.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from decimal import Decimal
from fractions import Fraction
from typing import Iterable, Iterator, Mapping, Optional, Union
import json


class BinPackingError(Exception):
    """Base class for all errors raised by this package."""


class SizeError(BinPackingError):
    """An item size or parameter fell outside its legal range."""


class InstanceFormatError(BinPackingError):
    """An instance file could not be parsed."""

    def __init__(self, message: str, line: int):
        super().__init__(f"line {line}: {message}")
        self.line = line


RationalLike = Union[Fraction, int, str, float, Decimal]


def as_rational(value: RationalLike) -> Fraction:
    """Convert to an exact Fraction.

    Floats are read through their shortest decimal representation, so
    ``0.6`` means exactly ``3/5`` (the literal as written), not the
    nearest binary double.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise SizeError(f"not a rational value: {value!r}")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, Decimal):
        return Fraction(value)
    if isinstance(value, float):
        return Fraction(str(value))
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise SizeError(f"cannot parse rational {value!r}: {exc}") from exc
    raise SizeError(f"not a rational value: {value!r}")


def as_size(value: RationalLike) -> Fraction:
    """Convert to an exact item size in (0, 1]."""
    size = as_rational(value)
    if not 0 < size <= 1:
        raise SizeError(f"item size must lie in (0, 1], got {size}")
    return size


@dataclass(frozen=True)
class InstanceMeta:
    """Provenance of a generated instance: generator name and parameters."""

    generator: str
    params: Mapping[str, Union[Fraction, int]] = field(default_factory=dict)


@dataclass(frozen=True)
class Instance:
    """An ordered item sequence. Order matters: algorithms consume it as given."""

    items: tuple[Fraction, ...]
    meta: Optional[InstanceMeta] = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "items", tuple(as_size(x) for x in self.items))

    def __len__(self) -> int:
        return len(self.items)

    def __iter__(self) -> Iterator[Fraction]:
        return iter(self.items)

    def with_meta(self, meta: InstanceMeta) -> "Instance":
        return Instance(self.items, meta)


def instance(items: Iterable[RationalLike], meta: Optional[InstanceMeta] = None) -> Instance:
    """Build an Instance from any mix of rational-like values."""
    return Instance(tuple(as_size(x) for x in items), meta)


@dataclass(frozen=True)
class Packing:
    """Assignment of item positions to 1-based bin indices.

    ``assignment[i]`` is the bin of item ``i`` (0-based position in the
    instance the packing belongs to).  ``cap`` is an optional per-bin
    item-count limit carried along so validation can enforce it.
    """

    assignment: tuple[int, ...]
    cap: Optional[int] = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "assignment", tuple(int(b) for b in self.assignment))
        for b in self.assignment:
            if b < 1:
                raise BinPackingError(f"bin indices must be positive, got {b}")
        if self.cap is not None and self.cap < 1:
            raise BinPackingError(f"cardinality cap must be positive, got {self.cap}")

    def __len__(self) -> int:
        return len(self.assignment)


def num_bins(packing: Packing) -> int:
    """Number of distinct (non-empty) bins used."""
    return len(set(packing.assignment))


@dataclass(frozen=True)
class BinState:
    """Exact load and item count of one bin."""

    index: int
    load: Fraction
    count: int

    @property
    def free(self) -> Fraction:
        return 1 - self.load


def bin_states(inst: Instance, packing: Packing) -> list[BinState]:
    """Per-bin loads/counts, ordered by bin index.

    Raises on a structural mismatch between instance and packing lengths.
    """
    if len(packing) != len(inst):
        raise BinPackingError(
            f"assignment length {len(packing)} != instance length {len(inst)}"
        )
    loads: dict[int, Fraction] = {}
    counts: dict[int, int] = {}
    for size, b in zip(inst.items, packing.assignment):
        loads[b] = loads.get(b, Fraction(0)) + size
        counts[b] = counts.get(b, 0) + 1
    return [BinState(b, loads[b], counts[b]) for b in sorted(loads)]


def total_size(inst: Instance) -> Fraction:
    return sum(inst.items, Fraction(0))


def nonincreasing_order(items: Iterable[Fraction]) -> list[int]:
    """Indices that sort items by non-increasing size, stable for ties."""
    seq = list(items)
    return sorted(range(len(seq)), key=lambda i: seq[i], reverse=True)


def sort_nonincreasing(inst: Instance) -> Instance:
    """Stable non-increasing reordering of an instance."""
    order = nonincreasing_order(inst.items)
    return Instance(tuple(inst.items[i] for i in order), inst.meta)


@dataclass(frozen=True)
class ValidationReport:
    ok: bool
    violations: tuple[str, ...]


def validate_packing(inst: Instance, packing: Packing) -> ValidationReport:
    """Check capacity, cardinality, and prefix bin indexing; report all failures."""
    states = bin_states(inst, packing)
    violations: list[str] = []
    for s in states:
        if s.load > 1:
            violations.append(f"bin {s.index}: load {s.load} exceeds capacity 1")
        if packing.cap is not None and s.count > packing.cap:
            violations.append(
                f"bin {s.index}: {s.count} items exceeds cardinality cap {packing.cap}"
            )
    used = [s.index for s in states]
    if used and used != list(range(1, len(used) + 1)):
        violations.append(f"bin indices {used} do not form a prefix 1..{len(used)}")
    return ValidationReport(not violations, tuple(violations))


# ---------------------------------------------------------------------------
# Instance text format and packing JSON
# ---------------------------------------------------------------------------

def parse_instance(text: str, meta: Optional[InstanceMeta] = None) -> Instance:
    """Parse the one-item-per-line text format.

    Each non-blank line holds ``numerator/denominator`` or a decimal
    literal; ``#`` starts a comment.
    """
    sizes: list[Fraction] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        try:
            sizes.append(as_size(line))
        except SizeError as exc:
            raise InstanceFormatError(str(exc), lineno) from exc
    return Instance(tuple(sizes), meta)


def format_instance(inst: Instance) -> str:
    lines = []
    if inst.meta is not None:
        lines.append(f"# generator: {inst.meta.generator}")
        for key in sorted(inst.meta.params):
            lines.append(f"# {key} = {inst.meta.params[key]}")
    lines.extend(str(x) for x in inst.items)
    return "\n".join(lines) + "\n"


def load_instance(path: str) -> Instance:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_instance(fh.read())


def save_instance(path: str, inst: Instance) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(format_instance(inst))


def packing_to_json(packing: Packing) -> str:
    return json.dumps({"assignment": list(packing.assignment), "k": packing.cap})


def packing_from_json(text: str) -> Packing:
    obj = json.loads(text)
    if not isinstance(obj, dict) or "assignment" not in obj:
        raise BinPackingError("packing JSON must be an object with an 'assignment' key")
    return Packing(tuple(obj["assignment"]), obj.get("k"))
