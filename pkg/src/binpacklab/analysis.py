"""Number-theoretic constants, item weight functions, and bound reports.

The doubling sequence 2, 3, 7, 43, 1807, ... (each term is the previous
term times one less than itself, plus one) drives all the harmonic-style
constants here: the reciprocal sum of (term - 1) converges to roughly
1.6910, and its capped variant gives the per-bin weight ceilings used by
the cardinality-constrained analyses.  Sums are exact rationals; the
infinite limit is only ever handled as a certified interval.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .core import BinPackingError, Instance, as_rational

_sylvester_cache = [2]
_sylvester_lock = threading.Lock()


def sylvester(i: int) -> int:
    """The i-th term (1-based) of 2, 3, 7, 43, 1807, ...; s(i+1) = s(i)^2 - s(i) + 1."""
    if i < 1:
        raise BinPackingError(f"sequence index must be >= 1, got {i}")
    if i > len(_sylvester_cache):
        with _sylvester_lock:
            while len(_sylvester_cache) < i:
                s = _sylvester_cache[-1]
                _sylvester_cache.append(s * (s - 1) + 1)
    return _sylvester_cache[i - 1]


def harmonic_partial_sum(terms: int) -> Fraction:
    """Exact sum of 1/(sylvester(i) - 1) for i = 1..terms."""
    if terms < 0:
        raise BinPackingError(f"terms must be >= 0, got {terms}")
    return sum((Fraction(1, sylvester(i) - 1) for i in range(1, terms + 1)), Fraction(0))


def harmonic_tail_bound(terms: int) -> Fraction:
    """Upper bound on the sum of all terms past `terms`.

    Consecutive terms shrink by a factor of at least sylvester(terms+1),
    which is >= 2, so the tail is dominated by twice its first term.
    """
    return Fraction(2, sylvester(terms + 1) - 1)


@dataclass(frozen=True)
class HarmonicBound:
    """Certified enclosure of the limit of the reciprocal sum."""

    low: Fraction
    high: Fraction
    terms: int

    @property
    def width(self) -> Fraction:
        return self.high - self.low


def harmonic_constant(tolerance) -> HarmonicBound:
    """Enclose the limit (~1.6910) within `tolerance` using a partial sum."""
    tol = as_rational(tolerance)
    if tol <= 0:
        raise BinPackingError(f"tolerance must be positive, got {tol}")
    terms = 1
    while harmonic_tail_bound(terms) >= tol:
        terms += 1
    low = harmonic_partial_sum(terms)
    return HarmonicBound(low, low + harmonic_tail_bound(terms), terms)


def capped_harmonic_bound(k: int) -> Fraction:
    """Exact sum of max(1/(sylvester(i) - 1), 1/k) for i = 1..k.

    Values: 1, 3/2, 11/6, 2, 21/10 for k = 1..5; tends to the harmonic
    limit plus one as k grows.
    """
    if k < 1:
        raise BinPackingError(f"k must be >= 1, got {k}")
    return sum(
        (max(Fraction(1, sylvester(i) - 1), Fraction(1, k)) for i in range(1, k + 1)),
        Fraction(0),
    )


def size_class(x: Fraction, cap: Optional[int] = None) -> int:
    """Class j of a size: x in (1/(j+1), 1/j].  Caps collapse classes >= cap."""
    if not 0 < x <= 1:
        raise BinPackingError(f"size must lie in (0, 1], got {x}")
    inv = Fraction(1) / x
    j = inv.numerator // inv.denominator
    if cap is not None:
        return min(j, cap)
    return j


# ---------------------------------------------------------------------------
# Weight functions
# ---------------------------------------------------------------------------

class UnsupportedWeightError(BinPackingError):
    """Raised when an operation needs a piecewise-constant weight function."""


@dataclass(frozen=True)
class WeightFunction:
    """Per-item scores whose per-bin maxima bound the optimum from below.

    Four schemes:

    * ``halving``       - 1 / (1/2) / 0 by size class; the 3/2 analysis.
    * ``discounted(k)`` - reciprocal class weights with the class-1 weight
      reduced by 1/k; k >= 3.
    * ``harmonic(k)``   - reciprocal class weights, floor 1/k; k >= 2.
    * ``linear(k)``     - 2x ramp with plateaus 2 - 1/k and 1/k at the
      extremes; k >= 2.  Piecewise linear, so it has no class table.
    """

    kind: str
    k: Optional[int] = None

    def __post_init__(self) -> None:
        if self.kind == "halving":
            if self.k is not None:
                raise BinPackingError("halving weights take no cap")
        elif self.kind == "discounted":
            if self.k is None or self.k < 3:
                raise BinPackingError("discounted weights need k >= 3")
        elif self.kind in ("harmonic", "linear"):
            if self.k is None or self.k < 2:
                raise BinPackingError(f"{self.kind} weights need k >= 2")
        else:
            raise BinPackingError(f"unknown weight scheme {self.kind!r}")

    def value(self, x) -> Fraction:
        x = as_rational(x)
        if not 0 < x <= 1:
            raise BinPackingError(f"size must lie in (0, 1], got {x}")
        if self.kind == "halving":
            if x > Fraction(1, 2):
                return Fraction(1)
            if x > Fraction(1, 3):
                return Fraction(1, 2)
            return Fraction(0)
        if self.kind == "linear":
            half_slot = Fraction(1, 2 * self.k)
            if x > 1 - half_slot:
                return 2 - Fraction(1, self.k)
            if x > half_slot:
                return 2 * x
            return Fraction(1, self.k)
        j = size_class(x, self.k)
        if self.kind == "discounted" and j == 1:
            return 1 - Fraction(1, self.k)
        return Fraction(1, j)

    def constant_classes(self) -> tuple[tuple[Fraction, Fraction], ...]:
        """(size infimum, weight) per class, largest class first.

        Only defined for the piecewise-constant schemes; the last class
        always has infimum 0.
        """
        if self.kind == "halving":
            return (
                (Fraction(1, 2), Fraction(1)),
                (Fraction(1, 3), Fraction(1, 2)),
                (Fraction(0), Fraction(0)),
            )
        if self.kind == "linear":
            raise UnsupportedWeightError(
                "linear weights are not piecewise constant by class"
            )
        classes = []
        for j in range(1, self.k):
            weight = Fraction(1, j)
            if self.kind == "discounted" and j == 1:
                weight = 1 - Fraction(1, self.k)
            classes.append((Fraction(1, j + 1), weight))
        classes.append((Fraction(0), Fraction(1, self.k)))
        return tuple(classes)


def halving_weights() -> WeightFunction:
    return WeightFunction("halving")


def discounted_weights(k: int) -> WeightFunction:
    return WeightFunction("discounted", k)


def harmonic_weights(k: int) -> WeightFunction:
    return WeightFunction("harmonic", k)


def linear_weights(k: int) -> WeightFunction:
    return WeightFunction("linear", k)


def weight_sum(w: WeightFunction, inst: Instance) -> Fraction:
    return sum((w.value(x) for x in inst.items), Fraction(0))


# ---------------------------------------------------------------------------
# Named bound checks and ratio reports
# ---------------------------------------------------------------------------

GAMMA_DEFAULT_TOLERANCE = Fraction(1, 10**9)


@dataclass(frozen=True)
class BoundCheck:
    name: str
    satisfied: bool
    detail: str


def _require_k(name: str, k: Optional[int], minimum: int) -> int:
    if k is None or k < minimum:
        raise BinPackingError(f"bound {name!r} needs k >= {minimum}, got {k}")
    return k


def evaluate_bound(
    name: str,
    alg_bins: int,
    opt_bins: int,
    k: Optional[int] = None,
    space: Optional[int] = None,
    terms: Optional[int] = None,
) -> BoundCheck:
    """Evaluate one named inequality in exact arithmetic.

    Upper bounds assert alg <= rhs, lower bounds alg >= rhs (strictly,
    where the theorem is strict).  ``space`` is the open-bin bound of the
    algorithm under test, ``terms`` the class count of the sorted-family
    construction.
    """
    alg = Fraction(alg_bins)
    opt = Fraction(opt_bins)
    B = Fraction(space if space is not None else 1)

    if name == "mm_cr":
        rhs = Fraction(3, 2) * opt + 1
        return BoundCheck(name, alg <= rhs, f"{alg_bins} <= 3/2*{opt_bins} + 1 = {rhs}")
    if name == "mm2_opt":
        return BoundCheck(name, alg_bins == opt_bins, f"{alg_bins} == {opt_bins}")
    if name == "mm_k_cr":
        kk = _require_k(name, k, 3)
        coeff = capped_harmonic_bound(kk) - Fraction(1, kk)
        rhs = coeff * opt + kk
        return BoundCheck(name, alg <= rhs, f"{alg_bins} <= {coeff}*{opt_bins} + {kk} = {rhs}")
    if name == "nfd_cr":
        enclosure = harmonic_constant(GAMMA_DEFAULT_TOLERANCE)
        rhs = enclosure.high * opt + 3
        return BoundCheck(
            name,
            alg <= rhs,
            f"{alg_bins} <= gamma_high*{opt_bins} + 3, gamma in "
            f"[{float(enclosure.low):.10f}, {float(enclosure.high):.10f}]",
        )
    if name == "nfd_k_cr":
        kk = _require_k(name, k, 2)
        coeff = capped_harmonic_bound(kk)
        rhs = coeff * opt + kk
        return BoundCheck(name, alg <= rhs, f"{alg_bins} <= {coeff}*{opt_bins} + {kk} = {rhs}")
    if name == "nf_k":
        kk = _require_k(name, k, 2)
        coeff = 3 - Fraction(2, kk)
        rhs = coeff * opt + 1
        return BoundCheck(name, alg <= rhs, f"{alg_bins} <= {coeff}*{opt_bins} + 1 = {rhs}")

    if name == "maxmin_unit_lb":
        rhs = Fraction(5, 4) * opt - Fraction(1, 4)
        return BoundCheck(name, alg >= rhs, f"{alg_bins} >= 5/4*{opt_bins} - 1/4 = {rhs}")
    if name == "maxmin_unit_lb_k3":
        rhs = Fraction(4, 3) * opt - Fraction(4, 3)
        return BoundCheck(name, alg >= rhs, f"{alg_bins} >= 4/3*{opt_bins} - 4/3 = {rhs}")
    if name == "maxmin_bounded_lb":
        rhs = Fraction(7, 6) * opt - B
        return BoundCheck(name, alg >= rhs, f"{alg_bins} >= 7/6*{opt_bins} - {B} = {rhs}")
    if name == "presorted_bounded_lb":
        if terms is None or terms < 1:
            raise BinPackingError(f"bound {name!r} needs a class count, got {terms}")
        coeff = harmonic_partial_sum(terms)
        rhs = coeff * opt - B * (terms - 1)
        return BoundCheck(
            name, alg >= rhs, f"{alg_bins} >= {coeff}*{opt_bins} - {B}*{terms - 1} = {rhs}"
        )
    if name == "kcard_bounded_lb":
        kk = _require_k(name, k, 4)
        if kk <= 6:
            rhs = (Fraction(5, 3) - Fraction(1, kk - 1)) * opt - Fraction(1, 6) * B * (kk + 5)
        elif kk == 7:
            rhs = Fraction(3, 2) * opt - 2 * B
        else:
            rhs = Fraction(3, 2) * opt - Fraction(1, 2) * B
        return BoundCheck(name, alg >= rhs, f"{alg_bins} >= {rhs} (k={kk}, B={B})")
    if name == "online_unit_lb":
        kk = _require_k(name, k, 2)
        if kk == 2:
            rhs = 2 * opt - 2
        else:
            rhs = (3 - Fraction(2, kk)) * opt - 5 + Fraction(5, kk)
        return BoundCheck(name, alg >= rhs, f"{alg_bins} >= {rhs} (k={kk})")
    if name == "maxmin_unbounded_lb":
        rhs = Fraction(16, 15) * (opt - 1)
        return BoundCheck(name, alg > rhs, f"{alg_bins} > 16/15*({opt_bins} - 1) = {rhs}")

    raise BinPackingError(f"unknown bound name {name!r}")


UPPER_BOUNDS = ("mm_cr", "mm2_opt", "mm_k_cr", "nfd_cr", "nfd_k_cr", "nf_k")
LOWER_BOUNDS = (
    "maxmin_unit_lb",
    "maxmin_unit_lb_k3",
    "maxmin_bounded_lb",
    "presorted_bounded_lb",
    "kcard_bounded_lb",
    "online_unit_lb",
    "maxmin_unbounded_lb",
)
BOUND_NAMES = UPPER_BOUNDS + LOWER_BOUNDS


@dataclass(frozen=True)
class RatioReport:
    """One algorithm-vs-optimum measurement plus a named bound outcome."""

    family: str
    m: Optional[int]
    k: Optional[int]
    space: Optional[int]
    algorithm: str
    alg_bins: int
    opt_bins: int
    ratio: Fraction
    bound: str
    satisfied: bool

    def to_csv_row(self) -> list[str]:
        return [
            self.family,
            "" if self.m is None else str(self.m),
            "" if self.k is None else str(self.k),
            "" if self.space is None else str(self.space),
            self.algorithm,
            str(self.alg_bins),
            str(self.opt_bins),
            str(self.ratio.numerator),
            str(self.ratio.denominator),
            self.bound,
            "true" if self.satisfied else "false",
        ]

    def to_json_obj(self) -> dict:
        return {
            "family": self.family,
            "m": self.m,
            "k": self.k,
            "B": self.space,
            "algorithm": self.algorithm,
            "alg_bins": self.alg_bins,
            "opt_bins": self.opt_bins,
            "ratio": f"{self.ratio.numerator}/{self.ratio.denominator}",
            "bound": self.bound,
            "satisfied": self.satisfied,
        }

    @staticmethod
    def from_json_obj(obj: dict) -> "RatioReport":
        num, den = obj["ratio"].split("/")
        return RatioReport(
            family=obj["family"],
            m=obj["m"],
            k=obj["k"],
            space=obj["B"],
            algorithm=obj["algorithm"],
            alg_bins=int(obj["alg_bins"]),
            opt_bins=int(obj["opt_bins"]),
            ratio=Fraction(int(num), int(den)),
            bound=obj["bound"],
            satisfied=bool(obj["satisfied"]),
        )


CSV_COLUMNS = [
    "family",
    "m",
    "k",
    "B",
    "algorithm",
    "alg_bins",
    "opt_bins",
    "ratio_num",
    "ratio_den",
    "bound",
    "satisfied",
]


def ratio_report(
    algorithm: str,
    inst: Instance,
    opt,
    bound: str,
    k: Optional[int] = None,
    space: Optional[int] = None,
    terms: Optional[int] = None,
    family: str = "adhoc",
    m: Optional[int] = None,
) -> RatioReport:
    """Run an algorithm on an instance and grade it against a named bound.

    ``opt`` is either an exact-solver result (anything with an ``opt``
    attribute) or a certified bin count.
    """
    from .algorithms import run_algorithm
    from .core import num_bins

    opt_bins = getattr(opt, "opt", opt)
    if opt_bins < 1:
        raise BinPackingError(f"optimum must be >= 1, got {opt_bins}")
    packing = run_algorithm(algorithm, inst, cap=k)
    alg_bins = num_bins(packing)
    check = evaluate_bound(bound, alg_bins, opt_bins, k=k, space=space, terms=terms)
    return RatioReport(
        family=family,
        m=m,
        k=k,
        space=space,
        algorithm=algorithm,
        alg_bins=alg_bins,
        opt_bins=opt_bins,
        ratio=Fraction(alg_bins, opt_bins),
        bound=bound,
        satisfied=check.satisfied,
    )
