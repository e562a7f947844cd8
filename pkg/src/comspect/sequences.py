"""Nonincreasing scalar sequences with exact analytic tails.

A sequence here models the singular values of a diagonal operator: a finite
stored prefix followed by an optional closed-form tail (power decay c*n^-a,
geometric decay c*q^n, or the running geometric mean of a power law,
c*(n!)^(-a/n)).  A `repeat` factor models k-fold direct sums, where every
entry of the base sequence appears k times in a row.

All threshold counts go through 12-significant-digit rounding so that
breakpoint scans (values and their reciprocals travelling through floats)
are stable across platforms.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np
from scipy.special import gammaln, zeta as hurwitz_zeta

__all__ = [
    "PowerTail",
    "GeometricTail",
    "FactorialPowerTail",
    "ScalarSequence",
    "frac_index",
    "merge_decreasing",
    "round_sig",
]

ROUND_DIGITS = 12


def round_sig(x, digits: int = ROUND_DIGITS):
    """Round to `digits` significant decimal digits (elementwise, monotone)."""
    arr = np.asarray(x, dtype=float)
    out = arr.copy()
    nz = (arr != 0) & np.isfinite(arr)
    if np.any(nz):
        exp = np.floor(np.log10(np.abs(arr[nz])))
        scale = 10.0 ** (digits - 1 - exp)
        out[nz] = np.round(arr[nz] * scale) / scale
    return out if out.ndim else float(out)


def _floor_index(v: float) -> int:
    """floor(v) robust to values sitting one ulp below an integer."""
    if v < 0:
        return 0
    return math.floor(round_sig(v) + 1e-9)


@dataclass(frozen=True)
class PowerTail:
    """Tail law value(m) = c * m**(-a) for positions m beyond the prefix."""

    c: float
    a: float

    def __post_init__(self):
        if not (self.c > 0 and self.a > 0):
            raise ValueError("power tail requires c > 0 and a > 0")

    def value_at(self, m):
        m = np.asarray(m, dtype=float)
        return self.c * m ** (-self.a)

    def count_ge(self, x: float, start: int) -> float:
        """#{m > start : value(m) >= x}; may be inf for x == 0."""
        if x <= 0:
            return math.inf
        bound = (self.c / x) ** (1.0 / self.a)
        return max(0, _floor_index(bound) - start)

    def sum_plog(self, alpha: float, start: int) -> float:
        """sum over m > start of log_+(alpha * value(m))."""
        if alpha <= 0:
            return 0.0
        m_top = _floor_index((alpha * self.c) ** (1.0 / self.a))
        if m_top <= start:
            return 0.0
        n_terms = m_top - start
        return n_terms * math.log(alpha * self.c) - self.a * (
            gammaln(m_top + 1) - gammaln(start + 1)
        )

    def schatten_sum(self, p: float, start: int) -> float:
        ap = round_sig(self.a * p)
        if ap <= 1:
            return math.inf
        return self.c**p * float(hurwitz_zeta(self.a * p, start + 1))

    def weak_sup(self, p: float, start: int) -> float:
        ap = round_sig(self.a * p)
        if ap < 1:
            return math.inf
        if ap == 1:
            return self.c
        m = start + 1
        return m ** (1.0 / p) * self.c * m ** (-self.a)


@dataclass(frozen=True)
class GeometricTail:
    """Tail law value(m) = c * q**m with 0 < q < 1."""

    c: float
    q: float

    def __post_init__(self):
        if not (self.c > 0 and 0 < self.q < 1):
            raise ValueError("geometric tail requires c > 0 and 0 < q < 1")

    def value_at(self, m):
        m = np.asarray(m, dtype=float)
        return self.c * self.q**m

    def count_ge(self, x: float, start: int) -> float:
        if x <= 0:
            return math.inf
        if x > self.c * self.q ** (start + 1):
            return 0
        bound = math.log(x / self.c) / math.log(self.q)
        return max(0, _floor_index(bound) - start)

    def sum_plog(self, alpha: float, start: int) -> float:
        if alpha <= 0:
            return 0.0
        lead = alpha * self.c
        if lead * self.q ** (start + 1) < 1:
            return 0.0
        m_top = _floor_index(-math.log(lead) / math.log(self.q))
        if m_top <= start:
            return 0.0
        n_terms = m_top - start
        msum = (m_top * (m_top + 1) - start * (start + 1)) / 2.0
        return n_terms * math.log(lead) + msum * math.log(self.q)

    def schatten_sum(self, p: float, start: int) -> float:
        qp = self.q**p
        return self.c**p * qp ** (start + 1) / (1 - qp)

    def weak_sup(self, p: float, start: int) -> float:
        # maximize m^(1/p) * c * q^m over integer m > start
        m_star = -1.0 / (p * math.log(self.q))
        cands = {start + 1, max(start + 1, math.floor(m_star)), max(start + 1, math.ceil(m_star))}
        return max(m ** (1.0 / p) * self.c * self.q**m for m in cands)


@dataclass(frozen=True)
class FactorialPowerTail:
    """Tail law value(m) = c * (m!)**(-a/m), the running geometric mean of c*n^-a.

    Sandwiched between c*m^-a and c*(e/m)^a, so ideal membership matches the
    plain power law of the same exponent except at the weak-type boundary,
    where the supremum is c*e^a (finite).
    """

    c: float
    a: float

    def __post_init__(self):
        if not (self.c > 0 and self.a > 0):
            raise ValueError("factorial power tail requires c > 0 and a > 0")

    def value_at(self, m):
        m = np.asarray(m, dtype=float)
        return self.c * np.exp(-self.a * gammaln(m + 1) / m)

    def count_ge(self, x: float, start: int) -> float:
        if x <= 0:
            return math.inf
        if x > float(self.value_at(start + 1)):
            return 0
        # value is strictly decreasing; bisect on integers
        lo, hi = start + 1, start + 2
        while float(self.value_at(hi)) >= x:
            hi *= 2
        while hi - lo > 1:
            mid = (lo + hi) // 2
            if round_sig(float(self.value_at(mid))) >= round_sig(x):
                lo = mid
            else:
                hi = mid
        return lo - start

    def sum_plog(self, alpha: float, start: int) -> float:
        n = self.count_ge(1.0 / alpha, start) if alpha > 0 else 0
        if n == 0:
            return 0.0
        m = np.arange(start + 1, start + n + 1, dtype=float)
        vals = np.log(alpha * self.c) - self.a * gammaln(m + 1) / m
        return float(np.sum(np.maximum(vals, 0.0)))

    def schatten_sum(self, p: float, start: int) -> float:
        ap = round_sig(self.a * p)
        if ap <= 1:
            return math.inf
        # value <= c * (e/m)^a, so bound via the Hurwitz zeta of the majorant
        m = np.arange(start + 1, start + 100001, dtype=float)
        head = float(np.sum(self.value_at(m) ** p))
        tail = (self.c * math.e**self.a) ** p * float(
            hurwitz_zeta(self.a * p, start + 100001)
        )
        return head + tail

    def weak_sup(self, p: float, start: int) -> float:
        ap = round_sig(self.a * p)
        if ap < 1:
            return math.inf
        if ap == 1:
            return self.c * math.e**self.a  # m^a/(m!)^(a/m) increases to e^a
        m = np.arange(start + 1, start + 10001, dtype=float)
        return float(np.max(m ** (1.0 / p) * self.value_at(m)))


Tail = PowerTail | GeometricTail | FactorialPowerTail


@dataclass(frozen=True)
class ScalarSequence:
    """Nonincreasing nonnegative sequence: finite prefix plus optional tail.

    ``value(n)`` for n beyond the prefix comes from the tail law (or is 0);
    ``repeat`` replays each base entry that many times (k-fold direct sum).
    """

    prefix: np.ndarray
    tail: Tail | None = None
    repeat: int = 1

    def __post_init__(self):
        arr = np.asarray(self.prefix, dtype=float)
        object.__setattr__(self, "prefix", arr)
        if arr.ndim != 1:
            raise ValueError("prefix must be one-dimensional")
        if arr.size and (np.any(arr < 0) or not np.all(np.isfinite(arr))):
            raise ValueError("prefix entries must be finite and nonnegative")
        if arr.size > 1 and np.any(np.diff(arr) > 1e-12 * (1 + arr[:-1])):
            raise ValueError("prefix must be nonincreasing")
        if self.repeat < 1:
            raise ValueError("repeat must be >= 1")
        if self.tail is not None:
            junction = float(np.asarray(self.tail.value_at(arr.size + 1)))
            floor = arr[-1] if arr.size else math.inf
            if junction > floor * (1 + 1e-9) + 1e-300:
                raise ValueError("tail start exceeds last prefix entry")

    # -- constructors -------------------------------------------------

    @classmethod
    def finite(cls, values) -> "ScalarSequence":
        return cls(np.asarray(values, dtype=float))

    @classmethod
    def power_law(cls, c: float, a: float) -> "ScalarSequence":
        return cls(np.empty(0), PowerTail(c, a))

    @classmethod
    def geometric_law(cls, c: float, q: float) -> "ScalarSequence":
        return cls(np.empty(0), GeometricTail(c, q))

    # -- positional access --------------------------------------------

    @property
    def base_length(self) -> int:
        return int(self.prefix.size)

    def value(self, n):
        """Entry at 1-based position n (scalar or array)."""
        n = np.asarray(n)
        if np.any(n < 1):
            raise ValueError("positions are 1-based")
        base = np.ceil(n / self.repeat).astype(np.int64)
        out = np.zeros(base.shape, dtype=float)
        np_len = self.prefix.size
        in_prefix = base <= np_len
        if np_len:
            out[in_prefix] = self.prefix[base[in_prefix] - 1]
        if self.tail is not None:
            beyond = ~in_prefix
            if np.any(beyond):
                out[beyond] = self.tail.value_at(base[beyond])
        return out if out.ndim else float(out)

    def head(self, n: int) -> np.ndarray:
        """First n entries, materialized."""
        return np.asarray(self.value(np.arange(1, n + 1)))

    # -- aggregates (all exact, tails in closed form) ------------------

    def count_ge(self, x: float) -> float:
        """#{n : value(n) >= x}, with 12-digit rounding at the threshold."""
        if x <= 0:
            raise ValueError("threshold must be positive")
        cnt = int(np.count_nonzero(round_sig(self.prefix) >= round_sig(x)))
        if self.tail is not None:
            cnt += self.tail.count_ge(x, self.prefix.size)
        return self.repeat * cnt

    def sum_plog(self, alpha: float = 1.0) -> float:
        """sum of log_+(alpha * value(n)) over all n."""
        if alpha <= 0:
            return 0.0
        vals = alpha * self.prefix[self.prefix > 0]
        s = float(np.sum(np.log(vals[vals >= 1]))) if vals.size else 0.0
        if self.tail is not None:
            s += self.tail.sum_plog(alpha, self.prefix.size)
        return self.repeat * s

    def schatten_sum(self, p: float) -> float:
        s = float(np.sum(self.prefix**p))
        if self.tail is not None:
            s += self.tail.schatten_sum(p, self.prefix.size)
        return self.repeat * s

    def weak_sup(self, p: float) -> float:
        """sup_n n^(1/p) * value(n) over the whole sequence."""
        sup = 0.0
        if self.prefix.size:
            n = self.repeat * np.arange(1, self.prefix.size + 1)
            sup = float(np.max(n ** (1.0 / p) * self.prefix))
        if self.tail is not None:
            t = self.tail.weak_sup(p, self.prefix.size)
            sup = max(sup, self.repeat ** (1.0 / p) * t)
        return sup

    def total_count_nonzero(self) -> float:
        if self.tail is not None:
            return math.inf
        return self.repeat * int(np.count_nonzero(self.prefix))

    # -- transforms ----------------------------------------------------

    def scaled(self, factor: float) -> "ScalarSequence":
        if factor <= 0:
            raise ValueError("scale factor must be positive")
        tail = self.tail
        if tail is not None:
            tail = replace(tail, c=tail.c * factor)
        return ScalarSequence(self.prefix * factor, tail, self.repeat)

    def repeated(self, k: int) -> "ScalarSequence":
        return replace(self, repeat=self.repeat * k)


def frac_index(s: ScalarSequence, r: float) -> float:
    """Entry at fractional position r: s_r = s_r for integer r, else s_{[r]+1}.

    Both cases collapse to position ceil(r).  Positions beyond a finite
    sequence return 0.
    """
    if r <= 0:
        raise ValueError("fractional index must be positive")
    return float(s.value(int(math.ceil(r))))


def merge_decreasing(a: ScalarSequence, b: ScalarSequence) -> ScalarSequence:
    """Nonincreasing rearrangement of the multiset union of two sequences.

    Supported exactly for finite sequences (the sequence model of a direct
    sum); k-fold self-merges should use ``ScalarSequence.repeated``.
    """
    if a.tail is not None or b.tail is not None:
        raise NotImplementedError("merge of sequences with analytic tails")
    va = np.repeat(a.prefix, a.repeat)
    vb = np.repeat(b.prefix, b.repeat)
    merged = np.sort(np.concatenate([va, vb]))[::-1]
    return ScalarSequence(merged)
