"""Sequence models of operator ideals and the transforms the membership
criterion is built from.

Ideal membership is decided analytically for symbolic decay laws and for
finite prefixes with exact closed-form tails; plain finite sequences with
zero tails are always members.  The transforms are the Cesàro-mean sequence
(with its exact harmonic tail |total|/m), the nonincreasing max-envelope,
running geometric means, and the dyadic series envelope used to witness
geometric stability of quasi-Banach ideals.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import mpmath
import numpy as np
from scipy.special import gammaln

from .sequences import (
    FactorialPowerTail,
    GeometricTail,
    PowerTail,
    ScalarSequence,
    round_sig,
)
from .spectral import EigenSequence

__all__ = [
    "IdealSpec",
    "MembershipVerdict",
    "EigenLaw",
    "CesaroSequence",
    "membership",
    "cesaro_sequence",
    "cesaro_membership",
    "max_envelope",
    "geometric_mean_seq",
    "dyadic_series_envelope",
    "check_geometric_stability",
    "StabilityReport",
    "fit_decay_exponent",
]

IN = "In"
OUT = "Out"
UNDECIDED = "UndecidedAtScale"

# relative cutoff below which a cancelling eigenvalue total counts as zero
_ZERO_SUM_RTOL = 1e-12


@dataclass(frozen=True)
class IdealSpec:
    """A parametric ideal family with analytic membership rules.

    ``schatten`` requires a p-summable sequence, ``weaklp`` a bounded
    n^{1/p} s_n; both carry complete quasi-norms, hence are geometrically
    stable.  ``custom`` wraps a named decidable predicate on sequences and
    must declare its own stability flag.
    """

    family: str
    p: float | None = None
    predicate: object = None
    name: str = ""
    custom_geometrically_stable: bool = False

    def __post_init__(self):
        if self.family in ("schatten", "weaklp"):
            if self.p is None or not (0 < self.p < math.inf):
                raise ValueError(f"{self.family} requires finite p > 0")
        elif self.family == "custom":
            if self.predicate is None:
                raise ValueError("custom ideal requires a predicate")
        else:
            raise ValueError(f"unknown ideal family {self.family!r}")

    @classmethod
    def schatten(cls, p: float) -> "IdealSpec":
        return cls("schatten", p=p, name=f"schatten:p={p:g}")

    @classmethod
    def weak_lp(cls, p: float) -> "IdealSpec":
        return cls("weaklp", p=p, name=f"weaklp:p={p:g}")

    @classmethod
    def parse(cls, text: str) -> "IdealSpec":
        """Parse 'schatten:p=<v>' or 'weaklp:p=<v>'."""
        try:
            family, _, params = text.partition(":")
            family = family.strip().lower()
            kv = dict(item.split("=", 1) for item in params.split(",") if item)
            p = float(kv["p"])
        except (KeyError, ValueError) as exc:
            raise ValueError(f"cannot parse ideal spec {text!r}") from exc
        if family == "schatten":
            return cls.schatten(p)
        if family == "weaklp":
            return cls.weak_lp(p)
        raise ValueError(f"unknown ideal family {family!r}")

    @property
    def geometrically_stable(self) -> bool:
        if self.family == "custom":
            return self.custom_geometrically_stable
        return True  # quasi-Banach families

    @property
    def quasi_norm_exponent(self) -> float:
        """The r in the r-norm triangle inequality; min(p, 1) for both families."""
        if self.p is None:
            raise ValueError("custom ideals carry no quasi-norm exponent")
        return min(self.p, 1.0)


@dataclass(frozen=True)
class MembershipVerdict:
    status: str  # In | Out | UndecidedAtScale
    scale: int = 0  # prefix length examined for the evidence
    evidence: dict = field(default_factory=dict)

    @property
    def is_in(self) -> bool:
        return self.status == IN


def membership(s: ScalarSequence, ideal: IdealSpec) -> MembershipVerdict:
    """Decide whether diag(s) belongs to the ideal.

    Exact for every supported tail law; finite sequences (zero tail) are
    always members, with the partial quasi-norm carried as evidence.
    """
    if ideal.family == "custom":
        ok = bool(ideal.predicate(s))
        return MembershipVerdict(IN if ok else OUT, s.base_length, {})
    if ideal.family == "schatten":
        total = s.schatten_sum(ideal.p)
        status = IN if math.isfinite(total) else OUT
        return MembershipVerdict(
            status, s.base_length, {"p_sum": total if math.isfinite(total) else math.inf}
        )
    sup = s.weak_sup(ideal.p)
    status = IN if math.isfinite(sup) else OUT
    return MembershipVerdict(status, s.base_length, {"weak_sup": sup})


@dataclass(frozen=True)
class EigenLaw:
    """Symbolic eigenvalue sequence with a closed-form partial-sum model.

    ``power``: lambda_n = sign_n * c * n^(-a); ``geometric``: sign_n * c * q^n,
    where sign_n alternates (+,-,+,...) when ``alternating`` is set.
    """

    kind: str  # "power" | "geometric"
    c: float
    a: float | None = None
    q: float | None = None
    alternating: bool = False

    def __post_init__(self):
        if self.kind == "power":
            if self.a is None or not (self.c > 0 and self.a > 0):
                raise ValueError("power law requires c > 0 and a > 0")
        elif self.kind == "geometric":
            if self.q is None or not (self.c > 0 and 0 < self.q < 1):
                raise ValueError("geometric law requires c > 0 and 0 < q < 1")
        else:
            raise ValueError(f"unknown eigen law {self.kind!r}")

    def prefix_values(self, n: int) -> np.ndarray:
        k = np.arange(1, n + 1, dtype=float)
        if self.kind == "power":
            vals = self.c * k ** (-self.a)
        else:
            vals = self.c * self.q**k
        if self.alternating:
            vals = vals * np.where(np.arange(n) % 2 == 0, 1.0, -1.0)
        return vals

    def moduli_sequence(self) -> ScalarSequence:
        """|lambda_n| as an exact nonincreasing sequence."""
        if self.kind == "power":
            return ScalarSequence.power_law(self.c, self.a)
        return ScalarSequence.geometric_law(self.c, self.q)

    def partial_sum_limit(self) -> float | None:
        """Limit of lambda_1 + ... + lambda_n, or None when divergent."""
        if self.kind == "geometric":
            if self.alternating:
                return self.c * self.q / (1 + self.q)
            return self.c * self.q / (1 - self.q)
        if self.alternating:
            return self.c * float(mpmath.altzeta(self.a))
        if self.a > 1:
            return self.c * float(mpmath.zeta(self.a))
        return None


@dataclass(frozen=True)
class CesaroSequence:
    """Cesàro-mean sequence c_n = |lambda_1 + ... + lambda_n| / n.

    The stored prefix keeps the raw (not rearranged) order; ``tail`` is the
    law of the entries beyond the prefix — exact (|total|/m) for finite
    eigenvalue data, asymptotic for symbolic laws.  ``tail_exact`` records
    which.  Membership tests are rearrangement-invariant and work on the
    multiset prefix + tail directly.
    """

    prefix: np.ndarray
    tail: PowerTail | None
    tail_exact: bool
    log_tail_coefficient: float | None = None  # c_n ~ coeff * ln n / n

    @property
    def is_monotone(self) -> bool:
        return self.prefix.size < 2 or bool(np.all(np.diff(self.prefix) <= 1e-15))

    def sorted_prefix(self) -> np.ndarray:
        return np.sort(self.prefix)[::-1]


def cesaro_sequence(lam, prefix_length: int = 10**6) -> CesaroSequence:
    """Cesàro means of an eigenvalue sequence (finite or symbolic).

    Finite input: prefix of length n plus the exact tail |S_n|/m (zero when
    the values cancel).  Symbolic input: prefix of ``prefix_length`` terms
    plus the asymptotic tail law implied by the partial-sum model.
    """
    if isinstance(lam, EigenSequence):
        sums = lam.partial_sums()
        n = np.arange(1, sums.size + 1)
        prefix = np.abs(sums) / n
        total = complex(sums[-1]) if sums.size else 0j
        scale = float(np.sum(lam.moduli)) or 1.0
        if abs(total) <= _ZERO_SUM_RTOL * scale:
            return CesaroSequence(prefix, None, True)
        return CesaroSequence(prefix, PowerTail(abs(total), 1.0), True)
    if isinstance(lam, EigenLaw):
        vals = lam.prefix_values(prefix_length)
        sums = np.cumsum(vals)
        prefix = np.abs(sums) / np.arange(1, prefix_length + 1)
        limit = lam.partial_sum_limit()
        if limit is not None:
            return CesaroSequence(prefix, PowerTail(abs(limit), 1.0), False)
        # positive power law with a <= 1: partial sums diverge
        if lam.a == 1.0:
            return CesaroSequence(prefix, None, False, log_tail_coefficient=lam.c)
        coeff = lam.c / (1.0 - lam.a)
        return CesaroSequence(prefix, PowerTail(coeff, lam.a), False)
    raise TypeError(f"unsupported eigenvalue input {type(lam).__name__}")


def _weak_sup_multiset(prefix: np.ndarray, tail: PowerTail | None, start: int, p: float) -> float:
    """sup_n n^{1/p} v*_n for the decreasing rearrangement of prefix + tail.

    Uses sup_x x * N(x)^{1/p} with N the counting function of the multiset;
    candidates are the prefix values, a window of tail values, and the
    analytic x -> 0 limit of the tail regime.
    """
    if tail is not None and round_sig(tail.a * p) < 1:
        return math.inf
    cands = list(np.unique(prefix[prefix > 0]))
    limit = 0.0
    if tail is not None:
        m = np.arange(start + 1, start + 2001, dtype=float)
        cands.extend(np.unique(tail.value_at(m)))
        if round_sig(tail.a * p) == 1:
            limit = tail.c  # x * N(x)^{1/p} -> c from below in the tail regime
    sup = limit
    for x in cands:
        count = int(np.count_nonzero(prefix >= x))
        if tail is not None:
            count += tail.count_ge(x, start)
        sup = max(sup, x * count ** (1.0 / p))
    return sup


def cesaro_membership(ces: CesaroSequence, ideal: IdealSpec) -> MembershipVerdict:
    """Membership of the (rearranged) Cesàro sequence in the ideal."""
    n = int(ces.prefix.size)
    evidence: dict = {}
    if ces.tail is not None:
        evidence["tail_coefficient"] = ces.tail.c
        evidence["tail_exponent"] = ces.tail.a
    if n:
        evidence["n_times_c_at_scale"] = float(ces.prefix[-1] * n)

    if ideal.family == "custom":
        exponent, se = fit_decay_exponent(ces.prefix)
        evidence["fitted_decay_exponent"] = exponent
        evidence["fitted_decay_se"] = se
        return MembershipVerdict(UNDECIDED, n, evidence)

    if ces.log_tail_coefficient is not None:
        # c_n ~ coeff * ln n / n: p-summable iff p > 1; weak-type iff p > 1
        coeff = ces.log_tail_coefficient
        status = IN if ideal.p > 1 else OUT
        evidence["log_tail_coefficient"] = coeff
        return MembershipVerdict(status, n, evidence)

    if ces.tail is None:
        # finite support (cancelling total): always a member
        if ideal.family == "schatten":
            evidence["p_sum"] = float(np.sum(ces.prefix**ideal.p))
        else:
            evidence["weak_sup"] = _weak_sup_multiset(ces.prefix, None, n, ideal.p)
        return MembershipVerdict(IN, n, evidence)

    tail = ces.tail
    if ideal.family == "schatten":
        ap = round_sig(tail.a * ideal.p)
        if ap <= 1:
            evidence["p_sum"] = math.inf
            return MembershipVerdict(OUT, n, evidence)
        if ces.tail_exact:
            evidence["p_sum"] = float(np.sum(ces.prefix**ideal.p)) + tail.schatten_sum(
                ideal.p, n
            )
        else:
            evidence["p_sum_prefix"] = float(np.sum(ces.prefix**ideal.p))
        return MembershipVerdict(IN, n, evidence)

    # weak-lp
    ap = round_sig(tail.a * ideal.p)
    if ap < 1:
        evidence["weak_sup"] = math.inf
        return MembershipVerdict(OUT, n, evidence)
    sup = _weak_sup_multiset(ces.prefix, tail, n, ideal.p)
    evidence["weak_sup"] = sup
    return MembershipVerdict(IN if math.isfinite(sup) else OUT, n, evidence)


def max_envelope(lam: EigenSequence) -> ScalarSequence:
    """Nonincreasing envelope u_n = max over m >= n of the Cesàro means.

    For a finite sequence the supremum over the zero-padded tail is exact:
    beyond the stored length the means are |S_N|/m, whose supremum over
    m > N is |S_N|/(N+1), and the envelope continues as exactly |S_N|/m.
    """
    sums = lam.partial_sums()
    n = sums.size
    if n == 0:
        return ScalarSequence(np.empty(0))
    means = np.abs(sums) / np.arange(1, n + 1)
    total = abs(complex(sums[-1]))
    scale = float(np.sum(lam.moduli)) or 1.0
    if total <= _ZERO_SUM_RTOL * scale:
        total = 0.0
    # suffix maximum of the stored means, then the tail supremum
    env = np.maximum.accumulate(means[::-1])[::-1]
    env = np.maximum(env, total / (n + 1))
    tail = PowerTail(total, 1.0) if total > 0 else None
    return ScalarSequence(env, tail)


def geometric_mean_seq(s: ScalarSequence) -> ScalarSequence:
    """Running geometric means t_n = (s_1 ... s_n)^(1/n).

    Computed in log space for finite input (zeros propagate: once some
    s_k = 0, every later t_n = 0); exact law transforms for symbolic input:
    a power law maps to c*(n!)^(-a/n) and a geometric law stays geometric
    with ratio sqrt(q).
    """
    if s.repeat != 1:
        raise NotImplementedError("geometric means of repeated sequences")
    if s.tail is None:
        vals = s.prefix
        out = np.zeros_like(vals)
        pos = vals > 0
        k = int(np.argmin(pos)) if not pos.all() else vals.size
        if k:
            logs = np.cumsum(np.log(vals[:k]))
            out[:k] = np.exp(logs / np.arange(1, k + 1))
        return ScalarSequence(out)
    if s.prefix.size == 0 and isinstance(s.tail, PowerTail):
        return ScalarSequence(np.empty(0), FactorialPowerTail(s.tail.c, s.tail.a))
    if s.prefix.size == 0 and isinstance(s.tail, GeometricTail):
        rq = math.sqrt(s.tail.q)
        return ScalarSequence(np.empty(0), GeometricTail(s.tail.c * rq, rq))
    raise NotImplementedError("geometric means of mixed prefix+tail sequences")


def dyadic_series_envelope(
    s: ScalarSequence, theta: float, length: int = 4096
) -> ScalarSequence:
    """Envelope u_n = sum over k >= 0 of 2^(-theta k) s_{n/2^k}.

    Indices follow the fractional convention (position ceil(n/2^k)); once
    n/2^k drops below 1 the remaining terms all equal s_1 and are added as a
    closed-form geometric tail.  Returns the first ``length`` values.
    """
    if theta <= 0:
        raise ValueError("theta must be positive")
    n = np.arange(1, length + 1, dtype=np.int64)
    out = np.zeros(length, dtype=float)
    k = 0
    while (1 << k) <= length:
        step = 1 << k
        live = n >= step
        idx = -(-n[live] // step)  # exact ceil division
        out[live] += 2.0 ** (-theta * k) * s.value(idx)
        k += 1
    s1 = float(s.value(1))
    # tail: first k with 2^k > n is floor(log2 n) + 1
    k0 = np.floor(np.log2(n.astype(float))).astype(np.int64) + 1
    out += s1 * 2.0 ** (-theta * k0.astype(float)) / (1.0 - 2.0**-theta)
    return ScalarSequence(out)


@dataclass(frozen=True)
class StabilityReport:
    """Geometric-stability check: membership of the running geometric means,
    with the dyadic-envelope witnesses for quasi-Banach families."""

    input_verdict: MembershipVerdict
    mean_verdict: MembershipVerdict
    theta: float
    empirical_constant: float
    proof_constant: float
    chain_holds: bool
    worst_chain_margin: float
    n_checked: int


def check_geometric_stability(
    s: ScalarSequence, ideal: IdealSpec, n_max: int = 100_000
) -> StabilityReport:
    """Verify that diag(t) stays in the ideal when diag(s) is in it.

    Witnesses the proof path: the dyadic envelope u with theta = 2/r
    dominates t up to the factor 2^theta n^theta (n!)^(-theta/n) <= (2e)^theta,
    and the empirical sup t_n/u_n is reported alongside the proof bound.
    """
    verdict_in = membership(s, ideal)
    if not verdict_in.is_in:
        raise ValueError("geometric stability requires membership of the input")
    t = geometric_mean_seq(s)
    verdict_t = membership(t, ideal)
    theta = 2.0 / ideal.quasi_norm_exponent
    u = dyadic_series_envelope(s, theta, n_max)
    n = np.arange(1, n_max + 1, dtype=float)
    t_vals = t.head(n_max)
    u_vals = u.prefix
    ratio = np.divide(t_vals, u_vals, out=np.zeros_like(t_vals), where=u_vals > 0)
    empirical = float(np.max(ratio)) if n_max else 0.0
    # the displayed comparison t_n <= 2^theta n^theta (n!)^(-theta/n) u_n
    factor = np.exp(theta * (math.log(2.0) + np.log(n) - gammaln(n + 1) / n))
    margin = t_vals - factor * u_vals
    worst = float(np.max(margin / (1.0 + factor * u_vals)))
    proof_c = (2.0 * math.e) ** theta
    return StabilityReport(
        input_verdict=verdict_in,
        mean_verdict=verdict_t,
        theta=theta,
        empirical_constant=empirical,
        proof_constant=proof_c,
        chain_holds=bool(worst <= 1e-9),
        worst_chain_margin=worst,
        n_checked=n_max,
    )


def fit_decay_exponent(values: np.ndarray) -> tuple[float, float]:
    """Least-squares log-log decay exponent of a positive sequence tail.

    Returns (exponent, standard_error); used as honest evidence when no
    analytic tail model applies.
    """
    vals = np.asarray(values, dtype=float)
    n = vals.size
    lo = max(1, n // 4)
    idx = np.arange(lo, n + 1)
    y = vals[lo - 1 :]
    pos = y > 0
    if np.count_nonzero(pos) < 8:
        return math.nan, math.inf
    lx = np.log(idx[pos].astype(float))
    ly = np.log(y[pos])
    coeffs, residuals, *_ = np.polyfit(lx, ly, 1, full=True)
    slope = float(coeffs[0])
    dof = max(1, np.count_nonzero(pos) - 2)
    resid = float(residuals[0]) if len(residuals) else 0.0
    var_x = float(np.sum((lx - lx.mean()) ** 2)) or 1.0
    se = math.sqrt(resid / dof / var_x)
    return -slope, se
