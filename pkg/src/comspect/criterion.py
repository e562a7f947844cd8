"""The equivalent membership conditions and their constructive witnesses.

Condition (2) is the verdict: the diagonal operator of Cesàro means belongs
to the ideal.  Conditions (3), (4), (5) are cross-checks with constructive
witnesses: the max-envelope sequence, its four-fold direct sum, and scaled
variants.  For (4) and (5) both sides are piecewise simple in the scale
parameter alpha — |chi(alpha . lambda)| is piecewise linear with breakpoints
at reciprocals of the moduli, nu(alpha T) is a step function, and
mu(alpha T) is continuous with kinks at the same points — so exhaustive
verification over all alpha > 0 reduces to finitely many endpoint checks
plus an analytic bound for the large-alpha regime of harmonic-tail
witnesses.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .cutoffs import CutoffPair, default_cutoff_pair
from .errors import NumericalError
from .functionals import chi, derived_c2, nu as nu_functional
from .ideals import (
    IN,
    OUT,
    UNDECIDED,
    CesaroSequence,
    EigenLaw,
    IdealSpec,
    MembershipVerdict,
    cesaro_membership,
    cesaro_sequence,
    max_envelope,
)
from .sequences import (
    FactorialPowerTail,
    GeometricTail,
    PowerTail,
    ScalarSequence,
    round_sig,
)
from .spectral import (
    EigenSequence,
    eigenvalue_sequence,
    hermitian_split,
    singular_sequence,
    validate_matrix,
)

__all__ = [
    "ConditionCheck",
    "CriterionReport",
    "condition2",
    "condition3_witness",
    "condition4_check",
    "condition5_check",
    "witness_3_to_4",
    "witness_4_to_3",
    "commutator_membership",
    "dominating_witness",
]

IN_COM = "InComJ"
NOT_IN_COM = "NotInComJ"

_SLACK = 1e-9
_MAX_TAIL_BREAKPOINTS = 2_000_000


@dataclass(frozen=True)
class ConditionCheck:
    holds: bool
    worst_ratio: float
    witness_scale: int  # number of scale points examined
    failing_alpha: float | None = None


def condition2(lam, ideal: IdealSpec, prefix_length: int = 10**6) -> MembershipVerdict:
    """Membership of the sorted Cesàro-mean diagonal in the ideal."""
    ces = cesaro_sequence(lam, prefix_length)
    return cesaro_membership(ces, ideal)


def condition3_witness(lam: EigenSequence) -> ScalarSequence:
    """The max-envelope witness; dominates the Cesàro means by construction."""
    env = max_envelope(lam)
    sums = lam.partial_sums()
    if sums.size:
        means = np.abs(sums) / np.arange(1, sums.size + 1)
        if np.any(means > env.prefix * (1 + 1e-12) + 1e-300):
            raise NumericalError("envelope failed to dominate the Cesàro means")
    return env


def dominating_witness(lam: EigenSequence, env: ScalarSequence) -> ScalarSequence:
    """Pointwise max of the envelope with the moduli (the proof's wlog step
    arranging s_n(T) >= |lambda_n|)."""
    mods = lam.moduli
    if env.prefix.size != mods.size:
        raise ValueError("envelope and eigenvalue sequence lengths differ")
    return ScalarSequence(np.maximum(env.prefix, mods), env.tail, env.repeat)


def witness_3_to_4(t: ScalarSequence) -> ScalarSequence:
    """Four-fold direct sum of the witness (each entry repeated four times)."""
    return t.repeated(4)


# ---------------------------------------------------------------------------
# exact alpha scans


def _chi_data(lam: EigenSequence):
    """Rounded moduli (nonincreasing), cumulative sums, and the total."""
    mods = round_sig(lam.moduli)
    csum = np.cumsum(lam.values) if lam.values.size else np.zeros(0, complex)
    scale = float(np.sum(lam.moduli))
    total = abs(complex(csum[-1])) if csum.size else 0.0
    if scale > 0 and total <= 1e-12 * scale:
        total = 0.0
    return mods, csum, total


def _chi_abs(mods: np.ndarray, csum: np.ndarray, alpha: float) -> float:
    """|chi(alpha lambda)| / alpha: modulus of the included partial sum."""
    if alpha <= 0 or mods.size == 0:
        return 0.0
    thr = round_sig(1.0 / alpha)
    m = int(np.count_nonzero(mods >= thr))
    return abs(complex(csum[m - 1])) if m else 0.0


def _alpha_grid(mods: np.ndarray, t: ScalarSequence, alpha_cap: float) -> list[float]:
    """All breakpoints of both sides up to alpha_cap, sorted ascending."""
    pts = {1.0 / m for m in np.unique(mods) if m > 0}
    for v in np.unique(round_sig(t.prefix)):
        if v > 0:
            pts.add(1.0 / v)
    if t.tail is not None:
        m = t.base_length + 1
        while m <= t.base_length + _MAX_TAIL_BREAKPOINTS:
            v = float(np.asarray(t.tail.value_at(m)))
            if v <= 0 or 1.0 / v > alpha_cap:
                break
            pts.add(1.0 / v)
            m += 1
        else:
            raise NumericalError("tail breakpoint enumeration exceeded its cap")
    return sorted(p for p in pts if p <= alpha_cap) or [1.0]


def _tail_slope_state(t: ScalarSequence, total: float):
    """Classify the large-alpha behaviour of nu(alpha t) against alpha*total.

    Returns (status, alpha_star): status 'ok' when the right side dominates
    beyond alpha_star, 'fail' when it eventually loses, 'trivial' when the
    left side vanishes (total == 0).
    """
    if total == 0.0:
        return "trivial", 0.0
    tail = t.tail
    r = t.repeat
    n_base = t.base_length
    n_pos = int(np.count_nonzero(t.prefix > 0))
    if tail is None:
        return "fail", None
    if isinstance(tail, GeometricTail):
        return "fail", None
    if isinstance(tail, FactorialPowerTail):
        raise NotImplementedError(
            "condition scans with factorial-power witnesses and nonzero totals"
        )
    a = round_sig(tail.a)
    if a > 1:
        return "fail", None
    if a == 1:
        margin = r * tail.c - total
        if round_sig(margin) <= 0:
            return "fail", None
        alpha_star = max(0.0, r * (1 + n_base - n_pos) / margin)
        return "ok", alpha_star
    # a < 1: nu grows like (alpha c)^(1/a), superlinear; find dominance by doubling
    alpha = 1.0
    for _ in range(200):
        lhs = alpha * total
        slack = r * (1 + n_base - n_pos)
        if r * (alpha * tail.c) ** (1.0 / a) >= 2.0 * (lhs + slack + r):
            return "ok", alpha
        alpha *= 2.0
    raise NumericalError("failed to certify superlinear witness dominance")


def _find_failure(lhs_fn, rhs_fn, start: float, tol: float) -> float | None:
    """Search upward (geometrically) for a scale where lhs > rhs + slack."""
    alpha = max(start, 1e-6)
    for _ in range(400):
        lhs, rhs = lhs_fn(alpha), rhs_fn(alpha)
        if lhs > rhs + tol * (1.0 + abs(rhs)):
            return alpha
        alpha *= 1.5
    return None


def _scan_condition(lam: EigenSequence, t: ScalarSequence, use_mu: bool) -> ConditionCheck:
    """Shared exact scan for conditions (4) (counting side) and (5) (log side)."""
    mods, csum, total = _chi_data(lam)
    state, alpha_star = _tail_slope_state(t, total)

    def rhs(alpha: float) -> float:
        if use_mu:
            return t.sum_plog(alpha)
        return float(t.count_ge(1.0 / alpha))

    def lhs(alpha: float) -> float:
        return alpha * _chi_abs(mods, csum, alpha)

    finite_bps = [1.0 / m for m in np.unique(mods) if m > 0]
    for v in np.unique(round_sig(t.prefix)):
        if v > 0:
            finite_bps.append(1.0 / v)
    base_cap = max(finite_bps, default=1.0)
    alpha_cap = 2.0 * max(base_cap, alpha_star or 0.0, 1.0)

    grid = _alpha_grid(mods, t, alpha_cap)
    worst = 0.0
    failing = None
    holds = True
    for i, b in enumerate(grid):
        sum_abs = _chi_abs(mods, csum, b)
        right = rhs(b)
        b_next = grid[i + 1] if i + 1 < len(grid) else alpha_cap
        # the left side is linear on [b, b_next): its supremum is the right
        # limit; the log side is continuous and the margin concave on the
        # interval, so the two endpoint checks are exhaustive
        checks = [(b * sum_abs, right)]
        checks.append((b_next * sum_abs, rhs(b_next) if use_mu else right))
        for left, right_val in checks:
            worst = max(worst, left / max(right_val, 1.0))
            if left > right_val + _SLACK * (1.0 + right_val):
                holds = False
                failing = failing if failing is not None else b
    if holds and state == "fail":
        # every finite breakpoint passed but the right side eventually loses
        holds = False
        failing = _find_failure(lhs, rhs, base_cap, _SLACK)
        if failing is not None:
            worst = max(worst, lhs(failing) / max(rhs(failing), 1.0))
    elif holds and state == "ok" and total > 0.0:
        # beyond alpha_cap >= 2*alpha_star the floor bound keeps the counting
        # side above alpha*total, and the log side's margin is increasing;
        # the edge check closes the interval ending at alpha_cap
        edge_rhs = rhs(alpha_cap)
        if lhs(alpha_cap) > edge_rhs + _SLACK * (1.0 + edge_rhs):
            holds = False
            failing = alpha_cap
    return ConditionCheck(holds, worst, len(grid), failing)


def condition4_check(lam: EigenSequence, t: ScalarSequence) -> ConditionCheck:
    """|chi(alpha lambda)| <= nu(alpha t) for every alpha > 0, checked exactly."""
    return _scan_condition(lam, t, use_mu=False)


def condition5_check(lam: EigenSequence, t: ScalarSequence) -> ConditionCheck:
    """|chi(alpha lambda)| <= mu(alpha t) for every alpha > 0, checked exactly."""
    return _scan_condition(lam, t, use_mu=True)


def witness_4_to_3(lam: EigenSequence, t: ScalarSequence) -> ScalarSequence:
    """Double the witness and verify that the Cesàro means sit below it.

    Checks c_n <= 2 s_n(t) for every n: directly over the stored range, and
    by slope comparison for the harmonic tails beyond.  Raises with the
    failing index when the factor-2 bound is violated (which the precondition
    — condition (4) with s(t) >= |lambda| — rules out).
    """
    mods = lam.moduli
    horizon = max(mods.size, t.base_length * t.repeat) + t.repeat
    ns = np.arange(1, horizon + 1)
    t_vals = np.asarray(t.value(ns))
    if np.any(t_vals[: mods.size] < mods * (1 - 1e-12) - 1e-300):
        bad = int(np.argmax(t_vals[: mods.size] < mods * (1 - 1e-12)))
        raise ValueError(f"witness fails s_n >= |lambda_n| at n={bad + 1}")
    sums = lam.partial_sums()
    means = np.zeros(horizon)
    if sums.size:
        means[: sums.size] = np.abs(sums) / np.arange(1, sums.size + 1)
        total = abs(complex(sums[-1]))
        if total <= 1e-12 * (float(np.sum(mods)) or 1.0):
            total = 0.0
        tail_ns = ns[sums.size :]
        means[sums.size :] = total / tail_ns
    else:
        total = 0.0
    viol = means > 2.0 * t_vals * (1 + 1e-12) + 1e-300
    if np.any(viol):
        raise ValueError(f"factor-2 domination fails at n={int(np.argmax(viol)) + 1}")
    if total > 0.0:
        _certify_tail_domination(total, t, horizon)
    return t.scaled(2.0)


def _certify_tail_domination(total: float, t: ScalarSequence, checked: int) -> None:
    """Show total/n <= 2 t(n) for all n beyond the checked horizon."""
    tail = t.tail
    if tail is None:
        raise ValueError(f"factor-2 domination fails at n={checked + 1} (finite witness)")
    if isinstance(tail, GeometricTail):
        raise ValueError("geometric witness cannot dominate a harmonic tail")
    if isinstance(tail, FactorialPowerTail):
        raise NotImplementedError("factorial-power witnesses in the doubling step")
    a, c, r = tail.a, tail.c, t.repeat
    if a > 1:
        raise ValueError("witness tail decays too fast to dominate the means")
    # 2 t(n) * n >= 2 c (n/r + 1)^(-a) * n, increasing in n for a <= 1
    n0 = checked + 1
    lower = 2.0 * c * (n0 / r + 1.0) ** (-a) * n0
    if a == 1.0:
        lower = 2.0 * c * r * n0 / (n0 + r)
    if lower < total * (1 - 1e-12):
        raise ValueError("factor-2 domination fails beyond the checked horizon")


@dataclass(frozen=True)
class CriterionReport:
    condition2: MembershipVerdict
    condition3_witness: ScalarSequence | None
    condition4: ConditionCheck | None
    condition5: ConditionCheck | None
    verdict: str
    witness_scale: int
    hermitian_split: dict | None = None
    explanation: str = ""


def _witness_checks(lam: EigenSequence):
    env = condition3_witness(lam)
    t0 = dominating_witness(lam, env)
    t4 = witness_3_to_4(t0)
    c4 = condition4_check(lam, t4)
    c5 = condition5_check(lam, t4.scaled(math.e))
    witness_4_to_3(lam, t4)
    return env, c4, c5


def commutator_membership(
    source,
    ideal: IdealSpec,
    prefix_length: int = 10**6,
    witness_prefix: int = 2000,
    pair: CutoffPair | None = None,
) -> CriterionReport:
    """Full membership report for a matrix, finite sequence, or symbolic law.

    The verdict is condition (2); conditions (3)-(5) are attached as
    constructive cross-checks (on a stated finite scale for symbolic input).
    Matrix input additionally reports the hermitian-split verdicts and the
    quantitative hermitian-part comparison against the derived constant.
    """
    split_report = None
    if isinstance(source, EigenLaw):
        lam_for_witness = EigenSequence(
            np.asarray(source.prefix_values(witness_prefix), dtype=np.complex128),
            witness_prefix,
        )
        cond2 = condition2(source, ideal, prefix_length)
        scale = witness_prefix
    elif isinstance(source, EigenSequence):
        lam_for_witness = source
        cond2 = condition2(source, ideal)
        scale = source.values.size
    else:
        matrix = validate_matrix(source)
        lam_for_witness = eigenvalue_sequence(matrix)
        cond2 = condition2(lam_for_witness, ideal)
        scale = lam_for_witness.values.size
        split_report = _hermitian_split_report(matrix, ideal, pair)

    env, c4, c5 = _witness_checks(lam_for_witness)

    if not ideal.geometrically_stable:
        verdict = UNDECIDED
        explanation = (
            "ideal not flagged geometrically stable: condition (2) is reported "
            "without the commutator-subspace label (the equivalence can fail)"
        )
    else:
        verdict = {IN: IN_COM, OUT: NOT_IN_COM, UNDECIDED: UNDECIDED}[cond2.status]
        explanation = ""
    return CriterionReport(
        condition2=cond2,
        condition3_witness=env,
        condition4=c4,
        condition5=c5,
        verdict=verdict,
        witness_scale=scale,
        hermitian_split=split_report,
        explanation=explanation,
    )


def _hermitian_split_report(matrix: np.ndarray, ideal: IdealSpec, pair) -> dict:
    pair = pair or default_cutoff_pair()
    h, k = hermitian_split(matrix)
    eig_t = eigenvalue_sequence(matrix)
    eig_h = eigenvalue_sequence(h)
    eig_k = eigenvalue_sequence(k)
    cond2_h = condition2(eig_h, ideal)
    cond2_k = condition2(eig_k, ideal)
    mu2 = singular_sequence(matrix).sum_plog(2.0)
    c2_const = derived_c2(pair)
    return {
        "condition2_h": cond2_h,
        "condition2_k": cond2_k,
        "chi_dev_re": abs(chi(eig_h).real - chi(eig_t).real),
        "chi_dev_im": abs(chi(eig_k).real - chi(eig_t).imag),
        "bound": c2_const * mu2,
        "nu_t": nu_functional(eig_t),
        "mu_2abs_t": mu2,
    }
