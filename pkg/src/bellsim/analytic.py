"""Closed-form detection probabilities and CH curves for the chaotic source.

With unit-mean exponential mode intensities and the threshold law
``p(I) = 1 - exp(-k*I)``, the no-detection probabilities integrate to
rational functions of k:

    Q_single(k, th)     = 1 / (1 + k + k^2 cos^2 th sin^2 th)
    Q_joint(k, th, ph)  = 1 / (1 + 2k + k^2 (cos^2 th + cos^2 ph)
                                           (sin^2 th + sin^2 ph))

Single-window tables follow directly (P = 1 - Q, P_XY = P_X + P_Y - 1 +
Q_XY).  For the split-window scheme three laws are provided:

* ``multiwindow-exact``: coincidence by independent pairing channels with
  the exact cross-channel ingredient,
  ``P_XY = 1 - [(Q_X + Q_Y - Q_XY)(Q_X + Q_Y - Q_X Q_Y)]^2``.
* ``multiwindow-paper``: the published fourth-power variant
  ``P_XY = 1 - [Q_X + Q_Y - Q_XY]^4``, which substitutes the same-half
  quantity ``Q_X + Q_Y - Q_XY`` for the cross-channel factor as well.
* the two-term curve :func:`ch_multiwindow_two_term`,
  ``2 [Q_A + Q_B' - Q_AB']^4 - 2 Q_A^2``: the published end formula, which
  additionally drops the AB and A'B' coincidence terms as if they cancelled
  (they do not; the difference is part of the reported spread).

:func:`union_coincidence_table` gives the law of the plain Boolean
coincidence ("both sides fired somewhere"), ``1 - Q_X^2 - Q_Y^2 + Q_XY^2``;
its CH combination is non-negative for every k, which localizes the
split-window violation entirely in the pairing-channel bookkeeping.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import bisect

from .errors import InvalidInputError
from .inequalities import DEFAULT_QUAD, AngleQuad, CHBreakdown, ProbabilityTable, ch_value

__all__ = [
    "CH_CURVE_MODES",
    "SWEEP_MODES",
    "QSet",
    "SmallKReport",
    "ch_curve_value",
    "ch_multiwindow",
    "ch_multiwindow_two_term",
    "ch_standard",
    "ch_union",
    "ch_zero_crossing",
    "multiwindow_table",
    "p_single",
    "q_joint",
    "q_single",
    "qset",
    "small_k_expansion",
    "standard_table",
    "table_for_mode",
    "union_coincidence_table",
]

#: Modes the sweep table/CSV knows how to tabulate (Ps, Pc, CH columns).
SWEEP_MODES = ("standard", "multiwindow-exact", "multiwindow-paper")

#: Modes for scalar CH(k) curves (adds the published two-term end formula
#: and the Boolean-union law).
CH_CURVE_MODES = SWEEP_MODES + ("multiwindow-two-term", "multiwindow-union")


def _check_k(k: float) -> float:
    # Strictly dark (k = 0) and negative responses are rejected; the k -> 0+
    # limit (Q -> 1, CH -> 0) is reached by extrapolation, never evaluated.
    if not (math.isfinite(k) and k > 0.0):
        raise InvalidInputError(f"k must be finite and > 0, got {k!r}")
    return float(k)


def q_single(k: float, theta: float) -> float:
    """No-detection probability of one detector at analyzer angle theta."""
    k = _check_k(k)
    c2 = math.cos(theta) ** 2
    s2 = math.sin(theta) ** 2
    return 1.0 / (1.0 + k + k * k * c2 * s2)


def p_single(k: float, theta: float) -> float:
    """Single-window detection probability, 1 - q_single."""
    return 1.0 - q_single(k, theta)


def q_joint(k: float, theta: float, phi: float) -> float:
    """Probability that neither side fires in one shared window."""
    k = _check_k(k)
    c2t, s2t = math.cos(theta) ** 2, math.sin(theta) ** 2
    c2p, s2p = math.cos(phi) ** 2, math.sin(phi) ** 2
    return 1.0 / (1.0 + 2.0 * k + k * k * (c2t + c2p) * (s2t + s2p))


@dataclass(frozen=True)
class QSet:
    """All eight no-detection probabilities for one (k, quad) pair."""

    q_a: float
    q_b: float
    q_a_prime: float
    q_b_prime: float
    q_ab: float
    q_ab_prime: float
    q_a_prime_b: float
    q_a_prime_b_prime: float


def qset(k: float, quad: AngleQuad = DEFAULT_QUAD) -> QSet:
    """Evaluate the Q closed forms at every setting and setting pair."""
    return QSet(
        q_a=q_single(k, quad.a),
        q_b=q_single(k, quad.b),
        q_a_prime=q_single(k, quad.a_prime),
        q_b_prime=q_single(k, quad.b_prime),
        q_ab=q_joint(k, quad.a, quad.b),
        q_ab_prime=q_joint(k, quad.a, quad.b_prime),
        q_a_prime_b=q_joint(k, quad.a_prime, quad.b),
        q_a_prime_b_prime=q_joint(k, quad.a_prime, quad.b_prime),
    )


def _table_from_joints(q: QSet, joint) -> ProbabilityTable:
    return ProbabilityTable(
        p_a=joint.single(q.q_a),
        p_b=joint.single(q.q_b),
        p_ab=joint.pair(q.q_a, q.q_b, q.q_ab),
        p_ab_prime=joint.pair(q.q_a, q.q_b_prime, q.q_ab_prime),
        p_a_prime_b=joint.pair(q.q_a_prime, q.q_b, q.q_a_prime_b),
        p_a_prime_b_prime=joint.pair(q.q_a_prime, q.q_b_prime, q.q_a_prime_b_prime),
        p_a_prime=joint.single(q.q_a_prime),
        p_b_prime=joint.single(q.q_b_prime),
    )


class _SingleWindowLaw:
    @staticmethod
    def single(qx: float) -> float:
        return 1.0 - qx

    @staticmethod
    def pair(qx: float, qy: float, qxy: float) -> float:
        # P_X + P_Y - 1 + Q_XY
        return (1.0 - qx) + (1.0 - qy) - 1.0 + qxy


class _MultiWindowExactLaw:
    @staticmethod
    def single(qx: float) -> float:
        return 1.0 - qx * qx

    @staticmethod
    def pair(qx: float, qy: float, qxy: float) -> float:
        same_half = qx + qy - qxy          # 1 - P_XY of one half
        cross_half = qx + qy - qx * qy     # 1 - P_X * P_Y
        return 1.0 - (same_half * cross_half) ** 2


class _MultiWindowPaperLaw:
    @staticmethod
    def single(qx: float) -> float:
        return 1.0 - qx * qx

    @staticmethod
    def pair(qx: float, qy: float, qxy: float) -> float:
        return 1.0 - (qx + qy - qxy) ** 4


class _UnionLaw:
    @staticmethod
    def single(qx: float) -> float:
        return 1.0 - qx * qx

    @staticmethod
    def pair(qx: float, qy: float, qxy: float) -> float:
        # P(any_X and any_Y) over two independent halves.
        return 1.0 - qx * qx - qy * qy + qxy * qxy


def standard_table(k: float, quad: AngleQuad = DEFAULT_QUAD) -> ProbabilityTable:
    """Single-window probability table (marginals included)."""
    return _table_from_joints(qset(k, quad), _SingleWindowLaw)


def multiwindow_table(
    k: float, quad: AngleQuad = DEFAULT_QUAD, mode: str = "exact"
) -> ProbabilityTable:
    """Split-window table under the pairing-channel law.

    ``mode="exact"`` uses the exact cross-channel factor, ``mode="paper"``
    the published fourth-power form (see module docstring).
    """
    if mode == "exact":
        law = _MultiWindowExactLaw
    elif mode == "paper":
        law = _MultiWindowPaperLaw
    else:
        raise InvalidInputError(f"mode must be 'exact' or 'paper', got {mode!r}")
    return _table_from_joints(qset(k, quad), law)


def union_coincidence_table(k: float, quad: AngleQuad = DEFAULT_QUAD) -> ProbabilityTable:
    """Split-window table for the plain Boolean coincidence."""
    return _table_from_joints(qset(k, quad), _UnionLaw)


def ch_standard(k: float, quad: AngleQuad = DEFAULT_QUAD) -> CHBreakdown:
    """Single-window CH; strictly positive for every k > 0 at the default quad."""
    return ch_value(standard_table(k, quad))


def ch_multiwindow(
    k: float, quad: AngleQuad = DEFAULT_QUAD, mode: str = "exact"
) -> CHBreakdown:
    """Split-window CH under the exact or published pairing-channel law."""
    return ch_value(multiwindow_table(k, quad, mode))


def ch_union(k: float, quad: AngleQuad = DEFAULT_QUAD) -> CHBreakdown:
    """CH of the Boolean-union coincidence law (never negative)."""
    return ch_value(union_coincidence_table(k, quad))


def ch_multiwindow_two_term(k: float, quad: AngleQuad = DEFAULT_QUAD) -> float:
    """The published end formula 2*[Q_A + Q_B' - Q_AB']^4 - 2*Q_A^2.

    Keeps only the AB' (and by symmetry A'B) coincidence term, treating the
    AB and A'B' fourth powers as equal and cancelling.  At the default quad
    they are not equal, so this curve differs from the full paper-law table;
    both are exposed on purpose.
    """
    q = qset(k, quad)
    return 2.0 * (q.q_a + q.q_b_prime - q.q_ab_prime) ** 4 - 2.0 * q.q_a**2


def table_for_mode(
    k: float, quad: AngleQuad = DEFAULT_QUAD, mode: str = "multiwindow-exact"
) -> ProbabilityTable:
    """Probability table for one of the sweep modes."""
    if mode == "standard":
        return standard_table(k, quad)
    if mode == "multiwindow-exact":
        return multiwindow_table(k, quad, "exact")
    if mode == "multiwindow-paper":
        return multiwindow_table(k, quad, "paper")
    raise InvalidInputError(f"mode must be one of {SWEEP_MODES}, got {mode!r}")


def ch_curve_value(k: float, quad: AngleQuad = DEFAULT_QUAD, mode: str = "multiwindow-exact") -> float:
    """Scalar CH(k) for any curve mode, including the two-term and union laws."""
    if mode == "multiwindow-two-term":
        return ch_multiwindow_two_term(k, quad)
    if mode == "multiwindow-union":
        return ch_union(k, quad).ch
    return ch_value(table_for_mode(k, quad, mode)).ch


def ch_zero_crossing(
    quad: AngleQuad = DEFAULT_QUAD,
    mode: str = "multiwindow-exact",
    bracket: tuple[float, float] = (0.01, 100.0),
    rtol: float = 1e-12,
    scan_points: int = 241,
) -> float | None:
    """Locate the k where CH(k) changes sign, or None if it never does.

    A log-spaced scan over ``bracket`` finds a sign change first; bisection
    (robust, no derivatives) then refines it to relative tolerance ``rtol``.
    Modes whose CH keeps one sign on the bracket (the single-window curve,
    the union law, or a quad that never violates) yield None rather than an
    exception.
    """
    if mode not in CH_CURVE_MODES:
        raise InvalidInputError(f"mode must be one of {CH_CURVE_MODES}, got {mode!r}")
    lo, hi = bracket
    if not (0.0 < lo < hi and math.isfinite(hi)):
        raise InvalidInputError(f"bracket must satisfy 0 < lo < hi, got {bracket!r}")

    def f(k: float) -> float:
        return ch_curve_value(k, quad, mode)

    ks = np.geomspace(lo, hi, scan_points)
    values = np.array([f(k) for k in ks])
    signs = np.sign(values)
    if np.any(values == 0.0):
        return float(ks[np.nonzero(values == 0.0)[0][0]])
    change = np.nonzero(signs[:-1] * signs[1:] < 0)[0]
    if change.size == 0:
        return None
    i = int(change[0])
    return float(bisect(f, ks[i], ks[i + 1], rtol=rtol, xtol=1e-15))


@dataclass(frozen=True)
class SmallKReport:
    """Measured behavior of a CH curve at the dark end k -> 0+."""

    mode: str
    slope: float
    ch_at_zero: float


def small_k_expansion(
    mode: str = "multiwindow-exact",
    quad: AngleQuad = DEFAULT_QUAD,
    h0: float = 1e-2,
    levels: int = 8,
) -> SmallKReport:
    """Estimate d(CH)/dk at k -> 0+ by Richardson extrapolation.

    ``CH -> 0`` at the dark end in every mode (all detection probabilities
    vanish), so the slope is the limit of CH(h)/h over h0, h0/2, ...
    h0/2^levels, extrapolated with the standard Neville tableau;
    ``ch_at_zero`` is the same extrapolation applied to CH(h) itself (k = 0
    is outside the closed forms' domain and never evaluated directly).  The
    slope is measured, not assumed: all split-window laws give 4 at the
    default quad, the single-window curve gives 2.
    """
    if levels < 1:
        raise InvalidInputError("levels must be >= 1")
    hs = [h0 / 2.0**i for i in range(levels)]
    values = [ch_curve_value(h, quad, mode) for h in hs]

    def neville(seq: list[float]) -> float:
        t = list(seq)
        # Step-halving tableau: error terms are O(h), O(h^2), ...
        for j in range(1, len(seq)):
            factor = 2.0**j
            t = [
                (factor * t[i + 1] - t[i]) / (factor - 1.0)
                for i in range(len(t) - 1)
            ]
        return t[0]

    slope = neville([v / h for v, h in zip(values, hs)])
    ch_at_zero = neville(values)
    return SmallKReport(mode=mode, slope=slope, ch_at_zero=ch_at_zero)
