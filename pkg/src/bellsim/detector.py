"""Threshold detectors, window schemes, and the per-trial engine.

Detection is a Bernoulli event with probability ``p(I) = 1 - exp(-k*I)``
given the local intensity ``I``; ``k`` is the single dimensionless
sensitivity parameter.  A trial is one time window of a run:

* ``SINGLE`` window -- one source realization shared by Alice and Bob, one
  conditionally independent detection draw per side.

* ``HALVES`` -- the window is split in two; each half gets its own source
  realization and its own pair of detection draws.  Besides the per-half
  shot flags the trial reports two different coincidence flags:

  - ``any_coincidence``: the plain Boolean union, "Alice fired somewhere and
    Bob fired somewhere".  It can never exceed either single rate.
  - ``any_paired_coincidence``: coincidence counted per pairing channel.
    The four half-window pairings (1,1), (2,2), (1,2), (2,1) are treated as
    independently evaluated channels: the two same-half channels reuse that
    half's shot pair, while each cross-half channel is evaluated on fresh
    source realizations, so the no-coincidence probability factorizes
    exactly into (1-P_XY)^2 (1-P_X*P_Y)^2.  Counted this way, a pairing of
    shots in different halves is an accidental coincidence independent of
    everything else, which is what makes the split-window CH combination go
    negative at large k; the union flag, by contrast, defines a bona fide
    local model and never violates the inequality.

The two-half "at least one of two shots" bookkeeping also has a small closed
algebra over abstract per-half probabilities (p, q); see
:class:`HalfWindowParams`, :func:`multi_single_prob`,
:func:`multi_coincidence_prob` and :func:`gain`.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidInputError
from .source import FieldSample, intensities, sample_field

__all__ = [
    "DetectorParams",
    "HalfWindowParams",
    "TrialBatch",
    "TrialOutcome",
    "WindowScheme",
    "detect_prob",
    "gain",
    "multi_coincidence_prob",
    "multi_single_prob",
    "run_trial",
    "run_trials",
]


@dataclass(frozen=True)
class DetectorParams:
    """Detector sensitivity; detection probability is 1 - exp(-k*I)."""

    k: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.k) and self.k > 0.0):
            raise InvalidInputError(f"k must be finite and > 0, got {self.k!r}")


class WindowScheme(str, enum.Enum):
    """Counting window layout for one trial."""

    SINGLE = "single"
    HALVES = "halves"


def detect_prob(params: DetectorParams, intensity: float | np.ndarray) -> float | np.ndarray:
    """Detection probability 1 - exp(-k*I) for intensity I >= 0.

    Monotone in both k and I; 0 at I = 0; approaches 1 as k*I grows.
    """
    arr = np.asarray(intensity, dtype=float)
    if np.any(arr < 0.0) or not np.all(np.isfinite(arr)):
        raise InvalidInputError("intensity must be finite and >= 0")
    out = -np.expm1(-params.k * arr)
    if np.isscalar(intensity) or arr.ndim == 0:
        return float(out)
    return out


@dataclass(frozen=True)
class TrialOutcome:
    """Flags of a single trial.

    ``alice_shot``/``bob_shot`` hold the recorded per-half shots (second
    entry always False in the single-window scheme).  ``any_*`` are window
    totals; the two coincidence flavors are described in the module
    docstring.
    """

    alice_shot: tuple[bool, bool]
    bob_shot: tuple[bool, bool]
    any_alice: bool
    any_bob: bool
    any_coincidence: bool
    any_paired_coincidence: bool


@dataclass(frozen=True)
class TrialBatch:
    """Vectorized trial flags (one boolean array entry per trial)."""

    alice1: np.ndarray
    alice2: np.ndarray
    bob1: np.ndarray
    bob2: np.ndarray
    any_alice: np.ndarray
    any_bob: np.ndarray
    any_coincidence: np.ndarray
    any_paired_coincidence: np.ndarray

    @property
    def n(self) -> int:
        return self.alice1.size

    def counts(self) -> dict[str, int]:
        """Event totals over the batch, keyed like the report columns."""
        return {
            "any_alice": int(self.any_alice.sum()),
            "any_bob": int(self.any_bob.sum()),
            "any_coincidence": int(self.any_coincidence.sum()),
            "any_paired_coincidence": int(self.any_paired_coincidence.sum()),
        }


def _bernoulli(rng: np.random.Generator, prob: np.ndarray) -> np.ndarray:
    return rng.random(prob.shape) < prob


def run_trials(
    params: DetectorParams,
    scheme: WindowScheme,
    theta: float,
    phi: float,
    rng: np.random.Generator,
    n: int,
    phase_mode: str = "suppressed",
    suppress_second_shot: bool = False,
) -> TrialBatch:
    """Run ``n`` independent trials with a fixed draw order.

    Parameters
    ----------
    params, scheme:
        Detector sensitivity and window layout.
    theta, phi:
        Alice's and Bob's analyzer angles (radians).
    rng:
        Seeded generator; all randomness of the batch comes from it in a
        documented, scheme-dependent order, so equal generator states give
        bit-identical batches.
    n:
        Number of trials, >= 1.
    phase_mode:
        Passed to :func:`bellsim.source.intensities`.
    suppress_second_shot:
        Model a dead time longer than the window: a recorded first-half shot
        blanks the recorded second-half shot of the same detector.  Only the
        recorded per-half flags change; window totals and both coincidence
        flags are built from the underlying events and are bit-identical
        with the flag on or off (the "at least one" statistics are immune to
        dead time).

    Notes
    -----
    Draw order: single window samples one field batch then Alice/Bob
    uniforms.  Halves sample half-1 field, half-2 field, four shot uniform
    batches, then per cross channel a fresh field batch per side and its two
    uniform batches.
    """
    if n < 1:
        raise InvalidInputError(f"n must be >= 1, got {n}")
    scheme = WindowScheme(scheme)

    def shot_pair(sample: FieldSample) -> tuple[np.ndarray, np.ndarray]:
        pair = intensities(sample, theta, phi, phase_mode)
        a = _bernoulli(rng, detect_prob(params, pair.i_a))
        b = _bernoulli(rng, detect_prob(params, pair.i_b))
        return a, b

    if scheme is WindowScheme.SINGLE:
        a1, b1 = shot_pair(sample_field(rng, n))
        false = np.zeros(n, dtype=bool)
        coinc = a1 & b1
        return TrialBatch(
            alice1=a1, alice2=false, bob1=b1, bob2=false,
            any_alice=a1, any_bob=b1,
            any_coincidence=coinc, any_paired_coincidence=coinc,
        )

    s1 = sample_field(rng, n)
    s2 = sample_field(rng, n)
    i1 = intensities(s1, theta, phi, phase_mode)
    i2 = intensities(s2, theta, phi, phase_mode)
    a1 = _bernoulli(rng, detect_prob(params, i1.i_a))
    b1 = _bernoulli(rng, detect_prob(params, i1.i_b))
    a2 = _bernoulli(rng, detect_prob(params, i2.i_a))
    b2 = _bernoulli(rng, detect_prob(params, i2.i_b))

    # Cross-half pairing channels, each on fresh realizations: Alice's side
    # of channel (1,2), Bob's side of channel (1,2), then channel (2,1).
    def cross_channel() -> np.ndarray:
        ia = intensities(sample_field(rng, n), theta, phi, phase_mode).i_a
        ib = intensities(sample_field(rng, n), theta, phi, phase_mode).i_b
        ca = _bernoulli(rng, detect_prob(params, ia))
        cb = _bernoulli(rng, detect_prob(params, ib))
        return ca & cb

    c12 = cross_channel()
    c21 = cross_channel()

    any_alice = a1 | a2
    any_bob = b1 | b2
    union = any_alice & any_bob
    paired = (a1 & b1) | (a2 & b2) | c12 | c21

    rec_a2, rec_b2 = a2, b2
    if suppress_second_shot:
        rec_a2 = a2 & ~a1
        rec_b2 = b2 & ~b1
    return TrialBatch(
        alice1=a1, alice2=rec_a2, bob1=b1, bob2=rec_b2,
        any_alice=any_alice, any_bob=any_bob,
        any_coincidence=union, any_paired_coincidence=paired,
    )


def run_trial(
    params: DetectorParams,
    scheme: WindowScheme,
    theta: float,
    phi: float,
    rng: np.random.Generator,
    phase_mode: str = "suppressed",
    suppress_second_shot: bool = False,
) -> TrialOutcome:
    """Run one trial; scalar view of :func:`run_trials` (same draw order)."""
    batch = run_trials(
        params, scheme, theta, phi, rng, 1,
        phase_mode=phase_mode, suppress_second_shot=suppress_second_shot,
    )
    return TrialOutcome(
        alice_shot=(bool(batch.alice1[0]), bool(batch.alice2[0])),
        bob_shot=(bool(batch.bob1[0]), bool(batch.bob2[0])),
        any_alice=bool(batch.any_alice[0]),
        any_bob=bool(batch.any_bob[0]),
        any_coincidence=bool(batch.any_coincidence[0]),
        any_paired_coincidence=bool(batch.any_paired_coincidence[0]),
    )


@dataclass(frozen=True)
class HalfWindowParams:
    """Abstract per-half probabilities of the split-window algebra.

    ``p`` is the probability of a shot in one half-window; ``q`` the
    conditional probability of the partner's shot in the same half given the
    first shot (q >= p captures positive intensity correlation; q = p is
    the independent case).
    """

    p: float
    q: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.p) and math.isfinite(self.q)):
            raise InvalidInputError("p and q must be finite")
        if not 0.0 <= self.p <= self.q <= 1.0:
            raise InvalidInputError(
                f"need 0 <= p <= q <= 1, got p={self.p!r}, q={self.q!r}"
            )


def multi_single_prob(p: float) -> float:
    """Probability of at least one shot in two halves: 1 - (1-p)^2."""
    if not (math.isfinite(p) and 0.0 <= p <= 1.0):
        raise InvalidInputError(f"p must lie in [0, 1], got {p!r}")
    return 1.0 - (1.0 - p) ** 2


def multi_coincidence_prob(hw: HalfWindowParams) -> float:
    """Coincidence probability under independent pairing channels.

    The same-half channels each fire with probability p*q, the cross-half
    ones with p*p; treating the four channels as independent gives
    ``1 - (1 - p^2)^2 (1 - p*q)^2``.
    """
    return 1.0 - (1.0 - hw.p * hw.p) ** 2 * (1.0 - hw.p * hw.q) ** 2


def gain(hw: HalfWindowParams) -> float:
    """Split-window coincidence rate conditioned on a single, minus q.

    ``multi_coincidence_prob / multi_single_prob - q`` measures how much the
    split-window bookkeeping inflates the apparent conditional detection
    probability over the true per-half value q.  Non-negative on the whole
    domain, and zero only at p = q = 1.
    """
    if hw.p == 0.0:
        raise InvalidInputError("gain is undefined at p = 0 (no singles)")
    return multi_coincidence_prob(hw) / multi_single_prob(hw.p) - hw.q
