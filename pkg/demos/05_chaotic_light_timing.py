"""Timing side of the story: bunched events from a shared waveform.

Two detectors watching the same fluctuating intensity fire in bursts
together; two detectors watching independent constant-rate sources do not.
This script builds the three-wave intensity profile, samples event streams
by thinning an inhomogeneous Poisson process, and compares nearest-event
delays and windowed coincidence counts for the two cases.
"""

import math

import numpy as np

from bellsim import (
    delay_statistics,
    harmonic_expansion,
    intensity_stats,
    sample_events,
    sample_homogeneous_events,
    three_wave,
    windowed_coincidences,
)

rng = np.random.Generator(np.random.Philox(np.random.SeedSequence(5)))

print("=== The three-wave intensity profile ===")
w = three_wave(omega=2 * math.pi)  # period T = 1
stats = intensity_stats(w)
print(f"I(t) = |cos - 2cos2 + cos3|^2 scaled to period T = {w.period:.0f}")
print(f"mean intensity       = {stats.mean:.6f} |A|^2")
print(f"peak intensity       = {stats.maximum:.6f} |A|^2  "
      f"at t/T = {stats.argmax_times[0]:.3f}")
print(f"peak-to-mean         = {stats.peak_to_mean:.4f}")
print(f"peak-to-mean squared = {stats.peak_to_mean_squared:.2f}  "
      "(what a coincidence rate sees)")
print()
print("harmonic content of the intensity (DC + cosines):")
e = harmonic_expansion(w)
print(f"  a0 = {e.a0:.3f}; " + ", ".join(f"a{m} = {a:+.2f}" for m, a in e.terms))
if stats.note:
    print(f"note: {stats.note}")

SPAN = 4000.0
RATE = 10.0  # mean events per period, per stream

print()
print(f"=== Event streams ({SPAN:.0f} periods, ~{RATE:.0f} events/period) ===")
shared_a = sample_events(w, span=SPAN, rate_scale=RATE / stats.mean, rng=rng)
shared_b = sample_events(w, span=SPAN, rate_scale=RATE / stats.mean, rng=rng)
indep_a = sample_homogeneous_events(rate=RATE, span=SPAN, rng=rng)
indep_b = sample_homogeneous_events(rate=RATE, span=SPAN, rng=rng)
print(f"shared-waveform pair: {shared_a.n:,} / {shared_b.n:,} events")
print(f"independent pair:     {indep_a.n:,} / {indep_b.n:,} events")

print()
print("=== Nearest-event delays ===")
ds = delay_statistics(shared_a, shared_b, bins=13, histogram_range=(-0.325, 0.325))
di = delay_statistics(indep_a, indep_b, bins=13, histogram_range=(-0.325, 0.325))
print(f"median |delay|, shared      = {ds.median_abs_delay:.4f} T")
print(f"median |delay|, independent = {di.median_abs_delay:.4f} T  "
      f"(exact law: ln2/(2*rate*T) = {math.log(2) / (2 * RATE):.4f} T)")
print(f"ratio shared/independent    = "
      f"{ds.median_abs_delay / di.median_abs_delay:.3f}")
print()
print("delay histogram (each * ~ 2% of shared-pair events):")
scale = ds.counts.sum() * 0.02
for (left, right, c_s, c_i) in zip(ds.bin_edges[:-1], ds.bin_edges[1:],
                                   ds.counts, di.counts):
    bar = "*" * int(round(c_s / scale))
    print(f"  [{left:+.3f}, {right:+.3f})  shared {c_s:>6}  "
          f"indep {c_i:>6}  {bar}")
print("both distributions peak at zero (a nearest partner is always close),")
print("but the shared pair's peak is far taller and narrower: bursts align.")

print()
print("=== Windowed coincidences ===")
print(f"{'window/T':>9} | {'shared':>8} | {'independent':>11} | ratio")
print("-" * 45)
for window in (0.02, 0.05, 0.1, 0.2, 0.5, 1.0):
    cs = windowed_coincidences(shared_a, shared_b, window=window)
    ci = windowed_coincidences(indep_a, indep_b, window=window)
    ratio = cs / ci if ci else float("inf")
    print(f"{window:>9.2f} | {cs:>8,} | {ci:>11,} | {ratio:5.2f}")
print()
print("Tight windows favour the shared source by a large factor -- these")
print("are the 'fair' coincidences driven by the common fluctuation.  As")
print("the window widens past the burst width, accidental pairings take")
print("over and the two cases converge.")
