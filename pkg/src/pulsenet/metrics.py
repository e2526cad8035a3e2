"""Pulse-shape measurements on sampled waveforms.

Level crossings are located by walking outward from the peak and
linearly interpolating between the two bracketing samples.  Crossing
positions are computed in index space and only converted to seconds at
the end; that keeps the width purely a function of the sample values,
so rescaling the amplitude or shifting the time axis cannot perturb it
through floating-point re-association.

Every routine assumes one dominant positive pulse; violations raise
:class:`~pulsenet.errors.MetricsError` instead of returning garbage.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .errors import MetricsError
from .waveform import Waveform


@dataclass(frozen=True)
class PulseMetrics:
    """Geometry of a single pulse.

    ``half_crossings`` holds the rising and falling half-maximum times;
    ``fwhm`` is their difference; ``t_peak`` the time of the maximum
    sample (the earliest, if the maximum is attained more than once).
    ``baseline`` is the reference level the half maximum was measured
    against (zero for baseline-subtracted input).
    """

    baseline: float
    peak: float
    t_peak: float
    fwhm: float
    half_crossings: tuple[float, float]


def fwhm(wave: Waveform, baseline: float = 0.0) -> PulseMetrics:
    """Full width at half maximum of the dominant pulse.

    The half level is ``baseline + (peak - baseline) / 2`` (so plain
    ``peak / 2`` for the usual baseline-subtracted input).  Crossings
    are searched outward from the peak, which makes the width immune to
    ringing or secondary bumps beyond the half-maximum points.
    """
    s = wave.samples
    peak = float(np.max(s))
    if not peak > baseline:
        raise MetricsError(
            f"peak {peak:g} does not rise above the baseline {baseline:g}")
    maxima = np.flatnonzero(s == peak)
    runs = int(np.count_nonzero(np.diff(maxima) > 1)) + 1
    if runs > 1:
        warnings.warn(
            f"waveform attains its maximum in {runs} separate places; "
            "using the earliest", stacklevel=2)
    i_pk = int(maxima[0])
    half = baseline + 0.5 * (peak - baseline)

    lo = i_pk
    while lo > 0 and s[lo - 1] > half:
        lo -= 1
    if lo == 0:
        raise MetricsError("no half-maximum crossing before the peak "
                           "(pulse clipped at the start?)")
    # bracketing pair: s[lo-1] <= half < s[lo]
    rise_index = (lo - 1) + (half - s[lo - 1]) / (s[lo] - s[lo - 1])

    hi = i_pk
    last = len(s) - 1
    while hi < last and s[hi + 1] > half:
        hi += 1
    if hi == last:
        raise MetricsError("no half-maximum crossing after the peak "
                           "(pulse clipped at the end?)")
    # bracketing pair: s[hi+1] <= half < s[hi]
    fall_index = hi + (s[hi] - half) / (s[hi] - s[hi + 1])

    t_rise = wave.t0 + wave.dt * rise_index
    t_fall = wave.t0 + wave.dt * fall_index
    return PulseMetrics(baseline=baseline, peak=peak,
                        t_peak=wave.t0 + wave.dt * i_pk,
                        fwhm=wave.dt * (fall_index - rise_index),
                        half_crossings=(t_rise, t_fall))


def baseline_subtract(wave: Waveform, window: tuple[float, float]) -> Waveform:
    """Remove the mean over a quiet pre-pulse window from every sample.

    The window is given in seconds and must lie inside the waveform
    span with at least 8 samples.  If the window fluctuates more than
    ten times as much (in variance) as the same-length stretch next to
    it, it very likely contains the pulse itself; the subtraction still
    happens but a warning flags the suspect window.
    """
    t_start, t_stop = window
    if t_stop <= t_start:
        raise MetricsError(f"empty baseline window [{t_start:g}, {t_stop:g}] s")
    tol = 0.5 * wave.dt
    if t_start < wave.t0 - tol or t_stop > wave.t_end + tol:
        raise MetricsError(
            f"baseline window [{t_start:g}, {t_stop:g}] s outside the "
            f"waveform span [{wave.t0:g}, {wave.t_end:g}] s")
    quiet = wave.slice_time(t_start, t_stop)
    if len(quiet) < 8:
        raise MetricsError(
            f"baseline window holds only {len(quiet)} samples; need >= 8")
    # assumed-mean accumulation: exact for a constant window and one
    # rounding better than a direct mean for a nearly constant one
    base = float(quiet.samples[0])
    mean = base + float(np.mean(quiet.samples - base))

    span = t_stop - t_start
    adjacent = None
    if t_stop + span <= wave.t_end + tol:
        adjacent = wave.slice_time(t_stop, t_stop + span)
    elif t_start - span >= wave.t0 - tol:
        adjacent = wave.slice_time(t_start - span, t_start)
    if adjacent is not None:
        v_win = float(np.var(quiet.samples))
        v_adj = float(np.var(adjacent.samples))
        if v_win > 10.0 * v_adj:
            warnings.warn(
                f"baseline window variance {v_win:.3g} exceeds 10x the "
                f"adjacent stretch ({v_adj:.3g}); the window looks like it "
                "contains signal", stacklevel=2)
    return wave.with_samples(wave.samples - mean)


def _rising_crossing(wave: Waveform, level: float, which: str) -> float:
    s = wave.samples
    for k in range(len(s) - 1):
        if s[k] < level <= s[k + 1]:
            frac = (level - s[k]) / (s[k + 1] - s[k])
            return wave.t0 + wave.dt * (k + frac)
    raise MetricsError(
        f"{which} waveform never rises through level {level:g} "
        f"(range {s.min():g} to {s.max():g})")


def delay_at_level(first: Waveform, second: Waveform, level: float) -> float:
    """Offset between the first rising crossings of ``level``.

    Positive when ``second`` crosses later.  The level is in raw
    waveform units; no normalization is applied here.
    """
    return _rising_crossing(second, level, "second") \
        - _rising_crossing(first, level, "first")


def zero_outside_window(wave: Waveform, half_width: float,
                        center: float | None = None) -> Waveform:
    """Zero every sample outside ``[center - half_width, center + half_width]``.

    Crude but effective suppression of parasitic ringing away from the
    pulse; ``center`` defaults to the time of the maximum sample.
    """
    if not half_width > 0:
        raise MetricsError(f"half_width must be > 0 s, got {half_width}")
    if center is None:
        center = wave.t0 + wave.dt * int(np.argmax(wave.samples))
    t = wave.times()
    keep = np.abs(t - center) <= half_width
    if not np.any(keep):
        raise MetricsError("window keeps no samples")
    return wave.with_samples(np.where(keep, wave.samples, 0.0))


def normalize_align(first: Waveform, second: Waveform
                    ) -> tuple[Waveform, Waveform]:
    """Scale both pulses to unit peak and align the second peak time to
    the first.

    Both inputs must be baseline-subtracted with positive peaks.  The
    second waveform is shifted by whole samples where the peak offset
    allows, with sub-sample linear interpolation otherwise, and both
    outputs cover the overlapping span on the first waveform's grid.
    Each output is scaled by its own maximum over that span, so
    applying the function to its own output changes nothing.
    """
    prepared = []
    for which, w in (("first", first), ("second", second)):
        pk = float(np.max(w.samples))
        if not pk > 0:
            raise MetricsError(f"{which} waveform has no positive peak")
        prepared.append((w, float(w.times()[int(np.argmax(w.samples))])))
    (w1, tp1), (w2, tp2) = prepared
    shift = tp1 - tp2  # imposed delay of the second waveform

    if abs(w1.dt - w2.dt) <= 1e-12 * w1.dt:
        dt = w1.dt
        # fractional index of w2 feeding output index i is i + q
        q = (w1.t0 - w2.t0 - shift) / dt
        kq = round(q)
        fq = q - kq
        if abs(fq) < 1e-9:
            fq = 0.0
        n1, n2 = len(w1), len(w2)
        if fq == 0.0:
            i_min, i_max = -kq, n2 - 1 - kq
        elif fq > 0.0:
            i_min, i_max = -kq, n2 - 2 - kq
        else:
            i_min, i_max = 1 - kq, n2 - 1 - kq
        a = max(0, i_min)
        b = min(n1 - 1, i_max)
        if b - a + 1 < 2:
            raise MetricsError("waveforms do not overlap after alignment")
        s1 = w1.samples[a:b + 1]
        idx = np.arange(a + kq, b + kq + 1)
        if fq == 0.0:
            s2 = w2.samples[idx]
        elif fq > 0.0:
            s2 = (1.0 - fq) * w2.samples[idx] + fq * w2.samples[idx + 1]
        else:
            g = 1.0 + fq
            s2 = (1.0 - g) * w2.samples[idx - 1] + g * w2.samples[idx]
        t_start = w1.t0 + a * dt
    else:
        # different grids: plain resampling of the second onto the first
        lo_t = max(w1.t0, w2.t0 + shift)
        hi_t = min(w1.t_end, w2.t_end + shift)
        a = int(np.ceil((lo_t - w1.t0) / w1.dt - 1e-9))
        b = int(np.floor((hi_t - w1.t0) / w1.dt + 1e-9))
        if b - a + 1 < 2:
            raise MetricsError("waveforms do not overlap after alignment")
        tgrid = w1.t0 + w1.dt * np.arange(a, b + 1)
        s1 = w1.samples[a:b + 1]
        s2 = np.interp(tgrid - shift, w2.times(), w2.samples)
        t_start = float(tgrid[0])

    m1 = float(np.max(s1))
    m2 = float(np.max(s2))
    if not (m1 > 0 and m2 > 0):
        raise MetricsError("aligned overlap lost the pulse of one waveform")
    return (Waveform(t_start, w1.dt, s1 / m1, w1.unit),
            Waveform(t_start, w1.dt, s2 / m2, w2.unit))
