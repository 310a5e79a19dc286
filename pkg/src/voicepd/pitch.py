"""Autocorrelation pitch tracking and glottal-cycle segmentation.

Per frame, the fundamental period is the lag maximizing the normalized
autocorrelation inside [1/f0_max, 1/f0_min]; frames whose peak falls below
the voicing threshold are unvoiced.  Within voiced runs, cycle anchors are
placed at successive waveform maxima roughly one period apart, giving the
per-cycle periods P_i and peak amplitudes V_i that jitter and shimmer use.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .audio_io import AudioSignal, frame_signal
from .errors import ConfigError


@dataclass(frozen=True)
class PitchConfig:
    frame_ms: float = 40.0
    hop_ms: float = 10.0
    f0_min: float = 60.0
    f0_max: float = 500.0
    voicing_threshold: float = 0.30


@dataclass(frozen=True)
class PitchEstimate:
    frame_index: int
    period_s: float | None  # None when unvoiced
    voicing_score: float

    @property
    def voiced(self) -> bool:
        return self.period_s is not None


@dataclass
class PitchTrack:
    """Per-cycle periods and peak amplitudes over the voiced parts of a signal."""

    cycle_periods: np.ndarray  # seconds
    cycle_peaks: np.ndarray    # normalized amplitude
    f0_range: tuple[float, float] = (60.0, 500.0)

    def __post_init__(self):
        self.cycle_periods = np.asarray(self.cycle_periods, dtype=np.float64)
        self.cycle_peaks = np.asarray(self.cycle_peaks, dtype=np.float64)
        if len(self.cycle_periods) != len(self.cycle_peaks):
            raise ValueError("cycle_periods and cycle_peaks must have equal length")

    def __len__(self) -> int:
        return len(self.cycle_periods)


def _normalized_acf(x: np.ndarray, max_lag: int) -> np.ndarray:
    """Raw autocorrelation sums r(0..max_lag), normalized by r(0)."""
    n = len(x)
    nfft = 1
    while nfft < 2 * n:
        nfft *= 2
    spec = np.fft.rfft(x, nfft)
    acf = np.fft.irfft(spec * np.conj(spec), nfft)[: max_lag + 1]
    if acf[0] <= 0.0:
        return np.zeros(max_lag + 1)
    return acf / acf[0]


def estimate_pitch(frame_samples: np.ndarray, sample_rate: int,
                   config: PitchConfig, frame_index: int = 0) -> PitchEstimate:
    """Single-frame period estimate via the normalized autocorrelation peak."""
    if config.f0_min >= config.f0_max:
        raise ConfigError(f"f0_min {config.f0_min} must be < f0_max {config.f0_max}")
    lag_min = max(int(np.ceil(sample_rate / config.f0_max)), 1)
    lag_max = int(np.floor(sample_rate / config.f0_min))
    if lag_max >= len(frame_samples):
        raise ConfigError(
            f"lag range up to {lag_max} exceeds frame length {len(frame_samples)}"
        )
    upper = min(lag_max + 1, len(frame_samples) - 1)
    acf = _normalized_acf(np.asarray(frame_samples, dtype=np.float64), upper)
    if upper == lag_max:
        acf = np.concatenate([acf, [-np.inf]])
    # restrict to local maxima so the decaying near-zero-lag edge never wins
    lags = np.arange(lag_min, lag_max + 1)
    vals = acf[lag_min:lag_max + 1]
    is_peak = (vals >= acf[lags - 1]) & (vals >= acf[lags + 1])
    if not np.any(is_peak):
        score = float(np.max(vals)) if len(vals) else 0.0
        return PitchEstimate(frame_index=frame_index, period_s=None, voicing_score=max(score, 0.0))
    peak_vals = np.where(is_peak, vals, -np.inf)
    best = int(np.argmax(peak_vals))
    score = float(vals[best])
    if score < config.voicing_threshold:
        return PitchEstimate(frame_index=frame_index, period_s=None, voicing_score=max(score, 0.0))
    period_s = (lag_min + best) / sample_rate
    return PitchEstimate(frame_index=frame_index, period_s=period_s, voicing_score=score)


def track_pitch(signal: AudioSignal, config: PitchConfig) -> list[PitchEstimate]:
    """Frame the signal and estimate the pitch of every frame."""
    frames = frame_signal(signal, config.frame_ms, config.hop_ms)
    return [
        estimate_pitch(f.slice(signal.samples), signal.sample_rate, config, frame_index=i)
        for i, f in enumerate(frames)
    ]


def _median_smooth_runs(periods: list[float | None]) -> list[float | None]:
    """Width-3 median filter applied within each voiced run (edges replicated)."""
    out: list[float | None] = list(periods)
    n = len(periods)
    i = 0
    while i < n:
        if periods[i] is None:
            i += 1
            continue
        j = i
        while j < n and periods[j] is not None:
            j += 1
        run = periods[i:j]
        if len(run) >= 3:
            padded = [run[0]] + run + [run[-1]]
            out[i:j] = [
                float(np.median(padded[k:k + 3])) for k in range(len(run))
            ]
        i = j
    return out


def segment_cycles(signal: AudioSignal, estimates: list[PitchEstimate],
                   config: PitchConfig) -> PitchTrack:
    """Place cycle anchors at waveform maxima within each voiced run.

    Anchors are spaced within +-25% of the local (median-smoothed) period.
    P_i is the spacing between consecutive anchors; V_i is max |sample|
    inside cycle i.  Fully unvoiced input yields an empty track.
    """
    x = signal.samples
    fs = signal.sample_rate
    hop = max(int(round(config.hop_ms * fs / 1000.0)), 1)
    frame_len = max(int(round(config.frame_ms * fs / 1000.0)), 1)
    n = len(x)

    raw = [e.period_s for e in estimates]
    periods = _median_smooth_runs(raw)

    all_periods: list[float] = []
    all_peaks: list[float] = []

    i = 0
    m = len(periods)
    while i < m:
        if periods[i] is None:
            i += 1
            continue
        j = i
        while j < m and periods[j] is not None:
            j += 1
        # voiced run covers frames i..j-1
        start = i * hop
        end = min((j - 1) * hop + frame_len, n)
        p0 = periods[i] * fs
        w_end = min(start + int(p0) + 1, end)
        if w_end <= start:
            i = j
            continue
        anchor = start + int(np.argmax(x[start:w_end]))
        anchors = [anchor]
        while True:
            fi = min(max(anchor // hop, i), j - 1)
            p = periods[fi] * fs
            lo = anchor + int(0.75 * p)
            hi = anchor + int(1.25 * p) + 1
            if hi > end:  # truncated search window: stop rather than grab a tail sample
                break
            anchor = lo + int(np.argmax(x[lo:hi]))
            anchors.append(anchor)
        for a, b in zip(anchors[:-1], anchors[1:]):
            peak = float(np.max(np.abs(x[a:b])))
            if peak > 0.0:
                all_periods.append((b - a) / fs)
                all_peaks.append(peak)
        i = j

    return PitchTrack(
        cycle_periods=np.array(all_periods),
        cycle_peaks=np.array(all_peaks),
        f0_range=(config.f0_min, config.f0_max),
    )


def analyze_pitch(signal: AudioSignal, config: PitchConfig | None = None) -> PitchTrack:
    """Convenience wrapper: frame, estimate, smooth, segment."""
    config = config or PitchConfig()
    return segment_cycles(signal, track_pitch(signal, config), config)
