"""The 19 acoustic features, in canonical order.

Pitch-derived features (jitter, shimmer) consume a PitchTrack; all other
features operate on the whole normalized recording.  Spectral features use
a Welch power spectral density (Hann window, 1024 samples, 50% overlap by
default).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, fields

import numpy as np
from scipy.signal import welch, get_window

from .audio_io import AudioSignal, frame_signal
from .errors import UndefinedFeatureError
from .pitch import PitchConfig, PitchTrack

FEATURE_NAMES = (
    "maximum",
    "mean_frequency",
    "minimum",
    "shimmer_db",
    "log_entropy",
    "power_bandwidth_hz",
    "jitter_pct",
    "mean_energy",
    "rms",
    "std_dev",
    "variance",
    "amplitude_mean",
    "median",
    "skewness",
    "kurtosis",
    "shannon_entropy",
    "zcr",
    "sure_entropy",
    "iqr",
)


@dataclass(frozen=True)
class SpectralConfig:
    nperseg: int = 1024
    overlap: float = 0.5
    window: str = "hann"


@dataclass(frozen=True)
class FeatureConfig:
    pitch: PitchConfig = field(default_factory=PitchConfig)
    spectral: SpectralConfig = field(default_factory=SpectralConfig)
    sure_threshold: float = 0.2
    log_entropy_eps: float = 1e-12


@dataclass
class FeatureVector:
    maximum: float
    mean_frequency: float
    minimum: float
    shimmer_db: float
    log_entropy: float
    power_bandwidth_hz: float
    jitter_pct: float
    mean_energy: float
    rms: float
    std_dev: float
    variance: float
    amplitude_mean: float
    median: float
    skewness: float
    kurtosis: float
    shannon_entropy: float
    zcr: float
    sure_entropy: float
    iqr: float

    def as_array(self) -> np.ndarray:
        return np.array([getattr(self, name) for name in FEATURE_NAMES])

    @classmethod
    def from_array(cls, values: np.ndarray) -> "FeatureVector":
        if len(values) != len(FEATURE_NAMES):
            raise ValueError(f"expected {len(FEATURE_NAMES)} values, got {len(values)}")
        return cls(**{name: float(v) for name, v in zip(FEATURE_NAMES, values)})


# --- pitch-derived ---------------------------------------------------------

def jitter_seconds(track: PitchTrack) -> float:
    """Mean absolute difference of consecutive cycle periods, in seconds."""
    if len(track) < 2:
        raise UndefinedFeatureError(f"jitter needs >= 2 cycles, got {len(track)}")
    p = track.cycle_periods
    return float(np.mean(np.abs(np.diff(p))))


def jitter(track: PitchTrack) -> float:
    """Relative jitter: mean |P_i - P_{i+1}| over mean period, as a percentage."""
    return 100.0 * jitter_seconds(track) / float(np.mean(track.cycle_periods))


def shimmer(track: PitchTrack) -> float:
    """Mean |20 log10(V_{i+1}/V_i)| over consecutive cycle peaks, in dB."""
    if len(track) < 2:
        raise UndefinedFeatureError(f"shimmer needs >= 2 cycles, got {len(track)}")
    v = track.cycle_peaks
    if np.any(v <= 0.0):
        raise UndefinedFeatureError("shimmer undefined for non-positive cycle peaks")
    return float(np.mean(np.abs(20.0 * np.log10(v[1:] / v[:-1]))))


# --- time-domain -----------------------------------------------------------

def rms(signal: AudioSignal) -> float:
    x = signal.samples
    return float(np.sqrt(np.mean(x * x)))


def zcr(signal: AudioSignal) -> float:
    """Fraction of adjacent sample pairs with differing sign, sgn(0) = +1."""
    x = signal.samples
    if len(x) < 2:
        raise UndefinedFeatureError("zcr needs at least 2 samples")
    sgn = np.where(x >= 0.0, 1.0, -1.0)
    return float(np.mean(np.abs(sgn[1:] - sgn[:-1]) / 2.0))


def mean_energy(signal: AudioSignal, config: FeatureConfig | None = None) -> float:
    """Mean over analysis frames of per-frame average power (1/L) sum x^2.

    Falls back to a single whole-signal frame when the signal is shorter
    than one frame.
    """
    config = config or FeatureConfig()
    frames = frame_signal(signal, config.pitch.frame_ms, config.pitch.hop_ms)
    x = signal.samples
    if not frames:
        return float(np.mean(x * x))
    energies = [float(np.mean(f.slice(x) ** 2)) for f in frames]
    return float(np.mean(energies))


def descriptive_stats(signal: AudioSignal) -> dict[str, float]:
    """Order statistics and moments of the raw sample distribution.

    Variance uses the (n-1) divisor; skewness and kurtosis use population
    central moments (normal kurtosis ~ 3); quartiles by linear interpolation.
    """
    x = signal.samples
    if len(x) < 2:
        raise UndefinedFeatureError("descriptive stats need at least 2 samples")
    mean = float(np.mean(x))
    centered = x - mean
    m2 = float(np.mean(centered ** 2))
    m3 = float(np.mean(centered ** 3))
    m4 = float(np.mean(centered ** 4))
    if m2 > 0.0:
        skewness = m3 / m2 ** 1.5
        kurtosis = m4 / m2 ** 2
    else:
        skewness = 0.0
        kurtosis = 0.0
    variance = float(np.var(x, ddof=1))
    q1, q3 = np.quantile(x, [0.25, 0.75])
    return {
        "maximum": float(np.max(x)),
        "minimum": float(np.min(x)),
        "amplitude_mean": mean,
        "median": float(np.median(x)),
        "variance": variance,
        "std_dev": math.sqrt(variance),
        "skewness": skewness,
        "kurtosis": kurtosis,
        "iqr": float(q3 - q1),
    }


def log_entropy(signal: AudioSignal, eps: float = 1e-12) -> float:
    """Log-energy entropy: sum of log(x_i^2 + eps) over samples."""
    x = signal.samples
    return float(np.sum(np.log(x * x + eps)))


def sure_entropy(signal: AudioSignal, threshold: float = 0.2) -> float:
    """Threshold-SURE entropy: N - #{|x| <= t} + sum min(x^2, t^2)."""
    if threshold <= 0.0:
        raise ValueError("sure_entropy threshold must be positive")
    x = signal.samples
    n = len(x)
    below = int(np.count_nonzero(np.abs(x) <= threshold))
    return float(n - below + np.sum(np.minimum(x * x, threshold * threshold)))


# --- spectral --------------------------------------------------------------

def power_spectrum(signal: AudioSignal,
                   config: SpectralConfig | None = None) -> tuple[np.ndarray, np.ndarray]:
    """One-sided Welch PSD (frequencies in Hz, density scaling, no detrend)."""
    config = config or SpectralConfig()
    x = signal.samples
    nperseg = min(config.nperseg, len(x))
    noverlap = int(nperseg * config.overlap)
    win = get_window(config.window, nperseg)
    freqs, psd = welch(
        x, fs=signal.sample_rate, window=win, nperseg=nperseg,
        noverlap=noverlap, detrend=False, scaling="density",
    )
    return freqs, psd


def mean_frequency(signal: AudioSignal, config: SpectralConfig | None = None) -> float:
    """Power-weighted spectral centroid in Hz."""
    freqs, psd = power_spectrum(signal, config)
    total = float(np.sum(psd))
    if total <= 0.0:
        raise UndefinedFeatureError("mean_frequency undefined for zero-power signal")
    return float(np.sum(freqs * psd) / total)


def shannon_entropy(signal: AudioSignal, config: SpectralConfig | None = None) -> float:
    """Shannon entropy of the normalized PSD, scaled by log2(K) into [0, 1]."""
    _, psd = power_spectrum(signal, config)
    total = float(np.sum(psd))
    if total <= 0.0:
        raise UndefinedFeatureError("shannon_entropy undefined for zero-power signal")
    p = psd / total
    nz = p[p > 0.0]
    h = float(-np.sum(nz * np.log2(nz)))
    return h / math.log2(len(psd))


def power_bandwidth(signal: AudioSignal, config: SpectralConfig | None = None) -> float:
    """3 dB bandwidth: width of the contiguous band around the spectral peak
    where the PSD stays >= peak/2, edges by linear interpolation."""
    freqs, psd = power_spectrum(signal, config)
    total = float(np.sum(psd))
    if total <= 0.0:
        raise UndefinedFeatureError("power_bandwidth undefined for zero-power signal")
    k = int(np.argmax(psd))
    level = psd[k] / 2.0

    left = freqs[0]
    for i in range(k, 0, -1):
        if psd[i - 1] < level:
            frac = (psd[i] - level) / (psd[i] - psd[i - 1])
            left = freqs[i] - frac * (freqs[i] - freqs[i - 1])
            break

    right = freqs[-1]
    for i in range(k, len(psd) - 1):
        if psd[i + 1] < level:
            frac = (psd[i] - level) / (psd[i] - psd[i + 1])
            right = freqs[i] + frac * (freqs[i + 1] - freqs[i])
            break

    return float(right - left)


# --- the full vector -------------------------------------------------------

def extract_all(signal: AudioSignal, track: PitchTrack,
                config: FeatureConfig | None = None) -> FeatureVector:
    """Compute all 19 features; raises UndefinedFeatureError rather than
    imputing when jitter/shimmer or the spectrum are undefined."""
    config = config or FeatureConfig()
    stats = descriptive_stats(signal)
    vec = FeatureVector(
        maximum=stats["maximum"],
        mean_frequency=mean_frequency(signal, config.spectral),
        minimum=stats["minimum"],
        shimmer_db=shimmer(track),
        log_entropy=log_entropy(signal, config.log_entropy_eps),
        power_bandwidth_hz=power_bandwidth(signal, config.spectral),
        jitter_pct=jitter(track),
        mean_energy=mean_energy(signal, config),
        rms=rms(signal),
        std_dev=stats["std_dev"],
        variance=stats["variance"],
        amplitude_mean=stats["amplitude_mean"],
        median=stats["median"],
        skewness=stats["skewness"],
        kurtosis=stats["kurtosis"],
        shannon_entropy=shannon_entropy(signal, config.spectral),
        zcr=zcr(signal),
        sure_entropy=sure_entropy(signal, config.sure_threshold),
        iqr=stats["iqr"],
    )
    values = vec.as_array()
    if not np.all(np.isfinite(values)):
        bad = [n for n, v in zip(FEATURE_NAMES, values) if not np.isfinite(v)]
        raise UndefinedFeatureError(f"non-finite features {bad} for {signal.source_path!r}")
    return vec
