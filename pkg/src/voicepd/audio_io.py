"""WAV decoding, dataset manifests, and analysis framing.

Decoded audio is always mono float64, scaled by the integer full-scale
value and then peak-normalized so max |sample| = 1 (all-zero signals are
left as is).  Amplitude-scale features downstream are therefore relative
to the recording's own peak.
"""

from __future__ import annotations

import os
import wave
import logging
from dataclasses import dataclass, field

import numpy as np

from .errors import AudioDecodeError, ManifestError

log = logging.getLogger(__name__)

VALID_LABELS = (0, 1, 2)

# full-scale values per sample width in bytes
_FULL_SCALE = {2: 32768.0, 3: 8388608.0}


@dataclass
class AudioSignal:
    """Normalized mono waveform."""

    samples: np.ndarray
    sample_rate: int
    source_path: str = ""

    def __post_init__(self):
        self.samples = np.asarray(self.samples, dtype=np.float64)
        if self.samples.size == 0:
            raise AudioDecodeError(f"zero-length audio: {self.source_path!r}")
        if not np.all(np.isfinite(self.samples)):
            raise AudioDecodeError(f"non-finite samples: {self.source_path!r}")
        if self.sample_rate <= 0:
            raise AudioDecodeError(f"sample_rate must be positive, got {self.sample_rate}")
        if np.max(np.abs(self.samples)) > 1.0 + 1e-9:
            raise AudioDecodeError(f"samples exceed [-1, 1]: {self.source_path!r}")

    @property
    def duration_s(self) -> float:
        return len(self.samples) / self.sample_rate


@dataclass(frozen=True)
class Frame:
    """One analysis window into a signal."""

    start_index: int
    length: int
    hop: int

    def slice(self, samples: np.ndarray) -> np.ndarray:
        return samples[self.start_index:self.start_index + self.length]


@dataclass(frozen=True)
class ManifestEntry:
    path: str
    label: int


def peak_normalize(samples: np.ndarray) -> np.ndarray:
    """Scale so max |sample| = 1; identity for all-zero input. Idempotent."""
    peak = np.max(np.abs(samples))
    if peak == 0.0:
        return samples
    return samples / peak


def load_wav(path: str) -> AudioSignal:
    """Decode a PCM 16/24-bit mono or stereo WAV into an AudioSignal.

    Stereo is downmixed by per-sample channel average before normalization.
    """
    if not os.path.isfile(path):
        raise AudioDecodeError(f"file not found: {path!r}")
    try:
        with wave.open(path, "rb") as wf:
            n_channels = wf.getnchannels()
            sampwidth = wf.getsampwidth()
            sample_rate = wf.getframerate()
            n_frames = wf.getnframes()
            raw = wf.readframes(n_frames)
    except wave.Error as exc:
        raise AudioDecodeError(f"not a decodable PCM WAV file: {path!r} ({exc})") from exc
    except EOFError as exc:
        raise AudioDecodeError(f"truncated WAV file: {path!r}") from exc

    if sampwidth not in _FULL_SCALE:
        raise AudioDecodeError(
            f"unsupported bit depth {8 * sampwidth} in {path!r} (need 16 or 24)"
        )
    if n_channels not in (1, 2):
        raise AudioDecodeError(f"unsupported channel count {n_channels} in {path!r}")
    if n_frames == 0:
        raise AudioDecodeError(f"zero-length audio: {path!r}")
    if len(raw) < n_frames * n_channels * sampwidth:
        raise AudioDecodeError(f"truncated data chunk in {path!r}")

    if sampwidth == 2:
        ints = np.frombuffer(raw, dtype="<i2").astype(np.float64)
    else:
        b = np.frombuffer(raw, dtype=np.uint8).reshape(-1, 3)
        ints = (
            b[:, 0].astype(np.int32)
            | (b[:, 1].astype(np.int32) << 8)
            | (b[:, 2].astype(np.int32) << 16)
        )
        ints = np.where(ints >= 1 << 23, ints - (1 << 24), ints).astype(np.float64)

    samples = ints / _FULL_SCALE[sampwidth]
    if n_channels == 2:
        samples = samples.reshape(-1, 2).mean(axis=1)
    samples = peak_normalize(samples)
    return AudioSignal(samples=samples, sample_rate=sample_rate, source_path=path)


def save_wav(signal: AudioSignal, path: str) -> None:
    """Write a signal as 16-bit PCM mono WAV."""
    clipped = np.clip(signal.samples, -1.0, 1.0)
    ints = np.round(clipped * 32767.0).astype("<i2")
    with wave.open(path, "wb") as wf:
        wf.setnchannels(1)
        wf.setsampwidth(2)
        wf.setframerate(signal.sample_rate)
        wf.writeframes(ints.tobytes())


def load_manifest(path: str) -> list[ManifestEntry]:
    """Read a `path,label` manifest, header line optional."""
    if not os.path.isfile(path):
        raise ManifestError(f"manifest not found: {path!r}")
    entries: list[ManifestEntry] = []
    seen: set[str] = set()
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            parts = line.split(",")
            if len(parts) != 2:
                raise ManifestError(f"line {lineno}: expected `path,label`, got {line!r}")
            wav_path, label_text = parts[0].strip(), parts[1].strip()
            try:
                label = int(label_text)
            except ValueError:
                if lineno == 1:
                    continue  # header row
                raise ManifestError(
                    f"line {lineno}: label {label_text!r} is not an integer"
                ) from None
            if label not in VALID_LABELS:
                raise ManifestError(
                    f"line {lineno}: label {label} outside {{0, 1, 2}} for {wav_path!r}"
                )
            if wav_path in seen:
                log.warning("manifest %s line %d: duplicate path %r (kept)", path, lineno, wav_path)
            seen.add(wav_path)
            entries.append(ManifestEntry(path=wav_path, label=label))
    return entries


def class_counts(entries: list[ManifestEntry]) -> dict[int, int]:
    counts = {c: 0 for c in VALID_LABELS}
    for e in entries:
        counts[e.label] += 1
    return counts


def frame_signal(signal: AudioSignal, frame_ms: float, hop_ms: float) -> list[Frame]:
    """Tile the signal with fixed-size frames; a short trailing frame is dropped."""
    if frame_ms <= 0 or hop_ms <= 0:
        raise ValueError("frame_ms and hop_ms must be positive")
    n = len(signal.samples)
    length = int(round(frame_ms * signal.sample_rate / 1000.0))
    hop = int(round(hop_ms * signal.sample_rate / 1000.0))
    length = max(length, 1)
    hop = max(hop, 1)
    if length > n:
        return []
    count = (n - length) // hop + 1
    return [Frame(start_index=i * hop, length=length, hop=hop) for i in range(count)]
