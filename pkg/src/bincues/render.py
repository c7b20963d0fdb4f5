"""Binauralization of mono sources.

Applies the rig's model ITD as a true fractional delay and its model ILD as
a zero-phase shadow filter, producing headphone-ready stereo. This supplies
exactly what a pan pot lacks: the time-of-arrival difference, and with it
the phase difference, emerges from the real delay rather than being
synthesized separately.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ValidationError
from .rigsim import (RigKind, RigSpec, SourceSpec, _apply_zero_phase, _cardioid_gains,
                     human_head, predicted_itd, shadow_filter_kernel)
from .signals import DEFAULT_SAMPLE_RATE, SampleBuffer, StereoBuffer, apply_fractional_delay

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class RenderSpec:
    """How to place one source: rig, signed azimuth, temperature, output gain.

    Azimuth covers the frontal hemisphere only: -pi/2..+pi/2, negative to the
    right. Gain is attenuation-only (<= 0 dB) to preserve headroom.
    """

    rig: RigSpec = field(default_factory=human_head)
    azimuth_rad: float = 0.0
    temperature_c: float = 20.0
    gain_db: float = 0.0

    def __post_init__(self) -> None:
        if not abs(self.azimuth_rad) <= math.pi / 2:
            raise ValidationError(
                f"azimuth must lie in [-pi/2, pi/2] (rear hemisphere unsupported), got {self.azimuth_rad}"
            )
        if self.gain_db > 0:
            raise ValidationError(f"gain_db must be <= 0, got {self.gain_db}")


def _far_channel(rig: RigSpec, azimuth: float, temperature_c: float,
                 signal: SampleBuffer) -> np.ndarray:
    itd = predicted_itd(rig, SourceSpec(azimuth_rad=azimuth), temperature_c)
    delayed = apply_fractional_delay(signal, itd)
    if rig.kind is RigKind.ORTF:
        g_near, g_far = _cardioid_gains(rig.capsule_angle_deg, azimuth)
        return (g_far / g_near) * delayed.samples
    kernel = shadow_filter_kernel(rig.shadow, azimuth, signal.sample_rate)
    return _apply_zero_phase(delayed.samples, kernel)


def binauralize(signal: SampleBuffer, spec: RenderSpec) -> StereoBuffer:
    """Render a mono source at the spec's azimuth.

    The near ear gets the dry signal, the far ear the delayed and shadowed
    one; a negative azimuth mirrors the channels sample-exactly. If the
    result would peak above 1.0 after gain, both channels are scaled down
    together so the interaural cues survive intact.
    """
    if len(signal) == 0:
        raise ValidationError("signal is empty")
    gain = 10.0 ** (spec.gain_db / 20.0)
    sr = signal.sample_rate

    if spec.azimuth_rad == 0.0:
        mono = gain * signal.samples
        return StereoBuffer(SampleBuffer(mono, sr), SampleBuffer(mono, sr))

    near = gain * signal.samples
    far = gain * _far_channel(spec.rig, abs(spec.azimuth_rad), spec.temperature_c, signal)
    peak = max(np.max(np.abs(near)), np.max(np.abs(far)))
    if peak > 1.0:
        near = near / peak
        far = far / peak
    if spec.azimuth_rad > 0:
        return StereoBuffer(SampleBuffer(near, sr), SampleBuffer(far, sr))
    return StereoBuffer(SampleBuffer(far, sr), SampleBuffer(near, sr))


def binauralize_scene(sources: list[tuple[SampleBuffer, RenderSpec]]) -> StereoBuffer:
    """Mix independently binauralized sources.

    Sources of different lengths are zero-padded to the longest. The mix is
    peak-normalized only if the sum clips; the scale factor is logged so
    level relationships between sources stay on record.
    """
    if not sources:
        empty = SampleBuffer(np.zeros(0), DEFAULT_SAMPLE_RATE)
        return StereoBuffer(empty, empty)
    rates = {signal.sample_rate for signal, _ in sources}
    if len(rates) != 1:
        raise ValidationError(f"sources mix sample rates: {sorted(rates)}")
    sr = rates.pop()

    n = max(len(signal) for signal, _ in sources)
    left = np.zeros(n)
    right = np.zeros(n)
    for signal, spec in sources:
        rendered = binauralize(signal, spec)
        left[: len(rendered)] += rendered.left.samples
        right[: len(rendered)] += rendered.right.samples

    peak = max(np.max(np.abs(left)), np.max(np.abs(right)), 0.0)
    if peak > 1.0:
        log.warning("scene mix clipped; normalized by %.6f", 1.0 / peak)
        left = left / peak
        right = right / peak
    return StereoBuffer(SampleBuffer(left, sr), SampleBuffer(right, sr))
