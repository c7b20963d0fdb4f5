"""Report documents and their JSON/CSV serialization.

Documents are plain dicts with a schema_version, emitted with sorted keys so
identical inputs produce byte-identical files. Timestamps are optional
metadata and omitted in deterministic mode.
"""

from __future__ import annotations

import json
from datetime import datetime, timezone
from pathlib import Path
from typing import Any

from .analysis import DEFAULT_OCTAVE_CENTERS, CueReport, TransferFunction, ild_spectrum_summary
from .errors import ValidationError
from .rigsim import RigKind, RigSpec

SCHEMA_VERSION = 1
TOOL_VERSION = "0.1.0"

CSV_SPECTRUM_HEADER = "freq_hz,magnitude_db,phase_deg,coherence"


def build_metadata(deterministic: bool = False, **fields: Any) -> dict[str, Any]:
    """Common report metadata; pass deterministic=True to omit the timestamp."""
    meta: dict[str, Any] = {"tool_version": TOOL_VERSION}
    meta.update({k: v for k, v in fields.items() if v is not None})
    if not deterministic:
        meta["created_utc"] = datetime.now(timezone.utc).isoformat()
    return meta


def rig_to_dict(spec: RigSpec) -> dict[str, Any]:
    out: dict[str, Any] = {"kind": spec.kind.value}
    if spec.head is not None:
        out["radius_m"] = spec.head.radius_m
    if spec.mic_spacing_m is not None:
        out["mic_spacing_m"] = spec.mic_spacing_m
    if spec.disc_diameter_m is not None:
        out["disc_diameter_m"] = spec.disc_diameter_m
    if spec.capsule_angle_deg is not None:
        out["capsule_angle_deg"] = spec.capsule_angle_deg
    if spec.kind in (RigKind.SEMI_DUMMY, RigKind.JECKLIN):
        out["path_extension"] = spec.path_extension
    if spec.shadow is not None:
        out["shadow"] = {
            "max_db": spec.shadow.max_attenuation_db,
            "corner_hz": spec.shadow.corner_hz,
            "exponent": spec.shadow.azimuth_exponent,
        }
    return out


def cue_report_doc(report: CueReport, metadata: dict[str, Any] | None = None,
                   bands: tuple[float, ...] = DEFAULT_OCTAVE_CENTERS) -> dict[str, Any]:
    """Serializable summary of a CueReport: scalar cues plus the octave table."""
    octave = ild_spectrum_summary(report.ild_spectrum, bands)
    return {
        "schema_version": SCHEMA_VERSION,
        "kind": "cue_report",
        "itd_s": report.itd_s,
        "itd_low_s": report.itd_low_s,
        "itd_high_s": report.itd_high_s,
        "ild_octave_db": {str(int(center)): level for center, level in octave.items()},
        "metadata": metadata or {},
    }


def simulation_sidecar_doc(rig: RigSpec, azimuth_deg: float, temperature_c: float,
                           itd_s: float, ild_anchors_db: dict[str, float],
                           metadata: dict[str, Any] | None = None) -> dict[str, Any]:
    return {
        "schema_version": SCHEMA_VERSION,
        "kind": "simulation_sidecar",
        "rig": rig_to_dict(rig),
        "azimuth_deg": azimuth_deg,
        "temperature_c": temperature_c,
        "predicted_itd_s": itd_s,
        "predicted_ild_db": ild_anchors_db,
        "metadata": metadata or {},
    }


def comparison_doc(baseline_name: str, baseline: dict[str, Any],
                   candidates: dict[str, dict[str, Any]],
                   metadata: dict[str, Any] | None = None) -> dict[str, Any]:
    """Deltas of each candidate cue report against the baseline.

    Candidate band grids must match the baseline's; deltas are always
    candidate minus baseline.
    """
    base_bands = set(baseline["ild_octave_db"])
    deltas: dict[str, Any] = {}
    for name, cand in candidates.items():
        if set(cand["ild_octave_db"]) != base_bands:
            raise ValidationError(
                f"candidate '{name}' octave band grid differs from the baseline's"
            )
        deltas[name] = {
            "itd_delta_s": cand["itd_s"] - baseline["itd_s"],
            "ild_delta_db": {
                band: cand["ild_octave_db"][band] - baseline["ild_octave_db"][band]
                for band in baseline["ild_octave_db"]
            },
        }
    return {
        "schema_version": SCHEMA_VERSION,
        "kind": "comparison_report",
        "baseline_name": baseline_name,
        "baseline": baseline,
        "candidates": candidates,
        "deltas": deltas,
        "metadata": metadata or {},
    }


def emit_json(doc: dict[str, Any]) -> str:
    return json.dumps(doc, sort_keys=True, indent=2) + "\n"


def parse_json(text: str) -> dict[str, Any]:
    doc = json.loads(text)
    if not isinstance(doc, dict):
        raise ValidationError("report must be a JSON object")
    if doc.get("schema_version") != SCHEMA_VERSION:
        raise ValidationError(
            f"unsupported schema_version {doc.get('schema_version')!r}; expected {SCHEMA_VERSION}"
        )
    return doc


def load_report(path: str | Path) -> dict[str, Any]:
    return parse_json(Path(path).read_text(encoding="utf-8"))


def spectrum_csv_text(tf: TransferFunction) -> str:
    """One row per analysis bin: freq_hz, magnitude_db, phase_deg, coherence."""
    lines = [CSV_SPECTRUM_HEADER]
    for f, mag, ph, coh in zip(tf.freqs, tf.magnitude_db, tf.phase_deg, tf.coherence):
        lines.append(f"{float(f)!r},{float(mag)!r},{float(ph)!r},{float(coh)!r}")
    return "\n".join(lines) + "\n"


def _ordered_deltas(doc: dict[str, Any]) -> list[tuple[str, dict[str, Any]]]:
    return sorted(doc["deltas"].items(), key=lambda item: abs(item[1]["itd_delta_s"]))


def comparison_csv_text(doc: dict[str, Any]) -> str:
    bands = sorted(doc["baseline"]["ild_octave_db"], key=int)
    header = "candidate,itd_delta_s," + ",".join(f"ild_delta_{band}_db" for band in bands)
    lines = [header]
    for name, delta in _ordered_deltas(doc):
        cells = [name, repr(delta["itd_delta_s"])]
        cells += [repr(delta["ild_delta_db"][band]) for band in bands]
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"


def comparison_summary_text(doc: dict[str, Any]) -> str:
    """Plain-text table of candidates ordered by |itd delta|, closest first."""
    lines = [f"baseline: {doc['baseline_name']}  (itd {doc['baseline']['itd_s'] * 1e3:+.3f} ms)",
             f"{'candidate':<20} {'itd delta (ms)':>14}  {'worst ild delta (dB)':>20}"]
    for name, delta in _ordered_deltas(doc):
        worst = max(delta["ild_delta_db"].values(), key=abs)
        lines.append(f"{name:<20} {delta['itd_delta_s'] * 1e3:>+14.3f}  {worst:>+20.2f}")
    return "\n".join(lines) + "\n"
