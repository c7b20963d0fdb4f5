"""Command-line surface: generate, analyze, simulate, render, compare.

Angles are degrees at this boundary and radians inside the library. Exit
codes are a stable contract: 0 success, 1 usage error, 2 I/O error,
3 analysis or validation failure.
"""

from __future__ import annotations

import argparse
import math
import sys
from pathlib import Path

from . import analysis, render, reports, rigsim, signals, wavio
from .errors import (AnalysisError, BincuesError, SilentSignalError, ValidationError,
                     WavFormatError)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_IO = 2
EXIT_ANALYSIS = 3

RIG_NAMES = tuple(kind.value for kind in rigsim.RigKind)


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # argparse default exits with code 2
        raise UsageError(message)


def _common_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--sample-rate", type=int, default=signals.DEFAULT_SAMPLE_RATE,
                        help="sample rate in Hz for generated signals (default 48000)")
    parser.add_argument("--temp", type=float, default=20.0,
                        help="air temperature in Celsius (default 20)")
    parser.add_argument("--seed", type=int, default=0, help="noise generator seed")
    parser.add_argument("--deterministic", action="store_true",
                        help="omit timestamps so outputs are byte-reproducible")
    parser.add_argument("--out", type=Path, help="output path")


def build_parser() -> _Parser:
    parser = _Parser(prog="bincues",
                     description="Binaural cue models, measurement, and rig simulation.")
    sub = parser.add_subparsers(dest="command", required=True)

    p_gen = sub.add_parser("generate", help="write a test-signal WAV")
    p_gen.add_argument("signal_kind", choices=("pink", "sine", "impulse"))
    p_gen.add_argument("--seconds", type=float, default=1.0, help="signal duration (default 1)")
    p_gen.add_argument("--freq", type=float, help="sine frequency in Hz")
    p_gen.add_argument("--amplitude", type=float, default=1.0, help="sine peak amplitude (0..1)")
    p_gen.add_argument("--offset", type=int, default=0, help="impulse position in samples")
    p_gen.add_argument("--encoding", choices=wavio.ENCODINGS, default="float32")
    _common_flags(p_gen)

    p_an = sub.add_parser("analyze", help="extract ITD/ILD/IPD cues from a stereo WAV")
    p_an.add_argument("wav", type=Path)
    p_an.add_argument("--fft-size", type=int, default=analysis.DEFAULT_FFT_SIZE)
    p_an.add_argument("--weighting", choices=analysis.WEIGHTINGS, default="none")
    p_an.add_argument("--low-freq", type=float, default=analysis.DEFAULT_LOW_BAND_HZ,
                      help="low probe-tone band center in Hz (default 220)")
    p_an.add_argument("--high-freq", type=float, default=analysis.DEFAULT_HIGH_BAND_HZ,
                      help="high probe-tone band center in Hz (default 6000)")
    p_an.add_argument("--max-lag-ms", type=float, default=2.0)
    p_an.add_argument("--name", help="report name (default: input file stem)")
    p_an.add_argument("--csv", type=Path, help="spectrum CSV path (default: out with .csv)")
    _common_flags(p_an)

    p_sim = sub.add_parser("simulate", help="synthesize a rig's two-channel capture")
    grp = p_sim.add_mutually_exclusive_group(required=True)
    grp.add_argument("--rig", choices=RIG_NAMES)
    grp.add_argument("--rig-config", type=Path, help="flat key=value rig config file")
    p_sim.add_argument("--azimuth", type=float, required=True, help="degrees, 0..90")
    p_sim.add_argument("--signal", type=Path, help="mono WAV test signal (default: built-in pink)")
    p_sim.add_argument("--seconds", type=float, default=5.0,
                       help="built-in pink signal duration (default 5)")
    _common_flags(p_sim)

    p_ren = sub.add_parser("render", help="binauralize a mono WAV")
    p_ren.add_argument("wav", type=Path)
    p_ren.add_argument("--azimuth", type=float, required=True,
                       help="degrees, -90..90, negative to the right")
    p_ren.add_argument("--rig", choices=RIG_NAMES, default="human")
    p_ren.add_argument("--gain-db", type=float, default=0.0, help="output gain, <= 0 dB")
    _common_flags(p_ren)

    p_cmp = sub.add_parser("compare", help="delta one or more cue reports against a baseline")
    p_cmp.add_argument("baseline", type=Path)
    p_cmp.add_argument("candidates", type=Path, nargs="+")
    p_cmp.add_argument("--csv", type=Path, help="delta table CSV path (default: out with .csv)")
    _common_flags(p_cmp)

    return parser


def _require_out(args: argparse.Namespace) -> Path:
    if args.out is None:
        raise UsageError("--out is required for this command")
    return args.out


def _report_name(doc_path: Path, doc: dict) -> str:
    return doc.get("metadata", {}).get("name") or doc_path.stem


def _cmd_generate(args: argparse.Namespace) -> int:
    out = _require_out(args)
    if args.seconds <= 0:
        raise UsageError(f"--seconds must be positive, got {args.seconds}")
    if args.signal_kind == "sine":
        if args.freq is None:
            raise UsageError("--freq is required for sine")
        if not 0 < args.freq < args.sample_rate / 2:
            raise UsageError(
                f"--freq must lie strictly between 0 and the Nyquist frequency "
                f"({args.sample_rate / 2:g} Hz), got {args.freq}"
            )
        if not 0 <= args.amplitude <= 1:
            raise UsageError(f"--amplitude must lie in 0..1, got {args.amplitude}")
        buf = signals.gen_sine(args.freq, args.seconds, args.sample_rate, args.amplitude)
    elif args.signal_kind == "pink":
        buf = signals.gen_pink_noise(args.seconds, args.sample_rate, args.seed)
    else:
        n = int(round(args.seconds * args.sample_rate))
        if not 0 <= args.offset < n:
            raise UsageError(f"--offset must lie in [0, {n}), got {args.offset}")
        buf = signals.gen_impulse(args.seconds, args.sample_rate, args.offset)
    wavio.write_wav(out, buf, encoding=args.encoding)
    print(f"wrote {out}")
    return EXIT_OK


def _cmd_analyze(args: argparse.Namespace) -> int:
    capture = wavio.read_wav(args.wav)
    if not isinstance(capture, signals.StereoBuffer):
        raise AnalysisError(f"{args.wav}: cue analysis needs a stereo capture, got mono")
    report = analysis.analyze_capture(
        capture, fft_size=args.fft_size, weighting=args.weighting,
        low_hz=args.low_freq, high_hz=args.high_freq, max_lag=args.max_lag_ms / 1000.0,
    )
    name = args.name or args.wav.stem
    meta = reports.build_metadata(
        deterministic=args.deterministic, name=name, source=str(args.wav),
        sample_rate=capture.sample_rate, fft_size=args.fft_size,
        weighting=args.weighting,
    )
    doc = reports.cue_report_doc(report, metadata=meta)

    out = args.out or args.wav.with_suffix(".json")
    csv_path = args.csv or Path(out).with_suffix(".csv")
    Path(out).write_text(reports.emit_json(doc), encoding="utf-8")
    Path(csv_path).write_text(reports.spectrum_csv_text(report.ild_spectrum), encoding="utf-8")
    print(f"itd {report.itd_s * 1e3:+.3f} ms  (low {report.itd_low_s * 1e3:+.3f} ms, "
          f"high {report.itd_high_s * 1e3:+.3f} ms)")
    print(f"wrote {out} and {csv_path}")
    return EXIT_OK


def _resolve_rig(args: argparse.Namespace) -> rigsim.RigSpec:
    if getattr(args, "rig_config", None) is not None:
        return rigsim.load_rig_config(args.rig_config)
    return rigsim.default_rig(rigsim.RigKind(args.rig))


def _cmd_simulate(args: argparse.Namespace) -> int:
    out = _require_out(args)
    if not 0.0 <= args.azimuth <= 90.0:
        raise UsageError(f"--azimuth must lie in 0..90 degrees, got {args.azimuth}")
    rig = _resolve_rig(args)
    src = rigsim.SourceSpec(azimuth_rad=math.radians(args.azimuth))

    if args.signal is not None:
        sig = wavio.read_wav(args.signal)
        if not isinstance(sig, signals.SampleBuffer):
            raise AnalysisError(f"{args.signal}: simulation needs a mono test signal")
    else:
        sig = signals.gen_pink_noise(args.seconds, args.sample_rate, args.seed)

    capture = rigsim.simulate_capture(rig, src, sig, temperature_c=args.temp)
    wavio.write_wav(out, capture)

    itd = rigsim.predicted_itd(rig, src, temperature_c=args.temp)
    anchors = {
        str(int(center)): rigsim.predicted_ild_db(rig, src, center)
        for center in analysis.DEFAULT_OCTAVE_CENTERS
    }
    meta = reports.build_metadata(
        deterministic=args.deterministic, sample_rate=sig.sample_rate,
        seed=None if args.signal else args.seed,
        source=str(args.signal) if args.signal else "pink",
    )
    sidecar = reports.simulation_sidecar_doc(rig, args.azimuth, args.temp, itd, anchors, meta)
    sidecar_path = Path(out).with_suffix(".json")
    sidecar_path.write_text(reports.emit_json(sidecar), encoding="utf-8")
    print(f"predicted itd {itd * 1e3:+.3f} ms")
    print(f"wrote {out} and {sidecar_path}")
    return EXIT_OK


def _cmd_render(args: argparse.Namespace) -> int:
    out = _require_out(args)
    if not -90.0 <= args.azimuth <= 90.0:
        raise UsageError(
            f"--azimuth must lie in -90..90 degrees (rear hemisphere unsupported), "
            f"got {args.azimuth}"
        )
    if args.gain_db > 0:
        raise UsageError(f"--gain-db must be <= 0, got {args.gain_db}")
    sig = wavio.read_wav(args.wav)
    if not isinstance(sig, signals.SampleBuffer):
        raise AnalysisError(f"{args.wav}: rendering needs a mono source, got stereo")
    spec = render.RenderSpec(rig=rigsim.default_rig(rigsim.RigKind(args.rig)),
                             azimuth_rad=math.radians(args.azimuth),
                             temperature_c=args.temp, gain_db=args.gain_db)
    wavio.write_wav(out, render.binauralize(sig, spec))
    print(f"wrote {out}")
    return EXIT_OK


def _cmd_compare(args: argparse.Namespace) -> int:
    out = _require_out(args)
    baseline = reports.load_report(args.baseline)
    candidates: dict[str, dict] = {}
    for path in args.candidates:
        doc = reports.load_report(path)
        candidates[_report_name(path, doc)] = doc
    meta = reports.build_metadata(deterministic=args.deterministic)
    doc = reports.comparison_doc(_report_name(args.baseline, baseline), baseline,
                                 candidates, metadata=meta)
    csv_path = args.csv or Path(out).with_suffix(".csv")
    Path(out).write_text(reports.emit_json(doc), encoding="utf-8")
    Path(csv_path).write_text(reports.comparison_csv_text(doc), encoding="utf-8")
    sys.stdout.write(reports.comparison_summary_text(doc))
    return EXIT_OK


_HANDLERS = {
    "generate": _cmd_generate,
    "analyze": _cmd_analyze,
    "simulate": _cmd_simulate,
    "render": _cmd_render,
    "compare": _cmd_compare,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return _HANDLERS[args.command](args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (WavFormatError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (ValidationError, SilentSignalError, AnalysisError, BincuesError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ANALYSIS
    except SystemExit as exc:  # argparse --help
        return int(exc.code or 0)


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
