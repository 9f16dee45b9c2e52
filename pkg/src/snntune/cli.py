"""Command-line entry point: validate, run, preset, sweep, stats, serve."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import analysis, experiments, recording as rec_io
from .engine import NetworkSpec, errors_of, run, validate
from .exceptions import SimulationAborted

FORMATS = ("ndjson", "csv", "svg")


def _write_artifacts(rec, out_dir: Path, formats) -> None:
    out_dir.mkdir(parents=True, exist_ok=True)
    for fmt in formats:
        rec_io.export(rec, fmt, out_dir)
    rec_io.write_meta(rec, out_dir / "meta.json")


def cmd_validate(args) -> int:
    spec = NetworkSpec.from_json(args.spec)
    diags = validate(spec)
    if not diags:
        print("ok")
        return 0
    for d in diags:
        print(str(d))
    return 1 if errors_of(diags) else 0


def cmd_run(args) -> int:
    spec = NetworkSpec.from_json(args.spec)
    if args.seed is not None:
        doc = spec.to_dict()
        doc["seed"] = args.seed
        spec = NetworkSpec.from_dict(doc)
    try:
        rec = run(spec)
    except SimulationAborted as exc:
        if exc.recording is not None and args.out:
            _write_artifacts(exc.recording, Path(args.out), args.format)
        raise
    print(f"ran {spec.duration_ms} ms ({spec.n_steps} steps), "
          f"{rec.total_events()} events, wall {rec.meta['wall_clock_s']:.3f} s")
    if args.out:
        _write_artifacts(rec, Path(args.out), args.format)
        print(f"artifacts written to {args.out}")
    return 0


def cmd_preset(args) -> int:
    result = experiments.run_preset(args.name)
    for r in result.results:
        ref = r.reference if r.reference is not None else ""
        print(
            f"[{'PASS' if r.passed else 'FAIL'}] {r.expectation.metric}"
            f"({r.expectation.population}) {r.expectation.op} {ref} "
            f"-> measured {r.measured:.6g}"
        )
    if args.out:
        out_dir = Path(args.out)
        _write_artifacts(result.recording, out_dir, args.format)
        (out_dir / "expectations.json").write_text(
            json.dumps(result.report(), indent=2) + "\n"
        )
        print(f"artifacts written to {args.out}")
    return 0 if result.all_passed else 1


def cmd_sweep(args) -> int:
    doc = json.loads(Path(args.sweepspec).read_text())
    spec = experiments.SweepSpec.from_dict(doc)
    rows = experiments.sweep(spec)
    text = experiments.sweep_csv(rows)
    print(f"{len(rows)} sweep points")
    if args.out:
        out_dir = Path(args.out)
        out_dir.mkdir(parents=True, exist_ok=True)
        (out_dir / "sweep.csv").write_text(text)
        print(f"artifacts written to {args.out}")
    else:
        print(text, end="")
    return 0


def cmd_stats(args) -> int:
    rec = rec_io.load_recording(Path(args.recording))
    stats = {
        pop: analysis.compute_statistics(rec, pop, window_ms=args.window_ms)
        for pop in sorted(rec.events)
    }
    for pop, st in stats.items():
        report = st.as_report()
        print(
            f"{pop}: events={report['total_events']} rate={report['mean_rate_hz']:.3f} Hz "
            f"isi_cv={report['isi_cv'] if report['isi_cv'] is not None else 'n/a'} "
            f"fano={report['fano']:.4g} "
            f"concentration={report['concentration'] if report['concentration'] is not None else 'n/a'}"
        )
    if args.out:
        out_dir = Path(args.out)
        out_dir.mkdir(parents=True, exist_ok=True)
        (out_dir / "statistics.csv").write_text(
            "\n".join(analysis.statistics_csv_rows(stats)) + "\n"
        )
        (out_dir / "statistics.json").write_text(
            json.dumps({pop: st.as_report() for pop, st in stats.items()}, indent=2) + "\n"
        )
        print(f"artifacts written to {args.out}")
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    from .server import create_app

    uvicorn.run(create_app(), host=args.host, port=args.port, log_level="warning")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="snn-tune",
        description="Spiking-neuron simulator and tuning workbench",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check a network spec file")
    p.add_argument("spec")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("run", help="simulate a network spec file")
    p.add_argument("spec")
    p.add_argument("--out", default=None)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--format", action="append", choices=FORMATS, default=None)
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("preset", help="run a catalog preset and check its expectations")
    p.add_argument("name")
    p.add_argument("--out", default=None)
    p.add_argument("--format", action="append", choices=FORMATS, default=None)
    p.set_defaults(func=cmd_preset)

    p = sub.add_parser("sweep", help="run a parameter sweep from a sweep-spec file")
    p.add_argument("sweepspec")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("stats", help="compute statistics over a recorded run directory")
    p.add_argument("recording")
    p.add_argument("--window-ms", type=float, default=1000.0)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("serve", help="start the local HTTP service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8742)
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command in ("run", "preset") and not args.format:
        args.format = list(FORMATS)
    try:
        return args.func(args)
    except SimulationAborted as exc:
        print(f"error: {exc} (partial recording flagged incomplete)", file=sys.stderr)
        return 1
    except Exception as exc:  # noqa: BLE001 - single reporting point for the CLI
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
