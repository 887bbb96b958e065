"""Thin command-line client over the service handlers.

Every subcommand builds a request model, runs it either in process or
against a remote server (--url), prints the machine-readable JSON report to
stdout, and summarizes on stderr.  Exit codes: 0 pass, 1 verification
failure, 2 infeasible target, 3 configuration error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .reachability import InfeasibleTargetError
from .service import handlers, schemas

EXIT_OK = 0
EXIT_VERIFY_FAIL = 1
EXIT_INFEASIBLE = 2
EXIT_CONFIG = 3


class _RemoteError(RuntimeError):
    def __init__(self, status: int, payload: dict):
        super().__init__(payload.get("detail", f"HTTP {status}"))
        self.status = status
        self.payload = payload


def _call(url: str | None, path: str, request, local_fn, response_cls):
    if url is None:
        return local_fn(request)
    import httpx

    resp = httpx.post(
        url.rstrip("/") + path,
        json=request.model_dump(mode="json"),
        timeout=600.0,
    )
    if resp.status_code >= 400:
        raise _RemoteError(resp.status_code, resp.json())
    return response_cls.model_validate(resp.json())


def _operator_or_name(value: str):
    path = Path(value)
    if value.endswith(".json") or path.is_file():
        data = json.loads(path.read_text())
        return schemas.OperatorDoc.model_validate(data)
    return value


def _emit(report: dict, out: str | None, summary: str):
    text = json.dumps(report, indent=2, sort_keys=True)
    if out:
        Path(out).write_text(text + "\n")
    else:
        print(text)
    print(summary, file=sys.stderr)


def _shape_args(value: str):
    """--shape accepts a preset name or a CSV file of (t, f) samples."""
    if value in ("sine2", "triangle", "constant"):
        return value, None
    path = Path(value)
    samples = []
    for line in path.read_text().strip().splitlines():
        if line.startswith("#") or not line.strip():
            continue
        t, f = line.split(",")
        samples.append([float(t), float(f)])
    return "tabulated", samples


def _synth_request(args) -> schemas.SynthRequest:
    shape, samples = _shape_args(args.shape)
    return schemas.SynthRequest(
        model=_operator_or_name(args.model),
        target=_operator_or_name(args.target),
        group=args.group,
        mode=args.mode,
        n_qubits=args.n,
        coupling=args.coupling,
        tsim=args.tsim,
        delta=args.delta,
        shape=shape,
        shape_samples=samples,
        decouple=[a for a in (args.decouple or "").split(",") if a],
        seed=args.seed,
        tolerance=args.tol,
    )


def cmd_synth(args) -> int:
    req = _synth_request(args)
    resp = _call(args.url, "/synth", req, handlers.synth, schemas.SynthResponse)
    report = resp.model_dump(mode="json")
    schedule = report.pop("schedule")
    if args.out:
        weights_path = Path(args.out + ".weights.json")
        schedule_path = Path(args.out + ".schedule.json")
        weights_path.write_text(json.dumps(
            {
                "format_version": 1,
                "group": resp.group,
                "weights": resp.weights,
                "W": resp.total_weight,
            },
            indent=2, sort_keys=True,
        ) + "\n")
        schedule_path.write_text(json.dumps(schedule, indent=2, sort_keys=True) + "\n")
        print(json.dumps(report, indent=2, sort_keys=True))
    else:
        print(json.dumps({**report, "schedule": schedule}, indent=2, sort_keys=True))
    print(
        f"synth: |G|={resp.group_order} segments={resp.segment_count} "
        f"W={resp.total_weight:.6g} T_c={resp.cycle_time:.6g} "
        f"residual={resp.mixture_residual:.3e}",
        file=sys.stderr,
    )
    return EXIT_OK


def _load_schedule(path: str) -> schemas.ScheduleDoc:
    return schemas.ScheduleDoc.model_validate(json.loads(Path(path).read_text()))


def cmd_verify(args) -> int:
    req = schemas.VerifyRequest(schedule=_load_schedule(args.schedule), tolerance=args.tol)
    resp = _call(args.url, "/verify", req, handlers.verify, schemas.VerifyResponse)
    _emit(
        resp.model_dump(mode="json"),
        args.out,
        f"verify: residual={resp.residual_norm:.3e} tol={resp.tolerance:.1e} "
        f"{'PASS' if resp.passed else 'FAIL'}",
    )
    return EXIT_OK if resp.passed else EXIT_VERIFY_FAIL


def cmd_simulate(args) -> int:
    req = schemas.SimulateRequest(
        schedule=_load_schedule(args.schedule), cycles=args.cycles, metric=args.metric
    )
    resp = _call(args.url, "/simulate", req, handlers.simulate, schemas.SimulateResponse)
    _emit(
        resp.model_dump(mode="json"),
        args.out,
        f"simulate: cycles={resp.cycles} infidelity={resp.infidelity:.3e} "
        f"unitarity defect={resp.unitarity_defect:.3e}",
    )
    return EXIT_OK


def cmd_sweep(args) -> int:
    req = schemas.SweepRequest(
        base=_synth_request(args),
        param=args.param,
        minimum=args.minimum,
        maximum=args.maximum,
        points=args.points,
    )
    resp = _call(args.url, "/sweep", req, handlers.sweep, schemas.SweepResponse)
    if args.out:
        Path(args.out).write_text(resp.csv)
    else:
        sys.stdout.write(resp.csv)
    print(
        f"sweep: {resp.param} in [{args.minimum:.4g}, {args.maximum:.4g}] "
        f"slope={resp.slope:.3f} r2={resp.r_squared:.5f}",
        file=sys.stderr,
    )
    return EXIT_OK


def cmd_models(args) -> int:
    path = f"/groups/{args.group}" if args.group else "/presets"
    cls = schemas.GroupExport if args.group else schemas.PresetsResponse
    if args.url is None:
        resp = (
            handlers.group_export(args.group) if args.group else handlers.presets()
        )
    else:
        import httpx

        raw = httpx.get(args.url.rstrip("/") + path, timeout=60.0)
        if raw.status_code >= 400:
            raise _RemoteError(raw.status_code, raw.json())
        resp = cls.model_validate(raw.json())
    summary = (
        f"group {args.group}: |G|={resp.order}, cycle length {len(resp.euler_cycle)}"
        if args.group
        else "models: preset catalog"
    )
    _emit(resp.model_dump(mode="json"), args.out, summary)
    return EXIT_OK


def cmd_serve(args) -> int:
    import uvicorn

    from .service.app import app

    uvicorn.run(app, host=args.host, port=args.port)
    return EXIT_OK


def _add_synth_flags(p: argparse.ArgumentParser):
    p.add_argument("--model", default="heisenberg2",
                   help="model preset or operator JSON file")
    p.add_argument("--target", default="dipolar",
                   help="target preset or operator JSON file")
    p.add_argument("--group", default="g1", help="control-group preset")
    p.add_argument("--mode", default="eulerian",
                   choices=["bb", "eulerian", "symmetric"])
    p.add_argument("--n", type=int, default=None, help="qubit count override")
    p.add_argument("--coupling", type=float, default=1.0, help="coupling J")
    p.add_argument("--tsim", type=float, default=0.05,
                   help="simulated interval per cycle")
    p.add_argument("--delta", type=float, default=None,
                   help="ramp duration (default tsim/10)")
    p.add_argument("--shape", default="sine2",
                   help="sine2 | triangle | constant | path to CSV (t,f) samples")
    p.add_argument("--decouple", default="",
                   help="comma-separated error axes for open-system synthesis")
    p.add_argument("--seed", type=int, default=7)
    p.add_argument("--tol", type=float, default=1e-8)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="eulersim",
        description="Bounded-strength Hamiltonian simulation schedule toolkit",
    )
    parser.add_argument("--url", default=None,
                        help="remote service URL (default: run in process)")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="solve weights and build a schedule")
    _add_synth_flags(p)
    p.add_argument("--out", default=None,
                   help="path prefix for .weights.json / .schedule.json")
    p.set_defaults(fn=cmd_synth)

    p = sub.add_parser("verify", help="check a schedule's first-order average")
    p.add_argument("schedule", help="schedule JSON file")
    p.add_argument("--tol", type=float, default=None)
    p.add_argument("--out", default=None)
    p.set_defaults(fn=cmd_verify)

    p = sub.add_parser("simulate", help="integrate the exact evolution")
    p.add_argument("schedule", help="schedule JSON file")
    p.add_argument("--cycles", type=int, default=1)
    p.add_argument("--metric", default="infidelity",
                   choices=["infidelity", "frobenius"])
    p.add_argument("--out", default=None)
    p.set_defaults(fn=cmd_simulate)

    p = sub.add_parser("sweep", help="error-scaling sweep with log-log fit")
    _add_synth_flags(p)
    p.add_argument("--param", default="cycle", choices=["delta", "tsim", "cycle"])
    p.add_argument("--min", dest="minimum", type=float, required=True)
    p.add_argument("--max", dest="maximum", type=float, required=True)
    p.add_argument("--points", type=int, default=6)
    p.add_argument("--out", default=None)
    p.set_defaults(fn=cmd_sweep)

    p = sub.add_parser("models", help="list presets or export one group")
    p.add_argument("--group", default=None,
                   help="export this group: order, generators, Euler cycle")
    p.add_argument("--out", default=None)
    p.set_defaults(fn=cmd_models)

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.set_defaults(fn=cmd_serve)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except InfeasibleTargetError as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except handlers.ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except _RemoteError as exc:
        kind = exc.payload.get("kind", "config")
        print(f"{kind}: {exc}", file=sys.stderr)
        if kind == "infeasible":
            return EXIT_INFEASIBLE
        if kind == "verification":
            return EXIT_VERIFY_FAIL
        return EXIT_CONFIG
    except (OSError, json.JSONDecodeError, ValueError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
