"""Command-line client for the qutritctl service.

The CLI is a thin HTTP client: it marshals arguments into the service's
request schemas, posts them (by default to an in-process instance of the
app, or to --server URL), and writes the responses to files.  Exit codes:
0 success, 2 usage/validation, 3 numerical failure, 4 I/O failure.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_NUMERICAL = 3
EXIT_IO = 4


class CliFailure(Exception):
    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code


def _client(server: str | None):
    if server:
        import httpx
        return httpx.Client(base_url=server, timeout=600.0)
    import warnings
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        from starlette.testclient import TestClient
    from .service.app import app
    return TestClient(app)


def _call(client, method: str, path: str, payload=None) -> dict:
    resp = client.request(method, path, json=payload)
    if resp.status_code == 400:
        raise CliFailure(EXIT_USAGE, resp.json().get("detail", "invalid request"))
    if resp.status_code == 422:
        detail = resp.json().get("detail", "numerical failure")
        # pydantic validation errors also use 422; treat them as usage errors
        if isinstance(detail, list):
            raise CliFailure(EXIT_USAGE, json.dumps(detail))
        raise CliFailure(EXIT_NUMERICAL, str(detail))
    if resp.status_code >= 500:
        raise CliFailure(EXIT_NUMERICAL, f"server error: {resp.text}")
    return resp.json()


def _write_text(path: str | None, text: str) -> None:
    """Atomic write; partial outputs never survive a failure."""
    if path is None:
        return
    target = Path(path)
    tmp = target.with_name(target.name + ".tmp")
    try:
        tmp.write_text(text)
        tmp.replace(target)
    except OSError as exc:
        tmp.unlink(missing_ok=True)
        raise CliFailure(EXIT_IO, f"cannot write {path}: {exc}") from exc


def _write_json(path: str | None, payload: dict, units: str = "dimensionless") -> None:
    body = {"version": 1, "units": units}
    body.update(payload)
    _write_text(path, json.dumps(body, sort_keys=True))


def _csv_lines(header, rows, units: str = "dimensionless") -> str:
    lines = [f"# version=1 units={units}", ",".join(header)]
    for row in rows:
        lines.append(",".join(f"{v:.12g}" if isinstance(v, float) else str(v) for v in row))
    return "\n".join(lines) + "\n"


# ------------------------------------------------------------------ commands

def cmd_design(args, client) -> int:
    payload = {"gate": args.gate, "duration": args.T, "dt": args.dt, "edge": args.edge,
               "edge_sigma_ratio": args.edge_sigma_ratio}
    out = _call(client, "POST", "/design", payload)
    c = out["constants"]
    if args.gate in ("h", "h-inv"):
        print(f"gate={args.gate} T={args.T} ns  |A|={c['A']:.4f} |delta|={c['delta']:.4f}  "
              f"Omega/2pi = {c['omega_over_2pi_MHz']:.4f} MHz  "
              f"Delta/2pi = {c['delta_over_2pi_MHz']:.4f} MHz")
    else:
        print(f"gate={args.gate} T={args.T} ns  lambda = {c['lambda']:.4f}  "
              f"theta = {c['theta']:.6f} rad")
    print(f"verification fidelity = {out['verification_fidelity']:.8f}")
    if args.out:
        _write_text(args.out, json.dumps(out["schedule"], sort_keys=True))
    return EXIT_OK


def cmd_trajectory(args, client) -> int:
    design = _call(client, "POST", "/design",
                   {"gate": args.gate, "duration": args.T, "dt": args.dt})
    out = _call(client, "POST", "/simulate/trajectory",
                {"schedule": design["schedule"], "initial_state": args.init,
                 "sim": {"dt": args.dt}})
    header = ["time_ns", "P0", "P1", "P2"]
    rows = [[t] + pops for t, pops in zip(out["times"], out["populations"])]
    text = _csv_lines(header, rows, units="time:ns,population:1")
    if args.out:
        _write_text(args.out, text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def _parse_noise(text: str) -> dict:
    if text == "ideal":
        return {"kind": "ideal"}
    if text.startswith("depolarizing:"):
        return {"kind": "depolarizing", "p": float(text.split(":", 1)[1])}
    if text == "pulse":
        return {"kind": "pulse"}
    raise CliFailure(EXIT_USAGE, f"unknown noise spec {text!r}")


def cmd_rb(args, client, interleaved: str | None = None) -> int:
    payload = {
        "lengths": [int(x) for x in args.lengths.split(",")],
        "n_sequences": args.sequences, "shots": args.shots, "seed": args.seed,
        "noise": _parse_noise(args.noise),
    }
    if interleaved:
        payload["interleaved"] = interleaved
        if args.interleaved_p is not None:
            payload["interleaved_p"] = args.interleaved_p
    out = _call(client, "POST", "/rb/run", payload)
    fit = out["fit"]
    label = f"IRB[{interleaved}]" if interleaved else "RB"
    print(f"{label}: p = {fit['p']:.5f}  A = {fit['A']:.4f}  B = {fit['B']:.4f}  "
          f"r = {out['r']:.5f}  (residual {fit['residual']:.2e})")
    _write_json(args.out, out)
    return EXIT_OK


def cmd_irb(args, client) -> int:
    return cmd_rb(args, client, interleaved=args.gate)


def cmd_ramsey(args, client) -> int:
    payload = {"d": args.d, "points": args.points}
    out = _call(client, "POST", "/ramsey", payload)
    header = ["phi"] + [f"P{k}" for k in range(args.d)]
    rows = [[phi] + pop for phi, pop in zip(out["phi"], out["populations"])]
    text = _csv_lines(header, rows, units="phase:rad,population:1")
    if args.out:
        _write_text(args.out, text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_kitaev(args, client) -> int:
    payload = {"d": args.d, "digits": args.digits, "phase_over_2pi": args.phase}
    out = _call(client, "POST", "/kitaev", payload)
    print(f"digits (most significant first): {out['digits']}")
    print(f"estimated phase / 2pi = {out['estimated_phase_over_2pi']:.10f}")
    _write_json(args.out, out)
    return EXIT_OK


def cmd_parity(args, client) -> int:
    perm = [int(ch) for ch in args.perm]
    payload = {"d": args.d, "m": args.m, "permutation": perm}
    out = _call(client, "POST", "/parity", payload)
    print(f"outcome = {out['outcome']}  parity = {out['parity']}")
    _write_json(args.out, out)
    return EXIT_OK


def cmd_clifford(args, client) -> int:
    out = _call(client, "GET", "/clifford/table")
    print(f"group size = {out['size']}")
    avg = out["average_counts"]
    print(f"stored-word averages: H={avg['H']:.3f} S={avg['S']:.3f} "
          f"X={avg['X']:.3f} Z={avg['Z']:.3f} physical={avg['physical']:.3f}")
    pc = out["plain_alphabet_counts"]
    print(f"{{H,S,X,Z}}-shortest-word averages: H={pc['H']:.3f} S={pc['S']:.3f} "
          f"X={pc['X']:.3f} Z={pc['Z']:.3f}")
    if args.export:
        full = _call(client, "GET", "/clifford/export")
        _write_json(args.export, full)
    return EXIT_OK


def cmd_calibrate(args, client) -> int:
    try:
        cfg = json.loads(Path(args.config).read_text())
    except OSError as exc:
        raise CliFailure(EXIT_IO, f"cannot read config: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise CliFailure(EXIT_USAGE, f"malformed config: {exc}") from exc
    if args.seed is not None:
        cfg["seed"] = args.seed
    out = _call(client, "POST", "/calibrate", cfg)
    print(f"best fitness Z = {out['best_fitness']:.6f}  improved = {out['improved']}")
    for k, v in out["best"].items():
        print(f"  {k} = {v:.6f}")
    if args.out:
        _write_json(args.out, out)
    if args.history:
        rows = [[i, h["phase"], h["best"], h["mean"], h["spread"]]
                for i, h in enumerate(out["history"])]
        _write_text(args.history, _csv_lines(["iteration", "phase", "best_Z", "mean_Z", "spread"], rows))
    return EXIT_OK


def _read_csv(path: str):
    try:
        lines = Path(path).read_text().strip().splitlines()
    except OSError as exc:
        raise CliFailure(EXIT_IO, f"cannot read {path}: {exc}") from exc
    header = lines[0].split(",")
    rows = [[float(v) for v in ln.split(",")] for ln in lines[1:]]
    return header, rows


def cmd_fit(args, client) -> int:
    _header, rows = _read_csv(args.input)
    if args.readout_reference:
        # columns are (time, V1, V2, V3): invert voltages to populations first
        ref = json.loads(args.readout_reference)
        converted = []
        for r in rows:
            out = _call(client, "POST", "/readout/invert",
                        {"voltages": r[1:4], "reference": ref})
            converted.append([r[0]] + out["populations"])
        rows = converted
    times = [r[0] for r in rows]
    if args.kind == "t1":
        # expects columns: time, P0, P1, P2 with two stacked blocks (init |1>, init |2>)
        half = len(rows) // 2
        payload = {
            "times": [r[0] for r in rows[:half]],
            "trace_init1": [r[1:4] for r in rows[:half]],
            "trace_init2": [r[1:4] for r in rows[half:]],
        }
        out = _call(client, "POST", "/fit/t1", payload)
        print(f"T1_01 = {out['T1_01']:.3f} us  T1_12 = {out['T1_12']:.3f} us  "
              f"T1_02 = {out['T1_02']:.3f} us")
    else:
        payload = {"times": times, "trace": [r[1] for r in rows], "transition": args.transition}
        out = _call(client, "POST", "/fit/t2", payload)
        print(f"T2 = {out['T2']:.3f} us  n = {out['n']:.3f}")
    _write_json(args.out, out)
    return EXIT_OK


def cmd_readout(args, client) -> int:
    payload = {"voltages": [float(v) for v in args.voltages.split(",")],
               "reference": json.loads(args.reference)}
    out = _call(client, "POST", "/readout/invert", payload)
    print("populations:", " ".join(f"{p:.6f}" for p in out["populations"]))
    if out["ill_conditioned"]:
        print(f"warning: calibration condition number {out['condition']:.2e}")
    _write_json(args.out, out)
    return EXIT_OK


def cmd_serve(args, _client) -> int:
    import uvicorn
    from .service.app import app
    uvicorn.run(app, host=args.host, port=args.port)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="qutritctl",
                                 description="qutrit gate design, simulation and benchmarking")
    ap.add_argument("--server", default=None,
                    help="base URL of a running service (default: run in-process)")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("design", help="synthesize a gate pulse schedule")
    p.add_argument("gate", choices=["h", "h-inv", "x", "x-inv", "x02"])
    p.add_argument("--T", type=float, default=35.0, help="gate time (ns)")
    p.add_argument("--dt", type=float, default=0.05)
    p.add_argument("--edge", type=float, default=5.0)
    p.add_argument("--edge-sigma-ratio", type=float, default=2.5, dest="edge_sigma_ratio",
                   help="Gaussian edge length / sigma for the flat-top envelope")
    p.add_argument("--out", default=None, help="schedule JSON output path")
    p.set_defaults(fn=cmd_design)

    p = sub.add_parser("trajectory", help="population dynamics under a designed gate (CSV)")
    p.add_argument("gate", choices=["h", "h-inv", "x", "x-inv", "x02"])
    p.add_argument("--T", type=float, default=35.0)
    p.add_argument("--dt", type=float, default=0.05)
    p.add_argument("--init", type=int, default=0, choices=[0, 1, 2])
    p.add_argument("--out", default=None)
    p.set_defaults(fn=cmd_trajectory)

    for name, fn in (("rb", cmd_rb), ("irb", cmd_irb)):
        p = sub.add_parser(name, help=f"run {name.upper()}")
        if name == "irb":
            p.add_argument("--gate", required=True,
                           help="interleaved gate kind (H, X, X02, ...)")
            p.add_argument("--interleaved-p", type=float, default=None, dest="interleaved_p",
                           help="depolarizing parameter of the interleaved gate")
        else:
            p.set_defaults(interleaved_p=None)
        p.add_argument("--noise", default="ideal",
                       help="ideal | depolarizing:<p> | pulse")
        p.add_argument("--lengths", default="1,5,10,20,35,50,75,100")
        p.add_argument("--sequences", type=int, default=30)
        p.add_argument("--shots", type=int, default=200)
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--out", default=None)
        p.set_defaults(fn=fn)

    p = sub.add_parser("ramsey", help="qudit Ramsey fringe scan (CSV)")
    p.add_argument("--d", type=int, default=3)
    p.add_argument("--points", type=int, default=200)
    p.add_argument("--out", default=None)
    p.set_defaults(fn=cmd_ramsey)

    p = sub.add_parser("kitaev", help="base-d Kitaev phase estimation")
    p.add_argument("--d", type=int, default=3)
    p.add_argument("--digits", type=int, default=4)
    p.add_argument("--phase", type=float, required=True, help="target phase / 2pi in [0,1)")
    p.add_argument("--out", default=None)
    p.set_defaults(fn=cmd_kitaev)

    p = sub.add_parser("parity", help="dihedral parity check")
    p.add_argument("--d", type=int, default=5)
    p.add_argument("--m", type=int, default=2)
    p.add_argument("--perm", required=True, help="one-line permutation, e.g. 43210")
    p.add_argument("--out", default=None)
    p.set_defaults(fn=cmd_parity)

    p = sub.add_parser("clifford", help="Clifford group summary / export")
    p.add_argument("--export", default=None, help="write the full table JSON here")
    p.set_defaults(fn=cmd_clifford)

    p = sub.add_parser("calibrate", help="two-phase pulse-parameter calibration")
    p.add_argument("--config", required=True, help="JSON config with bounds etc.")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--out", default=None)
    p.add_argument("--history", default=None, help="CSV of the fitness history")
    p.set_defaults(fn=cmd_calibrate)

    p = sub.add_parser("fit", help="device coherence fits from CSV traces")
    p.add_argument("kind", choices=["t1", "t2"])
    p.add_argument("--input", required=True)
    p.add_argument("--transition", default="01", choices=["01", "12", "02"])
    p.add_argument("--readout-reference", default=None, dest="readout_reference",
                   help="3x3 JSON voltage matrix: input columns are (time, V1, V2, V3)")
    p.add_argument("--out", default=None)
    p.set_defaults(fn=cmd_fit)

    p = sub.add_parser("readout", help="voltage-to-population inversion")
    p.add_argument("--voltages", required=True, help="comma-separated V1,V2,V3")
    p.add_argument("--reference", required=True, help="3x3 JSON matrix of reference voltages")
    p.add_argument("--out", default=None)
    p.set_defaults(fn=cmd_readout)

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.set_defaults(fn=cmd_serve)

    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        client = None if args.fn is cmd_serve else _client(args.server)
        try:
            return args.fn(args, client)
        finally:
            if client is not None:
                client.close()
    except CliFailure as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
