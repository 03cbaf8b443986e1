"""Command-line client. Builds a RunConfig from a config file plus flags and
either runs it in-process or posts it to a running service (--server)."""

from __future__ import annotations

import argparse
import json
import sys


def _key_value(text):
    key, _, val = text.partition("=")
    if not key or not val:
        raise argparse.ArgumentTypeError(f"expected KEY=VALUE, got {text!r}")
    return key, float(val)


def _window(text):
    parts = [p.strip() for p in text.split(",")]
    if len(parts) != 2:
        raise argparse.ArgumentTypeError(f"expected LO,HI, got {text!r}")
    return [float(p) for p in parts]


def _int_list(text):
    return [int(v) for v in text.split(",") if v.strip()]


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    g = common.add_argument_group("global")
    g.add_argument("--config", help="JSON file with RunConfig fields")
    g.add_argument("--seed", type=int, help="master seed (random and recorded if omitted)")
    g.add_argument("--out", help="output root (default: $PSPIN_OUT or ./runs)")
    g.add_argument("--threads", type=int, help="BLAS thread cap for in-process runs")
    g.add_argument("--quiet", action="store_true", help="print only the report path")
    g.add_argument("--server", help="service URL, e.g. http://127.0.0.1:8000")
    g.add_argument("--emit-plots", action="store_true", default=None)
    g.add_argument("--no-checks", action="store_true", help="skip acceptance verdicts")
    g.add_argument("--tol", type=_key_value, action="append", metavar="KEY=VALUE",
                   help="override an acceptance tolerance")

    parser = argparse.ArgumentParser(prog="pspin", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    def spec_arg(p):
        p.add_argument("--spec", help='mixture, e.g. "3" or "3:0.5,4:0.5" or a JSON file')

    p = sub.add_parser("predict", parents=[common], help="ground state and edge predictions")
    spec_arg(p)
    p = sub.add_parser("classify", parents=[common], help="moments, G value and thresholds")
    spec_arg(p)
    p = sub.add_parser("complexity-curve", parents=[common], help="R(y) or F(x, y) on a grid")
    spec_arg(p)
    for name in ("y-min", "y-max", "x-min", "x-max"):
        p.add_argument(f"--{name}", type=float)
    p.add_argument("--points", type=int)

    p = sub.add_parser("simulate", parents=[common], help="minimize and check the Hessian spectrum")
    spec_arg(p)
    p.add_argument("--n", type=int)
    p.add_argument("--restarts", type=int)
    p.add_argument("--replicas", type=int, help="disorder realizations")
    p.add_argument("--grad-tol", type=float)
    p.add_argument("--max-iters", type=int)
    p.add_argument("--dump-tensors", action="store_true", default=None)

    p = sub.add_parser("kacrice", parents=[common], help="finite-n Kac-Rice counts")
    spec_arg(p)
    p.add_argument("--p", type=int, help="pure degree (alternative to --spec)")
    p.add_argument("--n-list", type=_int_list)
    p.add_argument("--energy-window", type=_window, help="LO,HI (inf allowed)")
    p.add_argument("--radial-window", type=_window)
    p.add_argument("--samples", type=int)

    p = sub.add_parser("goe-check", parents=[common], help="GOE spectrum against the semicircle")
    p.add_argument("--n", type=int)
    p.add_argument("--draws", type=int)
    p.add_argument("--draw-n", type=int)

    p = sub.add_parser("field-check", parents=[common], help="radial identity and covariance")
    spec_arg(p)
    p.add_argument("--n", type=int)
    p.add_argument("--points", type=int)
    p.add_argument("--samples", type=int, help="disorder draws for the covariance")
    p.add_argument("--overlap", type=float)

    sub.add_parser("run", parents=[common], help="run whatever experiment --config names")

    p = sub.add_parser("serve", help="start the HTTP service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    return parser


_PASSTHROUGH = ["spec", "n", "restarts", "replicas", "grad_tol", "max_iters", "n_list",
                "energy_window", "radial_window", "samples", "draws", "draw_n", "points",
                "overlap", "seed", "out", "emit_plots", "dump_tensors"]


def config_from_args(args) -> dict:
    cfg = {}
    if args.config:
        with open(args.config) as fh:
            cfg = json.load(fh)
    if args.command == "run":
        if "experiment" not in cfg:
            raise SystemExit("pspin run needs --config with an 'experiment' field")
    elif cfg.get("experiment", args.command) != args.command:
        raise SystemExit(f"config file is for {cfg['experiment']!r}, not {args.command!r}")
    else:
        cfg["experiment"] = args.command
    for name in _PASSTHROUGH:
        val = getattr(args, name, None)
        if val is not None:
            cfg[name] = val
    if getattr(args, "p", None) is not None:
        cfg["spec"] = str(args.p)
    grid = dict(cfg.get("grid", {}))
    for name in ("y_min", "y_max", "x_min", "x_max"):
        if getattr(args, name, None) is not None:
            grid[name] = getattr(args, name)
    if cfg["experiment"] == "complexity-curve" and getattr(args, "points", None) is not None:
        grid["points"] = cfg.pop("points")
    if grid:
        cfg["grid"] = grid
    if args.tol:
        cfg["tolerances"] = {**cfg.get("tolerances", {}), **dict(args.tol)}
    if args.no_checks:
        cfg["checks"] = False
    return cfg


def _post(server: str, cfg: dict) -> dict:
    import httpx

    resp = httpx.post(server.rstrip("/") + "/run", content=json.dumps(cfg),
                      headers={"content-type": "application/json"}, timeout=None)
    if resp.status_code == 422:
        from .errors import ConfigInvalid

        raise ConfigInvalid(resp.json().get("detail", resp.text))
    if resp.status_code != 200:
        raise SystemExit(f"server error {resp.status_code}: {resp.text}")
    return resp.json()


def _local(cfg: dict, threads) -> dict:
    from threadpoolctl import threadpool_limits

    from .harness import run

    with threadpool_limits(limits=threads):
        report = run(cfg)
    return json.loads(report.model_dump_json())


def _print_report(report: dict, quiet: bool):
    if quiet:
        print(report["report_path"])
        return
    preds = report.get("predictions")
    if report["config"]["experiment"] in ("predict", "classify"):
        print(json.dumps(preds if preds is not None else report["results"], indent=2))
    for name, ok in report["verdicts"].items():
        print(f"{'PASS' if ok else 'FAIL'}  {name}")
    print(f"report: {report['report_path']}")


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "serve":
        import uvicorn

        uvicorn.run("pspin_hessian.service:app", host=args.host, port=args.port)
        return 0
    cfg = config_from_args(args)
    from .errors import PSpinError, ConfigInvalid

    try:
        report = _post(args.server, cfg) if args.server else _local(cfg, args.threads)
    except ConfigInvalid as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except PSpinError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 3
    _print_report(report, args.quiet)
    return 0 if all(report["verdicts"].values()) else 1


if __name__ == "__main__":
    sys.exit(main())
