"""Command-line front end.

The CLI is a thin client of the HTTP service: it builds a request, posts it
(to an in-process application by default, or to --server when given), writes
the returned CSV atomically, and prints a one-line analytic summary. Seeds
resolve as flag > config file > EVADESIM_SEED > the documented default 12345,
so bare invocations are reproducible.
"""
from __future__ import annotations

import argparse
import asyncio
import contextlib
import os
import sys
import tempfile

import httpx

from .graphs import edge_pairs, load_edge_list


class CliError(Exception):
    def __init__(self, message: str, exit_code: int = 1):
        super().__init__(message)
        self.exit_code = exit_code


DEFAULT_SEED = 12345

# --- option converters (shared by flags and config-file values) -------------


def _unit_interval(name):
    def convert(text):
        value = float(text)
        if not 0.0 < value < 1.0:
            raise ValueError(f"{name} must be in (0, 1), got {value}")
        return value

    convert.__name__ = name
    return convert


def _penalty(text):
    value = float(text)
    if not value > 1.0:
        raise ValueError(f"lambda must exceed 1, got {value}")
    return value


def _positive(name):
    def convert(text):
        value = float(text)
        if not value > 0.0:
            raise ValueError(f"{name} must be positive, got {value}")
        return value

    convert.__name__ = name
    return convert


def _count(name, minimum=1):
    def convert(text):
        value = int(text)
        if value < minimum:
            raise ValueError(f"{name} must be at least {minimum}, got {value}")
        return value

    convert.__name__ = name
    return convert


def _seed(text):
    value = int(text)
    if not 0 <= value < 2**64:
        raise ValueError(f"seed must be a 64-bit non-negative integer, got {value}")
    return value


def _beta(text):
    value = float(text)
    if value < 0.0:
        raise ValueError(f"beta must be non-negative, got {value}")
    return value


def _bool(text):
    lowered = str(text).strip().lower()
    if lowered in ("1", "true", "yes", "on"):
        return True
    if lowered in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"expected a boolean, got {text!r}")


def parse_tau_grid(text):
    """start:stop:step (endpoints inclusive within 1e-9) or a comma list."""
    text = text.strip()
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise ValueError(f"tau grid must be start:stop:step, got {text!r}")
        start, stop, step = (float(v) for v in parts)
        if step <= 0.0 or stop < start:
            raise ValueError(f"bad tau grid range {text!r}")
        count = int((stop - start) / step + 1e-9) + 1
        values = [start + i * step for i in range(count)]
    else:
        values = [float(v) for v in text.split(",") if v.strip()]
    if not values:
        raise ValueError("tau grid is empty")
    for v in values:
        if not 0.0 < v < 1.0:
            raise ValueError(f"tau grid value out of (0, 1): {v}")
    return values


def parse_topology(text):
    """star:N, torus:WxH, or edgelist:PATH -> service topology payload."""
    kind, sep, rest = text.partition(":")
    if not sep:
        raise ValueError(f"topology must be star:N, torus:WxH or edgelist:PATH, got {text!r}")
    if kind == "star":
        return {"kind": "star", "n": int(rest)}
    if kind == "torus":
        dims = rest.lower().split("x")
        if len(dims) != 2:
            raise ValueError(f"torus topology must be torus:WxH, got {text!r}")
        return {"kind": "torus", "width": int(dims[0]), "height": int(dims[1])}
    if kind == "edgelist":
        graph = load_edge_list(rest)
        return {
            "kind": "edgelist",
            "n": graph.n,
            "edges": [list(e) for e in edge_pairs(graph)],
        }
    raise ValueError(f"unknown topology kind {kind!r}")


CONVERTERS = {
    "tau": _unit_interval("tau"),
    "k": _unit_interval("k"),
    "p": _unit_interval("p"),
    "lambda": _penalty,
    "pf0": _positive("pf0"),
    "horizon": _count("horizon"),
    "seed": _seed,
    "replicates": _count("replicates"),
    "topology": str,
    "tau-grid": str,
    "beta": _beta,
    "hetero-k": _bool,
    "out": str,
    "server": str,
}

# options each command understands, with hard defaults (None = must be given)
COMMAND_OPTIONS = {
    "single": {
        "tau": None, "k": 0.4, "p": 0.01, "lambda": 1.5, "pf0": 5.0,
        "horizon": 1000, "seed": DEFAULT_SEED, "out": "single.csv", "server": None,
    },
    "network": {
        "tau": None, "k": 0.4, "p": 0.01, "lambda": 1.5, "pf0": 5.0,
        "horizon": 1000, "seed": DEFAULT_SEED, "topology": "star:10",
        "beta": None, "hetero-k": False, "out": "network.csv", "server": None,
    },
    "sweep": {
        "k": 0.4, "p": 0.01, "lambda": 1.5, "pf0": 5.0, "horizon": 1000,
        "replicates": 1, "seed": DEFAULT_SEED, "topology": "star:10",
        "tau-grid": "0.02:0.48:0.02", "beta": None, "out": "sweep.csv",
        "server": None,
    },
    "table1": {
        "seed": DEFAULT_SEED, "replicates": 50, "out": "table1.csv", "server": None,
    },
    "hetero": {
        "seed": DEFAULT_SEED, "horizon": 10000, "topology": "torus:10x10",
        "tau": 0.3, "p": 0.1, "lambda": 1.5, "pf0": 1.0, "out": "hetero.csv",
        "server": None,
    },
    "analytic": {
        "tau": None, "k": 0.4, "p": 0.01, "lambda": 1.5, "pf0": 5.0,
        "tau-grid": None, "out": None, "server": None,
    },
}

REQUIRED = {"single": ("tau",), "network": ("tau",), "analytic": ("tau",)}

FLAG_HELP = {
    "tau": "tax rate in (0, 1)",
    "k": "savings rate in (0, 1)",
    "p": "per-step audit probability in (0, 1)",
    "lambda": "penalty multiplier, > 1",
    "pf0": "initial perceived evasion profit, > 0",
    "horizon": "number of steps to simulate",
    "seed": "64-bit seed (falls back to EVADESIM_SEED, then 12345)",
    "replicates": "number of independent replicates",
    "topology": "star:N, torus:WxH, or edgelist:PATH",
    "tau-grid": "start:stop:step (inclusive) or comma list of tax rates",
    "beta": "inverse temperature for the probabilistic rule (omit for the sign rule)",
    "hetero-k": "draw per-taxpayer savings rates from Beta(2, 3)",
    "out": "output CSV path",
    "server": "base URL of a running service (default: run in-process)",
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="evadesim",
        description="Tax-evasion dynamics: seeded simulations and analytic summaries.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    descriptions = {
        "single": "one-taxpayer trajectory CSV (t,evaded,audited,repaid,f,pf,n)",
        "network": "network run CSV (t,node,evaded,audited,repaid,f,pf,n)",
        "sweep": "average evaders per tax rate (tau,avg_evaders)",
        "table1": "star-network last-evasion statistics (node,mean,sd)",
        "hetero": "heterogeneous savings rates on a torus (node,row,col,k,k_avg,evasions)",
        "analytic": "print drift/regime/compliance-time summary; optional drift-curve CSV",
    }
    for command, options in COMMAND_OPTIONS.items():
        cmd = sub.add_parser(command, help=descriptions[command])
        cmd.add_argument("--config", help="flat key = value config file; flags win")
        for name in options:
            converter = CONVERTERS[name]
            if name == "hetero-k":
                cmd.add_argument(
                    "--hetero-k", action="store_const", const=True, default=None,
                    dest="hetero_k", help=FLAG_HELP[name],
                )
            else:
                cmd.add_argument(
                    f"--{name}", type=converter, default=None,
                    dest=name.replace("-", "_"), help=FLAG_HELP[name],
                )
    serve = sub.add_parser("serve", help="run the HTTP service with uvicorn")
    serve.add_argument("--host", default="127.0.0.1")
    serve.add_argument("--port", type=int, default=8000)
    return parser


def load_config(path: str) -> dict:
    """Flat key = value lines; # comments and blank lines ignored."""
    values = {}
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected key = value, got {raw!r}")
            key, _, value = line.partition("=")
            key = key.strip()
            if key not in CONVERTERS:
                raise ValueError(f"{path}:{lineno}: unknown option {key!r}")
            values[key] = value.strip()
    return values


def resolve_options(command: str, args: argparse.Namespace, config: dict) -> dict:
    merged = {}
    for name, default in COMMAND_OPTIONS[command].items():
        flag_value = getattr(args, name.replace("-", "_"))
        if flag_value is not None:
            merged[name] = flag_value
        elif name in config:
            merged[name] = CONVERTERS[name](config[name])
        elif name == "seed" and os.environ.get("EVADESIM_SEED"):
            merged[name] = _seed(os.environ["EVADESIM_SEED"])
        else:
            merged[name] = default
    for key in config:
        if key not in COMMAND_OPTIONS[command]:
            raise ValueError(f"option {key!r} does not apply to command {command!r}")
    for name in REQUIRED.get(command, ()):
        if merged[name] is None:
            raise ValueError(f"--{name} is required for {command!r}")
    return merged


# --- service client ----------------------------------------------------------


def _post(server: str | None, path: str, payload: dict) -> dict:
    if server:
        with httpx.Client(base_url=server, timeout=600.0) as client:
            response = client.post(path, json=payload)
    else:
        from .service.app import create_app

        transport = httpx.ASGITransport(app=create_app())

        async def go():
            async with httpx.AsyncClient(
                transport=transport, base_url="http://evadesim", timeout=600.0
            ) as client:
                return await client.post(path, json=payload)

        response = asyncio.run(go())
    if response.status_code == 422:
        raise CliError(f"invalid request: {response.text}", exit_code=2)
    if response.status_code != 200:
        raise CliError(f"service error {response.status_code}: {response.text}")
    return response.json()


def write_atomic(path: str, text: str) -> None:
    """Write whole-file via a temp file and rename; no partial outputs."""
    directory = os.path.dirname(os.path.abspath(path)) or "."
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".evadesim-", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        with contextlib.suppress(OSError):
            os.unlink(tmp)
        raise


def format_summary(summary: dict) -> str:
    et = summary["expected_compliance_time"]
    et_text = format(et, ".6g") if et is not None else "never complies"
    return (
        f"drift={summary['drift']:.6g} regime={summary['regime']} "
        f"E[T_comp]={et_text} optimal_tau={summary['optimal_tau']:.6g}"
    )


def _params_payload(opts: dict) -> dict:
    return {
        "tau": opts["tau"],
        "k": opts["k"],
        "p": opts["p"],
        "lambda": opts["lambda"],
        "pf0": opts["pf0"],
    }


# --- commands ----------------------------------------------------------------


def cmd_single(opts: dict) -> int:
    data = _post(opts["server"], "/run/single", {
        "params": _params_payload(opts),
        "horizon": opts["horizon"],
        "seed": opts["seed"],
    })
    write_atomic(opts["out"], data["csv"])
    print(format_summary(data["summary"]))
    return 0


def cmd_network(opts: dict) -> int:
    payload = {
        "params": _params_payload(opts),
        "topology": parse_topology(opts["topology"]),
        "horizon": opts["horizon"],
        "seed": opts["seed"],
        "hetero_k": bool(opts["hetero-k"]),
    }
    if opts["beta"] is not None:
        payload["beta"] = opts["beta"]
    data = _post(opts["server"], "/run/network", payload)
    write_atomic(opts["out"], data["csv"])
    print(f"{format_summary(data['summary'])} mean_evaders={data['mean_evaders']:.6g}")
    return 0


def cmd_sweep(opts: dict) -> int:
    payload = {
        "tau_grid": parse_tau_grid(opts["tau-grid"]),
        "topology": parse_topology(opts["topology"]),
        "k": opts["k"],
        "p": opts["p"],
        "lambda": opts["lambda"],
        "pf0": opts["pf0"],
        "horizon": opts["horizon"],
        "replicates": opts["replicates"],
        "seed": opts["seed"],
    }
    if opts["beta"] is not None:
        payload["beta"] = opts["beta"]
    data = _post(opts["server"], "/run/sweep", payload)
    write_atomic(opts["out"], data["csv"])
    print(
        f"minimizer_tau={data['minimizer_tau']:.6g} "
        f"{format_summary(data['summary'])}"
    )
    return 0


def cmd_table1(opts: dict) -> int:
    data = _post(opts["server"], "/run/table1", {
        "seed": opts["seed"],
        "replicates": opts["replicates"],
    })
    write_atomic(opts["out"], data["csv"])
    print(
        f"{format_summary(data['summary'])} grand_mean={data['grand_mean']:.6g} "
        f"grand_sd={data['grand_sd']:.6g} naive_estimate={data['naive_estimate']:.6g}"
    )
    return 0


def cmd_hetero(opts: dict) -> int:
    topology = parse_topology(opts["topology"])
    if topology["kind"] != "torus":
        raise ValueError("hetero runs on a torus; use --topology torus:WxH")
    data = _post(opts["server"], "/run/hetero", {
        "seed": opts["seed"],
        "width": topology["width"],
        "height": topology["height"],
        "horizon": opts["horizon"],
        "tau": opts["tau"],
        "p": opts["p"],
        "lambda": opts["lambda"],
        "pf0": opts["pf0"],
    })
    write_atomic(opts["out"], data["csv"])
    print(
        f"{format_summary(data['summary'])} "
        f"permanent_evaders={data['permanent_evaders']} "
        f"middle_band_fraction={data['middle_band_fraction']:.6g}"
    )
    return 0


def cmd_analytic(opts: dict) -> int:
    payload = {"params": _params_payload(opts)}
    if opts["tau-grid"] is not None:
        payload["tau_grid"] = parse_tau_grid(opts["tau-grid"])
    data = _post(opts["server"], "/analytic", payload)
    if data["csv"] is not None and opts["out"] is not None:
        write_atomic(opts["out"], data["csv"])
    print(format_summary(data["summary"]))
    return 0


COMMANDS = {
    "single": cmd_single,
    "network": cmd_network,
    "sweep": cmd_sweep,
    "table1": cmd_table1,
    "hetero": cmd_hetero,
    "analytic": cmd_analytic,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "serve":
        import uvicorn

        uvicorn.run("evadesim.service.app:app", host=args.host, port=args.port)
        return 0
    try:
        config = load_config(args.config) if args.config else {}
        opts = resolve_options(args.command, args, config)
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    try:
        return COMMANDS[args.command](opts)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (httpx.HTTPError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
