"""Command line client for the laboratory service.

Every subcommand builds a JSON payload, posts it to the corresponding
service route (in-process by default, remote with ``--server``), and prints
the response envelope.  Artifacts travel inside the envelope; ``--out``
redirects them to files.  Exit codes: 0 success, 1 verification failure,
2 usage or request error.
"""

from __future__ import annotations

import argparse
import asyncio
import json
import os
import sys
from typing import Sequence

import httpx

from .service.app import create_app

_S = argparse.SUPPRESS

ENDPOINTS = {
    ("construct", "theorem4a"): "/construct/theorem4a",
    ("construct", "circlepack"): "/construct/circlepack",
    ("construct", "lattice"): "/construct/lattice",
    ("construct", "atomize"): "/construct/atomize",
    ("density",): "/density",
    ("verify", "rotating"): "/verify/rotating",
    ("verify", "radial"): "/verify/radial",
    ("verify", "tau-bound"): "/verify/tau-bound",
    ("jensen",): "/jensen",
    ("integral",): "/integral",
    ("growth",): "/growth",
    ("gram",): "/gram",
    ("bargmann",): "/bargmann",
    ("plot-annulus",): "/plot-annulus",
}

# Field the global --tol flag maps to, per command.
TOL_FIELD = {
    ("verify", "rotating"): "tol_density",
    ("verify", "radial"): "density_tol",
    ("jensen",): "gap_tol",
    ("integral",): "tol",
    ("bargmann",): "tol",
}

REQUIRED_FIELDS = {
    ("construct", "circlepack"): ("radii", "counts"),
    ("density",): ("window",),
    ("verify", "tau-bound"): ("upper", "lower"),
    ("jensen",): ("r_probe",),
    ("gram",): ("nodes",),
}


def _pair(text: str) -> list[float]:
    parts = [p for p in text.split(",") if p.strip()]
    if len(parts) != 2:
        raise argparse.ArgumentTypeError(f"expected 'a,b', got {text!r}")
    return [float(p) for p in parts]


def _floats(text: str) -> list[float]:
    return [float(p) for p in text.split(",") if p.strip()]


def _ints(text: str) -> list[int]:
    return [int(p) for p in text.split(",") if p.strip()]


def _points(text: str) -> list[list[float]]:
    out = []
    for chunk in text.split(";"):
        if chunk.strip():
            out.append(_pair(chunk))
    return out


def _add_globals(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", default=None, metavar="PATH",
                   help="JSON file with request fields; flags override it")
    p.add_argument("--out", default=None, metavar="PATH",
                   help="write artifacts to this file or directory")
    p.add_argument("--server", default=None, metavar="URL",
                   help="base URL of a running service (default: in-process)")
    p.add_argument("--seed", type=int, default=_S, help="RNG seed")
    p.add_argument("--digits", type=int, default=_S, help="working precision")
    p.add_argument("--tol", type=float, default=_S,
                   help="principal tolerance of the command")


def build_parser() -> argparse.ArgumentParser:
    root = argparse.ArgumentParser(
        prog="gaborlab",
        description="Constructions and density checks for Gaussian Gabor systems.",
    )
    top = root.add_subparsers(dest="command", required=True)

    construct = top.add_parser("construct", help="emit point configurations")
    csub = construct.add_subparsers(dest="subcommand", required=True)

    p = csub.add_parser("theorem4a", help="banded radial measure, atomized")
    _add_globals(p)
    p.add_argument("--beta", type=float, default=_S)
    p.add_argument("--radii", type=_floats, default=_S, metavar="R1,R2,...")
    p.add_argument("--window", type=_pair, default=_S, metavar="LO,HI")
    p.add_argument("--label", default=_S)

    p = csub.add_parser("circlepack", help="points packed on circles")
    _add_globals(p)
    p.add_argument("--radii", type=_floats, default=_S, metavar="R1,R2,...")
    p.add_argument("--counts", type=_ints, default=_S, metavar="N1,N2,...")
    p.add_argument("--label", default=_S)

    p = csub.add_parser("lattice", help="square lattice section")
    _add_globals(p)
    p.add_argument("--spacing", type=float, default=_S)
    p.add_argument("--radius", type=float, default=_S)
    p.add_argument("--label", default=_S)

    p = csub.add_parser("atomize", help="atomize a measure JSON")
    _add_globals(p)
    p.add_argument("--measure", dest="measure_path", default=None, metavar="PATH",
                   help="measure JSON (or envelope containing one); '-' reads stdin")
    p.add_argument("--window", type=_pair, default=_S, metavar="LO,HI")
    p.add_argument("--label", default=_S)

    p = top.add_parser("density", help="upper/lower density over a window")
    _add_globals(p)
    p.add_argument("--in", dest="in_path", default=None, metavar="PATH",
                   help="points CSV (or envelope containing one); '-' reads stdin")
    p.add_argument("--window", type=_pair, default=_S, metavar="LO,HI")
    p.add_argument("--radii-per-decade", type=int, default=_S)

    verify = top.add_parser("verify", help="property suites")
    vsub = verify.add_subparsers(dest="subcommand", required=True)

    p = vsub.add_parser("rotating", help="rotating growth profile checks")
    _add_globals(p)
    p.add_argument("--K", type=int, default=_S)
    p.add_argument("--samples", type=int, default=_S)
    p.add_argument("--radii", type=int, default=_S,
                   help="number of radii for angular-mean checks")
    p.add_argument("--probes", dest="probes_per_branch", type=int, default=_S)
    p.add_argument("--tol-identity", type=float, default=_S)
    p.add_argument("--tol-mean", type=float, default=_S)

    p = vsub.add_parser("radial", help="banded measure property suite")
    _add_globals(p)
    p.add_argument("--beta", type=float, default=_S)
    p.add_argument("--radii", type=_floats, default=_S, metavar="R1,R2,...")

    p = vsub.add_parser("tau-bound", help="density trade-off inequality")
    _add_globals(p)
    p.add_argument("--upper", type=float, default=_S)
    p.add_argument("--lower", type=float, default=_S)

    p = top.add_parser("jensen", help="zero-counting balance at a probe radius")
    _add_globals(p)
    p.add_argument("--in", dest="in_path", default=None, metavar="PATH")
    p.add_argument("--r-probe", type=float, default=_S)
    p.add_argument("--rel-tol", type=float, default=_S)

    p = top.add_parser("integral", help="growth-constant integral")
    _add_globals(p)
    p.add_argument("--form", choices=("primary", "by_parts", "both"), default=_S)

    p = top.add_parser("growth", help="canonical-product growth certificate")
    _add_globals(p)
    p.add_argument("--C", type=float, default=_S)
    p.add_argument("--n-terms", type=int, default=_S)
    p.add_argument("--r-grid", dest="R_grid", type=_floats, default=_S,
                   metavar="R1,R2,...")

    p = top.add_parser("gram", help="Gram matrix, minimality, completeness")
    _add_globals(p)
    p.add_argument("--nodes", type=_points, default=_S, metavar="RE,IM;RE,IM;...")
    p.add_argument("--index", type=int, default=_S,
                   help="node whose minimality residual to compute")
    p.add_argument("--degree-max", type=int, default=_S,
                   help="compute completeness residuals up to this degree")
    p.add_argument("--weights", type=_floats, default=_S)

    p = top.add_parser("bargmann", help="transform a shifted window, compare to kernel")
    _add_globals(p)
    p.add_argument("--lam", type=_pair, default=_S, metavar="RE,IM")
    p.add_argument("--z", dest="z_points", type=_points, default=_S,
                   metavar="RE,IM;RE,IM;...")
    p.add_argument("--t-min", type=float, default=_S)
    p.add_argument("--t-max", type=float, default=_S)
    p.add_argument("--n", type=int, default=_S)

    p = top.add_parser("plot-annulus", help="grid of region labels and g values")
    _add_globals(p)
    p.add_argument("--K", type=int, default=_S)
    p.add_argument("--grid", default=_S, metavar="NRXNPHI")

    return root


def _read_text(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    with open(path, "r", encoding="utf-8") as fh:
        return fh.read()


def _load_points_csv(path: str) -> str:
    text = _read_text(path).strip()
    if text.startswith("{"):
        envelope = json.loads(text)
        artifacts = envelope.get("artifacts", {})
        if "points.csv" not in artifacts:
            raise ValueError("envelope carries no points.csv artifact")
        return artifacts["points.csv"]
    return text + "\n"


def _load_measure(path: str) -> dict:
    text = _read_text(path).strip()
    obj = json.loads(text)
    if "segments" in obj or "atoms" in obj:
        return obj
    artifacts = obj.get("artifacts", {})
    if "measure.json" in artifacts:
        return json.loads(artifacts["measure.json"])
    raise ValueError("input is neither a measure JSON nor an envelope with one")


def _write_artifacts(artifacts: dict[str, str], out: str) -> dict[str, str]:
    """Write artifact bodies under ``out``; return size stubs for stdout."""
    if not artifacts:
        return artifacts
    single = len(artifacts) == 1 and not out.endswith(os.sep) and not os.path.isdir(out)
    written: dict[str, str] = {}
    if single:
        name, body = next(iter(artifacts.items()))
        parent = os.path.dirname(out)
        if parent:
            os.makedirs(parent, exist_ok=True)
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(body)
        written[name] = f"written: {out} ({len(body.encode())} bytes)"
        return written
    os.makedirs(out, exist_ok=True)
    for name in sorted(artifacts):
        body = artifacts[name]
        path = os.path.join(out, name)
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(body)
        written[name] = f"written: {path} ({len(body.encode())} bytes)"
    return written


def _post(endpoint: str, payload: dict, server: str | None) -> httpx.Response:
    if server:
        with httpx.Client(base_url=server, timeout=None) as client:
            return client.post(endpoint, json=payload)

    async def go() -> httpx.Response:
        transport = httpx.ASGITransport(app=create_app())
        async with httpx.AsyncClient(
            transport=transport, base_url="http://gaborlab", timeout=None
        ) as client:
            return await client.post(endpoint, json=payload)

    return asyncio.run(go())


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    ns = parser.parse_args(argv)
    opts = vars(ns)

    command = opts.pop("command")
    subcommand = opts.pop("subcommand", None)
    path_key = (command, subcommand) if subcommand else (command,)

    config_path = opts.pop("config", None)
    out = opts.pop("out", None)
    server = opts.pop("server", None)
    in_path = opts.pop("in_path", None)
    measure_path = opts.pop("measure_path", None)
    tol = opts.pop("tol", None) if "tol" in opts else None

    payload: dict = {}
    if config_path is not None:
        try:
            payload.update(json.loads(_read_text(config_path)))
        except (OSError, ValueError) as exc:
            parser.error(f"cannot load --config {config_path}: {exc}")

    if path_key in (("density",), ("jensen",)):
        source = in_path if in_path is not None else (
            None if "points_csv" in payload else "-"
        )
        if source is not None:
            try:
                payload["points_csv"] = _load_points_csv(source)
            except (OSError, ValueError) as exc:
                parser.error(f"cannot read points from {source}: {exc}")

    if path_key == ("construct", "atomize"):
        if measure_path is not None:
            try:
                payload["measure"] = _load_measure(measure_path)
            except (OSError, ValueError) as exc:
                parser.error(f"cannot read measure from {measure_path}: {exc}")
        elif "measure" not in payload:
            parser.error("construct atomize needs --measure or a config with one")

    if tol is not None:
        payload[TOL_FIELD.get(path_key, "tol")] = tol
    payload.update(opts)

    for field in REQUIRED_FIELDS.get(path_key, ()):
        if field not in payload:
            parser.error(f"{' '.join(path_key)} requires --{field.replace('_', '-')}")

    try:
        response = _post(ENDPOINTS[path_key], payload, server)
    except httpx.HTTPError as exc:
        print(f"error: request failed: {exc}", file=sys.stderr)
        return 2

    try:
        body = response.json()
    except ValueError:
        print(f"error: non-JSON response ({response.status_code})", file=sys.stderr)
        return 2

    if response.status_code != 200:
        print(json.dumps(body, sort_keys=True), file=sys.stderr)
        return 2

    if out is not None:
        try:
            body["artifacts"] = _write_artifacts(body.get("artifacts", {}), out)
        except OSError as exc:
            print(f"error: cannot write artifacts: {exc}", file=sys.stderr)
            return 2

    print(json.dumps(body, indent=2, sort_keys=True))
    return 1 if body.get("failed") else 0


if __name__ == "__main__":
    raise SystemExit(main())
