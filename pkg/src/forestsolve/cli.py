"""forest-solve: thin HTTP client over the service endpoints.

By default requests run against the in-process ASGI app, so no server is
needed; --server points the same commands at a remote instance. Results go
to stdout as JSON (floats printed with 17 significant digits so golden
outputs are byte-stable) or CSV; diagnostics go to stderr.

Exit codes: 0 success, 2 usage/validation error, 3 internal numeric failure
(including a --check mismatch beyond --tol).
"""
from __future__ import annotations

import argparse
import asyncio
import json
import sys
from typing import Any, Optional

import httpx


# -- formatting ---------------------------------------------------------------

def _fmt(obj: Any) -> str:
    """Compact JSON with deterministic 17-significant-digit floats."""
    if isinstance(obj, float):
        return format(obj, ".17g")
    if isinstance(obj, bool):
        return "true" if obj else "false"
    if obj is None:
        return "null"
    if isinstance(obj, (int, str)):
        return json.dumps(obj)
    if isinstance(obj, dict):
        return "{" + ", ".join(
            f"{json.dumps(str(k))}: {_fmt(v)}" for k, v in obj.items()
        ) + "}"
    if isinstance(obj, (list, tuple)):
        return "[" + ", ".join(_fmt(v) for v in obj) + "]"
    raise TypeError(f"cannot format {type(obj)!r}")


def _csv_rows(doc: dict) -> list[str]:
    rows: list[str] = []
    if "voltages" in doc and doc["voltages"] is not None:
        se = doc.get("std_error") or {}
        header = "node,volts" + (",std_error" if se else "")
        rows.append(header)
        for node, volts in doc["voltages"].items():
            row = f"{node},{format(volts, '.17g')}"
            if se:
                row += f",{format(se.get(node, 0.0), '.17g')}"
            rows.append(row)
    if "injected" in doc and doc["injected"] is not None:
        se = doc.get("std_error") or {}
        rows.append("node,amps" + (",std_error" if se else ""))
        for node, amps in doc["injected"].items():
            row = f"{node},{format(amps, '.17g')}"
            if se:
                row += f",{format(se.get(node, 0.0), '.17g')}"
            rows.append(row)
    if "currents" in doc and doc["currents"] is not None:
        has_se = any(e.get("std_error") is not None for e in doc["currents"])
        rows.append("u,v,i" + (",std_error" if has_se else ""))
        for e in doc["currents"]:
            row = f"{e['u']},{e['v']},{format(e['i'], '.17g')}"
            if has_se:
                row += f",{format(e.get('std_error') or 0.0, '.17g')}"
            rows.append(row)
    if "probabilities" in doc:
        rows.append("target,probability")
        for k, p in doc["probabilities"].items():
            rows.append(f"{k},{format(p, '.17g')}")
    if "tau" in doc:
        rows.append("tau")
        rows.append(format(doc["tau"], ".17g"))
    if "flows" in doc:
        rows.append("u,v,flow")
        for e in doc["flows"]:
            rows.append(f"{e['u']},{e['v']},{format(e['flow'], '.17g')}")
    return rows


# -- argument parsing ----------------------------------------------------------

def _parse_assignments(text: str) -> dict[str, float]:
    out: dict[str, float] = {}
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        name, _, value = part.partition("=")
        if not _:
            raise argparse.ArgumentTypeError(
                f"expected name=value pairs, got {part!r}"
            )
        out[name.strip()] = float(value)
    return out


def _parse_names(text: str) -> list[str]:
    return [p.strip() for p in text.split(",") if p.strip()]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="forest-solve",
        description="Solve resistive networks and reversible Markov chains "
                    "by spanning-tree/forest formulas, exactly or by sampling.",
    )
    parser.add_argument("--server", default=None,
                        help="base URL of a running service; default runs "
                             "the service in-process")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--network", required=True, help="network JSON file")
        p.add_argument("--format", choices=["json", "csv"], default="json")

    p = sub.add_parser("solve", help="linear-oracle solve")
    add_common(p)
    p.add_argument("--fixed", type=_parse_assignments)
    p.add_argument("--inject", type=_parse_assignments)
    p.add_argument("--ground")

    for name in ("exact", "estimate"):
        p = sub.add_parser(name, help=f"theorem engines, {name} route")
        add_common(p)
        p.add_argument("--theorem", required=True,
                       choices=["vj", "vv", "ji", "iv"])
        p.add_argument("--fixed", type=_parse_assignments)
        p.add_argument("--inject", type=_parse_assignments)
        p.add_argument("--ground")
        p.add_argument("--check", action="store_true",
                       help="append linear-oracle values and max_rel_err")
        p.add_argument("--tol", type=float, default=1e-9,
                       help="with --check: exit 3 if max_rel_err exceeds this")
        if name == "estimate":
            p.add_argument("--count", type=int, required=True)
            p.add_argument("--seed", type=int, default=0)
            p.add_argument("--workers", type=int, default=1)

    p = sub.add_parser("sample", help="emit sampled trees/forests")
    add_common(p)
    p.add_argument("--roots", type=_parse_names)
    p.add_argument("--count", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("enumerate", help="emit all trees/forests with weights")
    add_common(p)
    p.add_argument("--roots", type=_parse_names)

    p = sub.add_parser("markov", help="reversible-chain applications")
    p.add_argument("--network", required=True)
    p.add_argument("--format", choices=["json", "csv"], default="json")
    p.add_argument("--check", action="store_true")
    p.add_argument("--tol", type=float, default=1e-9)
    msub = p.add_subparsers(dest="markov_command", required=True)
    mp = msub.add_parser("hitting")
    mp.add_argument("--start", required=True)
    mp.add_argument("--roots", type=_parse_names, required=True)
    mp = msub.add_parser("absorb")
    mp.add_argument("--start", required=True)
    mp.add_argument("--roots", type=_parse_names, required=True)
    mp.add_argument("--estimate", type=int, default=None,
                    help="sample count for the Monte Carlo variant")
    mp.add_argument("--seed", type=int, default=0)
    mp = msub.add_parser("flow")
    mp.add_argument("--p0", type=_parse_assignments, required=True)

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)

    return parser


# -- transport ------------------------------------------------------------------

async def _post(server: Optional[str], path: str, payload: dict) -> httpx.Response:
    if server:
        async with httpx.AsyncClient(base_url=server, timeout=600.0) as client:
            return await client.post(path, json=payload)
    from .service import app
    transport = httpx.ASGITransport(app=app)
    async with httpx.AsyncClient(transport=transport,
                                 base_url="http://forest-solve.local",
                                 timeout=600.0) as client:
        return await client.post(path, json=payload)


def _load_network_doc(path: str) -> dict:
    with open(path) as fh:
        return json.load(fh)


def _emit(doc: dict, fmt: str) -> None:
    if fmt == "csv":
        print("\n".join(_csv_rows(doc)))
    else:
        print(_fmt(doc))


def _request_payload(args: argparse.Namespace) -> tuple[str, dict]:
    network = _load_network_doc(args.network)
    cmd = args.command
    if cmd == "solve":
        return "/solve", {
            "network": network, "fixed": args.fixed,
            "inject": args.inject, "ground": args.ground,
        }
    if cmd in ("exact", "estimate"):
        payload = {
            "network": network, "theorem": args.theorem,
            "fixed": args.fixed, "inject": args.inject,
            "ground": args.ground, "check": args.check,
        }
        if cmd == "estimate":
            payload.update(count=args.count, seed=args.seed,
                           workers=args.workers)
        return f"/{cmd}", payload
    if cmd == "sample":
        return "/sample", {
            "network": network, "roots": args.roots,
            "count": args.count, "seed": args.seed,
        }
    if cmd == "enumerate":
        return "/enumerate", {"network": network, "roots": args.roots}
    if cmd == "markov":
        mcmd = args.markov_command
        if mcmd == "hitting":
            return "/markov/hitting", {
                "network": network, "start": args.start,
                "roots": args.roots, "check": args.check,
            }
        if mcmd == "absorb":
            return "/markov/absorb", {
                "network": network, "start": args.start, "roots": args.roots,
                "estimate": args.estimate, "seed": args.seed,
                "check": args.check,
            }
        return "/markov/flow", {
            "network": network, "p0": args.p0, "check": args.check,
        }
    raise AssertionError(cmd)


def main(argv: Optional[list[str]] = None) -> int:
    args = build_parser().parse_args(argv)

    if args.command == "serve":
        import uvicorn

        from .service import app
        uvicorn.run(app, host=args.host, port=args.port)
        return 0

    try:
        path, payload = _request_payload(args)
    except (OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2

    response = asyncio.run(_post(args.server, path, payload))
    if response.status_code == 422:
        body = response.json()
        detail = body.get("detail", body)
        name = body.get("error", "ValidationError")
        print(f"{name}: {detail}", file=sys.stderr)
        return 2
    if response.status_code >= 500:
        print(f"internal error: HTTP {response.status_code}", file=sys.stderr)
        return 3
    doc = response.json()

    if args.command in ("sample", "enumerate"):
        key = "samples" if args.command == "sample" else "objects"
        for obj in doc[key]:
            print(_fmt(obj))
        return 0

    _emit(doc, args.format)

    tol = getattr(args, "tol", None)
    if getattr(args, "check", False) and tol is not None:
        err = doc.get("max_rel_err")
        if err is not None and err > tol:
            print(f"check failed: max_rel_err {err} > tol {tol}",
                  file=sys.stderr)
            return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
