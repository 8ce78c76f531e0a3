"""Thin-client command line for the negotiation service.

Every subcommand speaks HTTP to the service API.  By default the app is
mounted in-process, so no server is needed; pass --server to talk to a
running instance instead.  File reading and writing happens here on the
client side; the service itself stays stateless.
"""

from __future__ import annotations

import argparse
import json
import sys
import warnings
from pathlib import Path

import httpx

from .cpnet import DEFAULT_EXACT_BOUND


def _client(server: str | None):
    if server:
        return httpx.Client(base_url=server.rstrip("/"), timeout=None)
    # in-process transport; the deprecation notice concerns a successor
    # httpx package that is not required for this use
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        from fastapi.testclient import TestClient
    from .service.app import app

    return TestClient(app)


def _fail(message: str, code: int = 2) -> "NoReturn":  # noqa: F821
    print(f"error: {message}", file=sys.stderr)
    raise SystemExit(code)


def _checked(resp) -> dict:
    if resp.status_code != 200:
        try:
            detail = resp.json().get("detail", resp.text)
        except Exception:
            detail = resp.text
        if isinstance(detail, list):
            detail = "; ".join(str(d) for d in detail)
        _fail(str(detail))
    return resp.json()


def _load_json(path: str) -> dict:
    p = Path(path)
    if not p.exists():
        _fail(f"no such file: {path}")
    try:
        return json.loads(p.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        _fail(f"{path}: not valid JSON ({exc})")


def _format_outcome(outcome: dict[str, str]) -> str:
    return " ".join(f"{a}={v}" for a, v in outcome.items())


def _gen_settings(args) -> dict:
    return {
        "attrs": args.attrs,
        "domain_max": args.domain_max,
        "max_in_degree": args.max_in_degree,
        "edge_prob": args.edge_prob,
    }


# --- subcommands ---

def cmd_run(args) -> int:
    payload = {
        "net1": _load_json(args.net1),
        "net2": _load_json(args.net2),
        "seed": args.seed,
        "oracle_bound": args.oracle_bound,
        "improvement_bound": args.improvement_bound,
    }
    with _client(args.server) as client:
        data = _checked(client.post("/negotiate", json=payload))
    stats = data["stats"]
    print(f"chosen: {_format_outcome(data['chosen'])}")
    print(f"final set ({len(data['final_set'])}):")
    for o in data["final_set"]:
        print(f"  {_format_outcome(o)}")
    print(
        "stats: s_attr={s_attr} s_os={s_os} s_out={s_out_mean:.2f} "
        "s_dq={s_dq_mean:.2f} s_iter={s_iter} s_time={s_time_sec:.4f}s".format(**stats)
    )
    if args.trace:
        lines = [json.dumps(e, separators=(",", ":")) for e in data["trace"]]
        Path(args.trace).write_text("\n".join(lines) + "\n", encoding="utf-8")
        print(f"trace written to {args.trace}")
    return 0


def cmd_batch(args) -> int:
    payload = {
        "config": _gen_settings(args),
        "rounds": args.rounds,
        "seed": args.seed,
        "oracle_bound": args.oracle_bound,
    }
    with _client(args.server) as client:
        data = _checked(client.post("/batch", json=payload))
    csv_text = data["csv"]
    if args.out:
        Path(args.out).write_text(csv_text, encoding="utf-8")
        print(f"wrote {args.out}")
    print(csv_text, end="")
    return 0


def cmd_gen(args) -> int:
    payload = {
        "config": _gen_settings(args),
        "count": args.count,
        "seed": args.seed,
    }
    with _client(args.server) as client:
        data = _checked(client.post("/generate", json=payload))
    outdir = Path(args.out or ".")
    outdir.mkdir(parents=True, exist_ok=True)
    for i, doc in enumerate(data["nets"], 1):
        path = outdir / f"net_{i:02d}.json"
        path.write_text(json.dumps(doc, indent=2) + "\n", encoding="utf-8")
        print(path)
    return 0


def cmd_verify(args) -> int:
    payload = {
        "config": _gen_settings(args),
        "rounds": args.rounds,
        "seed": args.seed,
        "oracle_bound": args.oracle_bound,
    }
    with _client(args.server) as client:
        data = _checked(client.post("/verify", json=payload))
    print(
        f"rounds={data['rounds']} po_passes={data['po_passes']} "
        f"wpo_passes={data['wpo_passes']} ok={data['ok']}"
    )
    if data["counterexamples"]:
        outdir = Path(args.out or "counterexamples")
        outdir.mkdir(parents=True, exist_ok=True)
        for ce in data["counterexamples"]:
            stem = outdir / f"round_{ce['round_index']:04d}"
            for i, doc in enumerate(ce["nets"], 1):
                Path(f"{stem}_net{i}.json").write_text(
                    json.dumps(doc, indent=2) + "\n", encoding="utf-8"
                )
            lines = [json.dumps(e, separators=(",", ":")) for e in ce["trace"]]
            Path(f"{stem}_trace.ndjson").write_text(
                "\n".join(lines) + "\n", encoding="utf-8"
            )
            print(f"counterexample round {ce['round_index']}: {ce['reason']}")
            print(f"  artifacts under {stem}_*")
        return 1
    return 0


def cmd_inspect(args) -> int:
    path = Path(args.path)
    if not path.exists():
        _fail(f"no such file: {args.path}")
    text = path.read_text(encoding="utf-8")
    first = text.lstrip()[:1]
    if path.suffix == ".ndjson" or (first == "{" and "\n{" in text.strip()):
        # trace: one event per line
        events = []
        for lineno, line in enumerate(text.splitlines(), 1):
            if not line.strip():
                continue
            try:
                events.append(json.loads(line))
            except json.JSONDecodeError as exc:
                _fail(f"{args.path}:{lineno}: bad trace line ({exc})")
        iterations = max((e["iteration"] for e in events), default=0)
        print(f"trace: {len(events)} events over {iterations} iterations")
        for e in events:
            agent = "-" if e["agent"] is None else f"a{e['agent']}"
            node = "-" if e["node"] is None else f"n{e['node']}"
            outcome = _format_outcome(e["outcome"]) if e["outcome"] else ""
            print(f"  it{e['iteration']:>3} {agent:>3} {e['event']:<8} {node:>5} {outcome}")
        return 0
    doc = _load_json(args.path)
    with _client(args.server) as client:
        data = _checked(client.post("/validate", json={"net": doc}))
    attrs = doc.get("attributes", [])
    print(f"net: {len(attrs)} attributes, {len(doc.get('edges', []))} edges")
    for item in attrs:
        print(f"  {item['name']}: {', '.join(item['values'])}")
    if data["ok"]:
        print("valid: yes")
        return 0
    print("valid: no")
    for v in data["violations"]:
        print(f"  violation: {v}")
    return 1


def cmd_serve(args) -> int:
    import uvicorn

    from .service.app import app

    uvicorn.run(app, host=args.host, port=args.port)
    return 0


def _add_common(sp, *flags):
    if "seed" in flags:
        sp.add_argument("--seed", type=int, default=0)
    if "gen" in flags:
        sp.add_argument("--attrs", type=int, required=True)
        sp.add_argument("--domain-max", type=int, default=2)
        sp.add_argument("--max-in-degree", type=int, default=5)
        sp.add_argument("--edge-prob", type=float, default=0.5)
    if "rounds" in flags:
        sp.add_argument("--rounds", type=int, default=1)
    if "bound" in flags:
        sp.add_argument("--oracle-bound", type=int, default=DEFAULT_EXACT_BOUND)
    sp.add_argument("--server", default=None,
                    help="base URL of a running service (default: in-process)")


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="negotree",
        description="negotiation-tree protocol over CP-net preferences",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("run", help="negotiate over two net files")
    sp.add_argument("net1")
    sp.add_argument("net2")
    sp.add_argument("--trace", default=None, help="write the trace NDJSON here")
    sp.add_argument("--improvement-bound", type=int, default=DEFAULT_EXACT_BOUND,
                    help="largest space that still runs the closing exchange")
    _add_common(sp, "seed", "bound")
    sp.set_defaults(fn=cmd_run)

    sp = sub.add_parser("batch", help="aggregate metrics over seeded rounds")
    sp.add_argument("--out", default=None, help="write the CSV here")
    _add_common(sp, "seed", "gen", "rounds", "bound")
    sp.set_defaults(fn=cmd_batch)

    sp = sub.add_parser("gen", help="write random net files")
    sp.add_argument("--count", type=int, default=2)
    sp.add_argument("--out", default=None, help="output directory")
    _add_common(sp, "seed", "gen")
    sp.set_defaults(fn=cmd_gen)

    sp = sub.add_parser("verify", help="check optimality against the oracles")
    sp.add_argument("--out", default=None, help="counterexample directory")
    _add_common(sp, "seed", "gen", "rounds", "bound")
    sp.set_defaults(fn=cmd_verify)

    sp = sub.add_parser("inspect", help="summarize a net file or trace")
    sp.add_argument("path")
    sp.add_argument("--server", default=None)
    sp.set_defaults(fn=cmd_inspect)

    sp = sub.add_parser("serve", help="run the HTTP service")
    sp.add_argument("--host", default="127.0.0.1")
    sp.add_argument("--port", type=int, default=8000)
    sp.set_defaults(fn=cmd_serve)

    args = parser.parse_args(argv)
    return args.fn(args)


if __name__ == "__main__":
    raise SystemExit(main())
