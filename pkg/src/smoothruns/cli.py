"""Command-line front end: a thin client of the HTTP service.

By default requests go to the in-process app (no server needed); pass
--server http://host:port to talk to a running instance instead.  Output
is fixed-order machine-parseable lines on stdout; -v adds a human summary
on stderr.

Exit codes: 0 success (or completed campaign), 2 completed with no
findings, 1 error.
"""

from __future__ import annotations

import argparse
import os
import signal
import sys

STORE_DIR_ENV = "SMOOTHRUNS_STORE_DIR"


def _client(server: str | None):
    if server:
        import httpx

        return httpx.Client(base_url=server, timeout=None)
    import warnings

    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        from fastapi.testclient import TestClient

    from .service import app

    return TestClient(app)


def _fail(resp) -> int:
    try:
        detail = resp.json().get("detail", resp.text)
    except Exception:
        detail = resp.text
    print(f"error: {detail}", file=sys.stderr)
    return 1


def _format_factors(fac: dict) -> str:
    parts = [f"{p}^{e}" if e > 1 else str(p) for p, e in fac["factors"]]
    if fac["cofactor"] != 1:
        parts.append(f"[{fac['cofactor']}]")
    return "*".join(parts) if parts else "1"


def cmd_solve(args, client) -> int:
    resp = client.post(
        "/solve",
        json={"d": args.d, "t": args.t, "require_x_smooth": args.x_smooth},
    )
    if resp.status_code != 200:
        return _fail(resp)
    body = resp.json()
    for sol in body["solutions"]:
        print(
            f"SOLUTION {sol['index']} {sol['x']} {sol['y']} "
            f"{_format_factors(sol['y_factors'])}"
        )
    cert = body["certification"]
    print(f"CERT {cert['status']} {cert['z_used']} {cert['convergents_scanned']}")
    if args.verbose:
        print(
            f"d={args.d} t={args.t}: {len(body['solutions'])} smooth solution(s), "
            f"certification {cert['status']}",
            file=sys.stderr,
        )
    return 0 if body["solutions"] else 2


def cmd_count(args, client) -> int:
    resp = client.post("/count", json={"m": args.m, "t": args.t})
    if resp.status_code != 200:
        return _fail(resp)
    body = resp.json()
    if args.verbose:
        print(
            f"m={body['m']} t={body['t']} t0={body['t0']} "
            f"pairs={body['pair_starts']} N={body['upper_allowance']}",
            file=sys.stderr,
        )
    print(body["equation_count"])
    return 0


def _default_paths(args) -> tuple[str, str]:
    base = os.environ.get(STORE_DIR_ENV, ".")
    store = args.store or os.path.join(base, f"campaign_m{args.m}_t{args.t}.store")
    ckpt = args.checkpoint or os.path.join(base, f"campaign_m{args.m}_t{args.t}.ckpt")
    return store, ckpt


def cmd_campaign(args, client) -> int:
    store, ckpt = _default_paths(args)
    payload = {
        "m": args.m,
        "t": args.t,
        "store_path": store,
        "checkpoint_path": ckpt,
        "workers": args.workers,
        "checkpoint_every": args.checkpoint_every,
        "max_equations": args.max_equations,
    }
    resp = client.post("/campaign", json=payload)
    if resp.status_code != 200:
        return _fail(resp)
    body = resp.json()
    status = "completed" if body["completed"] else ("halted" if body["halted"] else "partial")
    print(
        f"CAMPAIGN {body['m']} {body['t']} {body['position']} {body['equation_count']} "
        f"{body['records_total']} {body['new_records']} {status}"
    )
    if args.verbose:
        print(
            f"store={store} checkpoint={ckpt} guards={body['guard_statuses']} "
            f"elapsed={body['elapsed']:.1f}s",
            file=sys.stderr,
        )
    if body["halted"]:
        print(f"halted: {body['halted']}", file=sys.stderr)
        return 1
    return 0


def cmd_brute(args, client) -> int:
    resp = client.post(
        "/brute", json={"k": args.k, "length": args.len, "max_n": args.max_n}
    )
    if resp.status_code != 200:
        return _fail(resp)
    records = resp.json()["records"]
    shown = 0
    for r in records:
        if r["n"] > args.k or args.all:
            print(
                f"WINDOW {r['n']} {r['length']} {r['p_max']} {r['source']} "
                f"{r['coefficient']} {r['index']}"
            )
            shown += 1
    if args.store:
        with open(args.store, "a", encoding="ascii") as fh:
            for r in records:
                fh.write(
                    f"WINDOW {r['n']} {r['length']} {r['p_max']} {r['source']} "
                    f"{r['coefficient']} {r['index']}\n"
                )
    if args.verbose:
        print(
            f"k={args.k} len={args.len} max_n={args.max_n}: "
            f"{len(records)} window(s), {shown} above k",
            file=sys.stderr,
        )
    return 0 if shown else 2


def _parse_campaign_ref(spec: str) -> dict:
    parts = spec.split(",")
    if len(parts) != 2:
        raise argparse.ArgumentTypeError("expected STORE,CHECKPOINT")
    return {"store_path": parts[0], "checkpoint_path": parts[1]}


def _parse_brute_ref(spec: str) -> dict:
    parts = spec.split(",")
    if len(parts) != 4:
        raise argparse.ArgumentTypeError("expected STORE,KMAX,LEN,MAXN")
    return {
        "store_path": parts[0],
        "k_max": int(parts[1]),
        "length": int(parts[2]),
        "max_n": int(parts[3]),
    }


def _parse_brute_scan(spec: str) -> dict:
    parts = spec.split(",")
    if len(parts) != 3:
        raise argparse.ArgumentTypeError("expected KMAX,LEN,MAXN")
    return {
        "k_max": int(parts[0]),
        "length": int(parts[1]),
        "max_n": int(parts[2]),
        "scan": True,
    }


def cmd_f(args, client) -> int:
    k_from = args.k_from if args.k_from is not None else args.k
    k_to = args.k_to if args.k_to is not None else args.k
    if k_from is None:
        print("error: give --k or --k-from/--k-to", file=sys.stderr)
        return 1
    payload = {
        "k_from": k_from,
        "k_to": k_to,
        "campaigns": args.campaign or [],
        "brutes": (args.brute or []) + (args.brute_scan or []),
    }
    resp = client.post("/f", json=payload)
    if resp.status_code != 200:
        return _fail(resp)
    rows = resp.json()["rows"]
    all_exact = True
    for r in rows:
        upper = r["upper"] if r["upper"] is not None else 0
        tag = "exact" if r["exact"] else "interval"
        grade = "unconditional" if r["unconditional"] else "bounded"
        print(f"F {r['k']} {r['lower']} {upper} {tag} {grade}")
        all_exact = all_exact and r["exact"]
    return 0 if all_exact else 2


def cmd_verify_table(args, client) -> int:
    resp = client.post(
        "/verify-table", json={"k_max": args.k_max, "max_n": args.max_n}
    )
    if resp.status_code != 200:
        return _fail(resp)
    body = resp.json()
    for r in body["rows"]:
        got = r["got_upper"] if r["got_upper"] is not None else 0
        print(
            f"TABLE {r['k']} {r['expected']} {got} {'ok' if r['ok'] else 'FAIL'}"
        )
    print(f"RESULT {'ok' if body['ok'] else 'FAIL'}")
    return 0 if body["ok"] else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="smoothruns",
        description="Consecutive smooth integers via Pell equations.",
    )
    parser.add_argument("--server", help="URL of a running service (default: in-process)")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="smooth solutions of x^2 - d y^2 = 1")
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--t", type=int, required=True)
    p.add_argument("--x-smooth", action="store_true", help="require x smooth as well")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("count", help="number of equations for a campaign (m, t)")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--t", type=int, required=True)
    p.set_defaults(func=cmd_count)

    p = sub.add_parser("campaign", help="run or resume a windowed search campaign")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--t", type=int, required=True)
    p.add_argument("--store", help=f"record store path (default under ${STORE_DIR_ENV})")
    p.add_argument("--checkpoint", help="checkpoint path")
    p.add_argument("--workers", type=int, default=os.cpu_count() or 1)
    p.add_argument("--checkpoint-every", type=int, default=10_000)
    p.add_argument("--max-equations", type=int, default=None)
    p.set_defaults(func=cmd_campaign)

    p = sub.add_parser("brute", help="exhaustive window scan (oracle / witnesses)")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--len", type=int, required=True)
    p.add_argument("--max-n", type=int, required=True)
    p.add_argument("--store", help="append records to this store file")
    p.add_argument("--all", action="store_true", help="print windows with n <= k too")
    p.set_defaults(func=cmd_brute)

    p = sub.add_parser("f", help="assemble f(k) from evidence files")
    p.add_argument("--k", type=int)
    p.add_argument("--k-from", type=int)
    p.add_argument("--k-to", type=int)
    p.add_argument(
        "--campaign",
        action="append",
        type=_parse_campaign_ref,
        metavar="STORE,CHECKPOINT",
        help="completed campaign evidence (repeatable)",
    )
    p.add_argument(
        "--brute",
        action="append",
        type=_parse_brute_ref,
        metavar="STORE,KMAX,LEN,MAXN",
        help="brute-scan evidence from a store file (repeatable)",
    )
    p.add_argument(
        "--brute-scan",
        action="append",
        type=_parse_brute_scan,
        metavar="KMAX,LEN,MAXN",
        help="run a brute scan now and use it as evidence (repeatable)",
    )
    p.set_defaults(func=cmd_f)

    p = sub.add_parser("verify-table", help="regression of the known f table")
    p.add_argument("--k-max", type=int, default=40)
    p.add_argument("--max-n", type=int, default=10**7)
    p.set_defaults(func=cmd_verify_table)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    # a TERM during a campaign must flush the checkpoint like Ctrl-C does
    if args.command == "campaign" and not args.server:
        signal.signal(signal.SIGTERM, lambda *_: (_ for _ in ()).throw(KeyboardInterrupt()))
    client = _client(args.server)
    try:
        return args.func(args, client)
    finally:
        client.close()


if __name__ == "__main__":
    sys.exit(main())
