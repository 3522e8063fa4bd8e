"""Command line driver: batch search, re-verification, and small reports.

Search enumerates parameter pairs by increasing max(s, t), then
lexicographically within each shell, so runs are reproducible; results
are emitted in enumeration order regardless of worker count.  A
checkpoint file keyed by a hash of the search configuration permits
resuming an interrupted run.

Exit codes: 0 success, 1 completed but a hypothesis check failed (or a
search found nothing, or a stored certificate did not re-verify), 2 bad
usage or an unsatisfiable search configuration.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from itertools import islice

from .arith import is_prime, vp
from .certify import (
    SCHEMA_VERSION,
    Certificate,
    certificate_from_dict,
    certificate_to_dict,
    certificate_to_jsonl,
    certify_divisibility,
    certify_infinite_instance,
    certify_square_subfamily,
)
from .curve import base_point, make_family
from .descent import RankCert, certify_rank_one, rank_bound_by_residue, selmer
from .errors import PreconditionFailure
from .heights import canonical_height, naive_height, silverman_gaps, vy_lower_bound

MODES = ("main", "square_subfamily", "infinite")
_BATCH = 32


@dataclass(frozen=True)
class SearchConfig:
    mode: str
    p: int
    n: int
    max_param: int
    target_count: int
    workers: int

    def fingerprint(self) -> str:
        # target_count deliberately excluded: extending a finished run
        # with a higher target must reuse the same checkpoint
        key = f"{self.mode}|{self.p}|{self.n}|{self.max_param}"
        return hashlib.sha256(key.encode()).hexdigest()[:16]


def iter_parameter_pairs(max_param: int):
    """(index, s, t) by increasing max(s, t); within a shell the pairs
    (1, m) .. (m-1, m) come before (m, 1) .. (m, m)."""
    idx = 0
    for m in range(1, max_param + 1):
        for s in range(1, m):
            yield idx, s, m
            idx += 1
        for t in range(1, m + 1):
            yield idx, m, t
            idx += 1


def _depth_ok(s: int, t: int, p: int, n: int) -> bool:
    vs, vt = vp(s, p), vp(t, p)
    if (vs > 0) == (vt > 0):
        return False
    return vs + vt >= n + 1


def cheap_filter(mode: str, p: int, n: int, s: int, t: int) -> bool:
    """Inexpensive congruence and valuation screens; no primality, no certs."""
    from math import gcd

    if gcd(s, t) != 1:
        return False
    if mode == "square_subfamily":
        # here t plays the role of tau
        return vp(s * t, p) >= 2
    if not _depth_ok(s, t, p, n):
        return False
    if mode == "infinite":
        return s % 2 == 0 and t % 8 in (3, 5)
    return True


def certify_candidate(task: tuple[str, int, int, int, int]) -> str | None:
    """Worker body: full certification, None when a precondition fails."""
    mode, p, n, s, t = task
    try:
        if mode == "main":
            cert = certify_divisibility(s, t, p, n)
        elif mode == "square_subfamily":
            cert = certify_square_subfamily(s, t, p)
        else:
            cert = certify_infinite_instance(s, t, p, n)
    except PreconditionFailure:
        return None
    return certificate_to_jsonl(cert)


def _load_checkpoint(path: str, fingerprint: str):
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except FileNotFoundError:
        return 0, 0
    if data.get("config") != fingerprint:
        raise SystemExit(
            f"checkpoint {path} belongs to a different search configuration"
        )
    return int(data["next_index"]), int(data["found"])


def _save_checkpoint(path: str, fingerprint: str, next_index: int, found: int):
    tmp = path + ".tmp"
    with open(tmp, "w", encoding="utf-8") as fh:
        json.dump({"config": fingerprint, "next_index": next_index, "found": found}, fh)
    os.replace(tmp, path)


def run_search(cfg: SearchConfig, emit, checkpoint: str | None = None) -> int:
    """Drive the search; call emit(line) for each certificate. Returns count."""
    start_index, found = 0, 0
    if checkpoint:
        start_index, found = _load_checkpoint(checkpoint, cfg.fingerprint())

    candidates = (
        (idx, (cfg.mode, cfg.p, cfg.n, s, t))
        for idx, s, t in iter_parameter_pairs(cfg.max_param)
        if idx >= start_index and cheap_filter(cfg.mode, cfg.p, cfg.n, s, t)
    )

    def handle(idx: int, line: str | None) -> bool:
        nonlocal found
        if line is not None:
            emit(line)
            found += 1
        if checkpoint:
            _save_checkpoint(checkpoint, cfg.fingerprint(), idx + 1, found)
        return found >= cfg.target_count

    if cfg.workers <= 1:
        for idx, task in candidates:
            if handle(idx, certify_candidate(task)):
                break
    else:
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            done = False
            while not done:
                batch = list(islice(candidates, _BATCH))
                if not batch:
                    break
                lines = pool.map(certify_candidate, [task for _, task in batch])
                for (idx, _), line in zip(batch, lines):
                    if handle(idx, line):
                        done = True
                        break
    return found


def _default_workers() -> int:
    env = os.environ.get("ELLCERT_WORKERS")
    if env:
        return max(1, int(env))
    return 1


def _open_out(path: str, append: bool):
    if path == "-":
        return sys.stdout, False
    return open(path, "a" if append else "w", encoding="utf-8"), True


def _search_config_error(args) -> str | None:
    if args.target_count < 1:
        return "--target-count must be at least 1"
    if args.max_param < 1:
        return "--max-param must be at least 1"
    if args.n < 1:
        return "depth target n must be at least 1"
    if args.p < 5 or not is_prime(args.p):
        return f"p = {args.p} is not a prime >= 5"
    # the p-adic depth lands entirely inside one parameter (the pair is
    # coprime), so that parameter must reach p^depth within the range
    depth = 2 if args.mode == "square_subfamily" else args.n + 1
    if args.p**depth > args.max_param:
        return (
            f"unsatisfiable: no parameter up to {args.max_param} can carry "
            f"{args.p}-adic valuation {depth} (needs {args.p}^{depth} = {args.p**depth})"
        )
    return None


def cmd_search(args) -> int:
    problem = _search_config_error(args)
    if problem is not None:
        print(f"config error: {problem}", file=sys.stderr)
        return 2
    cfg = SearchConfig(
        mode=args.mode,
        p=args.p,
        n=args.n,
        max_param=args.max_param,
        target_count=args.target_count,
        workers=args.workers,
    )
    resuming = bool(args.checkpoint and os.path.exists(args.checkpoint))
    stream, close_me = _open_out(args.out, append=resuming)

    def emit(line: str):
        if args.format == "jsonl":
            stream.write(line + "\n")
        else:
            data = json.loads(line)
            sub = data["subject"]
            if args.format == "csv":
                stream.write(
                    ",".join(
                        [sub["s"], sub["t"], sub["ell"], sub["p"], sub["n"],
                         data["theorem"]]
                    )
                    + "\n"
                )
            else:
                stream.write(
                    f"s={sub['s']} t={sub['t']} ell={sub['ell']}: "
                    f"{data['conclusion']} [{data['theorem']}]\n"
                )
        stream.flush()

    if args.format == "csv" and not resuming:
        stream.write("s,t,ell,p,n,theorem\n")
    try:
        found = run_search(cfg, emit, checkpoint=args.checkpoint)
    finally:
        if close_me:
            stream.close()
    print(
        f"{found} certificate(s) from pairs with max(s,t) <= {cfg.max_param}",
        file=sys.stderr,
    )
    return 0 if found > 0 else 1


def _print_ledger(cert: Certificate) -> None:
    print(f"theorem: {cert.theorem}")
    print("subject: " + " ".join(f"{k}={v}" for k, v in cert.subject.items()))
    for entry in cert.checks:
        line = f"  [{entry.status}] {entry.name}"
        if entry.witness:
            line += "  " + " ".join(f"{k}={v}" for k, v in entry.witness.items())
        if entry.citation:
            line += f"  <- {entry.citation}"
        print(line)
    print(f"conclusion: {cert.conclusion}")
    print(f"basis: {cert.conclusion_basis}")
    print(f"unramified rank lower bound: {cert.unramified_rank_lower_bound}")
    if cert.ramified_primes is not None:
        joined = ", ".join(str(q) for q in cert.ramified_primes)
        print(f"division field ramified only at: {joined}")
    if cert.distinctness_key is not None:
        print(f"distinctness key: {cert.distinctness_key}")


def _rank_fragment_dict(rc: RankCert) -> dict:
    rep = rc.selmer_report
    return {
        "schema": SCHEMA_VERSION,
        "theorem": "rank-one",
        "subject": {"s": str(rc.s), "t": str(rc.t), "ell": str(rc.ell)},
        "ell_mod_16": str(rc.ell_mod_16),
        "t_mod_8": str(rc.t_mod_8),
        "selmer": {
            "dim_forward": str(rep.dim_forward),
            "dim_dual": str(rep.dim_dual),
            "rank_upper": str(rep.rank_upper),
        },
        "rank": str(rc.rank),
        "base_point_nontorsion": rc.base_point_nontorsion,
    }


def _print_rank_fragment(rc: RankCert) -> None:
    rep = rc.selmer_report
    print("theorem: rank-one")
    print(f"subject: s={rc.s} t={rc.t} ell={rc.ell}")
    print(f"  [pass] residue-classes  ell_mod_16={rc.ell_mod_16} t_mod_8={rc.t_mod_8}")
    print(
        f"  [pass] descent-rank-cap  dim_forward={rep.dim_forward}"
        f" dim_dual={rep.dim_dual} rank_upper={rep.rank_upper}"
    )
    print(f"  [pass] base-point-nontorsion  {rc.base_point_nontorsion}")
    print(f"conclusion: rank = {rc.rank}")


def _write_record(out: str | None, line: str) -> None:
    if out is None:
        print(line)
    else:
        with open(out, "a", encoding="utf-8") as fh:
            fh.write(line + "\n")


def _verify_file(args) -> int:
    bad = 0
    total = 0
    try:
        fh = open(args.file, encoding="utf-8")
    except OSError as exc:
        print(f"cannot read {args.file}: {exc}", file=sys.stderr)
        return 2
    with fh:
        for lineno, raw in enumerate(fh, 1):
            raw = raw.strip()
            if not raw:
                continue
            total += 1
            try:
                stored = json.loads(raw)
            except json.JSONDecodeError as exc:
                print(f"line {lineno}: not a certificate record ({exc})")
                bad += 1
                continue
            theorem = stored.get("theorem")
            try:
                if theorem == "rank-one":
                    sub = stored["subject"]
                    rc = certify_rank_one(int(sub["s"]), int(sub["t"]))
                    fresh_dict = _rank_fragment_dict(rc)
                    conclusion = f"rank = {rc.rank}"
                else:
                    cert = certificate_from_dict(stored)
                    sub = cert.subject
                    if theorem == "divisibility":
                        fresh = certify_divisibility(
                            sub["s"], sub["t"], sub["p"], sub["n"]
                        )
                    elif theorem == "square-subfamily":
                        fresh = certify_square_subfamily(sub["s"], sub["tau"], sub["p"])
                    elif theorem == "infinite-family":
                        fresh = certify_infinite_instance(
                            sub["s"], sub["t"], sub["p"], sub["n"]
                        )
                    else:
                        print(f"line {lineno}: unknown theorem {theorem}")
                        bad += 1
                        continue
                    fresh_dict = certificate_to_dict(fresh)
                    conclusion = fresh.conclusion
            except PreconditionFailure as exc:
                print(f"line {lineno}: REFUSED at check '{exc.reason}'")
                bad += 1
                continue
            if fresh_dict != stored:
                print(f"line {lineno}: MISMATCH for subject {stored.get('subject')}")
                bad += 1
            elif args.verbose:
                print(f"line {lineno}: ok {conclusion}")
    print(f"{total - bad}/{total} certificates verified")
    return 0 if bad == 0 and total > 0 else 1


def cmd_verify(args) -> int:
    if args.file is not None:
        if args.s is not None or args.t is not None:
            print("--file replaces --s/--t, not combines with them", file=sys.stderr)
            return 2
        return _verify_file(args)
    if args.s is None or args.t is None:
        print("single-shot verification needs --s and --t (or --file)", file=sys.stderr)
        return 2
    try:
        if args.mode == "rank":
            rc = certify_rank_one(args.s, args.t)
            _print_rank_fragment(rc)
            record = json.dumps(_rank_fragment_dict(rc), separators=(",", ":"))
            _write_record(args.out, record)
            return 0
        if args.p is None:
            print(f"mode {args.mode} needs --p", file=sys.stderr)
            return 2
        if args.mode == "main":
            cert = certify_divisibility(args.s, args.t, args.p, args.n)
        elif args.mode == "square_subfamily":
            cert = certify_square_subfamily(args.s, args.t, args.p)
        else:
            cert = certify_infinite_instance(args.s, args.t, args.p, args.n)
    except PreconditionFailure as exc:
        print(f"REFUSED at check '{exc.reason}': {exc}")
        return 1
    _print_ledger(cert)
    _write_record(args.out, certificate_to_jsonl(cert))
    return 0


def cmd_selmer_table(args) -> int:
    ells = (
        [int(x) for x in args.ells.split(",")]
        if args.ells
        else [q for q in range(2, args.max_ell + 1) if is_prime(q)]
    )
    print("ell,mod16,dim_forward,dim_dual,rank_upper,residue_prediction")
    for ell in ells:
        rep = selmer(ell)
        pred = rank_bound_by_residue(ell)
        assert rep.rank_upper == pred
        print(
            f"{ell},{ell % 16},{rep.dim_forward},{rep.dim_dual},"
            f"{rep.rank_upper},{pred}"
        )
    return 0


def cmd_heights(args) -> int:
    c = make_family(args.s, args.t)
    p0 = base_point(c)
    h = canonical_height(c, p0, args.iterations)
    gaps = silverman_gaps(c)
    print(f"ell = {c.ell}")
    print(f"naive height h(P) = {naive_height(p0):.6f}")
    print(f"canonical height in [{h.lo:.9f}, {h.hi:.9f}] ({h.iterations} doublings)")
    print(f"height gaps: -{gaps.lower_gap:.6f} / +{gaps.upper_gap:.6f}")
    try:
        floor = vy_lower_bound(-c.ell)
        print(f"height floor = {floor:.6f}")
        print(f"index bound m^2 <= {h.hi / floor:.4f}")
    except ValueError as exc:
        print(f"height floor unavailable: {exc}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="ellcert",
        description="Exact certificates for class-number divisibility in the "
        "quartic-twist family y^2 = x^3 - (s^4 + t^2) x",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("search", help="enumerate parameters and certify")
    sp.add_argument("--mode", choices=MODES, default="main")
    sp.add_argument("--p", type=int, default=5, help="odd prime >= 5")
    sp.add_argument("--n", type=int, default=1, help="filtration depth target")
    sp.add_argument("--max-param", type=int, required=True,
                    help="search all pairs with max(s,t) up to this")
    sp.add_argument("--target-count", type=int, default=10**9,
                    help="stop after this many certificates")
    sp.add_argument("--out", default="-", help="output path, - for stdout")
    sp.add_argument("--format", choices=("jsonl", "csv", "pretty"), default="jsonl")
    sp.add_argument("--checkpoint", default=None,
                    help="checkpoint file for resumable runs")
    sp.add_argument("--workers", type=int, default=_default_workers(),
                    help="worker processes (ELLCERT_WORKERS)")
    sp.set_defaults(func=cmd_search)

    vp_ = sub.add_parser(
        "verify", help="certify one parameter pair and print the full ledger"
    )
    vp_.add_argument("--s", type=int)
    vp_.add_argument("--t", type=int, help="t (or tau in square_subfamily mode)")
    vp_.add_argument("--p", type=int)
    vp_.add_argument("--n", type=int, default=1)
    vp_.add_argument("--mode", choices=MODES + ("rank",), default="main")
    vp_.add_argument("--out", default=None, help="append the JSONL record here")
    vp_.add_argument(
        "--file", default=None, help="re-verify a stored JSONL batch instead"
    )
    vp_.add_argument("--verbose", action="store_true")
    vp_.set_defaults(func=cmd_verify)

    st = sub.add_parser("selmer-table", help="descent rank caps for prime ell")
    group = st.add_mutually_exclusive_group(required=True)
    group.add_argument("--ells", help="comma-separated primes")
    group.add_argument("--max-ell", type=int, help="all primes up to this")
    st.set_defaults(func=cmd_selmer_table)

    hp = sub.add_parser("heights", help="height report for one family member")
    hp.add_argument("--s", type=int, required=True)
    hp.add_argument("--t", type=int, required=True)
    hp.add_argument("--iterations", type=int, default=6)
    hp.set_defaults(func=cmd_heights)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


def entry() -> None:
    sys.exit(main())
