"""Command line front door.

Machine-readable JSON reports go to stdout; human summaries go to
stderr.  Exit codes: 0 success, 2 usage or parse errors, 3 a solver
found the instance satisfiable, 4 an adversary invariant broke.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time

from . import arrows, csp, game, ppad, report, sperner

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_SATISFIABLE = 3
EXIT_INVARIANT = 4


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"error: {message}\n")
        sys.exit(EXIT_USAGE)


def _say(msg: str) -> None:
    sys.stderr.write(msg + "\n")


def _load_csp(path: str) -> csp.Csp:
    try:
        return csp.read_nogood_file(path)
    except (OSError, csp.ParseError) as e:
        _say(f"cannot read {path}: {e}")
        sys.exit(EXIT_USAGE)


# ---------------------------------------------------------------- commands


def cmd_gen(args) -> int:
    started = time.time()
    if args.problem == "sperner":
        instance, index_map = sperner.generate_phi(args.n)
    else:
        instance, index_map = arrows.generate_psi(args.n, args.boundary)
    csp.write_nogood_file(instance, args.out)
    if args.map_out:
        with open(args.map_out, "w", encoding="utf-8") as fh:
            json.dump(index_map, fh, sort_keys=True)
            fh.write("\n")
    metrics = {
        "num_vars": instance.num_vars,
        "k": instance.k,
        "nogoods": len(instance.nogoods),
        "out": args.out,
    }
    report.emit(report.run_report("gen", None, metrics, started))
    _say(f"wrote {args.problem} n={args.n}: {instance.num_vars} vars, "
         f"{len(instance.nogoods)} nogoods -> {args.out}")
    return EXIT_OK


def cmd_solve(args) -> int:
    started = time.time()
    instance = _load_csp(getattr(args, "in"))
    try:
        tree = csp.dpll_search(instance, args.policy, args.seed)
    except csp.Satisfiable as e:
        print(json.dumps({"satisfiable": True, "witness": e.witness}, sort_keys=True))
        _say("instance is satisfiable")
        return EXIT_SATISFIABLE
    metrics_t = csp.verify_tree(instance, tree)
    proof = csp.tree_to_proof(instance, tree)
    check = csp.check_proof(instance, proof)
    metrics = {
        "leaves": metrics_t.leaves,
        "nodes": metrics_t.nodes,
        "depth": metrics_t.depth,
        "policy": args.policy,
        "proof_checked": bool(check),
        "derived_steps": proof.derived_count(),
    }
    rep = report.run_report("solve", args.seed, metrics, started)
    rows = [{"label": os.path.basename(getattr(args, "in")), **metrics}]
    report.emit(rep, rows, args.csv, args.figures_dir, "solve")
    _say(f"tree: {metrics_t.leaves} leaves, depth {metrics_t.depth}; proof "
         f"{'ok' if check else 'FAILED'}")
    return EXIT_OK


def cmd_adversary(args) -> int:
    started = time.time()
    alices = list(game.ALICE_FACTORIES) if args.alice == "all" else [args.alice]
    ns = [int(x) for x in args.n.split(",")]
    rows = []
    for n in ns:
        problem = game.problem_for(args.problem, n)
        for alice_name in alices:
            for g in range(args.games):
                seed = args.seed + g
                view = game.view_for(args.problem, n)
                alice = game.ALICE_FACTORIES[alice_name](view, seed)
                bob = game.bob_for(args.problem, n)
                try:
                    transcript = game.play(
                        problem, alice, bob,
                        paranoid=args.paranoid, record_moves=bool(args.transcript),
                    )
                except game.InvariantViolation as e:
                    _say(f"invariant violation: {e} (problem={args.problem} n={n} "
                         f"alice={alice_name} seed={seed})")
                    return EXIT_INVARIANT
                if transcript.terminal == "ongoing":
                    _say(f"game stalled at move cap (n={n} alice={alice_name} seed={seed})")
                    return EXIT_INVARIANT
                rows.append({
                    "problem": args.problem,
                    "n": n,
                    "alice": alice_name,
                    "seed": seed,
                    "t": transcript.t,
                    "terminal": transcript.terminal,
                    "certificate": 2 ** transcript.t if transcript.t < 512 else None,
                    "moves": transcript.move_count,
                })
                if args.transcript:
                    with open(args.transcript, "a", encoding="utf-8") as fh:
                        game.write_transcript(
                            transcript, fh,
                            {"problem": args.problem, "n": n,
                             "alice": alice_name, "seed": seed},
                        )
    rows.sort(key=lambda r: (r["n"], r["alice"], r["seed"]))
    ts = {}
    for row in rows:
        ts.setdefault(row["n"], []).append(row["t"])
    t_stats = {
        str(n): {
            "t_min": min(v),
            "t_median": sorted(v)[len(v) // 2],
            "games": len(v),
        }
        for n, v in sorted(ts.items())
    }
    metrics = {"problem": args.problem, "alices": alices, "per_n": t_stats}
    rep = report.run_report("adversary", args.seed, metrics, started)
    report.emit(rep, rows, args.csv, args.figures_dir, "adversary")
    for n, stats in t_stats.items():
        _say(f"n={n}: t_min={stats['t_min']} t_median={stats['t_median']} "
             f"over {stats['games']} games")
    return EXIT_OK


def cmd_dnc(args) -> int:
    started = time.time()
    rows = []
    if args.oracle == "file":
        grid = arrows.raster_to_grid(open(getattr(args, "in"), encoding="utf-8").read())
        conflict, queries = arrows.find_conflict_dnc(
            lambda c: grid.cells[c], grid.n, eager_boundary=args.eager
        )
        ok = tuple(sorted(conflict.cells)) in {
            tuple(sorted(p)) for p in arrows.scan_all_conflicts(grid)
        } if conflict.kind == "pair" else True
        rows.append({"n": grid.n, "seed": "-", "queries": queries,
                     "kind": conflict.kind, "verified": ok})
    else:
        ns = [int(x) for x in args.n.split(",")]
        for n in ns:
            for trial in range(args.trials):
                seed = args.seed + trial
                oracle, _ = arrows.planted_conflict_oracle(n, seed)
                conflict, queries = arrows.find_conflict_dnc(
                    oracle, n, eager_boundary=args.eager
                )
                verified = (
                    conflict.kind == "pair"
                    and abs(arrows.rotation(*conflict.dirs)) > 45
                )
                rows.append({"n": n, "seed": seed, "queries": queries,
                             "kind": conflict.kind, "verified": verified})
    max_q = max(r["queries"] for r in rows)
    all_verified = all(r["verified"] for r in rows)
    budget_ok = all(r["queries"] <= 6 * r["n"] for r in rows if r["n"] != "-")
    metrics = {"max_queries": max_q, "all_verified": all_verified,
               "within_6n": budget_ok, "trials": len(rows)}
    rep = report.run_report("dnc", args.seed, metrics, started)
    report.emit(rep, rows, args.csv, args.figures_dir, "dnc")
    _say(f"{len(rows)} searches, max queries {max_q}, "
         f"verified={all_verified}, within 6n: {budget_ok}")
    return EXIT_OK if all_verified else EXIT_INVARIANT


def cmd_reduce(args) -> int:
    started = time.time()
    if args.kind == "rleafd-to-arrows":
        try:
            inst = ppad.RleafdInstance.from_json(
                open(getattr(args, "in"), encoding="utf-8").read()
            )
        except (OSError, ppad.InvalidInstance) as e:
            _say(f"bad RLEAFD input: {e}")
            return EXIT_USAGE
        oracle, grid = ppad.reduce_rleafd_to_arrows(inst)
        with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(arrows.grid_to_raster(grid))
        metrics = {"side": oracle.n, "out": args.out,
                   "boundary_valid": oracle.boundary_valid()}
    else:  # arrows-to-brouwer
        grid = arrows.raster_to_grid(open(getattr(args, "in"), encoding="utf-8").read())
        oracle = ppad.ArrowOracle(grid.n, lambda p: grid.cells[p])
        coloring = ppad.reduce_arrows_to_brouwer(oracle)
        lines = []
        for p2 in range(coloring.n):
            lines.append("".join(str(coloring((p1, p2))) for p1 in range(coloring.n)))
        with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write("\n".join(lines) + "\n")
        metrics = {"side": coloring.n, "out": args.out,
                   "boundary_valid": coloring.boundary_valid()}
    report.emit(report.run_report(f"reduce:{args.kind}", None, metrics, started))
    _say(f"reduced -> {args.out} (side {metrics['side']})")
    return EXIT_OK


def cmd_pipeline(args) -> int:
    started = time.time()
    results = []
    for run in range(args.runs):
        seed = args.seed + run
        res = ppad.pipeline(args.k, seed)
        inst = res["instance"]
        ok = res["leaf"] in inst.directed_leaves() and res["leaf"] != (0, 0)
        results.append({"k": args.k, "seed": seed, "leaf": list(res["leaf"]),
                        "square": list(res["square"]), "ok": ok})
    all_ok = all(r["ok"] for r in results)
    metrics = {"k": args.k, "runs": args.runs, "all_ok": all_ok}
    rep = report.run_report("pipeline", args.seed, metrics, started)
    rep["results"] = results
    report.emit(rep)
    _say(f"{args.runs} pipeline runs at k={args.k}: "
         f"{'all valid leaves' if all_ok else 'FAILURES PRESENT'}")
    return EXIT_OK if all_ok else EXIT_INVARIANT


def cmd_serve(args) -> int:
    from . import service

    _say(f"serving on port {args.port}")
    service.serve(
        port=args.port,
        static_dir=args.static_dir,
        snapshot_dir=args.snapshot_dir,
        max_n=args.max_n,
    )
    return EXIT_OK


def build_parser() -> _Parser:
    parser = _Parser(prog="planarcsp", description=__doc__)
    sub = parser.add_subparsers(dest="cmd", required=True)

    p = sub.add_parser("gen", help="generate a CSP instance file")
    p.add_argument("--problem", choices=("sperner", "arrows"), required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--boundary", choices=("weak", "strict"), default="weak")
    p.add_argument("--out", required=True)
    p.add_argument("--map-out", dest="map_out")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("solve", help="DPLL-solve a nogood file")
    p.add_argument("--in", required=True)
    p.add_argument("--policy", default="first_unset",
                   choices=tuple(csp.POLICIES))
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--csv")
    p.add_argument("--figures-dir", dest="figures_dir")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("adversary", help="run adversary games")
    p.add_argument("--problem", choices=("sperner", "arrows"), required=True)
    p.add_argument("--n", required=True, help="board size or comma list")
    p.add_argument("--alice", default="all",
                   choices=tuple(game.ALICE_FACTORIES) + ("all",))
    p.add_argument("--games", type=int, default=5)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--paranoid", action="store_true")
    p.add_argument("--transcript")
    p.add_argument("--csv")
    p.add_argument("--figures-dir", dest="figures_dir")
    p.set_defaults(func=cmd_adversary)

    p = sub.add_parser("dnc", help="divide-and-conquer conflict search")
    p.add_argument("--n", default="64", help="board size or comma list")
    p.add_argument("--oracle", choices=("planted", "file"), default="planted")
    p.add_argument("--in")
    p.add_argument("--trials", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--eager", action="store_true",
                   help="query the full boundary ring up front")
    p.add_argument("--csv")
    p.add_argument("--figures-dir", dest="figures_dir")
    p.set_defaults(func=cmd_dnc)

    p = sub.add_parser("reduce", help="run a grid reduction")
    p.add_argument("kind", choices=("rleafd-to-arrows", "arrows-to-brouwer"))
    p.add_argument("--in", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_reduce)

    p = sub.add_parser("pipeline", help="end-to-end reduction round trips")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--runs", type=int, default=1)
    p.set_defaults(func=cmd_pipeline)

    p = sub.add_parser("serve", help="serve the interactive game API")
    p.add_argument("--port", type=int, default=8040)
    p.add_argument("--static-dir", dest="static_dir")
    p.add_argument("--snapshot-dir", dest="snapshot_dir")
    p.add_argument("--max-n", dest="max_n", type=int, default=256)
    p.set_defaults(func=cmd_serve)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.cmd == "dnc" and args.oracle == "file" and not getattr(args, "in"):
        _say("error: --oracle file requires --in")
        return EXIT_USAGE
    try:
        return args.func(args)
    except game.InvariantViolation as e:
        _say(str(e))
        return EXIT_INVARIANT


if __name__ == "__main__":
    sys.exit(main())
