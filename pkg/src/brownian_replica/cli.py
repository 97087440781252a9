"""Command-line front end.

Every command writes JSON, CSV or plain text to stdout (or ``--output``).
Exit status: 0 on success, 1 when a ``verify`` suite fails, 2 for bad input.
"""
from __future__ import annotations

import argparse
import contextlib
import csv
import io
import json
import sys

import numpy as np

from .errors import ReplicaError

SUITES = ("counts", "matrix", "spectrum", "evolution", "observables", "symmetry")
KNOWN_CATEGORY_COUNTS = {1: 2, 2: 8, 3: 26}


class UsageError(Exception):
    pass


def parse_times(text: str) -> np.ndarray:
    """``t0:t1:steps`` (``steps`` points, both ends included) or a comma list."""
    try:
        if ":" in text:
            t0, t1, steps = text.split(":")
            steps = int(steps)
            if steps < 1:
                raise ValueError
            return np.linspace(float(t0), float(t1), steps)
        return np.array([float(x) for x in text.split(",")])
    except ValueError as exc:
        raise UsageError(f"cannot parse times {text!r}") from exc


def load_spectrum(path: str | None, D: int):
    if path is None:
        return None
    with open(path) as fh:
        data = json.load(fh)
    if "E" not in data:
        raise UsageError(f"{path}: expected an object with key 'E'")
    E = np.asarray(data["E"], dtype=float)
    if E.shape != (D,):
        raise UsageError(f"{path}: expected {D} energies, got shape {E.shape}")
    return E


def load_ops(path: str, n: int | None = None) -> list[np.ndarray]:
    with open(path) as fh:
        data = json.load(fh)
    try:
        ops = [np.asarray(m, dtype=float) for m in data["ops"]]
        ops = [m[..., 0] + 1j * m[..., 1] for m in ops]
    except (KeyError, IndexError, TypeError, ValueError) as exc:
        raise UsageError(f"{path}: expected {{'ops': [[[re, im], ...], ...]}}") from exc
    if n is not None and len(ops) != 2 * n:
        raise UsageError(f"{path}: need {2 * n} operators, got {len(ops)}")
    return ops


def _complex_pair(z) -> list[float]:
    z = complex(z)
    return [z.real, z.imag]


# --- commands ---------------------------------------------------------------------


def cmd_enumerate(args) -> dict:
    from .graph import count_graphs, enumerate_graphs

    per_p = [len(enumerate_graphs(args.n, p)) for p in range(args.n + 1)]
    out = {"n": args.n, "total": sum(per_p), "per_p": per_p, "formula_total": count_graphs(args.n)}
    if args.format == "text":
        lines = [str(out["total"])] + [f"p={p}: {c}" for p, c in enumerate(per_p)]
        return {"_text": "\n".join(lines)}
    return out


def _basis(n: int):
    from .category import cached_discovery, standard_basis

    if n in KNOWN_CATEGORY_COUNTS:
        return standard_basis(n), None
    disc = cached_discovery(n)
    return disc.basis, disc


def cmd_categories(args) -> dict:
    from .category import cached_discovery
    from .graph import serialize

    disc = cached_discovery(args.n)
    basis, _ = _basis(args.n)
    rank = {c.name: c.rank for c in disc.basis}
    cats = []
    for idx, cat in enumerate(basis.categories, start=1):
        entry = {"index": idx, "label": cat.name, "p": cat.p, "size": cat.size, "rank": rank.get(cat.name)}
        if args.members:
            entry["members"] = [serialize(g) for g in sorted(cat.members)]
        cats.append(entry)
    out = {"n": args.n, "count": len(cats), "total_members": sum(c["size"] for c in cats), "categories": cats}
    if args.format == "text":
        lines = [f"{c['index']:>3}  {c['label']:<40} p={c['p']} size={c['size']} rank={c['rank']}" for c in cats]
        lines.append(f"{out['count']} categories, {out['total_members']} graphs")
        return {"_text": "\n".join(lines)}
    return out


def cmd_matrix(args) -> dict:
    from .liouvillian import build_M

    basis, _ = _basis(args.n)
    mat = build_M(args.n, basis)
    out = {"n": args.n, "labels": basis.names(), "mj": args.mj}
    if args.numeric_D is not None:
        if args.mj:
            out["matrix"] = mat.mj_numeric(args.numeric_D, args.J).tolist()
        else:
            num = mat.numeric(args.numeric_D, args.J, w=complex(args.w))
            out["matrix"] = [[_complex_pair(z) for z in row] for row in num]
    else:
        out["matrix"] = mat.as_strings(mj=args.mj)
    if args.format == "text":
        rows = out["matrix"]
        return {"_text": "\n".join("\t".join(str(x) for x in row) for row in rows)}
    return out


def cmd_spectrum(args) -> dict:
    from .evolution import spectrum_MJ

    if args.D is None:
        spec = spectrum_MJ(args.n)
        items = sorted(((str(k), v) for k, v in spec.items()))
        out = {"n": args.n, "symbolic": True, "eigenvalues": [{"value": k, "multiplicity": v} for k, v in items]}
    else:
        vals = spectrum_MJ(args.n, args.D, args.J)
        out = {"n": args.n, "D": args.D, "J": args.J, "eigenvalues": [_complex_pair(v) for v in vals]}
    return out


def cmd_evolve(args) -> dict:
    from .evolution import generator_matrix, solution

    load_spectrum(args.spectrum, int(args.D))
    times = parse_times(args.times)
    sol = solution(args.n, args.D, args.J)
    names = generator_matrix(args.n).basis.names()
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    header = ["t"]
    for k, name in enumerate(names, start=1):
        header += [f"re f_{k} {name}", f"im f_{k} {name}"]
    writer.writerow(header)
    for t in times:
        f = np.asarray(sol(t), dtype=complex)
        row = [repr(float(t))]
        for z in f:
            row += [repr(float(z.real)), repr(float(z.imag))]
        writer.writerow(row)
    return {"_text": buf.getvalue().rstrip("\n")}


def cmd_correlate(args) -> dict:
    from .observable import correlator_details
    from .evolution import generator_matrix

    ops = load_ops(args.ops, args.n)
    E = load_spectrum(args.spectrum, ops[0].shape[0])
    if ops[0].shape[0] != args.D:
        raise UsageError(f"operators are {ops[0].shape[0]}x{ops[0].shape[0]} but --D is {args.D}")
    res = correlator_details(args.n, ops, args.D, args.J, E, args.t)
    return res.as_dict(generator_matrix(args.n).basis.names())


def cmd_correlate_multi(args) -> dict:
    from .observable import multi_time_correlator

    ops = load_ops(args.ops, 3)
    if ops[0].shape[0] != args.D:
        raise UsageError(f"operators are {ops[0].shape[0]}x{ops[0].shape[0]} but --D is {args.D}")
    E = load_spectrum(args.spectrum, args.D)
    times = parse_times(args.times)
    if len(times) != 3:
        raise UsageError("--times needs exactly three values t1,t2,t3")
    value = multi_time_correlator(ops, args.D, args.J, E, tuple(times))
    return {"value": _complex_pair(value), "times": [float(t) for t in times]}


# --- verification suites ----------------------------------------------------------


def _suite_counts(args, rng) -> tuple[bool, float, dict]:
    from .category import discover
    from .graph import count_graphs, enumerate_graphs

    graphs = enumerate_graphs(args.n)
    dev = abs(len(graphs) - count_graphs(args.n)) + abs(len(set(graphs)) - len(graphs))
    details = {"graphs": len(graphs), "formula": count_graphs(args.n)}
    if args.n <= 4:
        disc = discover(args.n)
        details["categories"] = len(disc.basis)
        details["covered"] = disc.basis.covered()
        if args.n in KNOWN_CATEGORY_COUNTS:
            dev += abs(len(disc.basis) - KNOWN_CATEGORY_COUNTS[args.n])
    return dev == 0, float(dev), details


def _suite_matrix(args, rng) -> tuple[bool, float, dict]:
    from .evolution import category_dense, generator_matrix
    from .oracle import build_dense

    mat = generator_matrix(args.n)
    dense_L = build_dense(args.n, args.D, "GUE", args.J, max_rows=args.max_rows).matrix
    F = category_dense(args.n, args.D, args.max_rows)
    M = mat.numeric(args.D, args.J, w=-args.n * args.J)
    worst = 0.0
    for a in range(mat.size):
        lhs = dense_L @ F[a]
        rhs = sum(M[b, a] * F[b] for b in range(mat.size) if M[b, a] != 0)
        worst = max(worst, float(np.max(np.abs(lhs - rhs))))
    return worst <= args.tol, worst, {"categories": mat.size}


def _suite_spectrum(args, rng) -> tuple[bool, float, dict]:
    from .evolution import spectrum_residuals

    res = spectrum_residuals(args.n, args.D, args.J, args.max_rows)
    worst = max(r for _, _, r, _ in res)
    missing = [[lam.real, lam.imag] for lam, _, _, alive in res if not alive]
    return worst <= args.tol, worst, {"distinct_eigenvalues": len(res), "not_realized_at_D": missing}


def _suite_evolution(args, rng) -> tuple[bool, float, dict]:
    from .evolution import assemble_U
    from .oracle import build_dense, dense_expm

    worst = 0.0
    for E in (None, rng.normal(size=args.D)):
        g = build_dense(args.n, args.D, "GUE", args.J, E, max_rows=args.max_rows)
        for jt in (0.25, 1.0, 4.0):
            t = jt / args.J if args.J else jt
            U = assemble_U(args.n, args.D, args.J, E, t, args.max_rows)
            worst = max(worst, float(np.max(np.abs(U - dense_expm(g, t)))))
    return worst <= args.tol, worst, {"Jt": [0.25, 1.0, 4.0]}


def _suite_observables(args, rng) -> tuple[bool, float, dict]:
    from .observable import correlator, dense_contraction, random_ops
    from .oracle import build_dense, dense_expm

    worst = 0.0
    for _ in range(3):
        ops = random_ops(args.n, args.D, rng)
        E = rng.normal(size=args.D)
        t = float(rng.uniform(0.1, 2.0))
        U = dense_expm(build_dense(args.n, args.D, "GUE", args.J, E, max_rows=args.max_rows), t)
        ref = dense_contraction(U, ops)
        val = correlator(args.n, ops, args.D, args.J, E, t)
        worst = max(worst, abs(val - ref) / max(1.0, abs(ref)))
    return worst <= args.tol, worst, {"trials": 3}


def _suite_symmetry(args, rng) -> tuple[bool, float, dict]:
    from .oracle import build_dense, check_unitary_symmetry

    g = build_dense(args.n, args.D, "GUE", args.J, max_rows=args.max_rows)
    worst = check_unitary_symmetry(g, trials=20, seed=args.seed)
    g_e = build_dense(args.n, args.D, "GUE", args.J, rng.normal(size=args.D), max_rows=args.max_rows)
    control = check_unitary_symmetry(g_e, trials=5, seed=args.seed, require_zero_E=False)
    ok = worst <= 1e-10 and control > 1e-10
    return ok, worst, {"negative_control": control}


_SUITES = {
    "counts": _suite_counts,
    "matrix": _suite_matrix,
    "spectrum": _suite_spectrum,
    "evolution": _suite_evolution,
    "observables": _suite_observables,
    "symmetry": _suite_symmetry,
}


def cmd_verify(args) -> dict:
    rng = np.random.default_rng(args.seed)
    suites = SUITES if args.suite == "all" else (args.suite,)
    results = []
    for name in suites:
        ok, dev, details = _SUITES[name](args, rng)
        results.append({"suite": name, "passed": bool(ok), "max_deviation": dev, "details": details})
    return {"n": args.n, "D": args.D, "seed": args.seed, "passed": all(r["passed"] for r in results), "results": results}


# --- plumbing -----------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0, help="seed for randomized suites (default 0)")
    common.add_argument("--threads", type=int, default=None, help="limit BLAS threads (default: library default)")
    common.add_argument("--output", "-o", default=None, help="write to this file instead of stdout")
    common.add_argument("--max-rows", type=int, default=4096, help="dense budget on D^(2n) (default 4096)")
    common.add_argument("--tol", type=float, default=1e-9, help="verification tolerance (default 1e-9)")

    parser = argparse.ArgumentParser(prog="brownian-replica", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, help_text):
        p = sub.add_parser(name, parents=[common], help=help_text)
        p.add_argument("--n", type=int, required=True, help="number of replicas")
        return p

    p = add("enumerate", "count the graphs of n replicas")
    p.add_argument("--format", choices=("json", "text"), default="text")

    p = add("categories", "list the graph categories")
    p.add_argument("--format", choices=("json", "text"), default="json")
    p.add_argument("--members", action="store_true", help="include serialized members")

    p = add("matrix", "print the compact generator matrix")
    p.add_argument("--mj", action="store_true", help="substitute w = -nJ (the E-free part)")
    p.add_argument("--numeric-D", type=float, default=None)
    p.add_argument("--J", type=float, default=1.0)
    p.add_argument("--w", type=complex, default=0.0, help="numeric w when --numeric-D is given without --mj")
    p.add_argument("--format", choices=("json", "text"), default="json")

    p = add("spectrum", "eigenvalues of M_J (symbolic in D unless --D is given)")
    p.add_argument("--D", type=float, default=None)
    p.add_argument("--J", type=float, default=1.0)

    p = add("evolve", "pattern coefficients f_a(t) as CSV")
    p.add_argument("--D", type=float, required=True)
    p.add_argument("--J", type=float, default=1.0)
    p.add_argument("--times", required=True, help="t0:t1:points or a comma list")
    p.add_argument("--spectrum", default=None, help='JSON file {"E": [...]} (validated; f_a do not depend on E)')

    p = add("correlate", "averaged correlator Tr(O1(t) O2 O3(t) O4 ...)")
    p.add_argument("--D", type=int, required=True)
    p.add_argument("--J", type=float, default=1.0)
    p.add_argument("--ops", required=True, help='JSON file {"ops": [[[re, im], ...], ...]}')
    p.add_argument("--t", type=float, required=True)
    p.add_argument("--spectrum", default=None)

    p = sub.add_parser("correlate-multi", parents=[common], help="three-time correlator for n=3")
    p.add_argument("--n", type=int, default=3, choices=(3,))
    p.add_argument("--D", type=int, required=True)
    p.add_argument("--J", type=float, default=1.0)
    p.add_argument("--ops", required=True)
    p.add_argument("--times", required=True, help="t1,t2,t3 with t1 <= t2 <= t3")
    p.add_argument("--spectrum", default=None)

    p = add("verify", "compare against the dense oracle")
    p.add_argument("--D", type=int, default=2)
    p.add_argument("--J", type=float, default=1.0)
    p.add_argument("--suite", choices=SUITES + ("all",), default="all")
    return parser


COMMANDS = {
    "enumerate": cmd_enumerate,
    "categories": cmd_categories,
    "matrix": cmd_matrix,
    "spectrum": cmd_spectrum,
    "evolve": cmd_evolve,
    "correlate": cmd_correlate,
    "correlate-multi": cmd_correlate_multi,
    "verify": cmd_verify,
}


def _emit(result: dict, path: str | None) -> None:
    text = result["_text"] if "_text" in result else json.dumps(result, indent=2)
    if path is None:
        print(text)
    else:
        with open(path, "w") as fh:
            fh.write(text + "\n")


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if args.n < 1:
        print("error: --n must be at least 1", file=sys.stderr)
        return 2
    limiter = contextlib.nullcontext()
    if args.threads:
        from threadpoolctl import threadpool_limits

        limiter = threadpool_limits(limits=args.threads)
    try:
        with limiter:
            result = COMMANDS[args.command](args)
    except (UsageError, ReplicaError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    _emit(result, args.output)
    if args.command == "verify" and not result["passed"]:
        return 1
    return 0


def main(argv=None) -> None:
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
