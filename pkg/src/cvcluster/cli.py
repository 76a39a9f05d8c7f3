"""Command-line interface: ``cvcluster {synth,verify,decompose,teleport,gram}``.

Exit codes: 0 success, 1 a tolerance check failed, 2 bad input.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from fractions import Fraction

import numpy as np

from .canonical import check_canonical_conditions, synthesize_canonical
from .decomp import paper_minimal_chain4, reck_decompose
from .errors import DecompositionError, FactorizationError, InvalidCircuitError, NonUnitaryError
from .gaussian import db_to_squeezing, unitarity_residual
from .graph import Graph, chain, cluster_condition_residuals, excess_noise, measure_nullifiers, named_graph
from .gram import derive_gram, synthesize_gram
from .serialize import read_json, write_json
from .synthesis import SynthesisResult
from .teleport import R_HIGH_DEFAULT, ProtocolSpec, monte_carlo_mean, run_teleport

OK, FAIL, BAD_INPUT = 0, 1, 2
DEFAULT_GRAM_SQUEEZE = 1.0


class InputError(Exception):
    pass


def _floats(text: str):
    try:
        return [float(v) for v in text.replace(";", ",").split(",") if v.strip()]
    except ValueError:
        raise InputError(f"cannot parse number list {text!r}") from None


def _emit(header, rows, fmt):
    if fmt == "csv":
        w = csv.writer(sys.stdout, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)
        return
    cells = [[_cell(v) for v in r] for r in rows]
    widths = [max([len(str(h))] + [len(r[i]) for r in cells]) for i, h in enumerate(header)]
    print("  ".join(str(h).rjust(w) for h, w in zip(header, widths)))
    for r in cells:
        print("  ".join(c.rjust(w) for c, w in zip(r, widths)))


def _cell(v):
    if isinstance(v, float):
        return f"{v:.10g}"
    return str(v)


def _graph(args, required=True):
    if getattr(args, "graph_file", None):
        try:
            return Graph.from_json(read_json(args.graph_file))
        except (OSError, KeyError, ValueError) as exc:
            raise InputError(f"cannot read graph file: {exc}") from None
    if getattr(args, "graph", None):
        try:
            return named_graph(args.graph)
        except ValueError as exc:
            raise InputError(str(exc)) from None
    if required:
        raise InputError("a graph is required (--graph NAME or --graph-file PATH)")
    return None


def _squeezing(args, n, default):
    """Per-mode squeezing in nats from whichever single flag was given."""
    given = [f for f in ("squeeze", "squeeze_db", "squeeze_list", "squeeze_db_list") if getattr(args, f, None) is not None]
    if len(given) > 1:
        raise InputError("give squeezing once: --squeeze, --squeeze-db, --squeeze-list or --squeeze-db-list")
    if not given:
        if default is None:
            raise InputError("squeezing is required")
        R = np.full(n, default)
    elif given[0] == "squeeze":
        R = np.full(n, args.squeeze)
    elif given[0] == "squeeze_db":
        R = np.full(n, float(db_to_squeezing(args.squeeze_db)))
    elif given[0] == "squeeze_list":
        R = np.array(_floats(args.squeeze_list))
    else:
        R = np.asarray(db_to_squeezing(np.array(_floats(args.squeeze_db_list))))
    if R.shape != (n,):
        raise InputError(f"expected {n} squeezing values, got {R.size}")
    if not np.all(np.isfinite(R)):
        raise InputError("squeezing values must be finite")
    return R


def _perm(text, n):
    if text is None:
        return None
    p = [int(v) - 1 for v in _floats(text)]
    if sorted(p) != list(range(n)):
        raise InputError(f"--perm must be a permutation of 1..{n}")
    return p


def _write(args, obj):
    if args.out:
        write_json(args.out, obj)


def _load_circuit(path) -> SynthesisResult:
    try:
        return SynthesisResult.from_json(read_json(path))
    except (OSError, KeyError, TypeError, ValueError) as exc:
        raise InputError(f"cannot read circuit {path}: {exc}") from None


# --- subcommands ------------------------------------------------------------


def cmd_synth(args) -> int:
    g = _graph(args)
    tol = args.tol if args.tol is not None else 1e-8
    if args.method == "canonical":
        if args.r is None:
            raise InputError("--method canonical needs --r")
        if args.r < 0:
            raise InputError("--r must be non-negative")
        res = synthesize_canonical(g, args.r)
        diag = check_canonical_conditions(res, g, args.r)
        predicted = np.full(g.n, np.exp(-2 * args.r))
        checks = {"eq3": diag.eq3_max, "eq4": diag.eq4_max}
    else:
        R = _squeezing(args, g.n, DEFAULT_GRAM_SQUEEZE)
        res = synthesize_gram(g, R, args.strategy, _perm(args.perm, g.n))
        predicted = excess_noise(g, res.U, res.R)
        checks = {"cluster": float(cluster_condition_residuals(res.U, g).max())}
    checks["unitarity"] = unitarity_residual(res.U)

    rows = [(k + 1, float(res.R[k]), float(res.R_db[k]), float(predicted[k])) for k in range(g.n)]
    _emit(["mode", "R_nats", "R_dB", "predicted_excess"], rows, args.format)
    for name, v in checks.items():
        print(f"# residual {name}: {v:.3e}", file=sys.stderr)
    _write(args, res)
    return OK if max(checks.values()) <= tol else FAIL


def closed_form_excess(res: SynthesisResult, g: Graph) -> np.ndarray:
    method = res.provenance.get("method")
    if method == "canonical":
        return np.full(g.n, np.exp(-2 * float(res.provenance["r"])))
    return excess_noise(g, res.U, res.R)


def cmd_verify(args) -> int:
    res = _load_circuit(args.circuit)
    g = _graph(args, required=False) or res.graph
    if g is None:
        raise InputError("circuit has no graph; pass --graph")
    if g.n != res.n:
        raise InputError(f"circuit has {res.n} modes, graph has {g.n} vertices")
    tol = args.tol if args.tol is not None else 1e-8
    try:
        state = res.prepare_state()
    except NonUnitaryError as exc:
        raise InputError(str(exc)) from None
    sim = measure_nullifiers(g, state).variances
    try:
        closed = closed_form_excess(res, g)
    except InvalidCircuitError as exc:
        print(f"error: {exc}", file=sys.stderr)
        _emit(["vertex", "simulated", "cluster_residual"],
              [(a + 1, float(sim[a]), float(exc.residuals[a])) for a in range(g.n)], args.format)
        return FAIL
    diff = np.abs(sim - closed)
    rows = [(a + 1, float(sim[a]), float(closed[a]), float(diff[a])) for a in range(g.n)]
    _emit(["vertex", "simulated", "closed_form", "abs_diff"], rows, args.format)
    _write(args, {"simulated": sim, "closed_form": closed, "max_abs_diff": float(diff.max())})
    return OK if diff.max() <= tol else FAIL


def cmd_decompose(args) -> int:
    if (args.circuit is None) == (args.fixture is None):
        raise InputError("give exactly one of --circuit or --fixture")
    extra = {}
    if args.fixture is not None:
        if args.fixture != "paper-minimal-chain4":
            raise InputError(f"unknown fixture {args.fixture!r}")
        net = paper_minimal_chain4()
        tol = args.tol if args.tol is not None else 1e-12
        extra["cluster_residual"] = float(cluster_condition_residuals(net.matrix(), chain(4)).max())
        extra["unitarity"] = unitarity_residual(net.matrix())
    else:
        tol = args.tol if args.tol is not None else 1e-9
        try:
            net = reck_decompose(_load_circuit(args.circuit).U, tol=max(tol, 1e-9))
        except NonUnitaryError as exc:
            raise InputError(str(exc)) from None
    residual = net.residual()
    rows = [(i + 1, json.dumps(e.to_json())) for i, e in enumerate(net.elements)]
    _emit(["step", "element"], rows, args.format)
    print(f"# beam splitters: {net.n_beam_splitters}  residual: {residual:.3e}", file=sys.stderr)
    for k, v in extra.items():
        print(f"# {k}: {v:.3e}", file=sys.stderr)
    _write(args, dict(net.to_json(), residual=residual, **extra))
    return OK if max([residual, *extra.values()]) <= tol else FAIL


def _nominal_p(spec: ProtocolSpec) -> float:
    """Textbook law for the p excess: ``3 e^{-2R}/m``, or the two-rail split form."""
    R = spec.rail_squeezing()
    if spec.m == 2:
        return float((13 * np.exp(-2 * R[0]) + 5 * np.exp(-2 * R[1])) / 12)
    return float(3 * np.exp(-2 * R).mean() / spec.m)


def cmd_teleport(args) -> int:
    given = [f for f in ("squeeze", "squeeze_db", "squeeze_list") if getattr(args, f) is not None]
    if len(given) > 1:
        raise InputError("give squeezing once: --squeeze, --squeeze-db or --squeeze-list")
    if args.squeeze_list is not None:
        sq = tuple(_floats(args.squeeze_list))
    elif args.squeeze_db is not None:
        sq = float(db_to_squeezing(args.squeeze_db))
    else:
        sq = args.squeeze if args.squeeze is not None else DEFAULT_GRAM_SQUEEZE
    inp = _floats(args.input)
    if len(inp) != 2:
        raise InputError("--input takes x,p")
    spec = ProtocolSpec(args.cluster, sq, args.r_high, tuple(inp), args.seed, args.vectors)
    spec.rail_squeezing()
    tol = args.tol if args.tol is not None else 1e-9
    rep = run_teleport(spec)
    rows = [
        ("x_out", rep.excess_x, rep.predicted_x, 0.0),
        ("p_out", rep.excess_p, rep.predicted_p, _nominal_p(spec)),
    ]
    _emit(["quadrature", "simulated", "exact", "nominal_law"], rows, args.format)
    out = rep.to_json()
    out["nominal_p"] = _nominal_p(spec)
    if args.shots:
        mc = monte_carlo_mean(spec, args.shots)
        out["monte_carlo"] = {"shots": args.shots, "mean": mc.mean, "stderr": mc.stderr}
        print(f"# corrected mean over {args.shots} shots: {mc.mean[0]:.6f} +- {mc.stderr[0]:.1e}, "
              f"{mc.mean[1]:.6f} +- {mc.stderr[1]:.1e}", file=sys.stderr)
    _write(args, out)
    worst = max(abs(rep.excess_x - rep.predicted_x), abs(rep.excess_p - rep.predicted_p))
    return OK if worst <= tol else FAIL


def cmd_gram(args) -> int:
    g = _graph(args)
    gram = derive_gram(g)
    rows = []
    for a in range(g.n):
        row = [a + 1]
        for b in range(g.n):
            v = float(gram.G[a, b])
            row.append(str(Fraction(v).limit_denominator(10_000)) if args.rational else v)
        rows.append(row)
    _emit(["vertex"] + [str(b + 1) for b in range(g.n)], rows, args.format)
    _write(args, {"graph": g.to_json(), "G": gram.G})
    return OK


# --- argument parsing -------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="cvcluster", description="Cluster-state circuits from off-line squeezing.")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--out", help="write a JSON report here")
        sp.add_argument("--format", choices=["text", "csv"], default="text")
        sp.add_argument("--tol", type=float, help="override the pass/fail tolerance")

    def graph_args(sp):
        grp = sp.add_mutually_exclusive_group()
        grp.add_argument("--graph", help="chain:n, diamond, multirail:m, edgeless:n, paper:sixmode ...")
        grp.add_argument("--graph-file", help="graph JSON file ({'n': .., 'edges': [[1, 2], ..]})")

    s = sub.add_parser("synth", help="build a circuit for a graph")
    common(s)
    graph_args(s)
    s.add_argument("--method", choices=["canonical", "gram"], default="gram")
    s.add_argument("--r", type=float, help="canonical squeezing (nats)")
    s.add_argument("--squeeze", type=float, help="uniform input squeezing (nats)")
    s.add_argument("--squeeze-db", type=float, help="uniform input squeezing (dB)")
    s.add_argument("--squeeze-list", help="per-mode squeezing in nats, comma separated")
    s.add_argument("--squeeze-db-list", help="per-mode squeezing in dB, comma separated")
    s.add_argument("--strategy", default="recursive", help="recursive or paper:<fixture>")
    s.add_argument("--perm", help="1-based column permutation")
    s.set_defaults(func=cmd_synth)

    v = sub.add_parser("verify", help="simulate a circuit and compare nullifiers with closed form")
    common(v)
    graph_args(v)
    v.add_argument("--circuit", required=True)
    v.set_defaults(func=cmd_verify)

    d = sub.add_parser("decompose", help="beam-splitter network for a circuit")
    common(d)
    d.add_argument("--circuit")
    d.add_argument("--fixture", help="paper-minimal-chain4")
    d.set_defaults(func=cmd_decompose)

    t = sub.add_parser("teleport", help="teleport a coherent state through a cluster")
    common(t)
    t.add_argument("--cluster", default="diamond", help="chain3, diamond or multirail:m")
    t.add_argument("--squeeze", type=float, help="rail squeezing (nats), all rails")
    t.add_argument("--squeeze-db", type=float, help="rail squeezing (dB), all rails")
    t.add_argument("--squeeze-list", help="per-rail squeezing in nats, comma separated")
    t.add_argument("--r-high", type=float, default=R_HIGH_DEFAULT, help="squeezing of the input/output columns")
    t.add_argument("--input", default="0,0", help="coherent input mean x,p")
    t.add_argument("--vectors", default="recursive", choices=["recursive", "paper"])
    t.add_argument("--seed", type=int, default=0)
    t.add_argument("--shots", type=int, default=0, help="Monte Carlo shots for the mean check")
    t.set_defaults(func=cmd_teleport)

    gr = sub.add_parser("gram", help="print the Gram matrix of a graph")
    common(gr)
    graph_args(gr)
    gr.add_argument("--rational", action="store_true", help="show entries as fractions")
    gr.set_defaults(func=cmd_gram)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (DecompositionError, InvalidCircuitError, FactorizationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return FAIL
    except (InputError, ValueError, KeyError, IndexError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return BAD_INPUT


if __name__ == "__main__":
    sys.exit(main())
