"""Command-line pipeline: graph -> subdivision -> cells -> presentation ->
minimal/physical -> homology -> stabilization -> representations.

Exit codes: 1 usage, 2 validation (graph format, subdivision, tree), 3
computation failure (rewrite bound, unsolvable loop system, no
representation at tolerance).  Every JSON artifact embeds a manifest of the
command, input hashes, parameters and tool version; equal manifests produce
byte-identical output.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
from pathlib import Path

from . import __version__
from .cells import CubeComplex
from .errors import ComputationError, ValidationError
from .graph import (Graph, check_tree_conditions, ordered, parse_graph,
                    subdivide_for)
from .loops import OLoopSpec, YLoopSpec, solve_physical_presentation
from .morse import DEFAULT_MAX_STEPS, morse_presentation
from .oracle import skeleton_presentation
from .presentation import FPGroup, from_morse, homology_h1
from .reps import (SolveOptions, UnitaryAssignment, locally_abelian_solve,
                   solve_representation, verify_representation)
from .stability import minimize_morse, stability_report


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        sys.exit(1)


def _sha256(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def _manifest(command: str, inputs: dict[str, Path], params: dict) -> dict:
    return {
        "command": command,
        "inputs": {name: _sha256(p) for name, p in sorted(inputs.items())},
        "parameters": {k: params[k] for k in sorted(params)},
        "version": __version__,
    }


def _emit(args, text: str, payload: dict):
    if getattr(args, "json", None) is None:
        print(text)
        return
    blob = json.dumps(payload, sort_keys=True, indent=2) + "\n"
    if args.json == "-":
        sys.stdout.write(blob)
    else:
        Path(args.json).write_text(blob)
        print(text)


def _load_graph(path: str) -> Graph:
    p = Path(path)
    try:
        data = json.loads(p.read_text())
    except FileNotFoundError:
        raise ValidationError(f"no such graph file: {path}")
    except json.JSONDecodeError as exc:
        raise ValidationError(f"graph file is not valid JSON: {exc}")
    return parse_graph(data)


def _complex_for(args) -> CubeComplex:
    g = _load_graph(args.graph)
    og = ordered(g)
    return CubeComplex(og, args.particles)


def _presentation_payload(mp, manifest, og) -> dict:
    return {
        "manifest": manifest,
        "generators": [str(c) for c in mp.generators],
        "relators": [[[abs(x) - 1, 1 if x > 0 else -1] for x in w]
                     for w, _ in mp.relators],
        "relator_sources": [str(src) for _, src in mp.relators],
        "tree_conditions": check_tree_conditions(og).as_dict(),
    }


def _fp_payload(fp: FPGroup, manifest) -> dict:
    return {
        "manifest": manifest,
        "generators": list(fp.generators),
        "relators": [[[abs(x) - 1, 1 if x > 0 else -1] for x in w]
                     for w in fp.relators],
        "relator_sources": [p for p in fp.provenance],
    }


def _load_fp(path: str) -> FPGroup:
    try:
        data = json.loads(Path(path).read_text())
    except (FileNotFoundError, json.JSONDecodeError) as exc:
        raise ValidationError(f"cannot read presentation {path}: {exc}")
    gens = tuple(data["generators"])
    rels = tuple(tuple((i + 1) * s for i, s in w) for w in data["relators"])
    return FPGroup(gens, rels)


# ---------------------------------------------------------------------------
# subcommands


def cmd_subdivide(args):
    g = _load_graph(args.graph)
    out = subdivide_for(g, args.particles)
    manifest = _manifest("subdivide", {"graph": Path(args.graph)},
                         {"particles": args.particles})
    payload = {"manifest": manifest, "graph": out.to_json_dict(),
               "changed": out is not g}
    text = json.dumps(out.to_json_dict(), sort_keys=True, indent=2)
    _emit(args, text, payload)
    return 0


def cmd_cells(args):
    cx = _complex_for(args)
    dims = [args.dim] if args.dim is not None else [0, 1, 2]
    rows = []
    for dim in dims:
        for cell in cx.cells(dim):
            cls = cx.classify(cell)
            if args.kind != "all" and cls.kind != args.kind:
                continue
            rows.append({"cell": str(cell), "dim": dim, "kind": cls.kind,
                         "partner": str(cls.partner) if cls.partner else None})
    manifest = _manifest("cells", {"graph": Path(args.graph)},
                         {"particles": args.particles, "dim": args.dim,
                          "kind": args.kind})
    text = "\n".join(f"{r['cell']}  dim={r['dim']}  {r['kind']}" for r in rows)
    _emit(args, text or "(no cells)", {"manifest": manifest, "cells": rows})
    return 0


def cmd_present(args):
    g = _load_graph(args.graph)
    og = ordered(g)
    cx = CubeComplex(og, args.particles)
    mp = morse_presentation(cx, max_steps=args.max_steps)
    manifest = _manifest("present", {"graph": Path(args.graph)},
                         {"particles": args.particles, "max_steps": args.max_steps})
    _emit(args, str(mp), _presentation_payload(mp, manifest, og))
    return 0


def cmd_minimal(args):
    g = _load_graph(args.graph)
    og = ordered(g)
    cx = CubeComplex(og, args.particles)
    mp = morse_presentation(cx, max_steps=args.max_steps)
    result, h1 = minimize_morse(og, mp)
    fp = result.group
    manifest = _manifest("minimal", {"graph": Path(args.graph)},
                         {"particles": args.particles, "max_steps": args.max_steps})
    payload = _fp_payload(fp, manifest)
    payload["h1"] = str(h1)
    payload["target_generators"] = result.target
    payload["target_reached"] = result.reached
    payload["eliminations"] = [
        {"generator": e.generator,
         "relator": [[nm, s] for nm, s in e.relator],
         "expression": [[nm, s] for nm, s in e.expression]}
        for e in result.eliminations]
    payload["tree_conditions"] = check_tree_conditions(og).as_dict()
    lines = [str(fp),
             f"H1 = {h1}",
             f"target {result.target} generators: "
             + ("reached" if result.reached else "NOT reached")]
    _emit(args, "\n".join(lines), payload)
    return 0


def cmd_h1(args):
    g = _load_graph(args.graph)
    og = ordered(g)
    cx = CubeComplex(og, args.particles)
    mp = morse_presentation(cx, max_steps=args.max_steps)
    h1 = homology_h1(from_morse(mp), warn_unexpected_torsion=True)
    manifest = _manifest("h1", {"graph": Path(args.graph)},
                         {"particles": args.particles, "max_steps": args.max_steps})
    payload = {"manifest": manifest, "free_rank": h1.free_rank,
               "torsion": list(h1.torsion), "pretty": str(h1)}
    _emit(args, str(h1), payload)
    return 0


def cmd_oracle(args):
    cx = _complex_for(args)
    sp = skeleton_presentation(cx)
    h1 = homology_h1(sp.group)
    manifest = _manifest("oracle", {"graph": Path(args.graph)},
                         {"particles": args.particles})
    payload = _fp_payload(sp.group, manifest)
    payload["h1"] = str(h1)
    text = (f"1-skeleton presentation: {len(sp.group.generators)} generators, "
            f"{len(sp.group.relators)} relators\nH1 = {h1}")
    _emit(args, text, payload)
    return 0


def _parse_loops_file(path: str):
    try:
        data = json.loads(Path(path).read_text())
    except (FileNotFoundError, json.JSONDecodeError) as exc:
        raise ValidationError(f"cannot read loops file {path}: {exc}")
    specs = []
    for item in data.get("loops", []):
        kind = item.get("type")
        spect = tuple(int(v) for v in item.get("spectators", []))
        if kind == "Y":
            specs.append(YLoopSpec(int(item["k"]), int(item["m"]),
                                   int(item["n"]), spect))
        elif kind == "O":
            specs.append(OLoopSpec(tuple(int(v) for v in item["cycle"]), spect))
        else:
            raise ValidationError(f"unknown loop type {kind!r}")
    if not specs:
        raise ValidationError("loops file declares no loops")
    return specs


def cmd_physical(args):
    g = _load_graph(args.graph)
    og = ordered(g)
    cx = CubeComplex(og, args.particles)
    mp = morse_presentation(cx, max_steps=args.max_steps)
    minimized, h1 = minimize_morse(og, mp)
    specs = _parse_loops_file(args.loops)
    pp = solve_physical_presentation(cx, minimized, specs, mp,
                                     max_steps=args.max_steps)
    manifest = _manifest("physical",
                         {"graph": Path(args.graph), "loops": Path(args.loops)},
                         {"particles": args.particles, "max_steps": args.max_steps})
    payload = {
        "manifest": manifest,
        "loops": [{"name": lg.name, "kind": lg.kind,
                   "image": [[nm, s] for nm, s in lg.image]}
                  for lg in pp.loops],
        "dictionary": [[nm, [[abs(x) - 1, 1 if x > 0 else -1] for x in wd]]
                       for nm, wd in pp.dictionary],
        "relators": [{"origin": origin,
                      "word": [[abs(x) - 1, 1 if x > 0 else -1] for x in wd]}
                     for origin, wd in pp.relators],
        "generators": pp.loop_names,
        "h1": str(h1),
    }
    lines = [str(pp.group), "", "dictionary:"]
    for nm, wd in pp.dictionary:
        lines.append(f"  {nm} = {pp.word_str(wd)}")
    lines.append("loop images:")
    for lg in pp.loops:
        img = " ".join(nm + ("" if s > 0 else "^-1") for nm, s in lg.image) or "1"
        lines.append(f"  {lg.name} -> {img}")
    _emit(args, "\n".join(lines), payload)
    return 0


def cmd_stabilize(args):
    g = _load_graph(args.graph)
    og = ordered(g)
    report = stability_report(og, args.n_from, args.n_to)
    manifest = _manifest("stabilize", {"graph": Path(args.graph)},
                         {"from": args.n_from, "to": args.n_to})
    payload = {
        "manifest": manifest,
        "rows": [{"n": r.n, "generators": r.generators, "relators": r.relators,
                  "new_relators": r.new_relators, "lifting_ok": r.lifting_ok,
                  "minimized_generators": r.minimized_generators, "h1": r.h1}
                 for r in report.rows],
        "generator_correspondence": {
            str(n): [[a, b] for a, b in pairs]
            for n, pairs in report.generator_correspondence.items()},
        "stabilized": report.stabilized(),
    }
    header = f"{'N':>3} {'#gen':>5} {'#rel':>5} {'#new':>5} {'lift':>5} {'#min':>5}  H1"
    lines = [header]
    for r in report.rows:
        new = "-" if r.new_relators is None else str(r.new_relators)
        lift = "-" if r.lifting_ok is None else ("ok" if r.lifting_ok else "FAIL")
        lines.append(f"{r.n:>3} {r.generators:>5} {r.relators:>5} {new:>5} "
                     f"{lift:>5} {r.minimized_generators:>5}  {r.h1}")
    _emit(args, "\n".join(lines), payload)
    return 0


def cmd_rep_verify(args):
    fp = _load_fp(args.presentation)
    try:
        adata = json.loads(Path(args.assignment).read_text())
    except (FileNotFoundError, json.JSONDecodeError) as exc:
        raise ValidationError(f"cannot read assignment {args.assignment}: {exc}")
    assignment = UnitaryAssignment.from_json_dict(adata)
    report = verify_representation(fp, assignment, tol=args.tol)
    manifest = _manifest("rep-verify",
                         {"presentation": Path(args.presentation),
                          "assignment": Path(args.assignment)},
                         {"tol": args.tol})
    payload = {"manifest": manifest, "deviations": report.deviations,
               "max_deviation": report.max_deviation, "passed": report.passed}
    text = (f"max deviation {report.max_deviation:.3e} "
            f"({'PASS' if report.passed else 'FAIL'} at tol {args.tol:g})")
    _emit(args, text, payload)
    return 0 if report.passed else 3


def cmd_rep_solve(args):
    fp = _load_fp(args.presentation)
    opts = SolveOptions(tol=args.tol, restarts=args.restarts)
    outcome = solve_representation(fp, args.dimension, seed=args.seed, opts=opts)
    manifest = _manifest("rep-solve", {"presentation": Path(args.presentation)},
                         {"k": args.dimension, "seed": args.seed,
                          "tol": args.tol, "restarts": args.restarts})
    payload = {"manifest": manifest,
               "assignment": outcome.assignment.to_json_dict(),
               "max_deviation": outcome.report.max_deviation,
               "restart": outcome.restart,
               "restart_seeds": outcome.restart_seeds}
    text = (f"found representation at k={args.dimension}, max deviation "
            f"{outcome.report.max_deviation:.3e} (restart {outcome.restart})")
    _emit(args, text, payload)
    return 0


def cmd_locally_abelian(args):
    g = _load_graph(args.graph)
    og = ordered(g)
    cx = CubeComplex(og, args.particles)
    mp = morse_presentation(cx, max_steps=args.max_steps)
    minimized, _ = minimize_morse(og, mp)
    specs = _parse_loops_file(args.loops)
    pp = solve_physical_presentation(cx, minimized, specs, mp,
                                     max_steps=args.max_steps)
    ansatz = locally_abelian_solve(pp)
    manifest = _manifest("locally-abelian",
                         {"graph": Path(args.graph), "loops": Path(args.loops)},
                         {"particles": args.particles, "max_steps": args.max_steps})
    payload = {
        "manifest": manifest,
        "phase_generators": ansatz.phase_generators,
        "free_unitaries": ansatz.free_unitaries,
        "constraints": [list(c.coefficients) for c in ansatz.constraints],
        "trivial_relators": ansatz.trivial_relators,
        "residual_relators": [
            {"origin": origin, "phases": list(ph), "o_word": list(ow)}
            for origin, ph, ow in ansatz.residual_relators],
    }
    lines = ["phase generators (e^{i phi} 1): " + ", ".join(ansatz.phase_generators),
             "free unitaries: " + ", ".join(ansatz.free_unitaries)]
    if ansatz.constraints:
        lines.append("phase constraints (mod 2pi):")
        for c in ansatz.constraints:
            terms = " + ".join(f"{k}*phi[{ansatz.phase_generators[j]}]"
                               for j, k in enumerate(c.coefficients) if k != 0)
            lines.append(f"  {terms} = 0")
    else:
        lines.append("no phase constraints")
    if ansatz.residual_relators:
        lines.append(f"{len(ansatz.residual_relators)} residual matrix equations")
    else:
        lines.append("O-loop unitaries unconstrained")
    _emit(args, "\n".join(lines), payload)
    return 0


def build_parser() -> _Parser:
    parser = _Parser(prog="braidforge",
                     description="presentations and unitary representations "
                                 "of graph braid groups")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, fn, **kw):
        p = sub.add_parser(name, **kw)
        p.set_defaults(fn=fn)
        return p

    def graph_n(p, with_steps=True):
        p.add_argument("graph", help="graph JSON file")
        p.add_argument("-n", "--particles", type=int, required=True)
        if with_steps:
            p.add_argument("--max-steps", type=int, default=DEFAULT_MAX_STEPS,
                           help="rewrite step bound")
        p.add_argument("--json", nargs="?", const="-", default=None,
                       metavar="PATH", help="emit machine JSON (to PATH, or "
                       "stdout when no path is given)")

    p = add("subdivide", cmd_subdivide, help="insert degree-2 vertices for n particles")
    graph_n(p, with_steps=False)

    p = add("cells", cmd_cells, help="enumerate and classify cells")
    graph_n(p, with_steps=False)
    p.add_argument("--dim", type=int, choices=(0, 1, 2), default=None)
    p.add_argument("--kind", choices=("critical", "redundant", "collapsible", "all"),
                   default="all")

    p = add("present", cmd_present, help="Morse presentation")
    graph_n(p)

    p = add("minimal", cmd_minimal, help="Tietze-minimized presentation")
    graph_n(p)

    p = add("h1", cmd_h1, help="first homology of the configuration space")
    graph_n(p)

    p = add("oracle", cmd_oracle, help="brute-force 1-skeleton presentation")
    graph_n(p, with_steps=False)

    p = add("physical", cmd_physical, help="exchange-loop presentation")
    graph_n(p)
    p.add_argument("--loops", required=True, help="loops JSON file")

    p = add("stabilize", cmd_stabilize, help="particle-number stabilization report")
    p.add_argument("graph")
    p.add_argument("--from", dest="n_from", type=int, required=True)
    p.add_argument("--to", dest="n_to", type=int, required=True)
    p.add_argument("--json", nargs="?", const="-", default=None, metavar="PATH")

    p = add("rep-verify", cmd_rep_verify, help="check a unitary assignment")
    p.add_argument("presentation")
    p.add_argument("assignment")
    p.add_argument("--tol", type=float, default=1e-8)
    p.add_argument("--json", nargs="?", const="-", default=None, metavar="PATH")

    p = add("rep-solve", cmd_rep_solve, help="solve for a unitary representation")
    p.add_argument("presentation")
    p.add_argument("-k", "--dimension", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--tol", type=float, default=1e-8)
    p.add_argument("--restarts", type=int, default=20)
    p.add_argument("--json", nargs="?", const="-", default=None, metavar="PATH")

    p = add("locally-abelian", cmd_locally_abelian,
            help="scalar Y-loop ansatz and phase constraints")
    graph_n(p)
    p.add_argument("--loops", required=True)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except ValidationError as exc:
        print(f"braidforge: validation error: {exc}", file=sys.stderr)
        return 2
    except ComputationError as exc:
        print(f"braidforge: computation failed: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
