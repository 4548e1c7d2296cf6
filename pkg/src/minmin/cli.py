"""Command line entry point: ``minmin <noun> <verb> [options]``.

Standard output carries exactly the requested artifact; progress goes to
standard error.  Exit status is 0 on success, 1 when a computation fails
and 2 on usage errors.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path

from . import bf_core, clonoid, lattice, poset
from .bf_core import ArityError, BoolFn, CapacityError, resolve_fn

OUTPUT_DIR_ENV = "MINMIN_OUTPUT_DIR"

log = logging.getLogger("minmin")


class UsageError(Exception):
    pass


# -- DOT ------------------------------------------------------------------------

def _quote(s: str) -> str:
    return '"' + s.replace("\\", "\\\\").replace('"', '\\"') + '"'


def _dot(name: str, nodes: list[str], edges: list[tuple[int, int]]) -> str:
    lines = [f"digraph {name} {{", "  rankdir=BT;"]
    for i, label in enumerate(nodes):
        lines.append(f"  n{i} [label={_quote(label)}];")
    for a, b in sorted(edges):
        lines.append(f"  n{a} -> n{b};")
    lines.append("}")
    return "\n".join(lines) + "\n"


def _element_labels(p: poset.Poset) -> list[str]:
    labels = p.labels() if p.k <= 3 else {}
    return [labels.get(i, str(e)) for i, e in enumerate(p.elements)]


def export_dot(graph) -> str:
    """DOT text for a Poset, a list of Ideals, or a clonoid Enumeration.

    Edges go from lower to upper cover; node order is the input order, so
    equal inputs give identical text.
    """
    if isinstance(graph, poset.Poset):
        return _dot("poset", _element_labels(graph), graph.covers)
    if isinstance(graph, clonoid.Enumeration):
        index = {c.fingerprint: i for i, c in enumerate(graph.clonoids)}
        edges = set()
        for i, c in enumerate(graph.clonoids):
            for d in clonoid.lower_covers(c.descriptor):
                edges.add((index[graph.probes.fingerprint(d)], i))
        return _dot("clonoids", [c.label() for c in graph.clonoids], sorted(edges))
    graph = list(graph)
    if not graph:
        return _dot("empty", [], [])
    if isinstance(graph[0], lattice.Ideal):
        complete = len(graph) == len(lattice.all_ideals(graph[0].poset)) if len(graph[0].poset) <= 40 else False
        return _dot("ideals", [t.label() for t in graph], lattice.ideal_covers(graph, complete))
    raise TypeError(f"cannot export {type(graph[0]).__name__} as DOT")


# -- JSON views -----------------------------------------------------------------

def poset_json(p: poset.Poset) -> dict:
    labels = _element_labels(p)
    return {
        "k": p.k,
        "closure": p.closure,
        "elements": [{"id": i, "label": labels[i], "table": str(e)} for i, e in enumerate(p.elements)],
        "covers": [list(c) for c in p.covers],
        **({"blocks": [list(b) for b in p.blocks]} if p.blocks is not None else {}),
    }


def ideal_json(t: lattice.Ideal) -> dict:
    return {"maxima": [str(t.poset.elements[i]) for i in t.maxima],
            "members": t.indices(), "label": t.label()}


def enumeration_json(E: clonoid.Enumeration, covers: bool = True) -> dict:
    out = []
    for c in E.clonoids:
        entry = {
            "descriptor": c.descriptor.to_json(),
            "aliases": [a.to_json() for a in c.aliases],
            "names": c.names,
            "fingerprintHash": clonoid.fingerprint_hash(c.fingerprint),
            "size": c.size,
        }
        if covers:
            entry["lowerCovers"] = [
                E.find(d).label() if E.find(d) else str(d) for d in clonoid.lower_covers(c.descriptor)]
        out.append(entry)
    return {"k": E.k, "count": len(E), "descriptors": E.descriptor_count,
            "diagnostics": E.diagnostics, "clonoids": out}


# -- argument helpers ---------------------------------------------------------------

def _fn(text: str) -> BoolFn:
    try:
        return resolve_fn(text)
    except (KeyError, ValueError, ArityError) as e:
        raise UsageError(f"malformed function {text!r}: {e}") from None


def _fn_list(text: str | None) -> list[BoolFn]:
    if not text or text.strip() in ("", "{}", "none"):
        return []
    return [_fn(s.strip()) for s in text.split(",") if s.strip()]


def _rank(args, limit: int = 4) -> int:
    k = args.k
    if not 1 <= k <= limit:
        raise UsageError(f"k must be in 1..{limit}, got {k}")
    if k == 4 and not args.experimental:
        raise UsageError("k=4 is experimental; pass --experimental")
    return k


def _theta(args, k: int) -> lattice.Ideal:
    fns = _fn_list(args.theta)
    p = poset.enumerate_classes(k)
    for f in fns:
        if f.count_true() > k:
            raise UsageError(f"{f} has more than {k} true points; list members of the rank-{k} poset")
    return lattice.Ideal(p, p.downset_mask(p.class_index(f) for f in fns))


def _descriptor(args) -> clonoid.ClonoidDescriptor:
    k = _rank(args, 3)
    if getattr(args, "named", None):
        return clonoid.class_descriptor(args.named, k)
    theta = _theta(args, k)
    if getattr(args, "meet", None):
        return clonoid.KlikMeet(theta, args.meet)
    return clonoid.Klik(theta)


def _clone(args) -> clonoid.ClonePreset:
    if args.generators:
        return clonoid.custom_preset(_fn_list(args.generators))
    if not args.preset:
        raise UsageError("give --preset or --generators")
    try:
        return clonoid.preset(args.preset)
    except KeyError as e:
        raise UsageError(str(e)) from None


def _emit(args, payload, text: str | None = None, dot: str | None = None) -> None:
    fmt = args.format
    if fmt == "json":
        out = json.dumps(payload, indent=2, sort_keys=True, ensure_ascii=False) + "\n"
    elif fmt == "dot":
        if dot is None:
            raise UsageError("this command has no DOT output")
        out = dot
    else:
        out = text if text is not None else json.dumps(payload, sort_keys=True, ensure_ascii=False) + "\n"
    if args.output:
        path = Path(args.output)
        base = os.environ.get(OUTPUT_DIR_ENV)
        if base and not path.is_absolute():
            path = Path(base) / path
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(out, encoding="utf-8")
        log.info("wrote %s", path)
    else:
        sys.stdout.write(out)


# -- commands -----------------------------------------------------------------------

def cmd_fn(args) -> None:
    f = _fn(args.fn)
    if args.action == "eval":
        bits = [int(b) for b in args.point]
        if len(bits) != f.arity or any(b not in (0, 1) for b in bits):
            raise UsageError(f"point must be {f.arity} bits")
        v = f(*bits)
        _emit(args, {"value": v}, f"{v}\n")
    elif args.action == "minor":
        sigma = [int(s) for s in args.sigma.split(",")]
        g = bf_core.minor_apply(f, sigma, args.n)
        _emit(args, {"result": str(g)}, f"{g}\n")
    elif args.action == "compose":
        g = bf_core.compose(f, _fn_list(args.inner))
        _emit(args, {"result": str(g)}, f"{g}\n")
    elif args.action == "closure":
        g = bf_core.closure_C(f, args.C)
        _emit(args, {"result": str(g)}, f"{g}\n")


def cmd_poset(args) -> None:
    k = _rank(args)
    p = poset.enumerate_classes(k, args.closure)
    labels = _element_labels(p)
    text = "".join(f"{i}\t{labels[i]}\t{e}\n" for i, e in enumerate(p.elements))
    _emit(args, poset_json(p), text, export_dot(p))


def cmd_ideals(args) -> None:
    k = _rank(args, 3)
    p = poset.enumerate_classes(k)
    if args.action == "count":
        n = len(lattice.all_ideals(p))
        _emit(args, {"k": k, "count": n}, f"{n}\n")
        return
    if args.action == "list":
        ideals = lattice.all_ideals(p)
    else:
        if not args.C:
            raise UsageError("ideals closed needs --C")
        ideals = lattice.closed_ideals(p, args.C)
    text = "".join(t.label() + "\n" for t in ideals)
    _emit(args, {"k": k, "closure": getattr(args, "C", None), "count": len(ideals),
                 "ideals": [ideal_json(t) for t in ideals]}, text, export_dot(ideals))


def cmd_clonoids(args) -> None:
    k = _rank(args, 3)
    if args.action == "member":
        cmd_member(args)
        return
    if k == 1:
        raise UsageError("clonoid enumeration needs k in 2..3")
    E = clonoid.enumerate_clonoids(k)
    if args.action == "enumerate":
        text = "".join(f"{c.size}\t{c.label()}\t{c.descriptor}\n" for c in E.clonoids)
        text += f"# {len(E)} clonoids from {E.descriptor_count} descriptors\n"
        _emit(args, enumeration_json(E, covers=False), text, export_dot(E))
    else:
        payload = enumeration_json(E, covers=True)
        text = "".join(f"{c['names'][0] if c['names'] else ''}\t{', '.join(c['lowerCovers'])}\n"
                       for c in payload["clonoids"])
        _emit(args, payload, text, export_dot(E))


def cmd_member(args) -> None:
    d = _descriptor(args)
    f = _fn(args.fn)
    v = clonoid.descriptor_member(d, f)
    _emit(args, {"descriptor": d.to_json(), "fn": str(f), "member": v}, f"{str(v).lower()}\n")


def cmd_semibisect(args) -> None:
    f = _fn(args.fn)
    G = _fn_list(args.G)
    if args.action == "check":
        v = clonoid.semibisectable(f, G, args.k)
        _emit(args, {"semibisectable": v}, f"{str(v).lower()}\n")
    else:
        h, inner = clonoid.decompose_via_mcuk(f, G, args.k)
        _emit(args, {"outer": str(h), "inner": [str(g) for g in inner]},
              f"{h}\n" + "".join(f"{g}\n" for g in inner))


def cmd_stability(args) -> None:
    if args.arity_cap > 4:
        raise UsageError("--arity-cap must be at most 4")
    C = _clone(args)
    if args.action == "theta-right":
        k = _rank(args, 3)
        v = clonoid.theta_right_stability(_theta(args, k), C, k, args.arity_cap)
    else:
        if args.cls:
            K = args.cls
            try:
                bf_core.class_spec(K)
            except KeyError as e:
                raise UsageError(str(e)) from None
        else:
            K = _descriptor(args)
        v = clonoid.stability_check(K, args.action, C, args.arity_cap, args.budget, args.seed)
    _emit(args, v.to_json(), f"{v.status}\n" + (json.dumps(v.counterexample) + "\n" if v.counterexample else ""))


# -- parser ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("json", "dot", "text"), default="text")
    common.add_argument("--output", "-o", help=f"write here instead of stdout (relative to ${OUTPUT_DIR_ENV} if set)")
    common.add_argument("--jobs", type=int, default=1, help="accepted for compatibility; work runs in one process")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--experimental", action="store_true", help="allow k=4")
    common.add_argument("--verbose", "-v", action="store_true")

    def rank(sp, default=2):
        sp.add_argument("--k", type=int, default=default)

    def desc(sp):
        rank(sp)
        sp.add_argument("--theta", default="", help="comma-separated generators of the ideal")
        sp.add_argument("--meet", choices=clonoid.MEET_CLASSES)
        sp.add_argument("--named", help="fixed class name")

    ap = argparse.ArgumentParser(prog="minmin", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="noun", required=True)

    fn = sub.add_parser("fn", help="single-function operations").add_subparsers(dest="action", required=True)
    sp = fn.add_parser("eval", parents=[common]); sp.add_argument("fn"); sp.add_argument("point")
    sp = fn.add_parser("minor", parents=[common]); sp.add_argument("fn")
    sp.add_argument("--sigma", required=True, help="1-based images, e.g. 1,1,2"); sp.add_argument("--n", type=int, required=True)
    sp = fn.add_parser("compose", parents=[common]); sp.add_argument("fn"); sp.add_argument("inner", help="comma-separated")
    sp = fn.add_parser("closure", parents=[common]); sp.add_argument("fn"); sp.add_argument("--C", required=True, choices=sorted(bf_core.CLOSURES))
    for p in fn.choices.values():
        p.set_defaults(func=cmd_fn)

    ps = sub.add_parser("poset").add_subparsers(dest="action", required=True)
    sp = ps.add_parser("build", parents=[common]); rank(sp)
    sp.add_argument("--closure", choices=sorted(bf_core.CLOSURES))
    sp.set_defaults(func=cmd_poset)

    idl = sub.add_parser("ideals").add_subparsers(dest="action", required=True)
    for name in ("count", "list", "closed"):
        sp = idl.add_parser(name, parents=[common]); rank(sp)
        sp.add_argument("--C", choices=sorted(bf_core.CLOSURES))
        sp.set_defaults(func=cmd_ideals)

    cl = sub.add_parser("clonoids").add_subparsers(dest="action", required=True)
    for name in ("enumerate", "covers"):
        sp = cl.add_parser(name, parents=[common]); rank(sp)
        sp.set_defaults(func=cmd_clonoids)
    sp = cl.add_parser("member", parents=[common]); desc(sp); sp.add_argument("--fn", required=True)
    sp.set_defaults(func=cmd_clonoids)

    sp = sub.add_parser("member", parents=[common], help="shortcut for clonoids member")
    desc(sp); sp.add_argument("--fn", required=True); sp.set_defaults(func=cmd_member, action="member")

    sb = sub.add_parser("semibisect").add_subparsers(dest="action", required=True)
    for name in ("check", "decompose"):
        sp = sb.add_parser(name, parents=[common]); rank(sp)
        sp.add_argument("--fn", required=True); sp.add_argument("--G", required=True, help="comma-separated")
        sp.set_defaults(func=cmd_semibisect)

    st = sub.add_parser("stability").add_subparsers(dest="action", required=True)
    for name in ("left", "right", "theta-right"):
        sp = st.add_parser(name, parents=[common]); desc(sp)
        sp.add_argument("--class", dest="cls", help="registry class name, e.g. U2")
        sp.add_argument("--preset"); sp.add_argument("--generators", help="comma-separated clone generators")
        sp.add_argument("--arity-cap", type=int, default=3)
        sp.add_argument("--budget", type=int, default=20_000_000)
        sp.set_defaults(func=cmd_stability)
    return ap


def run_command(argv: list[str] | None = None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        stream=sys.stderr, format="%(levelname)s %(message)s")
    try:
        args.func(args)
    except UsageError as e:
        print(f"usage error: {e}", file=sys.stderr)
        return 2
    except (CapacityError, ArityError) as e:
        print(f"capacity error: {e}", file=sys.stderr)
        return 1
    except (poset.ConsistencyError, clonoid.DecompositionError, clonoid.DescriptorError, ValueError, KeyError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    return 0


def main() -> None:
    try:
        code = run_command()
        sys.stdout.flush()
    except BrokenPipeError:
        # reader went away (e.g. piped into head); silence the final flush
        os.dup2(os.open(os.devnull, os.O_WRONLY), sys.stdout.fileno())
        code = 0
    sys.exit(code)


if __name__ == "__main__":
    main()
