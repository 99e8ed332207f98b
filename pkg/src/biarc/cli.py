"""Command line entry point.

Exit codes: 0 success / YES, 1 NO or invalid certificate, 2 usage or input
error, 3 internal verification failure (or an oracle disagreement).
"""

from __future__ import annotations

import argparse
import json
import logging
import sys

from .digraph import CkLabeling, Digraph, parse_digraph
from .errors import BiarcError, ContractViolation, InternalError
from .generate import gen_random_digraph
from .obstruction import Circuit, verify_circuit
from .oracles import oracle_search
from .ordering import build_k_min_ordering, build_min_ordering, verify_k_min_ordering, verify_min_ordering
from .pairs import build_pair_digraph, strong_components
from .polymorphisms import (
    BinaryTable,
    build_cc_polymorphism,
    invertible_pair_witness,
    min_to_set_polymorphism,
    verify_cc_polymorphism,
    verify_set_polymorphism,
)
from .representation import ArcRepresentation, build_arc_representation, to_svg, verify_arc_representation

log = logging.getLogger("biarc")

EXIT_OK, EXIT_NO, EXIT_USAGE, EXIT_INTERNAL = 0, 1, 2, 3


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    with open(path, encoding="utf-8") as fh:
        return fh.read()


def _emit(args, obj: dict, text: str) -> None:
    if args.format == "json":
        print(json.dumps(obj, sort_keys=False))
    else:
        print(text)


def _pairs_text(prs) -> str:
    return " ".join(f"({a},{b})" for a, b in prs)


def cmd_recognize(args, h: Digraph) -> int:
    res = build_min_ordering(h)
    if res.is_yes:
        _emit(args, res.to_json(), "YES\norder: " + " ".join(map(str, res.order)))
        return EXIT_OK
    _emit(args, res.to_json(), "NO\ncircuit: " + _pairs_text(res.circuit.pairs))
    return EXIT_NO


def cmd_order(args, h: Digraph) -> int:
    res = build_min_ordering(h)
    if res.is_yes:
        _emit(args, res.to_json(), " ".join(map(str, res.order)))
        return EXIT_OK
    _emit(args, res.to_json(), "circuit: " + _pairs_text(res.circuit.pairs))
    return EXIT_NO


def _write_svg(args, rep: ArcRepresentation) -> None:
    if args.svg:
        with open(args.svg, "w", encoding="utf-8") as fh:
            fh.write(to_svg(rep))
        log.info("wrote %s", args.svg)


def cmd_represent(args, h: Digraph) -> int:
    res = build_min_ordering(h)
    if not res.is_yes:
        _emit(args, res.to_json(), "NO\ncircuit: " + _pairs_text(res.circuit.pairs))
        return EXIT_NO
    rep = build_arc_representation(h, res)
    lines = [f"L={rep.L} N={rep.north[0]} S={rep.south[0]}"]
    lines += [f"{v}: I={list(rep.I[v])} J={list(rep.J[v])}" for v in range(h.n)]
    _emit(args, rep.to_json(), "\n".join(lines))
    _write_svg(args, rep)
    return EXIT_OK


def cmd_karc(args, h: Digraph) -> int:
    res = build_k_min_ordering(h, k=args.k)
    obj = res.to_json()
    if not res.is_yes:
        tried = ", ".join(f"k={a['k']}: {a['outcome']}" for a in res.attempts)
        _emit(args, obj, f"NO\ntried {tried}")
        return EXIT_NO
    rep = build_arc_representation(h, res)
    obj["representation"] = rep.to_json()
    text = [f"YES k={res.k}"] + [f"V{i}: " + " ".join(map(str, o)) for i, o in enumerate(res.orders)]
    _emit(args, obj, "\n".join(text))
    _write_svg(args, rep)
    return EXIT_OK


def cmd_cc(args, h: Digraph) -> int:
    table = build_cc_polymorphism(h)
    if table is None:
        pr = invertible_pair_witness(h)
        obj = {"schema": 1, "status": "invertible_pair", "pair": list(pr)}
        _emit(args, obj, f"NO\ninvertible pair: ({pr[0]},{pr[1]})")
        return EXIT_NO
    rows = [" ".join(str(table(x, y)) for y in range(h.n)) for x in range(h.n)]
    _emit(args, table.to_json(), "YES\n" + "\n".join(rows))
    return EXIT_OK


def _pipeline_answer(target: str, h: Digraph, k: int | None) -> bool:
    if target in ("min-ordering", "set"):
        return build_min_ordering(h).is_yes
    if target == "cc":
        return build_cc_polymorphism(h) is not None
    return build_k_min_ordering(h, k=k).is_yes


def cmd_oracle(args, h: Digraph) -> int:
    if args.target == "k-min" and args.k is None:
        raise ContractViolation("--target k-min needs --k")
    found = oracle_search(h, args.target, args.k)
    oracle_yes = found is not None
    pipe_yes = _pipeline_answer(args.target, h, args.k)
    verdict = "AGREE" if oracle_yes == pipe_yes else "DISAGREE"
    obj = {"schema": 1, "target": args.target, "oracle": oracle_yes, "pipeline": pipe_yes, "result": verdict}
    _emit(args, obj, f"{verdict} oracle={'YES' if oracle_yes else 'NO'} pipeline={'YES' if pipe_yes else 'NO'}")
    return EXIT_OK if verdict == "AGREE" else EXIT_INTERNAL


def cmd_gen(args) -> int:
    if args.n is None and args.cycle is None:
        raise ContractViolation("gen needs n (or --cycle Q)")
    log.info("gen n=%s density=%s seed=%d cycle=%s", args.n, args.density, args.seed, args.cycle)
    h = gen_random_digraph(
        args.n,
        args.density,
        args.seed,
        reflexive=args.reflexive,
        loops=not args.no_loops,
        bigraph=args.bigraph,
        cycle=args.cycle,
    )
    sys.stdout.write(h.to_text())
    return EXIT_OK


def check_certificate(h: Digraph, cert: dict) -> bool:
    """Re-verify any certificate this tool emits."""
    status = cert.get("status")
    if status == "min_ordering":
        return verify_min_ordering(h, [int(v) for v in cert["order"]])
    if status == "obstruction":
        p = build_pair_digraph(h)
        return verify_circuit(p, strong_components(p), Circuit.from_json(cert))
    if status == "k_min_ordering":
        lab = CkLabeling(int(cert["k"]), tuple(int(x) for x in cert["labels"]))
        if not lab.is_valid(h):
            return False
        ok = verify_k_min_ordering(h, lab, [[int(v) for v in o] for o in cert["orders"]])
        if ok and "representation" in cert:
            ok = verify_arc_representation(h, ArcRepresentation.from_json(cert["representation"]))
        return ok
    if status == "cc_polymorphism":
        return verify_cc_polymorphism(h, BinaryTable.from_json(cert))
    if status == "set_polymorphism":
        raise ContractViolation("set tables are checked through their min ordering")
    if "L" in cert and "I" in cert:
        return verify_arc_representation(h, ArcRepresentation.from_json(cert))
    raise ContractViolation(f"unrecognised certificate status {status!r}")


def cmd_verify(args, h: Digraph) -> int:
    try:
        cert = json.loads(_read(args.certificate))
    except json.JSONDecodeError as exc:
        raise ContractViolation(f"certificate is not JSON: {exc}") from exc
    try:
        ok = check_certificate(h, cert)
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, BiarcError):
            raise
        raise ContractViolation(f"malformed certificate: {exc}") from exc
    print("VALID" if ok else "INVALID")
    return EXIT_OK if ok else EXIT_NO


def cmd_set(args, h: Digraph) -> int:
    res = build_min_ordering(h)
    if not res.is_yes:
        _emit(args, res.to_json(), "NO\ncircuit: " + _pairs_text(res.circuit.pairs))
        return EXIT_NO
    table = min_to_set_polymorphism(res.order, h.n)
    if not verify_set_polymorphism(h, table):
        raise InternalError("set table from a min ordering failed verification", {"order": res.order})
    obj = table.to_json()
    _emit(args, obj, "YES\n" + "\n".join(f"{{{k}}} -> {v}" for k, v in obj["table"].items()))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="biarc", description="Min orderings, bi-arc representations and obstructions.")
    ap.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = ap.add_subparsers(dest="command", required=True)

    def graph_cmd(name: str, helptext: str) -> argparse.ArgumentParser:
        sp = sub.add_parser(name, help=helptext)
        sp.add_argument("input", help="edge-list file, or - for stdin")
        sp.add_argument("--format", choices=("text", "json"), default="text")
        return sp

    graph_cmd("recognize", "decide and print a certificate")
    graph_cmd("order", "print a min ordering or the obstruction")
    graph_cmd("represent", "bi-arc representation").add_argument("--svg", metavar="PATH")
    sp = graph_cmd("karc", "k-min ordering and k-arc representation")
    sp.add_argument("--k", type=int, help="try only this k")
    sp.add_argument("--svg", metavar="PATH")
    graph_cmd("cc", "conservative commutative binary polymorphism")
    graph_cmd("set", "conservative set polymorphism from a min ordering")
    sp = graph_cmd("oracle", "compare brute force with the pipeline")
    sp.add_argument("--target", choices=("min-ordering", "k-min", "cc", "set"), default="min-ordering")
    sp.add_argument("--k", type=int)
    sp = graph_cmd("verify", "re-check a JSON certificate")
    sp.add_argument("certificate", help="certificate file, or - for stdin")

    sp = sub.add_parser("gen", help="random digraph in edge-list format")
    sp.add_argument("n", type=int, nargs="?")
    sp.add_argument("density", type=float, nargs="?", default=0.5)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--reflexive", action="store_true")
    sp.add_argument("--no-loops", action="store_true")
    sp.add_argument("--bigraph", action="store_true")
    sp.add_argument("--cycle", type=int, metavar="Q", help="directed Q-cycle instead")
    return ap


COMMANDS = {
    "recognize": cmd_recognize,
    "order": cmd_order,
    "represent": cmd_represent,
    "karc": cmd_karc,
    "cc": cmd_cc,
    "set": cmd_set,
    "oracle": cmd_oracle,
    "verify": cmd_verify,
}


def main(argv: list[str] | None = None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(name)s: %(message)s")
    try:
        if args.command == "gen":
            if args.seed < 0:
                raise ContractViolation("seed must be non-negative")
            return cmd_gen(args)
        if args.command == "verify" and args.input == "-" and args.certificate == "-":
            raise ContractViolation("digraph and certificate cannot both come from stdin")
        h = parse_digraph(_read(args.input))
        return COMMANDS[args.command](args, h)
    except InternalError as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        if exc.state:
            print(json.dumps(exc.state, default=str), file=sys.stderr)
        return EXIT_INTERNAL
    except (BiarcError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
