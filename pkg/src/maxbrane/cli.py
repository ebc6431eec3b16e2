"""Command line front end: ``maxbrane <lattice|comessatti|smith|hilbert|k3n> ...``.

Every command builds a plain dict, printed either as JSON (``--json``) or as
flattened ``key: value`` lines, so both views carry the same numbers. Exit
codes: 0 computed, 2 bad input or failed precondition, 3 internal invariant
failure.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from fractions import Fraction
from importlib import metadata
from typing import Any, Callable, Sequence

from . import chain, hilbert, k3n
from .errors import InvariantError, MaxbraneError
from .involution import InvolutiveModule, comessatti, decompose, splitting_report
from .lattice import (
    discriminant_class,
    discriminant_group,
    divisibility,
    lattice_from_json,
    make_named,
    signature,
)

EXIT_OK = 0
EXIT_PRECONDITION = 2
EXIT_INVARIANT = 3


class _InputError(MaxbraneError):
    pass


def _version() -> str:
    try:
        return metadata.version("artifact")
    except metadata.PackageNotFoundError:
        return "0+unknown"


def _threads() -> int:
    raw = os.environ.get("MAXBRANE_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        raise _InputError(f"MAXBRANE_THREADS must be an integer, got {raw!r}") from None


def _load(path: str) -> Any:
    try:
        if path == "-":
            return json.load(sys.stdin)
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise _InputError(f"cannot read {path}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise _InputError(f"malformed JSON in {path}: {exc}") from exc


def _load_dict(path: str) -> dict[str, Any]:
    obj = _load(path)
    if not isinstance(obj, dict):
        raise _InputError(f"{path}: expected a JSON object")
    return obj


def _jsonable(obj: Any) -> Any:
    if isinstance(obj, Fraction):
        return str(obj)
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    return obj


# ---------------------------------------------------------------------------
# commands


def cmd_lattice(args: argparse.Namespace) -> dict[str, Any]:
    if args.expr is not None and args.file is not None:
        raise _InputError("give either --expr or a file, not both")
    if args.expr is not None:
        L = make_named(args.expr)
    elif args.file is not None:
        L = lattice_from_json(_load_dict(args.file))
    else:
        raise _InputError("lattice needs --expr or a JSON file")
    A = discriminant_group(L)
    out: dict[str, Any] = {
        "rank": L.rank,
        "signature": list(signature(L)),
        "det": L.det,
        "parity": L.parity,
        "gram": [list(r) for r in L.gram],
        "discriminant": {
            "invariant_factors": list(A.invariant_factors),
            "order": A.order,
            "trivial": A.is_trivial,
            "qvalues": [str(q) for q in A.qvalues],
        },
    }
    if args.vector is not None:
        v = [int(x) for x in args.vector.split(",")]
        cls, q = discriminant_class(L, v)
        out["vector"] = {"v": v, "square": L.square(v), "divisibility": divisibility(L, v), "class": list(cls), "q": str(q)}
    return out


def cmd_comessatti(args: argparse.Namespace) -> dict[str, Any]:
    m = InvolutiveModule.from_json(_load_dict(args.file))
    dec = decompose(m)
    rep = splitting_report(m)
    return {
        "rank": m.rank,
        "lambda": comessatti(m),
        "rank_plus": dec.rank_plus,
        "rank_minus": dec.rank_minus,
        "blocks": dec.blocks,
        "split": rep.lambda_zero,
    }


_EXAMPLES: dict[str, Callable[[], chain.SimplicialGComplex]] = {
    "octahedron-identity": lambda: chain.octahedron("identity"),
    "octahedron-antipodal": lambda: chain.octahedron("antipodal"),
    "octahedron-reflection": lambda: chain.octahedron("reflection"),
    "hexagon-antipodal": lambda: chain.hexagon("antipodal"),
    "hexagon-identity": lambda: chain.hexagon("identity"),
    "s2xs2-antipodal": lambda: chain.product_complex(chain.octahedron("antipodal"), chain.octahedron("antipodal")),
}


def cmd_smith(args: argparse.Namespace) -> dict[str, Any]:
    if (args.file is None) == (args.example is None):
        raise _InputError("smith needs exactly one of a complex file or --example")
    K = _EXAMPLES[args.example]() if args.example else chain.SimplicialGComplex.from_json(_load_dict(args.file))
    out: dict[str, Any] = {"cells": K.counts(), "free": K.is_free}
    if not K.is_free:
        v = chain.maximality_verdict(K)
        out["verdict"] = v.label
        out["betti"] = list(v.betti.values)
        out["fixed_betti"] = list(v.fixed_betti.values)
        out["total"] = v.total
        out["fixed_total"] = v.fixed_total
    else:
        b = chain.betti_f2(K)
        out["verdict"] = "not_maximal"
        out["betti"] = list(b.values)
        out["fixed_betti"] = []
        out["total"] = b.total
        out["fixed_total"] = 0
    if args.kalinin:
        rep = chain.kalinin_differentials(K, args.kalinin, seed=args.seed)
        out["kalinin"] = {
            "d": {f"d{r}": {str(k): list(v) for k, v in dr.items()} for r, dr in sorted(rep.d.items())},
            "ranks": {f"d{r}": {str(k): v for k, v in rk.items()} for r, rk in sorted(rep.ranks.items())},
            "vanishes": {f"d{r}": v for r, v in sorted(rep.vanishes.items())},
        }
    if args.borel_cap is not None:
        br = chain.borel_cohomology(K, args.borel_cap)
        out["borel"] = {
            "dims": list(br.dims),
            "image_dims": list(br.image_dims),
            "surjective": br.surjective,
            "trivial_action": br.trivial_action,
            "degenerate_count": br.degenerate_count,
            "three_way_agree": br.three_way_agree,
        }
    if args.smith_gysin:
        sg = chain.smith_gysin(K)
        out["smith_gysin"] = {
            "quotient_betti": list(sg.quotient_betti),
            "betti": list(sg.betti),
            "rank_alpha": list(sg.rank_alpha),
            "rank_beta": list(sg.rank_beta),
            "rank_gamma": list(sg.rank_gamma),
            "dim_invariant": list(sg.dim_invariant),
            "exact": sg.exact,
        }
    return out


def cmd_hilbert_betti(args: argparse.Namespace) -> dict[str, Any]:
    series = hilbert.goettsche_series(args.b2, args.n)[args.n]
    out: dict[str, Any] = {"b2": args.b2, "n": args.n, "betti": series, "total": sum(series)}
    if args.census:
        out["census"] = hilbert.lqw_census(args.b2, args.n)
        out["census_agrees"] = out["census"] == series
    return out


def cmd_hilbert_maximality(args: argparse.Namespace) -> dict[str, Any]:
    S = hilbert.SurfaceData.from_json(_load_dict(args.file))
    v = hilbert.hilbert_maximality(S, args.n)
    return {"n": args.n, **v.to_json()}


def _sigma(args: argparse.Namespace) -> k3n.MonodromyInvolution:
    return k3n.MonodromyInvolution.from_json(_load_dict(args.file), args.n)


def cmd_k3n_classify(args: argparse.Namespace) -> dict[str, Any]:
    s = _sigma(args)
    return {"n": s.n, **k3n.classify_split(s).to_json()}


def cmd_k3n_obstruct(args: argparse.Namespace) -> dict[str, Any]:
    return k3n.obstruct(_sigma(args))


def cmd_k3n_symplectic(args: argparse.Namespace) -> dict[str, Any]:
    if args.og6 == (args.n is not None):
        raise _InputError("symplectic needs exactly one of --n or --og6")
    return k3n.symplectic_smith_slack(args.n, og6=args.og6)


def cmd_k3n_representative(args: argparse.Namespace) -> dict[str, Any]:
    s = k3n.representative(args.n, args.case, args.line)
    return s.to_json()


def cmd_k3n_fuzz(args: argparse.Namespace) -> dict[str, Any]:
    return k3n.property_run(args.n, args.count, args.seed, _threads())


# ---------------------------------------------------------------------------
# parser and output


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="machine-readable JSON report")
    common.add_argument("--seed", type=int, default=0, help="seed for every randomized driver")

    p = argparse.ArgumentParser(prog="maxbrane", description="Exact obstructions to maximal involutions.")
    p.add_argument("--version", action="version", version=f"maxbrane {_version()}")
    sub = p.add_subparsers(dest="command", required=True)

    q = sub.add_parser("lattice", parents=[common], help="invariants of an integral lattice")
    q.add_argument("file", nargs="?")
    q.add_argument("--expr", help='named lattice such as "U^3 + E8(-1)^2 + <-2>"')
    q.add_argument("--vector", help="comma separated coordinates; reports divisibility and class")
    q.set_defaults(func=cmd_lattice)

    q = sub.add_parser("comessatti", parents=[common], help="Comessatti characteristic of an involution")
    q.add_argument("file")
    q.set_defaults(func=cmd_comessatti)

    q = sub.add_parser("smith", parents=[common], help="Smith theory of a simplicial involution")
    q.add_argument("file", nargs="?")
    q.add_argument("--example", choices=sorted(_EXAMPLES))
    q.add_argument("--kalinin", type=int, choices=(1, 2, 3), default=None)
    q.add_argument("--borel-cap", type=int, default=None)
    q.add_argument("--smith-gysin", action="store_true")
    q.set_defaults(func=cmd_smith)

    h = sub.add_parser("hilbert", help="Hilbert schemes of points")
    hs = h.add_subparsers(dest="hcommand", required=True)
    q = hs.add_parser("betti", parents=[common], help="Betti numbers of S^[n]")
    q.add_argument("--b2", type=int, required=True)
    q.add_argument("--n", type=int, required=True)
    q.add_argument("--census", action="store_true", help="also count the integral basis by degree")
    q.set_defaults(func=cmd_hilbert_betti)
    q = hs.add_parser("maximality", parents=[common], help="maximality of the induced involution on S^[n]")
    q.add_argument("file")
    q.add_argument("--n", type=int, required=True)
    q.set_defaults(func=cmd_hilbert_maximality)

    k = sub.add_parser("k3n", help="involutions of K3^[n]-type lattices")
    ks = k.add_subparsers(dest="kcommand", required=True)
    for name, func in (("classify", cmd_k3n_classify), ("obstruct", cmd_k3n_obstruct)):
        q = ks.add_parser(name, parents=[common])
        q.add_argument("file")
        q.add_argument("--n", type=int, default=None)
        q.set_defaults(func=func)
    q = ks.add_parser("symplectic", parents=[common], help="fixed loci of symplectic involutions")
    q.add_argument("--n", type=int, default=None)
    q.add_argument("--og6", action="store_true")
    q.set_defaults(func=cmd_k3n_symplectic)
    q = ks.add_parser("representative", parents=[common], help="emit an explicit involution as JSON")
    q.add_argument("--n", type=int, required=True)
    q.add_argument("--case", type=int, required=True, choices=(1, 2, 3, 4))
    q.add_argument("--line", type=int, default=0, choices=(0, 1, 2))
    q.set_defaults(func=cmd_k3n_representative)
    q = ks.add_parser("fuzz", parents=[common], help="obstruct seeded random admissible involutions")
    q.add_argument("--n", type=int, required=True)
    q.add_argument("--count", type=int, default=100)
    q.set_defaults(func=cmd_k3n_fuzz)
    return p


def _flatten(obj: Any, prefix: str = "") -> list[tuple[str, Any]]:
    if isinstance(obj, dict):
        rows = []
        for k, v in obj.items():
            rows.extend(_flatten(v, f"{prefix}.{k}" if prefix else str(k)))
        return rows
    return [(prefix, obj)]


def render_human(report: dict[str, Any]) -> str:
    rows = _flatten(report["result"])
    width = max((len(k) for k, _ in rows), default=0)
    lines = [f"maxbrane {report['version']}: {' '.join(report['command'])}"]
    for key, val in rows:
        text = json.dumps(val) if not isinstance(val, str) else val
        lines.append(f"  {key.ljust(width)}  {text}")
    return "\n".join(lines)


def _command_echo(args: argparse.Namespace) -> list[str]:
    out = [args.command]
    for attr in ("hcommand", "kcommand"):
        if getattr(args, attr, None):
            out.append(getattr(args, attr))
    return out


def dispatch(argv: Sequence[str]) -> tuple[int, dict[str, Any] | None, bool]:
    parser = build_parser()
    try:
        args = parser.parse_args(list(argv))
    except SystemExit as exc:
        code = exc.code if isinstance(exc.code, int) else EXIT_PRECONDITION
        return code, None, False
    start = time.perf_counter()
    try:
        result = args.func(args)
    except InvariantError as exc:
        print(f"maxbrane: internal invariant failed: {exc}", file=sys.stderr)
        return EXIT_INVARIANT, None, args.json
    except (MaxbraneError, ValueError, KeyError, TypeError) as exc:
        print(f"maxbrane: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION, None, args.json
    report = {
        "command": _command_echo(args),
        "version": _version(),
        "result": _jsonable(result),
        "elapsed_s": round(time.perf_counter() - start, 6),
    }
    return EXIT_OK, report, args.json


def main(argv: Sequence[str] | None = None) -> int:
    code, report, as_json = dispatch(sys.argv[1:] if argv is None else argv)
    if report is not None:
        if as_json:
            print(json.dumps(report, indent=2, sort_keys=True))
        else:
            print(render_human(report))
    return code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
