"""Command-line front end.

Every command writes its JSON result to ``--out`` (or stdout) and a run
manifest next to it (``<out>.manifest.json``, ``--manifest PATH``, or stderr
when writing to stdout).  ``gctop --verify-manifest PATH`` replays a
manifest and checks the output digest.

Exit codes: 0 ok, 2 usage, 3 resource cap, 4 integrity failure.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
import time
from pathlib import Path
from typing import Sequence

from gctop import __version__
from gctop.complex import betti_numbers, compare_modes
from gctop.enumerate import EnumSpec, Mode, cache_get_or_build, enumerate_graphs, max_edges
from gctop.errors import GctopError, IntegrityError, ResourceError
from gctop.formulas import chi_orb_mod_g1, cv2_local_system_dim, fraction_str, growth_ratio, witt_dims
from gctop.graph import FORMAT_VERSION
from gctop.linalg.rank import CHECK_PRIME, PRIMARY_PRIME, RankConfig
from gctop.tropical import MetricPantsData, is_in_CV, tropicalize

EXIT_OK, EXIT_USAGE, EXIT_RESOURCE, EXIT_INTEGRITY = 0, 2, 3, 4

# Flags that only say where results go or how fast they are computed.
_NON_SEMANTIC = {"--out", "--manifest", "--threads", "--cache-dir"}


def _dumps(obj) -> bytes:
    return (json.dumps(obj, indent=2) + "\n").encode()


def _cache_dir(args) -> str | None:
    return args.cache_dir or os.environ.get("GCTOP_CACHE_DIR") or None


# -- commands -------------------------------------------------------------------


def cmd_enumerate(args) -> tuple[bytes, dict]:
    spec = EnumSpec(args.genus, args.legs, args.edges, Mode(args.mode), args.require_orientable, args.max_classes)
    cache_dir = _cache_dir(args)
    graphs = cache_get_or_build(spec, cache_dir) if cache_dir else enumerate_graphs(spec)
    return _dumps([g.to_json_dict() for g in graphs]), {"cache_digests": [spec.digest()]}


def _betti_digests(g: int, n: int, modes: list[Mode]) -> list[str]:
    return [
        EnumSpec(g, n, p, m, require_orientable=True).digest()
        for m in modes
        for p in range(max_edges(g, n) + 1)
    ]


def cmd_betti(args) -> tuple[bytes, dict]:
    cfg = RankConfig(
        primary_prime=args.prime,
        check_prime=args.check_prime,
        exact_fallback=not args.no_fallback,
        confirm_exact=args.exact,
    )
    cache_dir = _cache_dir(args)
    if args.mode == "both":
        result = compare_modes(args.genus, args.legs, cache_dir, cfg, args.threads)
        payload = result.to_json_dict()
        modes = [Mode.FULL, Mode.CV]
    else:
        report = betti_numbers(args.genus, args.legs, args.mode, cache_dir, cfg, args.threads)
        payload = report.to_json_dict()
        modes = [Mode(args.mode)]
    meta = {"primes": list(cfg.primes), "cache_digests": _betti_digests(args.genus, args.legs, modes)}
    return _dumps(payload), meta


def cmd_lie_dims(args) -> tuple[bytes, dict]:
    return _dumps(witt_dims(args.max_genus).rows()), {}


def cmd_growth(args) -> tuple[bytes, dict]:
    return _dumps(growth_ratio(witt_dims(args.max_genus)).to_json_dict()), {}


def cmd_chi_orb(args) -> tuple[bytes, dict]:
    value = chi_orb_mod_g1(args.genus)
    return _dumps({"genus": args.genus, "chi_orb": fraction_str(value)}), {}


def cmd_cv2_dim(args) -> tuple[bytes, dict]:
    dim = cv2_local_system_dim(args.a, args.b, args.k)
    return _dumps({"a": args.a, "b": args.b, "k": args.k, "dim": dim}), {}


def cmd_tropicalize(args) -> tuple[bytes, dict]:
    try:
        raw = json.loads(Path(args.input).read_text())
    except json.JSONDecodeError as exc:
        raise ValueError(f"{args.input}: invalid JSON: {exc}") from exc
    data = MetricPantsData.from_json_dict(raw)
    tc = tropicalize(data)
    in_cv = not tc.is_nodal and is_in_CV(tc)
    payload = tc.to_json_dict()
    payload["in_cv"] = in_cv
    payload["in_hm"] = in_cv
    return _dumps(payload), {}


# -- parser -----------------------------------------------------------------------


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--out", help="output file (default: stdout)")
    p.add_argument("--manifest", help="manifest path (default: <out>.manifest.json, or stderr)")
    p.add_argument("--threads", type=int, default=1, help="worker processes; never changes output")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="gctop", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"gctop {__version__}")
    parser.add_argument("--verify-manifest", metavar="PATH", help="replay a manifest and check its output digest")
    sub = parser.add_subparsers(dest="command")

    p = sub.add_parser("enumerate", help="list stable graphs of given genus, legs and edges")
    p.add_argument("--genus", type=int, required=True)
    p.add_argument("--legs", type=int, default=0)
    p.add_argument("--edges", type=int, required=True)
    p.add_argument("--mode", choices=["full", "cv"], default="full")
    p.add_argument("--require-orientable", action="store_true")
    p.add_argument("--max-classes", type=int, default=EnumSpec.__dataclass_fields__["max_classes"].default)
    p.add_argument("--cache-dir")
    _common(p)
    p.set_defaults(func=cmd_enumerate)

    p = sub.add_parser("betti", help="Betti numbers of the graph complex")
    p.add_argument("--genus", type=int, required=True)
    p.add_argument("--legs", type=int, default=0)
    p.add_argument("--mode", choices=["full", "cv", "both"], default="both")
    p.add_argument("--prime", type=int, default=PRIMARY_PRIME)
    p.add_argument("--check-prime", type=int, default=CHECK_PRIME)
    p.add_argument("--exact", action="store_true", help="confirm every rank over the integers")
    p.add_argument("--no-fallback", action="store_true", help="fail instead of falling back to exact rank")
    p.add_argument("--cache-dir")
    _common(p)
    p.set_defaults(func=cmd_betti)

    p = sub.add_parser("formulas", help="closed-form evaluators")
    fsub = p.add_subparsers(dest="formula", required=True)
    q = fsub.add_parser("lie-dims")
    q.add_argument("--max-genus", type=int, required=True)
    _common(q)
    q.set_defaults(func=cmd_lie_dims)
    q = fsub.add_parser("growth")
    q.add_argument("--max-genus", type=int, default=60)
    _common(q)
    q.set_defaults(func=cmd_growth)
    q = fsub.add_parser("chi-orb")
    q.add_argument("--genus", type=int, required=True)
    _common(q)
    q.set_defaults(func=cmd_chi_orb)
    q = fsub.add_parser("cv2-dim")
    q.add_argument("--a", type=int, required=True)
    q.add_argument("--b", type=int, required=True)
    q.add_argument("--k", type=int, required=True)
    _common(q)
    q.set_defaults(func=cmd_cv2_dim)

    p = sub.add_parser("tropicalize", help="tropicalize pants data")
    p.add_argument("--input", required=True)
    _common(p)
    p.set_defaults(func=cmd_tropicalize)
    return parser


def _replay_argv(argv: Sequence[str]) -> list[str]:
    """Drop flags that do not affect the output bytes."""
    out, skip = [], False
    for tok in argv:
        if skip:
            skip = False
            continue
        name = tok.split("=", 1)[0]
        if name in _NON_SEMANTIC:
            skip = "=" not in tok
            continue
        out.append(tok)
    return out


def run(argv: Sequence[str]) -> tuple[bytes, dict, argparse.Namespace]:
    """Parse and execute a command, returning output bytes and manifest."""
    args = build_parser().parse_args(argv)
    if args.command is None:
        raise SystemExit(EXIT_USAGE)
    start = time.perf_counter()
    output, meta = args.func(args)
    params = {k: v for k, v in vars(args).items() if k not in ("func", "out", "manifest", "threads", "verify_manifest", "cache_dir")}
    manifest = {
        "tool_version": __version__,
        "format_version": FORMAT_VERSION,
        "command": " ".join(x for x in (args.command, getattr(args, "formula", None)) if x),
        "parameters": params,
        "argv": _replay_argv(argv),
        "primes": meta.get("primes", []),
        "cache_digests": meta.get("cache_digests", []),
        "wall_time": time.perf_counter() - start,
        "output_digest": hashlib.sha256(output).hexdigest(),
    }
    return output, manifest, args


def verify_manifest(path: str) -> bool:
    manifest = json.loads(Path(path).read_text())
    output, _, _ = run(manifest["argv"])
    return hashlib.sha256(output).hexdigest() == manifest["output_digest"]


def _dispatch(argv: list[str]) -> int:
    if "--verify-manifest" in argv or any(a.startswith("--verify-manifest=") for a in argv):
        args, _ = build_parser().parse_known_args(argv)
        ok = verify_manifest(args.verify_manifest)
        print("manifest verified" if ok else "output digest mismatch")
        return EXIT_OK if ok else EXIT_INTEGRITY
    output, manifest, args = run(argv)
    text = json.dumps(manifest, indent=2) + "\n"
    if args.out:
        Path(args.out).write_bytes(output)
        Path(args.manifest or f"{args.out}.manifest.json").write_text(text)
    else:
        sys.stdout.buffer.write(output)
        sys.stdout.flush()
        if args.manifest:
            Path(args.manifest).write_text(text)
        else:
            sys.stderr.write(text)
    return EXIT_OK


def main(argv: Sequence[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        return _dispatch(argv)
    except ResourceError as exc:
        print(f"gctop: resource limit: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except IntegrityError as exc:
        print(f"gctop: integrity error: {exc}", file=sys.stderr)
        return EXIT_INTEGRITY
    except (GctopError, ValueError, OSError) as exc:
        print(f"gctop: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
