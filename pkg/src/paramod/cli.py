"""Command-line interface: ``paramod <subcommand> ...``.

Exit status 0 on success, 1 on a domain error (with an error document on
stdout), 2 on a usage error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from typing import Sequence

from paramod import matrix as mx
from paramod.errors import InvalidInputError, ParamodError
from paramod.group import GroupKind, member, random_element
from paramod.gspaces import make_lattice, reduce_to_standard
from paramod.invariants import divisors, ideal_generator
from paramod.oracle import cross_validate_lines, orbit_sample
from paramod.orbits_lines import (
    NotEquivalent,
    canon_lev,
    canon_pol,
    enumerate_lev,
    enumerate_pol,
    transporter,
)
from paramod.polarization import parse_polarization

SCHEMA = "paramod-tits/1"


def _default_seed() -> int:
    raw = os.environ.get("PARAMOD_SEED")
    if raw is None:
        return 0
    try:
        return int(raw)
    except ValueError:
        return 0


def _group(text: str) -> GroupKind:
    try:
        return GroupKind.parse(text)
    except InvalidInputError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _pol(text: str):
    try:
        return parse_polarization(text)
    except ParamodError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _vector(text: str):
    try:
        return mx.parse_vector(text)
    except ParamodError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _tilde_group(kind: GroupKind) -> GroupKind:
    if kind.is_conj:
        raise InvalidInputError(f"{kind.value} is not supported here; use tilde-pol or tilde-pol-lev")
    return kind


# ---------------------------------------------------------------------------
# subcommands; each returns a JSON-ready dict

def cmd_divisors(args) -> dict:
    tup = divisors(args.vector, args.pol)
    return {"D": list(tup.D), "product": tup.product, "ideal": ideal_generator(args.vector, args.pol)}


def cmd_canon(args) -> dict:
    kind = _tilde_group(args.group)
    if kind.has_level:
        red, info = canon_lev(args.vector, args.pol, line=args.line)
        product = info.product
    else:
        red = canon_pol(args.vector, args.pol)
        product = red.canonical[0]
    out = red.to_json()
    out["product"] = product
    return out


def cmd_equiv(args) -> dict:
    kind = _tilde_group(args.group)
    res = transporter(args.v, args.w, args.pol, kind)
    if isinstance(res, NotEquivalent):
        return {
            "equivalent": False,
            "v_canonical": list(res.v_canonical),
            "w_canonical": list(res.w_canonical),
        }
    return {"equivalent": True, "witness": res.to_json()}


def cmd_reps(args) -> dict:
    kind = _tilde_group(args.group)
    if kind.has_level:
        stream = (r.vector for r in enumerate_lev(args.pol))
    else:
        stream = (r.vhat for r in enumerate_pol(args.pol))
    reps = []
    for v in stream:
        if args.limit is not None and len(reps) >= args.limit:
            break
        if args.plain and not args.count_only:
            print(",".join(map(str, v)), flush=True)
        reps.append(list(v))
    out = {"count": len(reps)}
    if not args.count_only:
        out["representatives"] = reps
    if args.limit is not None:
        out["limit"] = args.limit
    return out


def cmd_reduce_gspace(args) -> dict:
    lattice = make_lattice(mx.parse_matrix(args.basis), args.pol)
    red = reduce_to_standard(lattice)
    out = red.to_json()
    out["basis"] = [list(r) for r in lattice.basis]
    return out


def cmd_member(args) -> dict:
    res = member(mx.parse_matrix(args.matrix), args.group, args.pol)
    out = {"member": res.ok, "group": args.group.value}
    if res.reason:
        out["reason"] = res.reason
    return out


def cmd_apply(args) -> dict:
    m = mx.parse_matrix(args.matrix)
    n = 2 * args.pol.g if args.pol is not None else len(m)
    if len(args.vector) != len(m) or len(m) != n:
        raise InvalidInputError("vector length and matrix size disagree")
    image = mx.vecmat(args.vector, m)
    out = {"image": [mx.entry_to_json(x) for x in image]}
    if args.expect is not None:
        out["matches"] = tuple(image) == tuple(args.expect)
    return out


def cmd_word(args) -> dict:
    el = random_element(args.group, args.pol, args.seed, args.length)
    return {"seed": args.seed, "length": args.length, "element": el.to_json()}


def cmd_sample(args) -> dict:
    kind = _tilde_group(args.group)
    s = orbit_sample(args.vector, kind, args.pol, args.seed, args.walks, args.length)
    return s.to_json()


def cmd_oracle(args) -> dict:
    kind = _tilde_group(args.group)
    return cross_validate_lines(args.pol, kind, args.bound, args.cap).to_json()


# ---------------------------------------------------------------------------
# plumbing

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="paramod", description=__doc__.splitlines()[0])
    out = argparse.ArgumentParser(add_help=False)
    fmt = out.add_mutually_exclusive_group()
    fmt.add_argument("--json", dest="plain", action="store_false", help="JSON output (default)")
    fmt.add_argument("--plain", dest="plain", action="store_true", help="human-readable output")
    out.set_defaults(plain=False)
    pol = argparse.ArgumentParser(add_help=False)
    pol.add_argument("--pol", type=_pol, required=True, help="polarization type, e.g. 1,4,24")
    grp = argparse.ArgumentParser(add_help=False)
    grp.add_argument("--group", type=_group, default=GroupKind.TILDE_POL,
                     help="tilde-pol (pol), tilde-pol-lev (lev), conj-pol, conj-pol-lev")
    common = [out, pol]
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    p = sub.add_parser("divisors", parents=common, help="divisor tuple of a primitive vector")
    p.add_argument("--vector", type=_vector, required=True)
    p.set_defaults(func=cmd_divisors)

    p = sub.add_parser("canon", parents=common + [grp], help="canonical form with witness")
    p.add_argument("--vector", type=_vector, required=True)
    p.add_argument("--line", action="store_true", help="identify v with -v (level group)")
    p.set_defaults(func=cmd_canon)

    p = sub.add_parser("equiv", parents=common + [grp], help="equivalence test with witness")
    p.add_argument("--v", type=_vector, required=True)
    p.add_argument("--w", type=_vector, required=True)
    p.set_defaults(func=cmd_equiv)

    p = sub.add_parser("reps", parents=common + [grp], help="orbit representatives")
    p.add_argument("--count-only", action="store_true")
    p.add_argument("--limit", type=int, default=None)
    p.set_defaults(func=cmd_reps)

    p = sub.add_parser("reduce-gspace", parents=common, help="reduce an isotropic g-space")
    p.add_argument("--basis", required=True, help="rows 'r1;r2;...' or @file")
    p.set_defaults(func=cmd_reduce_gspace)

    p = sub.add_parser("member", parents=common + [grp], help="group membership test")
    p.add_argument("--matrix", required=True, help="rows 'r1;r2;...' or @file")
    p.set_defaults(func=cmd_member)

    p = sub.add_parser("apply", parents=[out], help="vector times matrix, optionally compared")
    p.add_argument("--pol", type=_pol, default=None)
    p.add_argument("--vector", type=_vector, required=True)
    p.add_argument("--matrix", required=True)
    p.add_argument("--expect", type=_vector, default=None)
    p.set_defaults(func=cmd_apply)

    p = sub.add_parser("word", parents=common + [grp], help="random group element")
    p.add_argument("--seed", type=int, default=_default_seed())
    p.add_argument("--length", type=int, default=10)
    p.set_defaults(func=cmd_word)

    p = sub.add_parser("sample", parents=common + [grp], help="random-walk orbit sample")
    p.add_argument("--vector", type=_vector, required=True)
    p.add_argument("--seed", type=int, default=_default_seed())
    p.add_argument("--walks", type=int, default=50)
    p.add_argument("--length", type=int, default=20)
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("oracle", help="brute-force cross-checks")
    osub = p.add_subparsers(dest="oracle_command", required=True, metavar="CHECK")
    q = osub.add_parser("cross-validate", parents=common + [grp], help="box scan vs enumeration")
    q.add_argument("--bound", type=int, default=None)
    q.add_argument("--cap", type=int, default=2_000_000)
    q.set_defaults(func=cmd_oracle)
    return parser


def _plain(doc, indent: str = "") -> list[str]:
    lines = []
    for key, value in doc.items():
        if isinstance(value, dict) and "entries" in value:
            lines.append(f"{indent}{key}:")
            lines.extend(f"{indent}  " + " ".join(f"{x:>4}" for x in row) for row in value["entries"])
        elif isinstance(value, dict):
            lines.append(f"{indent}{key}:")
            lines.extend(_plain(value, indent + "  "))
        elif isinstance(value, list) and value and isinstance(value[0], (list, dict)):
            lines.append(f"{indent}{key}: {len(value)} item(s)")
            for item in value:
                if isinstance(item, dict):
                    lines.extend(_plain(item, indent + "  "))
                else:
                    lines.append(f"{indent}  " + ",".join(map(str, item)))
        elif isinstance(value, list):
            lines.append(f"{indent}{key}: " + ",".join(map(str, value)))
        else:
            lines.append(f"{indent}{key}: {value}")
    return lines


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    plain = getattr(args, "plain", False)
    try:
        doc = args.func(args)
    except ParamodError as exc:
        err = {"schema": SCHEMA, "error": exc.to_json()}
        if plain:
            print(f"error ({exc.kind}): {exc}")
        else:
            print(json.dumps(err, sort_keys=True))
        return 1
    doc = {"schema": SCHEMA, **doc}
    if plain:
        if args.command == "reps" and not args.count_only:
            print(f"count: {doc['count']}")
        else:
            print("\n".join(_plain(doc)))
    else:
        print(json.dumps(doc, sort_keys=True))
    return 0


if __name__ == "__main__":
    sys.exit(main())
