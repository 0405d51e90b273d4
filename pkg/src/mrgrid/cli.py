"""Command-line front end.

Every subcommand reads its JSON input from a file argument or stdin and
writes a result envelope ``{"status", "payload", "diagnostics"}``: JSON with
``--json``, an aligned key/value table otherwise.  Exit code 0 on success,
1 on a domain or schema error, 2 on a usage error.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass, field

import jsonschema
import numpy as np

from . import _kernels, constructions, cycles, patterns
from .gf2k import make_field
from .topology import Codeword, ErasurePattern, Instantiation, Topology, decode_erasures, systematic_encode


class SchemaError(ValueError):
    def __init__(self, problems: list[str]):
        super().__init__("; ".join(problems))
        self.problems = problems


@dataclass
class CommandResult:
    status: str
    payload: dict
    diagnostics: list = field(default_factory=list)

    @property
    def exit_code(self) -> int:
        return 0 if self.status == "ok" else 1

    def to_json(self) -> dict:
        return {"status": self.status, "payload": self.payload, "diagnostics": self.diagnostics}


# ---------------------------------------------------------------------------
# loaders
# ---------------------------------------------------------------------------

_HEX = {"type": "string", "pattern": "^0x[0-9a-fA-F]+$"}
_FIELD = {
    "type": "object",
    "required": ["degree", "poly"],
    "properties": {"degree": {"type": "integer", "minimum": 1, "maximum": 32}, "poly": _HEX},
}
_TOPOLOGY = {
    "type": "object",
    "required": list("mnabh"),
    "properties": {k: {"type": "integer", "minimum": 0} for k in "mnabh"},
}
PATTERN_SCHEMA = {
    "type": "object",
    "required": ["cells"],
    "properties": {
        "m": {"type": "integer", "minimum": 1},
        "n": {"type": "integer", "minimum": 1},
        "cells": {
            "type": "array",
            "items": {
                "type": "array",
                "items": {"type": "integer", "minimum": 0},
                "minItems": 2,
                "maxItems": 2,
            },
        },
    },
}
INSTANTIATION_SCHEMA = {
    "type": "object",
    "required": ["topology", "field", "alpha", "beta", "gamma"],
    "properties": {
        "topology": _TOPOLOGY,
        "field": _FIELD,
        "alpha": {"type": "array", "items": {"type": "array", "items": _HEX}},
        "beta": {"type": "array", "items": {"type": "array", "items": _HEX}},
        "gamma": {"type": "array", "items": {"type": "array", "items": {"type": "array", "items": _HEX}}},
    },
}
LABELING_SCHEMA = {
    "type": "object",
    "required": ["n_left", "n_right", "d", "labels"],
    "properties": {
        "n_left": {"type": "integer", "minimum": 1},
        "n_right": {"type": "integer", "minimum": 1},
        "d": {"type": "integer", "minimum": 0, "maximum": cycles.MAX_LABEL_BITS},
        "labels": {
            "type": "array",
            "items": {
                "type": "array",
                "prefixItems": [{"type": "integer", "minimum": 0}, {"type": "integer", "minimum": 0}, _HEX],
                "minItems": 3,
                "maxItems": 3,
            },
        },
    },
}


def _pointer(path) -> str:
    return "/" + "/".join(str(p) for p in path)


def _validate(obj, schema, base=()):
    problems = [
        f"{_pointer(tuple(base) + tuple(e.absolute_path))}: {e.message}"
        for e in sorted(jsonschema.Draft202012Validator(schema).iter_errors(obj), key=lambda e: list(e.absolute_path))
    ]
    if problems:
        raise SchemaError(problems)


def _read_json(source):
    if isinstance(source, (dict, list)):
        return source
    text = sys.stdin.read() if source in (None, "-") else open(source).read()
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError([f"/: invalid JSON ({exc})"]) from None


def load_pattern(source, m: int | None = None, n: int | None = None, base=()) -> ErasurePattern:
    obj = _read_json(source)
    _validate(obj, PATTERN_SCHEMA, base)
    cells = [tuple(c) for c in obj["cells"]]
    m = m or obj.get("m") or (max((i for i, _ in cells), default=0) + 1)
    n = n or obj.get("n") or (max((j for _, j in cells), default=0) + 1)
    problems, seen = [], set()
    for k, (i, j) in enumerate(cells):
        where = _pointer(tuple(base) + ("cells", k))
        if (i, j) in seen:
            problems.append(f"{where}: duplicate cell [{i}, {j}]")
        if i >= m or j >= n:
            problems.append(f"{where}: cell [{i}, {j}] outside the {m}x{n} grid")
        seen.add((i, j))
    if problems:
        raise SchemaError(problems)
    return ErasurePattern(m, n, frozenset(cells))


def load_instantiation(source, base=()) -> Instantiation:
    obj = _read_json(source)
    _validate(obj, INSTANTIATION_SCHEMA, base)
    t = obj["topology"]
    m, n, a, b, h = (t[k] for k in "mnabh")
    problems = []
    want = {"alpha": (m, a), "beta": (n, b)}
    for name, (rows, cols) in want.items():
        arr = obj[name]
        if len(arr) != rows or any(len(r) != cols for r in arr):
            problems.append(f"{_pointer(tuple(base) + (name,))}: expected {rows}x{cols} entries")
    g = obj["gamma"]
    if len(g) != h or any(len(x) != m or any(len(r) != n for r in x) for x in g):
        problems.append(f"{_pointer(tuple(base) + ('gamma',))}: expected {h}x{m}x{n} entries")
    if problems:
        raise SchemaError(problems)
    try:
        return Instantiation.from_json(obj)
    except ValueError as exc:
        raise SchemaError([f"{_pointer(base)}: {exc}"]) from None


def load_labeling(source, base=()) -> cycles.EdgeLabeling:
    obj = _read_json(source)
    _validate(obj, LABELING_SCHEMA, base)
    problems = []
    nl, nr = obj["n_left"], obj["n_right"]
    seen = set()
    for k, (i, j, _) in enumerate(obj["labels"]):
        where = _pointer(tuple(base) + ("labels", k))
        if i >= nl or j >= nr:
            problems.append(f"{where}: edge ({i}, {j}) outside K_{{{nl},{nr}}}")
        if (i, j) in seen:
            problems.append(f"{where}: edge ({i}, {j}) labeled twice")
        seen.add((i, j))
    if not problems and len(seen) != nl * nr:
        problems.append(f"{_pointer(tuple(base) + ('labels',))}: {nl * nr - len(seen)} edges unlabeled")
    if problems:
        raise SchemaError(problems)
    try:
        return cycles.EdgeLabeling.from_json(obj)
    except ValueError as exc:
        raise SchemaError([f"{_pointer(base)}: {exc}"]) from None


# ---------------------------------------------------------------------------
# handlers
# ---------------------------------------------------------------------------


def _topology(args) -> Topology:
    return Topology(args.m, args.n, args.a, args.b, args.h)


def _field(args, default: int):
    return make_field(args.field_degree or default)


def cmd_pattern_regular(args, diag):
    E = load_pattern(args.input, args.m, args.n)
    return patterns.is_regular(E, args.a, args.b).to_json()


def cmd_pattern_peel(args, diag):
    E = load_pattern(args.input, args.m, args.n)
    return patterns.peel(E, args.a, args.b).to_json()


def cmd_pattern_oracle(args, diag):
    top = _topology(args)
    E = load_pattern(args.input, top.m, top.n)
    degree = args.field_degree or patterns.default_oracle_degree(top)
    verdict = patterns.correctable_oracle(top, E, args.trials, degree, args.seed)
    diag.append(f"oracle: {args.trials} trials over GF(2^{degree})")
    return {"verdict": verdict.value, "correctable": bool(verdict)}


def cmd_pattern_t10h(args, diag):
    E = load_pattern(args.input, args.m, args.n)
    return {"correctable": patterns.correctable_T10h(E, E.m, E.n, args.h)}


def cmd_pattern_t11h(args, diag):
    E = load_pattern(args.input, args.m, args.n)
    core = patterns.bipartite_core(E)
    return {
        "correctable": patterns.correctable_T11h(E, E.m, E.n, args.h),
        "simple_cycle_core": patterns.simple_cycle_core_check(E),
        "core": {"l": core.ell, "r": core.r, "e": core.e, "c": core.components},
    }


def cmd_pattern_report(args, diag):
    top = _topology(args)
    rep = patterns.regularity_report(top, args.trials, args.field_degree, args.seed, limit=args.limit)
    diag.append("empirical comparison only; nothing is asserted for a >= 2")
    return rep.to_json()


def cmd_code_rs(args, diag):
    spec = _field(args, max(1, math.ceil(math.log2(max(2, args.n)))))
    points = [int(p, 16) for p in args.points.split(",")] if args.points else None
    return constructions.rs_mds(spec, args.n, args.k, points).to_json()


def cmd_code_tensor(args, diag):
    spec = _field(args, max(1, math.ceil(math.log2(max(2, args.m, args.n)))))
    col = constructions.rs_mds(spec, args.m, args.m - args.a)
    row = constructions.rs_mds(spec, args.n, args.n - args.b)
    return constructions.tensor_instantiation(col, row).to_json()


def cmd_code_mr_t102(args, diag):
    return constructions.mr_T102(args.m, args.n).to_json()


def cmd_code_row_for_pattern(args, diag):
    E = load_pattern(args.input, args.m, args.n)
    spec = _field(args, 16)
    code = constructions.row_code_for_regular_pattern(E, args.b, spec, args.seed)
    if code.spec != spec:
        diag.append(f"field escalated to GF(2^{code.spec.degree})")
    return code.to_json()


def cmd_code_boost(args, diag):
    E = load_pattern(args.input, args.m, args.n)
    return constructions.boost(E, args.b).to_json()


def cmd_verify_mr(args, diag):
    inst = load_instantiation(args.input)
    char = None if args.characterization == "auto" else args.characterization
    verdict = constructions.verify_mr(inst, char, args.trials, args.field_degree, args.seed)
    return verdict.to_json()


def cmd_verify_prop24(args, diag):
    return constructions.structure_report(load_instantiation(args.input))


def cmd_encode(args, diag):
    obj = _read_json(args.input)
    if not isinstance(obj, dict) or not {"instantiation", "info_set", "values"} <= set(obj):
        raise SchemaError(["/: expected keys instantiation, info_set, values"])
    inst = load_instantiation(obj["instantiation"], base=("instantiation",))
    values = [int(str(v), 16) for v in obj["values"]]
    return systematic_encode(inst, [tuple(c) for c in obj["info_set"]], values).to_json()


def cmd_decode(args, diag):
    obj = _read_json(args.input)
    if not isinstance(obj, dict) or not {"instantiation", "codeword"} <= set(obj):
        raise SchemaError(["/: expected keys instantiation, codeword"])
    inst = load_instantiation(obj["instantiation"], base=("instantiation",))
    return decode_erasures(inst, Codeword.from_json(obj["codeword"])).to_json()


def cmd_cycles_enumerate(args, diag):
    nr = args.n_right or args.n
    stream = cycles.enumerate_simple_cycles(args.n, nr, args.max_len)
    if args.list:
        found = [list(c.vertices) for c in stream]
        return {"count": len(found), "cycles": found}
    return {"count": sum(1 for _ in stream)}


def cmd_cycles_property_a(args, diag):
    return cycles.has_property_A(load_labeling(args.input), args.max_len).to_json()


def cmd_cycles_path_bound(args, diag):
    L = load_labeling(args.input)
    size, bound = cycles.path_class_count(L, args.v1, args.v2, args.k)
    return {"max_class_size": size, "bound": bound, "within_bound": size <= bound}


def cmd_cycles_min_d(args, diag):
    res = cycles.min_label_dimension(args.n, args.d_max, args.strategy, args.budget, args.seed)
    return res.to_json()


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------


def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--seed", type=int, default=0, help="RNG seed for randomized steps (default 0)")
    p.add_argument("--field-degree", type=int, default=None, help="degree d of GF(2^d)")
    p.add_argument("--trials", type=int, default=3, help="oracle trials (default 3)")
    p.add_argument("--json", action="store_true", help="emit the JSON result envelope")
    p.add_argument("--out", metavar="FILE", help="write the report here instead of stdout")
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = argparse.ArgumentParser(prog="mrgrid", description=__doc__.splitlines()[0])
    groups = parser.add_subparsers(dest="group", required=True)

    def leaf(sub, name, handler, help_, input_=False, randomized=False):
        p = sub.add_parser(name, parents=[common], help=help_)
        if input_:
            p.add_argument("input", nargs="?", default="-", help="JSON input file (default stdin)")
        p.set_defaults(handler=handler, randomized=randomized)
        return p

    def grid(p, need=False):
        p.add_argument("--m", type=int, required=need)
        p.add_argument("--n", type=int, required=need)

    def top(p):
        grid(p, need=True)
        for k in "abh":
            p.add_argument(f"--{k}", type=int, default=0)

    pat = groups.add_parser("pattern", help="classify erasure patterns").add_subparsers(dest="cmd", required=True)
    p = leaf(pat, "regular", cmd_pattern_regular, "regularity test with witness", True)
    grid(p)
    p.add_argument("--a", type=int, required=True)
    p.add_argument("--b", type=int, required=True)
    p = leaf(pat, "peel", cmd_pattern_peel, "iterative row/column peeling", True)
    grid(p)
    p.add_argument("--a", type=int, required=True)
    p.add_argument("--b", type=int, required=True)
    top(leaf(pat, "oracle", cmd_pattern_oracle, "randomized generic-rank correctability", True, True))
    for name, handler in (("t10h", cmd_pattern_t10h), ("t11h", cmd_pattern_t11h)):
        p = leaf(pat, name, handler, f"closed-form correctability for T({name[1]},{name[2]},h)", True)
        grid(p)
        p.add_argument("--h", type=int, required=True)
    p = leaf(pat, "report", cmd_pattern_report, "regularity vs oracle over every pattern", False, True)
    top(p)
    p.add_argument("--limit", type=int, default=20, help="max discrepancies listed per kind")

    code = groups.add_parser("code", help="build codes").add_subparsers(dest="cmd", required=True)
    p = leaf(code, "rs", cmd_code_rs, "Reed-Solomon (Vandermonde) MDS code")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--points", help="comma-separated hex evaluation points")
    p = leaf(code, "tensor", cmd_code_tensor, "tensor of two Reed-Solomon codes")
    grid(p, need=True)
    p.add_argument("--a", type=int, required=True)
    p.add_argument("--b", type=int, required=True)
    p = leaf(code, "mr-t102", cmd_code_mr_t102, "explicit MR code for T(1,0,2)")
    grid(p, need=True)
    p = leaf(code, "row-for-pattern", cmd_code_row_for_pattern, "row code tailored to a regular pattern", True, True)
    grid(p)
    p.add_argument("--b", type=int, required=True)
    p = leaf(code, "boost", cmd_code_boost, "split heavy rows to weight b+1", True)
    grid(p)
    p.add_argument("--b", type=int, required=True)

    ver = groups.add_parser("verify", help="exhaustive verification").add_subparsers(dest="cmd", required=True)
    p = leaf(ver, "mr", cmd_verify_mr, "check maximal recoverability", True, True)
    p.add_argument(
        "--characterization", default="auto", choices=["auto", "oracle", "t10h", "t11h", "regular"]
    )
    leaf(ver, "prop24", cmd_verify_prop24, "dimension and local MDS structure", True)

    leaf(groups, "encode", cmd_encode, "systematic encoding", True)
    leaf(groups, "decode", cmd_decode, "erasure decoding", True)

    cyc = groups.add_parser("cycles", help="edge labelings and cycles").add_subparsers(dest="cmd", required=True)
    p = leaf(cyc, "enumerate", cmd_cycles_enumerate, "simple cycles of K_{n,n}")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--n-right", type=int)
    p.add_argument("--max-len", type=int)
    p.add_argument("--list", action="store_true")
    p = leaf(cyc, "property-a", cmd_cycles_property_a, "no zero-sum simple cycle", True)
    p.add_argument("--max-len", type=int)
    p = leaf(cyc, "path-bound", cmd_cycles_path_bound, "same-weight path class sizes", True)
    p.add_argument("--v1", type=int, required=True)
    p.add_argument("--v2", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p = leaf(cyc, "min-d", cmd_cycles_min_d, "smallest zero-cycle-free label dimension", False, True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--d-max", type=int, required=True)
    p.add_argument("--strategy", choices=["exhaustive", "random"], default="exhaustive")
    p.add_argument("--budget", type=int, default=0)
    return parser


def _json_default(o):
    if isinstance(o, np.integer):
        return int(o)
    if isinstance(o, np.ndarray):
        return o.tolist()
    raise TypeError(type(o).__name__)


def _table(result: CommandResult) -> str:
    rows = [("status", result.status)]
    for k, v in result.payload.items():
        rows.append((k, v if isinstance(v, str) else json.dumps(v, default=_json_default)))
    rows += [("note", d) for d in result.diagnostics]
    width = max(len(k) for k, _ in rows)
    return "\n".join(f"{k.ljust(width)}  {v}" for k, v in rows) + "\n"


def dispatch(argv=None) -> CommandResult:
    args = build_parser().parse_args(argv)
    diag = [f"backend={_kernels.backend()}"]
    if args.randomized:
        diag.append(f"seed={args.seed}")
    try:
        payload = args.handler(args, diag)
        result = CommandResult("ok", payload, diag)
    except (SchemaError, ValueError, RuntimeError, ZeroDivisionError) as exc:
        result = CommandResult("error", {"error": type(exc).__name__, "message": str(exc)}, diag)
        if isinstance(exc, SchemaError):
            result.payload["problems"] = exc.problems
    result.args = args
    return result


def main(argv=None) -> int:
    result = dispatch(argv)
    args = result.args
    if args.json:
        text = json.dumps(result.to_json(), indent=2, default=_json_default) + "\n"
    else:
        text = _table(result)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return result.exit_code


if __name__ == "__main__":
    sys.exit(main())
