"""Command-line front end.

Exit codes: 0 success (including verdicts match / no-claim), 1 invalid
input, 2 a configured cap was exceeded, 3 a classification mismatch
against the bundled reference table (mismatch is data, not a crash; the
nonzero code flags it for harnesses).

Output is deterministic: canonical JSON (sorted keys, fixed separators),
fixed text layouts, no timestamps; the tool identification line goes to
stderr so payloads stay byte-stable.  Batch commands accept --jobs; rows
are computed in a thread pool and always assembled in canonical order,
so the bytes do not depend on the thread count.
"""

from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction

from . import __version__
from .cech import (
    CechError,
    ComplexCapExceeded,
    FiniteAction,
    FiniteGroupTable,
    Nerve,
    central_extension_from_cocycle,
    cohomology,
    cyclic_group,
    equivariant_cohomology,
    nerve_of_cover,
    parse_group_label,
    trivialize,
    Cochain,
)
from .claims import find_claim
from .intlinalg import RatVector, freeze
from .levels import (
    LevelTensor,
    SharedWeylAction,
    basic_level,
    claim_key_of,
    compare_with_reference,
    is_invariant,
)
from .obstruction import (
    ScanTooLarge,
    SemisimplePoint,
    VerificationCapExceeded,
    obstruction_report,
    scan_points,
)
from .rootdata import (
    DatumError,
    RootDatum,
    build_isogeny,
    classical_datum,
    classical_isogeny,
    validate_datum,
)
from .weyl import WeylCapExceeded

EXIT_OK = 0
EXIT_BAD_INPUT = 1
EXIT_CAP = 2
EXIT_MISMATCH = 3

DEFAULT_ATLAS_ROWS = (
    [("A", r, s, t) for r in (1, 2, 3)
     for (s, t) in (("SL", "SL"), ("PGL", "PGL"), ("GL", "GL"),
                    ("SL", "GL"), ("SL", "PGL"))]
    + [("B", r, s, t) for r in (2, 3)
       for (s, t) in (("Spin", "Spin"), ("SO", "SO"), ("Spin", "SO"))]
    + [("D", r, s, t) for r in (3, 4)
       for (s, t) in (("Spin", "Spin"), ("SO", "SO"), ("PSO", "PSO"),
                      ("Spin", "SO"), ("Spin", "PSO"), ("SO", "PSO"))]
)


class CliError(Exception):
    def __init__(self, message: str, code: int):
        super().__init__(message)
        self.code = code


def emit(payload: str, out_path: str | None) -> None:
    sys.stdout.write(payload)
    if out_path:
        with open(out_path, "w") as fh:
            fh.write(payload)


def canonical_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":")) + "\n"


def parse_rational_vector(text: str) -> RatVector:
    try:
        fracs = [Fraction(part.strip()) for part in text.split(",")]
    except (ValueError, ZeroDivisionError) as err:
        raise CliError(f"cannot parse rational vector {text!r}: {err}",
                       EXIT_BAD_INPUT)
    return RatVector.from_fractions(fracs)


def build_action(args) -> SharedWeylAction:
    try:
        if getattr(args, "datum_fixture", None):
            data = _load_fixture(args.datum_fixture)
            src = RootDatum.from_json_dict(data["source"])
            tgt = RootDatum.from_json_dict(data["target"])
            for rd in (src, tgt):
                report = validate_datum(rd)
                if not report.passed:
                    raise CliError(
                        f"datum {rd.name} invalid: {'; '.join(report.violations)}",
                        EXIT_BAD_INPUT,
                    )
            iso = build_isogeny(src, tgt)
        else:
            if None in (args.series, args.rank, args.source_form,
                        args.target_form):
                raise CliError(
                    "give SERIES RANK SOURCE TARGET or --datum-fixture",
                    EXIT_BAD_INPUT,
                )
            iso = classical_isogeny(args.series, args.rank, args.source_form,
                                    args.target_form)
        return SharedWeylAction(iso, cap=args.max_weyl_order)
    except (DatumError, KeyError) as err:
        raise CliError(str(err), EXIT_BAD_INPUT)
    except WeylCapExceeded as err:
        raise CliError(str(err), EXIT_CAP)


def resolve_level(action: SharedWeylAction, spec: str) -> LevelTensor:
    iso = action.iso
    if spec.endswith("basic"):
        head = spec[: -len("basic")].rstrip("x*")
        try:
            mult = 1 if not head else int(head)
        except ValueError:
            raise CliError(f"cannot parse level spec {spec!r}", EXIT_BAD_INPUT)
        if mult < 1:
            raise CliError("level multiple must be >= 1", EXIT_BAD_INPUT)
        res = basic_level(iso)
        if mult % res.minimal_multiple:
            raise CliError(
                f"{mult} x basic is not in the level lattice for {iso.name}; "
                f"the least integral multiple is {res.minimal_multiple}",
                EXIT_BAD_INPUT,
            )
        level = res.tensor.scale(mult // res.minimal_multiple)
    else:
        try:
            with open(spec) as fh:
                data = json.load(fh)
            level = LevelTensor(iso, freeze(data["matrix"]))
        except (OSError, KeyError, ValueError) as err:
            raise CliError(f"cannot load level from {spec!r}: {err}",
                           EXIT_BAD_INPUT)
    if not is_invariant(action, level):
        raise CliError("level tensor is not Weyl invariant", EXIT_BAD_INPUT)
    return level


# ---------------------------------------------------------------------------
# subcommands


def atlas_entry_text(e) -> str:
    gens = "; ".join(str([list(r) for r in m]) for m in e.computed_basis)
    claim = "none" if e.claim is None else json.dumps(e.claim, sort_keys=True)
    return (
        f"{e.series}{e.rank} {e.source_form}->{e.target_form}  "
        f"verdict={e.verdict}  computed=[{gens}]  claim={claim}"
    )


def cmd_levels(args) -> int:
    action = build_action(args)
    series, _rank, sf, tf = claim_key_of(action.iso)
    claim = find_claim(series, sf, tf)
    entry = compare_with_reference(action, claim)
    if args.format == "json":
        emit(canonical_json(entry.to_json_dict()), args.out)
    elif args.format == "csv":
        emit(_atlas_csv([entry]), args.out)
    else:
        emit(atlas_entry_text(entry) + "\n", args.out)
    return EXIT_MISMATCH if entry.verdict == "mismatch" else EXIT_OK


def _atlas_csv(entries) -> str:
    lines = ["series,rank,source_form,target_form,verdict,computed,claimed"]
    for e in entries:
        comp = "|".join(json.dumps([list(r) for r in m]) for m in e.computed_basis)
        claimed = (
            ""
            if e.claimed_basis is None
            else "|".join(json.dumps([list(r) for r in m]) for m in e.claimed_basis)
        )
        lines.append(
            f"{e.series},{e.rank},{e.source_form},{e.target_form},"
            f"{e.verdict},\"{comp}\",\"{claimed}\""
        )
    return "\n".join(lines) + "\n"


def _atlas_row(row, max_weyl_order, scan_denominator):
    series, rank, sf, tf = row
    try:
        iso = classical_isogeny(series, rank, sf, tf)
        action = SharedWeylAction(iso, cap=max_weyl_order)
        entry = compare_with_reference(
            action, find_claim(series, sf, tf)
        )
        scan_summary = None
        if scan_denominator:
            res = basic_level(iso)
            table = scan_points(action, res.tensor, scan_denominator)
            scan_summary = {
                "level": f"{res.minimal_multiple}xbasic",
                "points": len(table.rows),
                "trivial": table.trivial_count,
                "nontrivial": table.nontrivial_count,
            }
        return {"entry": entry, "scan": scan_summary, "error": None, "row": row}
    except (DatumError, CechError) as err:
        return {"entry": None, "scan": None, "error": str(err), "row": row}
    except (WeylCapExceeded, ScanTooLarge, VerificationCapExceeded) as err:
        return {"entry": None, "scan": None, "error": f"cap: {err}", "row": row}


def cmd_atlas(args) -> int:
    rows = []
    if args.row:
        for spec in args.row:
            parts = spec.split(",")
            if len(parts) != 4:
                raise CliError(f"--row needs SERIES,RANK,SOURCE,TARGET: {spec!r}",
                               EXIT_BAD_INPUT)
            try:
                rows.append((parts[0], int(parts[1]), parts[2], parts[3]))
            except ValueError:
                raise CliError(f"bad rank in --row {spec!r}", EXIT_BAD_INPUT)
    else:
        rows = list(DEFAULT_ATLAS_ROWS)
    if args.series:
        wanted = set(args.series.split(","))
        rows = [r for r in rows if r[0] in wanted]
    rows.sort(key=lambda r: (r[0], r[1], r[2], r[3]))
    worker = lambda row: _atlas_row(  # noqa: E731
        row, args.max_weyl_order, args.scan_denominator
    )
    if args.jobs > 1:
        with ThreadPoolExecutor(max_workers=args.jobs) as pool:
            results = list(pool.map(worker, rows))
    else:
        results = [worker(row) for row in rows]
    results.sort(key=lambda r: (r["row"][0], r["row"][1], r["row"][2], r["row"][3]))
    if args.format == "json":
        payload = []
        for r in results:
            if r["error"] is not None:
                payload.append({
                    "series": r["row"][0], "rank": r["row"][1],
                    "source_form": r["row"][2], "target_form": r["row"][3],
                    "error": r["error"],
                })
            else:
                d = r["entry"].to_json_dict()
                if r["scan"] is not None:
                    d["scan"] = r["scan"]
                payload.append(d)
        emit(canonical_json(payload), args.out)
    elif args.format == "csv":
        good = [r["entry"] for r in results if r["entry"] is not None]
        emit(_atlas_csv(good), args.out)
    else:
        lines = []
        for r in results:
            if r["error"] is not None:
                series, rank, sf, tf = r["row"]
                lines.append(f"{series}{rank} {sf}->{tf}  error: {r['error']}")
            else:
                line = atlas_entry_text(r["entry"])
                if r["scan"] is not None:
                    line += f"  scan={json.dumps(r['scan'], sort_keys=True)}"
                lines.append(line)
        emit("\n".join(lines) + "\n", args.out)
    return EXIT_OK


def cmd_obstruction(args) -> int:
    action = build_action(args)
    level = resolve_level(action, args.level)
    xi_amb = parse_rational_vector(args.xi)
    tgt = action.iso.target
    if len(xi_amb) != tgt.ambient_dim:
        raise CliError(
            f"xi must have {tgt.ambient_dim} reference coordinates",
            EXIT_BAD_INPUT,
        )
    coords = tgt.cochar_coords_q(xi_amb.fractions())
    if coords is None:
        raise CliError("xi lies outside the cocharacter span", EXIT_BAD_INPUT)
    pt = SemisimplePoint(RatVector.from_fractions(coords))
    try:
        res = obstruction_report(action, level, pt,
                                 verify_cap=args.max_subgroup_order)
    except VerificationCapExceeded as err:
        raise CliError(str(err), EXIT_CAP)
    payload = res.to_json_dict()
    payload["stabilizer_actions"] = {
        str(i): [list(r) for r in action.source_char_action(i)]
        for i in res.w_l.members
    }
    if args.format == "json":
        emit(canonical_json(payload), args.out)
    else:
        lines = [
            f"isogeny: {payload['isogeny']}",
            f"xi (basis coords): {payload['xi']['num']} / {payload['xi']['den']}",
            f"stabilizer order: {payload['stabilizer_order']}",
            f"trivial: {payload['trivial']}",
            f"class order: {payload['class_order']}",
            f"witness: {payload['witness_u']}",
            f"rational witness: {payload['rational_witness']['num']}"
            f" / {payload['rational_witness']['den']}",
            f"H1 invariants: {res.h1_invariants.label()}",
            f"reflection subgroup agrees: {payload['reflection_subgroup_agrees']}",
        ]
        emit("\n".join(lines) + "\n", args.out)
    return EXIT_OK


def cmd_scan(args) -> int:
    action = build_action(args)
    level = resolve_level(action, args.level)
    try:
        table = scan_points(action, level, args.max_denominator,
                            point_cap=args.max_scan_points,
                            verify_cap=args.max_subgroup_order)
    except ScanTooLarge as err:
        raise CliError(str(err), EXIT_CAP)
    except VerificationCapExceeded as err:
        raise CliError(str(err), EXIT_CAP)
    rows = [
        {
            "xi": {"num": list(r.xi.nums), "den": r.xi.den},
            "stabilizer_order": r.stabilizer_order,
            "class_order": r.class_order,
            "trivial": r.trivial,
        }
        for r in table.rows
    ]
    payload = {
        "isogeny": action.iso.name,
        "level": [list(r) for r in level.matrix],
        "max_denominator": args.max_denominator,
        "rows": rows,
        "trivial": table.trivial_count,
        "nontrivial": table.nontrivial_count,
    }
    if args.format == "json":
        emit(canonical_json(payload), args.out)
    elif args.format == "csv":
        lines = ["xi_num,xi_den,stabilizer_order,class_order,trivial"]
        for r in table.rows:
            lines.append(
                f"\"{list(r.xi.nums)}\",{r.xi.den},{r.stabilizer_order},"
                f"{r.class_order},{str(r.trivial).lower()}"
            )
        emit("\n".join(lines) + "\n", args.out)
    else:
        lines = [
            f"{list(r.xi.nums)}/{r.xi.den}: |W_L|={r.stabilizer_order} "
            f"order={r.class_order} trivial={r.trivial}"
            for r in table.rows
        ]
        lines.append(
            f"total {len(table.rows)} orbits: {table.trivial_count} trivial, "
            f"{table.nontrivial_count} nontrivial"
        )
        emit("\n".join(lines) + "\n", args.out)
    return EXIT_OK


def cmd_datum(args) -> int:
    try:
        if args.isogeny_target:
            iso = classical_isogeny(args.series, args.rank, args.form,
                                    args.isogeny_target)
            payload = iso.to_json_dict()
            payload["index"] = iso.index()
            payload["cokernel"] = iso.cokernel_invariants().label()
        else:
            rd = classical_datum(args.series, args.rank, args.form)
            report = validate_datum(rd)
            payload = rd.to_json_dict()
            payload["valid"] = report.passed
            payload["violations"] = list(report.violations)
    except DatumError as err:
        raise CliError(str(err), EXIT_BAD_INPUT)
    emit(canonical_json(payload) if args.format == "json"
         else json.dumps(payload, indent=2, sort_keys=True) + "\n", args.out)
    return EXIT_OK


def _load_fixture(path: str) -> dict:
    try:
        with open(path) as fh:
            return json.load(fh)
    except (OSError, ValueError) as err:
        raise CliError(f"cannot read fixture {path!r}: {err}", EXIT_BAD_INPUT)


def _nerve_from_fixture(data: dict, dim_cap: int) -> Nerve:
    try:
        if "cover" in data:
            return nerve_of_cover([set(c) for c in data["cover"]], dim_cap)
        if "nerve" in data:
            return Nerve.from_json_dict(data["nerve"])
    except CechError as err:
        raise CliError(str(err), EXIT_BAD_INPUT)
    raise CliError("fixture needs a 'cover' or 'nerve' field", EXIT_BAD_INPUT)


def cmd_cohomology(args) -> int:
    data = _load_fixture(args.fixture)
    nerve = _nerve_from_fixture(data, args.max_nerve_dim)
    try:
        group = parse_group_label(args.coefficients)
        inv = cohomology(nerve, args.degree, group)
        payload = {
            "degree": args.degree,
            "coefficients": args.coefficients,
            "invariants": {"free_rank": inv.free_rank,
                           "torsion": list(inv.torsion)},
            "label": inv.label(),
        }
        if args.trivialize_cocycle:
            cdata = _load_fixture(args.trivialize_cocycle)
            vals = {
                tuple(e["simplex"]): tuple(e["value"]) for e in cdata["values"]
            }
            c = Cochain(nerve, int(cdata["degree"]), group, vals)
            witness = trivialize(c)
            payload["witness"] = (
                None if witness is None else witness.to_json_dict()
            )
    except CechError as err:
        raise CliError(str(err), EXIT_BAD_INPUT)
    if args.format == "json":
        emit(canonical_json(payload), args.out)
    else:
        emit(f"H^{args.degree} = {payload['label']}\n", args.out)
    return EXIT_OK


def cmd_equivariant(args) -> int:
    data = _load_fixture(args.fixture)
    try:
        act = FiniteAction.from_json_dict(data)
        inv = equivariant_cohomology(act, args.degree, cap=args.max_complex_size)
    except CechError as err:
        raise CliError(str(err), EXIT_BAD_INPUT)
    except ComplexCapExceeded as err:
        raise CliError(str(err), EXIT_CAP)
    payload = {
        "degree": args.degree,
        "invariants": {"free_rank": inv.free_rank, "torsion": list(inv.torsion)},
        "label": inv.label(),
    }
    if args.format == "json":
        emit(canonical_json(payload), args.out)
    else:
        emit(f"H^{args.degree}_G = {payload['label']}\n", args.out)
    return EXIT_OK


def cmd_extension(args) -> int:
    data = _load_fixture(args.fixture)
    try:
        if "cyclic" in data["group"]:
            table = cyclic_group(int(data["group"]["cyclic"]))
        else:
            table = FiniteGroupTable.from_json_dict(data["group"])
        coeff = parse_group_label(data["coefficients"])
        psi = {
            (int(e["pair"][0]), int(e["pair"][1])): tuple(e["value"])
            for e in data.get("psi", [])
        }
        res = central_extension_from_cocycle(table, coeff, psi)
    except (CechError, KeyError, ValueError) as err:
        raise CliError(f"extension rejected: {err}", EXIT_BAD_INPUT)
    payload = {
        "order": res.table.n,
        "order_multiset": list(res.order_multiset),
        "center_size": res.center_size,
        "table": [list(r) for r in res.table.table],
        "elements": [
            {"coefficient": list(a), "base": g} for (a, g) in res.element_labels
        ],
    }
    if args.format == "json":
        emit(canonical_json(payload), args.out)
    else:
        emit(
            f"extension of order {res.table.n}; element orders "
            f"{list(res.order_multiset)}; center {res.center_size}\n",
            args.out,
        )
    return EXIT_OK


# ---------------------------------------------------------------------------
# argument parsing


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--format", choices=("json", "text", "csv"), default="text")
    p.add_argument("--out", default=None, help="also write the payload here")
    p.add_argument("--max-weyl-order", type=int, default=10**6)
    p.add_argument("--max-subgroup-order", type=int, default=384)
    p.add_argument("--seed", type=int, default=0,
                   help="reserved; no algorithmic effect")


def _add_entry_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("series", nargs="?", choices=("A", "B", "C", "D"),
                   default=None)
    p.add_argument("rank", nargs="?", type=int, default=None)
    p.add_argument("source_form", nargs="?", default=None)
    p.add_argument("target_form", nargs="?", default=None)
    p.add_argument("--datum-fixture", default=None,
                   help="JSON file with 'source' and 'target' root data, "
                        "used instead of the positional entry")


def make_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="gerbelevels",
        description=(
            "Exact classification of invariant level tensors on classical "
            "root data, centralizer extension obstructions, and finite "
            "cocycle cohomology."
        ),
    )
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("levels", help="classify levels for one entry")
    _add_entry_args(p)
    _add_common(p)
    p.set_defaults(fn=cmd_levels)

    p = sub.add_parser("atlas", help="classification table over a range")
    p.add_argument("--row", action="append", default=None,
                   metavar="SERIES,RANK,SOURCE,TARGET")
    p.add_argument("--series", default=None,
                   help="restrict the row set to these series (comma list)")
    p.add_argument("--scan-denominator", type=int, default=0,
                   help="also scan torsion points up to this denominator")
    p.add_argument("--jobs", type=int, default=1)
    _add_common(p)
    p.set_defaults(fn=cmd_atlas)

    p = sub.add_parser("obstruction", help="centralizer obstruction certificate")
    _add_entry_args(p)
    p.add_argument("--xi", required=True,
                   help="reference coordinates, e.g. '1/2,-1/2,0'")
    p.add_argument("--level", default="basic",
                   help="'basic', 'Nxbasic', or a JSON file with a matrix")
    _add_common(p)
    p.set_defaults(fn=cmd_obstruction)

    p = sub.add_parser("scan", help="scan torsion points for obstructions")
    _add_entry_args(p)
    p.add_argument("--level", default="basic")
    p.add_argument("--max-denominator", type=int, required=True)
    p.add_argument("--max-scan-points", type=int, default=20000)
    _add_common(p)
    p.set_defaults(fn=cmd_scan)

    p = sub.add_parser("datum", help="emit a root datum or isogeny as JSON")
    p.add_argument("series", choices=("A", "B", "C", "D"))
    p.add_argument("rank", type=int)
    p.add_argument("form")
    p.add_argument("--isogeny-target", default=None)
    _add_common(p)
    p.set_defaults(fn=cmd_datum)

    p = sub.add_parser("cohomology", help="cohomology of a nerve fixture")
    p.add_argument("--fixture", required=True)
    p.add_argument("--degree", type=int, required=True)
    p.add_argument("--coefficients", default="Z")
    p.add_argument("--trivialize-cocycle", default=None,
                   help="JSON cocycle to trivialize against the fixture")
    p.add_argument("--max-nerve-dim", type=int, default=4)
    _add_common(p)
    p.set_defaults(fn=cmd_cohomology)

    p = sub.add_parser("equivariant", help="equivariant cohomology of an action")
    p.add_argument("--fixture", required=True)
    p.add_argument("--degree", type=int, required=True)
    p.add_argument("--max-complex-size", type=int, default=60000)
    _add_common(p)
    p.set_defaults(fn=cmd_equivariant)

    p = sub.add_parser("extension", help="central extension from a 2-cocycle")
    p.add_argument("--fixture", required=True)
    _add_common(p)
    p.set_defaults(fn=cmd_extension)

    return ap


def main(argv=None) -> int:
    ap = make_parser()
    args = ap.parse_args(argv)
    print(f"gerbelevels {__version__}", file=sys.stderr)
    try:
        return args.fn(args)
    except CliError as err:
        print(f"error: {err}", file=sys.stderr)
        return err.code
    except (DatumError, CechError) as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_BAD_INPUT
    except (WeylCapExceeded, ScanTooLarge, ComplexCapExceeded,
            VerificationCapExceeded) as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_CAP


if __name__ == "__main__":
    sys.exit(main())
