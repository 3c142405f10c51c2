import json

import pytest

from gerbelevels.cli import main

FIX = "fixtures"


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out


def test_levels_match_exit_zero(capsys):
    code, out = run(capsys, "levels", "A", "2", "SL", "SL", "--format", "json")
    assert code == 0
    data = json.loads(out)
    assert data["verdict"] == "match"
    assert data["computed_basis"] == [[[2, 1], [1, 2]]]


def test_levels_mismatch_exit_three(capsys):
    code, out = run(capsys, "levels", "B", "2", "SO", "SO", "--format", "json")
    assert code == 3
    data = json.loads(out)
    assert data["verdict"] == "mismatch"
    assert data["computed_basis"] == [[[1, 0], [0, 1]]]
    assert data["claimed_basis"] == [[[2, 0], [0, 2]]]


def test_levels_gl_family(capsys):
    code, out = run(capsys, "levels", "A", "1", "GL", "GL", "--format", "json")
    assert code == 0
    data = json.loads(out)
    assert len(data["computed_basis"]) == 2


def test_levels_bad_input_exit_one(capsys):
    code, _ = run(capsys, "levels", "B", "2", "PSO", "PSO")
    assert code == 1


def test_levels_cap_exit_two(capsys):
    code, _ = run(capsys, "levels", "B", "3", "Spin", "Spin",
                  "--max-weyl-order", "4")
    assert code == 2


def test_obstruction_spin7(capsys):
    code, out = run(
        capsys, "obstruction", "B", "3", "Spin", "Spin",
        "--xi", "1/2,-1/2,0", "--format", "json",
    )
    assert code == 0
    data = json.loads(out)
    assert data["stabilizer_order"] == 8
    assert data["trivial"] is False
    assert data["class_order"] == 2
    assert data["rational_witness"] == {"num": [1, -1, 0], "den": 2}
    assert data["h1_invariants"]["torsion"] == [2]
    # certificate is re-checkable: verify the cocycle identity from the
    # embedded data alone
    acts = {int(k): v for k, v in data["stabilizer_actions"].items()}
    c = {int(k): v for k, v in data["c_cocycle"].items()}
    members = data["stabilizer_members"]
    assert sorted(acts) == sorted(members) == sorted(c)


def test_obstruction_integral_point_trivial(capsys):
    code, out = run(
        capsys, "obstruction", "A", "1", "SL", "SL",
        "--xi", "1,-1", "--format", "json",
    )
    assert code == 0
    data = json.loads(out)
    assert data["trivial"] is True
    assert data["class_order"] == 1


def test_obstruction_sl2_half(capsys):
    code, out = run(
        capsys, "obstruction", "A", "1", "SL", "SL",
        "--xi", "1/2,-1/2", "--format", "json",
    )
    assert code == 0
    data = json.loads(out)
    assert data["trivial"] is True
    assert data["witness_u"] == [1]


def test_obstruction_bad_xi(capsys):
    code, _ = run(capsys, "obstruction", "A", "1", "SL", "SL", "--xi", "1/0,2")
    assert code == 1
    code, _ = run(capsys, "obstruction", "A", "1", "SL", "SL", "--xi", "1/2")
    assert code == 1
    # outside the sum-zero span
    code, _ = run(capsys, "obstruction", "A", "1", "SL", "SL", "--xi", "1/2,1/2")
    assert code == 1


def test_scan_exit_codes(capsys):
    code, out = run(capsys, "scan", "A", "2", "SL", "SL",
                    "--max-denominator", "3", "--format", "json")
    assert code == 0
    data = json.loads(out)
    assert data["nontrivial"] == 0
    code, _ = run(capsys, "scan", "B", "2", "Spin", "Spin",
                  "--max-denominator", "50", "--max-scan-points", "10")
    assert code == 2


def test_datum_command(capsys):
    code, out = run(capsys, "datum", "B", "3", "Spin", "--format", "json")
    assert code == 0
    data = json.loads(out)
    assert data["valid"] is True
    code, out = run(capsys, "datum", "B", "3", "Spin",
                    "--isogeny-target", "SO", "--format", "json")
    assert code == 0
    assert json.loads(out)["index"] == 2
    code, _ = run(capsys, "datum", "B", "2", "PSO")
    assert code == 1


def test_cohomology_fixture(capsys):
    code, out = run(
        capsys, "cohomology", "--fixture", f"{FIX}/octahedron.json",
        "--degree", "2", "--coefficients", "Z", "--format", "json",
    )
    assert code == 0
    assert json.loads(out)["label"] == "Z"
    code, out = run(
        capsys, "cohomology", "--fixture", f"{FIX}/triangle_cover.json",
        "--degree", "1", "--coefficients", "Z", "--format", "json",
    )
    assert code == 0
    assert json.loads(out)["label"] == "Z"


def test_cohomology_witness_request(capsys):
    code, out = run(
        capsys, "cohomology", "--fixture", f"{FIX}/circle3.json",
        "--degree", "1", "--coefficients", "Z",
        "--trivialize-cocycle", f"{FIX}/circle3_cocycle.json",
        "--format", "json",
    )
    assert code == 0
    assert json.loads(out)["witness"] is None  # the class generates H^1


def test_equivariant_fixtures(capsys):
    code, out = run(
        capsys, "equivariant", "--fixture", f"{FIX}/z2_point.json",
        "--degree", "2", "--format", "json",
    )
    assert code == 0
    assert json.loads(out)["label"] == "Z/2"
    code, out = run(
        capsys, "equivariant", "--fixture", f"{FIX}/z2_point_mod2.json",
        "--degree", "2", "--format", "json",
    )
    assert code == 0
    assert json.loads(out)["label"] == "Z/2"
    code, out = run(
        capsys, "equivariant", "--fixture",
        f"{FIX}/trivial_group_octahedron.json", "--degree", "2",
        "--format", "json",
    )
    assert code == 0
    assert json.loads(out)["label"] == "Z"


def test_extension_fixtures(capsys):
    code, out = run(capsys, "extension", "--fixture",
                    f"{FIX}/z2_extension_cyclic4.json", "--format", "json")
    assert code == 0
    data = json.loads(out)
    assert data["order_multiset"] == [1, 2, 4, 4]
    code, out = run(capsys, "extension", "--fixture",
                    f"{FIX}/z2_extension_product.json", "--format", "json")
    assert code == 0
    assert json.loads(out)["order_multiset"] == [1, 2, 2, 2]
    code, _ = run(capsys, "extension", "--fixture",
                  f"{FIX}/z3_bad_cochain.json")
    assert code == 1


def test_schema_violation_exit_one(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text("{\"not\": \"a fixture\"}")
    code, _ = run(capsys, "cohomology", "--fixture", str(bad), "--degree", "1")
    assert code == 1


@pytest.mark.parametrize(
    "argv",
    [
        ("levels", "A", "2", "SL", "SL", "--format", "json"),
        ("levels", "D", "4", "SO", "PSO", "--format", "csv"),
        ("obstruction", "B", "3", "Spin", "Spin", "--xi", "1/2,-1/2,0",
         "--format", "json"),
        ("scan", "A", "2", "SL", "SL", "--max-denominator", "3",
         "--format", "csv"),
        ("atlas", "--row", "A,1,SL,SL", "--row", "B,2,Spin,Spin",
         "--format", "json"),
        ("cohomology", "--fixture", f"{FIX}/circle3.json", "--degree", "1",
         "--format", "json"),
    ],
)
def test_byte_identical_output(capsys, argv):
    code1, out1 = run(capsys, *argv)
    code2, out2 = run(capsys, *argv)
    assert code1 == code2
    assert out1 == out2


def test_atlas_thread_count_independence(capsys):
    argv = ["atlas", "--format", "json"]
    code1, out1 = run(capsys, *argv, "--jobs", "1")
    code2, out2 = run(capsys, *argv, "--jobs", "4")
    assert code1 == code2 == 0
    assert out1 == out2


def test_atlas_row_errors_isolated(capsys):
    code, out = run(
        capsys, "atlas", "--row", "B,2,PSO,PSO", "--row", "A,1,SL,SL",
        "--format", "json",
    )
    assert code == 0
    data = json.loads(out)
    assert len(data) == 2
    assert any("error" in row for row in data)
    assert any(row.get("verdict") == "match" for row in data)


def test_atlas_type_c_no_claim(capsys):
    code, out = run(capsys, "atlas", "--row", "C,2,Sp,Sp", "--format", "json")
    assert code == 0
    assert json.loads(out)[0]["verdict"] == "no-claim"


def test_atlas_empty_row_list_is_default(capsys):
    code, out = run(capsys, "atlas", "--format", "json")
    assert code == 0
    data = json.loads(out)
    assert len(data) == len(set((r["series"], r["rank"], r["source_form"],
                                 r["target_form"]) for r in data))
    assert len(data) == 33


def test_out_file(tmp_path, capsys):
    path = tmp_path / "entry.json"
    code, out = run(capsys, "levels", "A", "1", "SL", "SL",
                    "--format", "json", "--out", str(path))
    assert code == 0
    assert path.read_text() == out


def test_levels_custom_datum_fixture(capsys):
    code, out = run(
        capsys, "levels", "--datum-fixture", "fixtures/g2_datum.json",
        "--format", "json",
    )
    assert code == 0
    data = json.loads(out)
    assert data["verdict"] == "no-claim"
    assert data["series"] == "custom"
    assert data["computed_basis"] == [[[6, 3], [3, 2]]]


def test_obstruction_custom_datum_fixture(capsys):
    code, out = run(
        capsys, "obstruction", "--datum-fixture", "fixtures/g2_datum.json",
        "--xi", "0,-1/2,1/2", "--format", "json",
    )
    assert code == 0
    data = json.loads(out)
    assert data["stabilizer_order"] == 4
    assert data["trivial"] is False
    assert data["class_order"] == 2
    assert data["h1_invariants"]["torsion"] == [2]


def test_entry_commands_require_entry_or_fixture(capsys):
    code, _ = run(capsys, "levels")
    assert code == 1


def test_atlas_empty_range(capsys):
    # the default row set has no type-C rows, so this selects nothing
    code, out = run(capsys, "atlas", "--series", "C", "--format", "json")
    assert code == 0
    assert json.loads(out) == []


def test_certificate_is_externally_recheckable(capsys):
    # replay the certificate using nothing but the JSON payload and
    # plain integer arithmetic: the embedded action matrices determine
    # the multiplication, the cocycle identity, and the witness claims
    code, out = run(
        capsys, "obstruction", "B", "3", "Spin", "Spin",
        "--xi", "1/2,-1/2,0", "--format", "json",
    )
    assert code == 0
    data = json.loads(out)
    acts = {int(k): v for k, v in data["stabilizer_actions"].items()}
    c = {int(k): tuple(v) for k, v in data["c_cocycle"].items()}
    d = {int(k): tuple(v) for k, v in data["d_cocycle"].items()}
    level = data["level"]

    def mat_mul(a, b):
        return tuple(
            tuple(sum(a[i][k] * b[k][j] for k in range(len(b)))
                  for j in range(len(b[0])))
            for i in range(len(a))
        )

    def mat_vec(a, v):
        return tuple(sum(r[k] * v[k] for k in range(len(v))) for r in a)

    by_matrix = {tuple(tuple(r) for r in m): i for i, m in acts.items()}
    # c really is bmap(d)
    for i in acts:
        assert mat_vec(level, d[i]) == c[i]
    # cocycle identity, with the product element recovered from matrices
    for i, mi in acts.items():
        for j in acts:
            prod = mat_mul(tuple(tuple(r) for r in mi),
                           tuple(tuple(r) for r in acts[j]))
            k = by_matrix[prod]
            assert c[k] == tuple(
                x + y for x, y in zip(mat_vec(mi, c[j]), c[i])
            )
    # nontriviality claim: 2*c is the coboundary of an integral vector
    # while the unique rational witness has denominator 2
    num, den = data["rational_witness"]["num"], data["rational_witness"]["den"]
    assert den == 2
    for i, mi in acts.items():
        lhs = tuple(
            sum(mi[r][k] * num[k] for k in range(len(num))) - num[r]
            for r in range(len(num))
        )
        assert lhs == tuple(den * x for x in c[i])


def test_scan_representatives_are_orbit_minimal(capsys):
    code, out = run(capsys, "scan", "B", "2", "Spin", "Spin",
                    "--max-denominator", "2", "--format", "json")
    assert code == 0
    data = json.loads(out)
    from fractions import Fraction

    from gerbelevels.intlinalg import RatVector
    from gerbelevels.levels import SharedWeylAction
    from gerbelevels.rootdata import classical_isogeny
    from gerbelevels.weyl import act_cochar

    action = SharedWeylAction(classical_isogeny("B", 2, "Spin", "Spin"))
    for row in data["rows"]:
        xi = RatVector.make(row["xi"]["num"], row["xi"]["den"])
        orbit = [
            act_cochar(e, xi).mod1().fractions()
            for e in action.group.elements
        ]
        assert xi.fractions() == min(orbit)


def test_cohomology_returns_witness_for_coboundary(tmp_path, capsys):
    # delta of the 0-cochain u = (1, 0, 0) on the 3-arc circle
    cocycle = {
        "degree": 1,
        "values": [
            {"simplex": [0, 1], "value": [-1]},
            {"simplex": [0, 2], "value": [-1]},
        ],
    }
    path = tmp_path / "coboundary.json"
    path.write_text(json.dumps(cocycle))
    code, out = run(
        capsys, "cohomology", "--fixture", f"{FIX}/circle3.json",
        "--degree", "1", "--coefficients", "Z",
        "--trivialize-cocycle", str(path), "--format", "json",
    )
    assert code == 0
    witness = json.loads(out)["witness"]
    assert witness is not None
    # the witness cochain really has the right coboundary
    vals = {tuple(e["simplex"]): e["value"][0] for e in witness["values"]}
    u = [vals.get((i,), 0) for i in range(3)]
    assert (u[1] - u[0], u[2] - u[0], u[2] - u[1]) == (-1, -1, 0)


def test_atlas_with_scan_summaries(capsys):
    code, out = run(
        capsys, "atlas", "--row", "A,1,SL,SL", "--row", "B,3,Spin,Spin",
        "--scan-denominator", "2", "--format", "json",
    )
    assert code == 0
    data = json.loads(out)
    assert all("scan" in row for row in data)
    spin7 = next(r for r in data if r["series"] == "B")
    assert spin7["scan"]["nontrivial"] >= 1
    sl2 = next(r for r in data if r["series"] == "A")
    assert sl2["scan"]["nontrivial"] == 0
    # deterministic with summaries too
    code2, out2 = run(
        capsys, "atlas", "--row", "A,1,SL,SL", "--row", "B,3,Spin,Spin",
        "--scan-denominator", "2", "--format", "json",
    )
    assert out == out2 and code == code2
