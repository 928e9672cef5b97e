"""Command line interface: document parsing, serialization round
trips, command outputs, flags, and exit codes."""

import io
import json
import sys

import pytest

from corpus import (
    Z2,
    affine,
    axes_monoid,
    example1_scheme,
    example2_scheme,
    glued_lines,
    hirzebruch_fan,
    projective,
    quadric_monoid,
    two_p1_wedge,
)
from monoscheme.cli import DocumentError, main, parse_document, serialize
from monoscheme.scheme import from_fan, scheme_isomorphic


def monoid_doc(rank, gens, **extra):
    return {"format": 1, "kind": "monoid", "ambient": {"rank": rank},
            "generators": gens, **extra}


QUADRIC = monoid_doc(2, [[1, 0], [1, 2], [1, 1]])
AXES = monoid_doc(2, [[1, 0], [0, 1]], ideal=[[1, 1]])
P1_FAN = {"format": 1, "kind": "fan", "dim": 1,
          "rays": [[1], [-1]], "cones": [[], [0], [1]]}
P2_FAN = {"format": 1, "kind": "fan", "dim": 2,
          "rays": [[1, 0], [0, 1], [-1, -1]],
          "cones": [[], [0], [1], [2], [0, 1], [0, 2], [1, 2]]}
LINE_STEP = {"define": "L", "op": "mspec",
             "monoid": {"ambient": {"rank": 1}, "generators": [[1]]}}


def script_doc(steps, **extra):
    return {"format": 1, "kind": "scheme-build-script", "steps": steps,
            **extra}


def run(argv, doc, monkeypatch, capsys):
    text = doc if isinstance(doc, str) else json.dumps(doc)
    monkeypatch.setattr(sys, "stdin", io.StringIO(text))
    code = main(argv)
    cap = capsys.readouterr()
    return code, cap.out, cap.err


# -- parsing and round trips -------------------------------------------------

def test_parse_monoid_documents():
    m = parse_document(QUADRIC)
    assert m.same_submonoid(quadric_monoid().cancellative)
    pc = parse_document(AXES)
    assert pc.same_pc_monoid(axes_monoid())
    # an empty ideal still selects the quotient type
    assert parse_document(monoid_doc(1, [[1]], ideal=[])).is_cancellative


def test_parse_fan_document():
    f = parse_document(P1_FAN)
    assert scheme_isomorphic(from_fan(f), projective(1))


def test_parse_rejects_malformed_documents():
    with pytest.raises(DocumentError):
        parse_document({"kind": "monoid"})
    with pytest.raises(DocumentError):
        parse_document({"format": 1, "kind": "widget"})
    with pytest.raises(DocumentError):
        parse_document(monoid_doc(2, [[1, 0]], extra_field=True))
    with pytest.raises(DocumentError):
        parse_document(monoid_doc(2, [[1, 0, 0]]))
    with pytest.raises(DocumentError):
        parse_document(monoid_doc(2, ["x"]))
    bad_fan = dict(P2_FAN, cones=[[0, 1]])
    with pytest.raises(DocumentError):
        parse_document(bad_fan)


def test_named_generator_sugar():
    doc = monoid_doc(2, [[1, 0], [0, 1]], ideal=["x^2", "x*y"])
    pc = parse_document(doc)
    assert sorted(g.free for g in pc.ideal_gens) == [(1, 1), (2, 0)]
    doc = monoid_doc(2, [[1, 0], [0, 1]], ideal=["x²"])
    assert parse_document(doc).ideal_gens[0].free == (2, 0)
    doc = monoid_doc(2, [[1, 0], [0, 1]], names=["a", "b"], ideal=["a*b^3"])
    assert parse_document(doc).ideal_gens[0].free == (1, 3)
    four = [[1, 0], [0, 1], [1, 1], [1, 2]]
    doc = monoid_doc(2, four, ideal=["x4"])
    assert parse_document(doc).ideal_gens[0].free == (1, 2)
    with pytest.raises(DocumentError):
        parse_document(monoid_doc(2, [[1, 0], [0, 1]], ideal=["w"]))


def test_serialize_round_trips():
    objects = [
        quadric_monoid().cancellative,
        axes_monoid(),
        affine(Z2, [(1, 0), (0, 1), (0, -1)], ideal=[(1, 0)]),
        hirzebruch_fan(),
        projective(2),
        glued_lines(3),
        example1_scheme(),
        example2_scheme(2),
        two_p1_wedge(),
    ]
    for obj in objects:
        doc = serialize(obj)
        back = parse_document(doc)
        assert serialize(back) == doc
        assert json.loads(json.dumps(doc)) == doc


def test_round_trip_preserves_scheme_structure():
    X = example1_scheme()
    back = parse_document(serialize(X))
    assert scheme_isomorphic(X, back)
    f = hirzebruch_fan()
    assert parse_document(serialize(f)) == f


# -- commands ----------------------------------------------------------------

def test_class_group_command(monkeypatch, capsys):
    code, out, err = run(["class-group"], QUADRIC, monkeypatch, capsys)
    assert code == 0
    assert json.loads(out) == {"rank": 0, "invariant_factors": [2]}


def test_picard_command_on_fan(monkeypatch, capsys):
    code, out, err = run(["picard"], P2_FAN, monkeypatch, capsys)
    assert code == 0
    assert json.loads(out) == {"rank": 1, "invariant_factors": []}


def test_output_is_byte_identical(monkeypatch, capsys):
    first = run(["mspec"], QUADRIC, monkeypatch, capsys)
    second = run(["mspec"], QUADRIC, monkeypatch, capsys)
    assert first == second


def test_mspec_command(monkeypatch, capsys):
    code, out, err = run(["mspec"], QUADRIC, monkeypatch, capsys)
    assert code == 0
    got = json.loads(out)
    assert got["count"] == 4
    assert [p["height"] for p in got["points"]] == [0, 1, 1, 2]


def test_primary_decomp_command(monkeypatch, capsys):
    doc = monoid_doc(2, [[1, 0], [0, 1]], ideal=["x^2", "x*y"])
    code, out, err = run(["primary-decomp", "--verify"], doc,
                         monkeypatch, capsys)
    assert code == 0
    got = json.loads(out)
    assert got["count"] == 2
    assert got["components"][0]["generators"] == [[1, 0]]
    assert got["components"][1]["generators"] == [[0, 1], [2, 0]]
    assert err.count("CONFIRMED") == 3
    code, out2, err = run(["primary-decomp", "--verify", "--quiet"], doc,
                          monkeypatch, capsys)
    assert code == 0 and out2 == out and err == ""


def test_ass_command(monkeypatch, capsys):
    doc = monoid_doc(2, [[1, 0], [0, 1]], ideal=["x^2", "x*y"])
    code, out, err = run(["ass"], doc, monkeypatch, capsys)
    assert code == 0
    got = json.loads(out)["associated_primes"]
    assert [p["height"] for p in got] == [1, 2]


def test_radical_command(monkeypatch, capsys):
    doc = monoid_doc(2, [[1, 0], [1, 2], [1, 1]], ideal=["x"])
    code, out, err = run(["radical", "--verify"], doc, monkeypatch, capsys)
    assert code == 0
    got = json.loads(out)
    assert got["generators"] == [[1, 0], [1, 1]]
    assert got["is_prime"]
    assert err.count("CONFIRMED") == 2


def test_ideal_op_command(monkeypatch, capsys):
    base = monoid_doc(2, [[1, 0], [0, 1]])
    doc = dict(base, left=["x^2", "x*y"], right=["x"])
    code, out, err = run(["ideal-op", "--op", "colon"], doc,
                         monkeypatch, capsys)
    assert code == 0
    assert json.loads(out)["generators"] == [[0, 1], [1, 0]]
    doc = dict(base, left=["x"], right=["y"])
    for op, expect in [("sum", [[0, 1], [1, 0]]),
                       ("product", [[1, 1]]),
                       ("intersection", [[1, 1]])]:
        code, out, err = run(["ideal-op", "--op", op], doc,
                             monkeypatch, capsys)
        assert code == 0
        assert json.loads(out)["generators"] == expect


def test_normalize_command(monkeypatch, capsys):
    doc = monoid_doc(1, [[2], [3]])
    code, out, err = run(["normalize", "--verify"], doc, monkeypatch, capsys)
    assert code == 0
    got = json.loads(out)
    assert got["monoid"]["generators"] == [[1]]
    assert got["already_normal"] is False
    assert "CONFIRMED" in err
    code, out, err = run(["normalize"], AXES, monkeypatch, capsys)
    assert code == 2


def test_seminormalize_command(monkeypatch, capsys):
    doc = monoid_doc(1, [[2], [3]])
    code, out, err = run(["seminormalize", "--verify"], doc,
                         monkeypatch, capsys)
    assert code == 0
    got = json.loads(out)
    assert got["monoid"]["generators"] == [[1]]
    assert got["already_seminormal"] is False
    assert "REFUTED" not in err


def test_normalization_scheme_command(monkeypatch, capsys):
    code, out, err = run(["normalization-scheme"], AXES, monkeypatch, capsys)
    assert code == 0
    got = json.loads(out)
    assert got["count"] == 2
    gens = [b["monoid"]["generators"] for b in got["branches"]]
    assert gens == [[[1, 0]], [[0, 1]]]


def test_divisor_command(monkeypatch, capsys):
    doc = dict(QUADRIC, element="y")
    code, out, err = run(["divisor"], doc, monkeypatch, capsys)
    assert code == 0
    got = json.loads(out)
    assert got["element"] == [1, 2]
    assert [c["value"] for c in got["coefficients"]] == [2, 0]
    code, out, err = run(["divisor", "--element", "[1,1]"], QUADRIC,
                         monkeypatch, capsys)
    assert [c["value"] for c in json.loads(out)["coefficients"]] == [1, 1]
    code, out, err = run(["divisor"], QUADRIC, monkeypatch, capsys)
    assert code == 2


def test_cartier_command(monkeypatch, capsys):
    code, out, err = run(["cartier"], P1_FAN, monkeypatch, capsys)
    assert code == 0
    got = json.loads(out)
    assert got["cartier_divisors"] == {"rank": 2, "invariant_factors": []}
    assert got["modulo_principal"] == {"rank": 1, "invariant_factors": []}
    assert got["matches_picard"] and got["locally_factorial"]


def test_nor_compare_command(monkeypatch, capsys):
    code, out, err = run(["nor-compare"], QUADRIC, monkeypatch, capsys)
    assert code == 0
    got = json.loads(out)
    assert got["exact"]
    assert got["pullback_on_picard"]["injective"]
    assert got["pullback_on_picard"]["surjective"]


def test_mayer_vietoris_command(monkeypatch, capsys):
    code, out, err = run(["mayer-vietoris"], AXES, monkeypatch, capsys)
    assert code == 0
    got = json.loads(out)
    assert got["exact"] and got["piece_terms_match"]
    assert all(t["group"] == {"rank": 0, "invariant_factors": []}
               for t in got["sequence"])
    code, out, err = run(["mayer-vietoris"], P1_FAN, monkeypatch, capsys)
    assert code == 2


def test_build_script_commands(monkeypatch, capsys):
    glued = script_doc([LINE_STEP,
                        {"define": "X", "op": "glue-along-generic",
                         "of": ["L", "L", "L"]}], result="X")
    code, out, err = run(["class-group"], glued, monkeypatch, capsys)
    assert code == 0
    assert json.loads(out) == {"rank": 2, "invariant_factors": []}

    prod = script_doc([{"define": "P", "op": "projective-space", "n": 1},
                       {"define": "Q", "op": "product", "of": ["P", "P"]}])
    code, out, err = run(["picard"], prod, monkeypatch, capsys)
    assert json.loads(out) == {"rank": 2, "invariant_factors": []}

    wedge = script_doc([{"define": "P", "op": "fan", "fan":
                         {"dim": 1, "rays": [[1], [-1]],
                          "cones": [[], [0], [1]]}},
                        {"define": "W", "op": "wedge", "of": ["P", "P"],
                         "at": [[0], [1]]}])
    code, out, err = run(["picard"], wedge, monkeypatch, capsys)
    assert json.loads(out) == {"rank": 2, "invariant_factors": []}


def test_verify_command_verdicts(monkeypatch, capsys):
    doc = dict(QUADRIC,
               claim={"check": "radical-membership", "ideal": ["x"],
                      "element": "z"})
    code, out, err = run(["verify"], doc, monkeypatch, capsys)
    assert code == 0
    got = json.loads(out)
    assert got["status"] == "CONFIRMED" and got["witness"] == 2

    wrong = monoid_doc(2, [[1, 0], [0, 1]],
                       claim={"check": "ideal-equality", "left": ["x*y"],
                              "right": ["x"]})
    code, out, err = run(["verify"], wrong, monkeypatch, capsys)
    assert code == 0
    got = json.loads(out)
    assert got["status"] == "REFUTED" and got["witness"] == [1, 0]

    stuck = monoid_doc(1, [[5], [7]],
                       claim={"check": "seminormal-membership",
                              "element": [1]})
    code, out, err = run(["verify", "--degree-bound", "6"], stuck,
                         monkeypatch, capsys)
    assert code == 3
    assert json.loads(out)["status"] == "INCONCLUSIVE"


def test_exit_codes_for_bad_inputs(monkeypatch, capsys):
    code, out, err = run(["class-group"], "{broken", monkeypatch, capsys)
    assert code == 2 and "error:" in err
    code, out, err = run(["mspec"], P1_FAN, monkeypatch, capsys)
    assert code == 2
    non_normal = monoid_doc(1, [[2], [3]])
    code, out, err = run(["class-group"], non_normal, monkeypatch, capsys)
    assert code == 2 and "normal" in err
    code, out, err = run(["class-group", "--verify"], QUADRIC,
                         monkeypatch, capsys)
    assert code == 2
    code, out, err = run(["primary-decomp"], QUADRIC, monkeypatch, capsys)
    assert code == 2 and "ideal" in err


def test_text_format(monkeypatch, capsys):
    code, out, err = run(["class-group", "--format", "text"], QUADRIC,
                         monkeypatch, capsys)
    assert code == 0 and out.strip() == "Z/2"
    code, out, err = run(["cartier", "--format", "text"], P1_FAN,
                         monkeypatch, capsys)
    assert "picard: Z" in out and "locally_factorial: true" in out


def test_document_from_file(tmp_path, monkeypatch, capsys):
    path = tmp_path / "quadric.json"
    path.write_text(json.dumps(QUADRIC))
    monkeypatch.setattr(sys, "stdin", io.StringIO(""))
    code = main(["class-group", str(path)])
    out = capsys.readouterr().out
    assert code == 0
    assert json.loads(out) == {"rank": 0, "invariant_factors": [2]}
    code = main(["class-group", str(tmp_path / "missing.json")])
    assert code == 2
