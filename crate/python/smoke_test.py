#!/usr/bin/env python3
"""Smoke test for the slogic_py extension module.

Builds nothing itself: it expects `cargo build -p slogic-py` to have
produced the cdylib, copies it next to this script under the importable
name, and exercises the main entry points on the Ramsey-type theory.

Run from the repository root:

    cargo build -p slogic-py
    python3 python/smoke_test.py
"""

import json
import pathlib
import shutil
import sys

HERE = pathlib.Path(__file__).resolve().parent
ROOT = HERE.parent

RAMSEY = """\
SRT22 & COH => RT22
RT22 => SRT22
RT22 => COH
SRT22 =/> RT22
COH =/> RT22
"""


def locate_extension():
    candidates = [
        ROOT / "target" / "debug" / "libslogic_py.so",
        ROOT / "target" / "release" / "libslogic_py.so",
        ROOT / "target" / "debug" / "libslogic_py.dylib",
        ROOT / "target" / "release" / "libslogic_py.dylib",
    ]
    for built in candidates:
        if built.exists():
            target = HERE / "slogic_py.so"
            if not target.exists() or built.stat().st_mtime > target.stat().st_mtime:
                shutil.copy2(built, target)
            return
    sys.exit("slogic_py cdylib not found; run `cargo build -p slogic-py` first")


def main():
    locate_extension()
    sys.path.insert(0, str(HERE))
    import slogic_py

    # formulas
    phi = slogic_py.SFormula("COH =/> SRT22")
    assert str(phi) == "COH =/> SRT22"
    assert phi.kind == "=/>"
    assert phi.strict_negation().kind == "=>"
    assert phi.strict_negation().strict_negation() == phi
    assert phi.vars() == ["COH", "SRT22"]

    # database ingestion and consistency
    db = slogic_py.Database(RAMSEY)
    assert db.fragment_class == "F2"
    assert len(db.facts()) == 5
    consistent, model = db.check()
    assert consistent
    assert len(model.worlds()) == 2
    for fact in db.facts():
        assert model.satisfies(slogic_py.SFormula(fact)), fact

    # trichotomy queries
    status, trace = db.query(phi)
    assert status == "PROVED"
    assert "by (N)" in trace
    status, _ = db.query(slogic_py.SFormula("COH => RT22"))
    assert status == "REFUTED"

    # engines agree
    for engine in ("auto", "tableau", "f2", "oracle"):
        status, _ = db.query(phi, engine=engine)
        assert status == "PROVED", engine

    # independence ships two verifiable countermodels
    fork = slogic_py.Database("A => B\nA => C\n")
    q = slogic_py.SFormula("B => C")
    status, (against, against_neg) = fork.query(q)
    assert status == "INDEPENDENT"
    assert not against.satisfies(q)
    assert not against_neg.satisfies(q.strict_negation())

    # matrix and saturation
    matrix = json.loads(db.matrix())
    assert matrix["vars"] == ["COH", "RT22", "SRT22"]
    i, j = matrix["vars"].index("RT22"), matrix["vars"].index("SRT22")
    assert matrix["cells"][i][j] == "proved"
    assert matrix["cells"][j][i] == "refuted"
    assert '"RT22" -> "SRT22";' in db.to_dot()
    strongest = db.saturate(max_ante=1)
    assert "COH =/> SRT22" in strongest
    assert "COH => SRT22" not in strongest

    # standalone decision functions
    chain = ["X => A", "A => B", "B => Y"]
    proved, evidence = slogic_py.decide(chain, slogic_py.SFormula("X => Y"))
    assert proved and isinstance(evidence, str)
    assert slogic_py.oracle_consequence(chain, slogic_py.SFormula("X => Y"))
    proved, frame = slogic_py.decide(["A => B"], slogic_py.SFormula("B => A"))
    assert not proved
    assert not frame.satisfies(slogic_py.SFormula("B => A"))

    # inconsistent input is reported, not exploited
    bad = slogic_py.Database("X => Y\nX =/> Y\n")
    consistent, report = bad.check()
    assert not consistent and "conflict" in report

    print("smoke test passed")


if __name__ == "__main__":
    main()
