import math

import pytest

import fpfilter


def test_builtins():
    assert fpfilter.builtin_names() == ["orient2d", "incircle2d", "orient3d", "power_side_3d"]
    assert fpfilter.builtin("orient2d").arity == 6
    assert fpfilter.parse("(_1 - _5)*(_4 - _6) - (_3 - _5)*(_2 - _6)") == fpfilter.builtin("orient2d")


def test_derivation():
    assert fpfilter.phi() == 94906264
    assert fpfilter.phi(24) == 4094
    c = fpfilter.filter_constants(fpfilter.builtin("orient2d"))
    assert c["coefficients"] == [3, -94906250]
    assert c["a4"] == float.fromhex("0x1.7fffffe95f621p-52")
    b = fpfilter.derive(fpfilter.parse("_1 * _2"), ufp=True)
    assert b["m"] == "|_1*_2| + u_N"


def test_underflow_triple():
    row = [2.0**-801, 2.0**-801, 2.0**-800, 2.0**-800, 2.0**-801, 2.0**-800]
    o = fpfilter.builtin("orient2d")
    assert fpfilter.eval_naive(o, row) == 0.0
    assert fpfilter.oracle_sign(o, row) == 1
    p = fpfilter.StagedPredicate("orient2d", "safe")
    assert p.decide(row) == (1, 4)
    assert p.stages[0] == "semi-static-ufp"


def test_orient2d_helper():
    assert fpfilter.orient2d((0, 0), (1, 0), (0, 1)) == 1
    assert fpfilter.orient2d((0, 0), (0, 1), (1, 0)) == -1
    assert fpfilter.orient2d((0, 0), (1, 1), (2, 2)) == 0


def test_errors():
    with pytest.raises(fpfilter.Error):
        fpfilter.parse("_1 + _3")
    with pytest.raises(fpfilter.Error):
        fpfilter.builtin("orient4d")
    with pytest.raises(ValueError):
        fpfilter.StagedPredicate("orient2d")([0, 0, 1, 0, 0, math.nan])


def test_torture():
    rows = fpfilter.torture()
    assert all(r["staged"] == r["exact"] for r in rows)
    assert math.isnan(rows[1]["naive"])
