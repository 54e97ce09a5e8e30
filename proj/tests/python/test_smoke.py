import cmath

import pytest

import qteich


def test_eb_origin_inversion():
    value, strategy, _ = qteich.eb(0, 1.0)
    assert strategy
    assert abs(value * value / qteich.inversion_factor(0, 1.0) - 1) < 1e-8


def test_eb_unitarity_on_real_line():
    value, _, _ = qteich.eb(0.3, 1.0)
    assert abs(abs(value) - 1) < 1e-10


def test_invalid_b_rejected():
    with pytest.raises(ValueError):
        qteich.ModularParameter(2j)


def test_modular_parameter_constants():
    p = qteich.ModularParameter(1.0)
    assert abs(p.c_b - 1j) < 1e-15
    assert p.unitary_regime


def test_qdilog_suite_passes():
    records = qteich.run_suite("qdilog", b=cmath.exp(1j * cmath.pi / 6))
    assert records
    assert all(r["pass"] for r in records)


def test_unknown_tolerance_rejected():
    with pytest.raises(ValueError):
        qteich.run_suite("groupoid", tolerances={"groupoid.nothing": 1.0})


def test_check_ids_sorted():
    ids = qteich.check_ids("groupoid")
    assert ids == sorted(ids)
    assert "groupoid.flip" in ids


def test_compile_rotation():
    assert qteich.compile_word("r1", 1) == "A1"
