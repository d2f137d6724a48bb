"""Unit tests for verifier tables and the classical automaton runners."""

import pytest

from qipsim.automata import (
    BLANK,
    CORE,
    GUARD,
    LEFT_END,
    RIGHT_END,
    OneRfaSpec,
    TwoNpfaSpec,
    VerifierSpec,
    build_step_operator,
    complete_verifier,
    first_option_chooser,
    padded_input,
    public_symbol,
    run_1rfa,
    run_2npfa,
    validate_1rfa_reversible,
    validate_2npfa_normalized,
    validate_public,
    validate_wellformed,
)
from qipsim.errors import EngineError, ValidationError
from qipsim.linalg import check_unitary


def test_padded_input_wraps_with_endmarkers():
    assert padded_input("01") == (LEFT_END, "0", "1", RIGHT_END)
    assert padded_input("") == (LEFT_END, RIGHT_END)


def test_padded_input_rejects_foreign_symbols():
    with pytest.raises(EngineError):
        padded_input("02", input_alphabet=("0", "1"))


def tiny_accept_all():
    """One live state that rides to the right endmarker and accepts."""
    rows = {
        sym: {("q0", BLANK): ((1.0, "q0", BLANK),)}
        for sym in (LEFT_END, "0", "1")
    }
    rows[RIGHT_END] = {("q0", BLANK): ((1.0, "acc", BLANK),)}
    return complete_verifier(
        name="tiny", input_alphabet=("0", "1"), comm_alphabet=(BLANK,),
        non_halting=("q0",), accepting=("acc",), rejecting=("rej",),
        initial="q0", two_way=False, core_rows=rows, head_dir={},
    )


def test_complete_verifier_produces_wellformed_table():
    v = tiny_accept_all()
    report = validate_wellformed(v, inputs=["", "0", "01"])
    assert report.ok
    assert report.worst <= 1e-12


def test_complete_verifier_row_classes():
    v = tiny_accept_all()
    assert v.class_of("0", "q0", BLANK) == CORE
    core = list(v.core_rows())
    assert len(core) == 4
    for sym, table in v.rows.items():
        for (q, g), targets in table.items():
            if v.class_of(sym, q, g) == GUARD:
                assert len(targets) == 1
                assert v.is_rejecting(targets[0][1])


def test_step_operator_is_unitary_dense():
    v = tiny_accept_all()
    mat, labels = build_step_operator(v, "01", dense=True)
    assert len(labels) == mat.shape[0]
    ok, defect = check_unitary(mat)
    assert ok
    assert defect <= 1e-12


def test_verifier_spec_structure_errors():
    base = dict(
        name="bad", input_alphabet=("0",), comm_alphabet=(BLANK,),
        non_halting=("q0",), accepting=("acc",), rejecting=("rej",),
        initial="q0", two_way=False, rows={}, head_dir={},
    )
    with pytest.raises(ValidationError):
        VerifierSpec(**{**base, "accepting": ("q0",)})
    with pytest.raises(ValidationError):
        VerifierSpec(**{**base, "initial": "acc"})
    with pytest.raises(ValidationError):
        VerifierSpec(**{**base, "comm_alphabet": ("a",)})
    with pytest.raises(ValidationError):
        VerifierSpec(**{**base, "input_alphabet": (LEFT_END,)})
    rows = {"0": {("q0", BLANK): ((1.0, "q0", BLANK),)}}
    with pytest.raises(ValidationError):
        VerifierSpec(**{**base, "rows": rows})  # no head direction
    with pytest.raises(ValidationError):
        VerifierSpec(**{
            **base, "rows": rows,
            "head_dir": {("q0", BLANK): -1},  # one-way must move right
        })


def test_wellformed_flags_norm_violation():
    rows = {"0": {("q0", BLANK): ((0.5, "q0", BLANK),)}}
    v = VerifierSpec(
        name="lossy", input_alphabet=("0",), comm_alphabet=(BLANK,),
        non_halting=("q0",), accepting=("acc",), rejecting=("rej",),
        initial="q0", two_way=False, rows=rows,
        head_dir={("q0", BLANK): 1},
    )
    report = validate_wellformed(v)
    assert not report.ok
    assert report.worst > 1e-9


def test_wellformed_missing_row_reports_infinite_defect():
    v = VerifierSpec(
        name="gappy", input_alphabet=("0",), comm_alphabet=(BLANK,),
        non_halting=("q0",), accepting=("acc",), rejecting=("rej",),
        initial="q0", two_way=False, rows={}, head_dir={},
    )
    report = validate_wellformed(v)
    assert not report.ok
    assert report.worst == float("inf")


def test_public_symbol_format():
    one_way = tiny_accept_all()
    assert public_symbol(one_way, "q0") == "q0"
    rows = {
        sym: {("q0", BLANK): ((1.0, "q0", BLANK),)}
        for sym in (LEFT_END, "0", "1")
    }
    rows[RIGHT_END] = {("q0", BLANK): ((1.0, "acc", BLANK),)}
    two_way = complete_verifier(
        name="tiny2", input_alphabet=("0", "1"), comm_alphabet=(BLANK,),
        non_halting=("q0",), accepting=("acc",), rejecting=("rej",),
        initial="q0", two_way=True, core_rows=rows,
        head_dir={"q0": 1, "acc": 0, "rej": 0},
    )
    assert public_symbol(two_way, "q0", BLANK) == "q0|+1"
    with pytest.raises(ValidationError):
        public_symbol(two_way, "q0", "missing")


def test_validate_public_detects_silent_rows():
    v = tiny_accept_all()  # echoes blanks, never announces itself
    report = validate_public(v)
    assert not report.ok
    assert report.violations


def parity_machine():
    delta = {}
    for q in ("even", "odd"):
        delta[(q, LEFT_END)] = q
        delta[(q, "0")] = q
    delta[("even", "1")] = "odd"
    delta[("odd", "1")] = "even"
    delta[("even", RIGHT_END)] = "rej"
    delta[("odd", RIGHT_END)] = "acc"
    return OneRfaSpec(
        name="parity", input_alphabet=("0", "1"),
        non_halting=("even", "odd"), accepting=("acc",), rejecting=("rej",),
        initial="even", delta=delta,
    )


def test_1rfa_validation_and_run():
    m = parity_machine()
    assert validate_1rfa_reversible(m)
    assert run_1rfa(m, "1").accepted
    assert run_1rfa(m, "11").accepted is False
    assert run_1rfa(m, "0110").accepted is False
    assert run_1rfa(m, "010").accepted
    r = run_1rfa(m, "01")
    assert r.halted and r.steps == len("01") + 2


def test_1rfa_reversibility_rejects_merging_transitions():
    m = parity_machine()
    m.delta[("odd", "0")] = "even"  # now even/odd both reach even on 0
    with pytest.raises(ValidationError):
        validate_1rfa_reversible(m)


def test_1rfa_totality_required():
    m = parity_machine()
    del m.delta[("odd", "1")]
    with pytest.raises(ValidationError):
        validate_1rfa_reversible(m)


def coin_flip_machine():
    coin = {
        ("c0", sym): ("acc", "rej")
        for sym in (LEFT_END, "0", "1", RIGHT_END)
    }
    return TwoNpfaSpec(
        name="flip", input_alphabet=("0", "1"), coin_states=("c0",),
        choice_states=(), accepting=("acc",), rejecting=("rej",),
        initial="c0", coin=coin, choice={},
    )


def test_2npfa_coin_machine_halves_mass():
    m = coin_flip_machine()
    assert validate_2npfa_normalized(m)
    r = run_2npfa(m, "01")
    assert r.p_acc == pytest.approx(0.5)
    assert r.p_rej == pytest.approx(0.5)
    assert r.residual == pytest.approx(0.0)
    assert r.steps == 1


def test_2npfa_truncation_reports_residual():
    coin = {
        ("c0", sym): ("c0", "acc")
        for sym in (LEFT_END, "0", RIGHT_END)
    }
    m = TwoNpfaSpec(
        name="loop", input_alphabet=("0",), coin_states=("c0",),
        choice_states=(), accepting=("acc",), rejecting=("rej",),
        initial="c0", coin=coin, choice={},
    )
    r = run_2npfa(m, "0", max_steps=3)
    assert r.p_acc == pytest.approx(0.875)
    assert r.residual == pytest.approx(0.125)
    assert r.p_acc + r.p_rej + r.residual == pytest.approx(1.0)


def test_2npfa_choice_needs_chooser():
    choice = {
        ("n0", sym): (("acc", 1), ("rej", 1))
        for sym in (LEFT_END, "0", "1", RIGHT_END)
    }
    m = TwoNpfaSpec(
        name="pick", input_alphabet=("0", "1"), coin_states=(),
        choice_states=("n0",), accepting=("acc",), rejecting=("rej",),
        initial="n0", coin={}, choice=choice,
    )
    with pytest.raises(EngineError):
        run_2npfa(m, "0")
    r = run_2npfa(m, "0", chooser=first_option_chooser(m))
    assert r.p_acc == pytest.approx(1.0)


def test_2npfa_normal_form_rejected_when_broken():
    m = coin_flip_machine()
    m.coin[("c0", "0")] = ("acc", "acc")
    with pytest.raises(ValidationError):
        validate_2npfa_normalized(m)
    choice = {("n0", sym): (("acc", 0),) for sym in (LEFT_END, RIGHT_END)}
    bad = TwoNpfaSpec(
        name="stay", input_alphabet=(), coin_states=(),
        choice_states=("n0",), accepting=("acc",), rejecting=("rej",),
        initial="n0", coin={}, choice=choice,
    )
    with pytest.raises(ValidationError):
        validate_2npfa_normalized(bad)
