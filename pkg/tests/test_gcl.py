import random

import pytest

from c2ka import gcl
from c2ka.gcl import (
    Assign,
    BinOp,
    FnCall,
    GclSyntaxError,
    IfFi,
    Program,
    Receive,
    StimulusLit,
    UnknownConstruct,
    VarRef,
    Variable,
    def_vars,
    parse_program,
    ref_vars,
    render_program,
)

STIMULI = ("crane1", "crane2", "compl1", "compl2", "oper1", "oper2")


def V(text):
    return gcl.parse_variable(text)


def vs(*names):
    return frozenset(V(n) for n in names)


def test_parse_simple_assignment():
    p = parse_program("dockPos[1] := berthPos[1]")
    assert p == Program((Assign(Variable("dockPos", 1), VarRef(Variable("berthPos", 1))),))


def test_parse_receive_and_iffi():
    p = parse_program(
        "receive y; if (y >= crane1) -> berth[1] := POSITION(numCranes[1])"
        " [] (y >= crane2) -> berth[2] := POSITION(numCranes[2]) fi",
        STIMULI,
    )
    receive, iffi = p.body
    assert receive == Receive("y")
    assert isinstance(iffi, IfFi) and len(iffi.branches) == 2
    guard, body = iffi.branches[0]
    assert guard == BinOp(">=", VarRef(Variable("y")), StimulusLit("crane1"))
    assert body == (Assign(Variable("berth", 1), FnCall("POSITION", (VarRef(Variable("numCranes", 1)),))),)


def test_parse_empty_program():
    assert parse_program("") == Program(())


def test_parse_errors_carry_location():
    with pytest.raises(GclSyntaxError) as info:
        parse_program("x := ;")
    assert info.value.line == 1 and info.value.column > 1
    with pytest.raises(UnknownConstruct):
        parse_program("if (x = 1) -> null := 2 fi")


def test_def_vars_examples():
    leave = parse_program("dockPos[1] := null; serviceT[1] := 0")
    assert def_vars(leave) == vs("dockPos[1]", "serviceT[1]")

    free = parse_program(
        "receive y; if (y >= compl1) -> berth[1] := null; alloCranes[1] := null"
        " [] (y >= compl2) -> berth[2] := null; alloCranes[2] := null fi",
        STIMULI,
    )
    assert def_vars(free) == vs("berth[1]", "alloCranes[1]", "berth[2]", "alloCranes[2]")

    assert def_vars(parse_program("receive y")) == frozenset()


def test_ref_vars_examples():
    srvt = parse_program("serviceT[1] := departT[1] - arriveT[1] - waitT[1]")
    assert ref_vars(srvt) == vs("departT[1]", "arriveT[1]", "waitT[1]")

    allo = parse_program(
        "receive y;"
        " if (y >= crane1) -> berth[1] := POSITION(numCranes[1]); alloCranes[1] := ALLOCATE(berth[1])"
        " [] (y >= crane2) -> berth[2] := POSITION(numCranes[2]); alloCranes[2] := ALLOCATE(berth[2]) fi",
        STIMULI,
    )
    assert ref_vars(allo) == vs("numCranes[1]", "berth[1]", "numCranes[2]", "berth[2]")

    assert ref_vars(parse_program("x := SHIP_LENGTH")) == frozenset()


def test_constants_never_defined():
    assert def_vars(parse_program("LIMIT := 3")) == frozenset()


def test_guards_contribute_references():
    p = parse_program("if (i = 1) -> x := 0 [] (i = 2) -> y := 0 fi")
    assert ref_vars(p) == vs("i")
    assert def_vars(p) == vs("x", "y")


def test_receive_binder_shadows_everywhere():
    p = parse_program("receive y; x := y + z", STIMULI)
    assert ref_vars(p) == vs("z")
    assert def_vars(p) == vs("x")


def test_null_assignment_is_a_definition():
    assert def_vars(parse_program("berth[1] := null")) == vs("berth[1]")


def _random_program_text(rng: random.Random) -> str:
    import modelgen

    pattern = rng.choice(modelgen._PROGRAM_PATTERNS)
    chosen = rng.sample(modelgen._VARS, 3)
    return pattern.format(
        v0=chosen[0], v1=chosen[1], v2=chosen[2],
        s0=rng.choice(STIMULI), s1=rng.choice(STIMULI),
    )


def test_concatenation_is_union():
    rng = random.Random(7)
    for _ in range(200):
        p1 = parse_program(_random_program_text(rng), STIMULI)
        p2 = parse_program(_random_program_text(rng), STIMULI)
        both = Program(p1.body + p2.body)
        assert def_vars(both) == def_vars(p1) | def_vars(p2)
        assert ref_vars(both) == ref_vars(p1) | ref_vars(p2)


def test_binders_in_neither_set():
    rng = random.Random(8)
    for _ in range(200):
        p = parse_program(_random_program_text(rng), STIMULI)
        binders = {s.binder for s in p.body if isinstance(s, Receive)}
        touched = {v.base for v in def_vars(p) | ref_vars(p)}
        assert not (binders & touched)


def test_render_round_trip_generated():
    rng = random.Random(9)
    for _ in range(200):
        p = parse_program(_random_program_text(rng), STIMULI)
        assert parse_program(render_program(p), STIMULI) == p


def test_render_preserves_expression_grouping():
    text = "numCranes[1] := numContainers[1] / (CRANE_EFF * serviceT[1])"
    p = parse_program(text)
    assert parse_program(render_program(p)) == p
    text2 = "x := (a + b) * c - d"
    p2 = parse_program(text2)
    assert parse_program(render_program(p2)) == p2
