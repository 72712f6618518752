"""Parser and serializer tests for the game and restriction formats."""

import json
from fractions import Fraction

import pytest

from fisolve import dsl, randgen, solvers


MINI = """
# one-shot matching game
game mini
players A B
tree
  node root owner A
    l -> node br owner B
      x -> leaf (1, 0)
      y -> leaf (0, 1)
    r -> leaf (1/2, 1/2)
"""


def test_parse_minimal_game():
    g = dsl.parse_game(MINI)
    assert g.name == "mini"
    assert g.players == ("A", "B")
    # Unlisted decision nodes become singleton infosets named after the node.
    assert g.infoset_order == ["root", "br"]
    assert g.leaves["l/x"].payoffs == (Fraction(1), Fraction(0))
    assert g.leaves["r"].payoffs == (Fraction(1, 2), Fraction(1, 2))


def test_game_round_trip(bribe, cleo):
    for g in (bribe, cleo):
        again = dsl.parse_game(dsl.serialize_game(g))
        assert again == g
        # Idempotent: serializing the reparse gives identical text.
        assert dsl.serialize_game(again) == dsl.serialize_game(g)


def test_random_games_round_trip():
    for seed in range(25):
        g = randgen.random_game(seed)
        assert dsl.parse_game(dsl.serialize_game(g)) == g


def test_decimal_payoffs_are_exact():
    g = dsl.parse_game(
        "game d\nplayers A\ntree\n  node r owner A\n    x -> leaf (3.6)\n"
    )
    assert g.leaves["x"].payoffs[0] == Fraction(18, 5)


def test_duplicate_player_rejected():
    with pytest.raises(dsl.DslSyntaxError):
        dsl.parse_game("game g\nplayers A A\ntree\n  node r owner A\n    x -> leaf (1, 1)\n")


def test_unknown_owner_rejected():
    with pytest.raises(dsl.UnknownIdentifier):
        dsl.parse_game("game g\nplayers A\ntree\n  node r owner Z\n    x -> leaf (1)\n")


def test_payoff_arity_checked():
    with pytest.raises(dsl.ArityMismatch) as exc:
        dsl.parse_game(MINI.replace("(1, 0)", "(1, 0, 3)"))
    assert exc.value.line is not None


def test_tabs_rejected():
    with pytest.raises(dsl.DslSyntaxError):
        dsl.parse_game("game g\nplayers A\ntree\n\tnode r owner A\n\t\tx -> leaf (1)\n")


def test_duplicate_action_rejected():
    bad = """
game g
players A
tree
  node r owner A
    x -> leaf (1)
    x -> leaf (2)
"""
    with pytest.raises(dsl.DslSyntaxError):
        dsl.parse_game(bad)


def test_infoset_unknown_node():
    bad = MINI + "infosets\n  h: B { nope }\n"
    with pytest.raises(dsl.UnknownIdentifier):
        dsl.parse_game(bad)


# -- restrictions ----------------------------------------------------------


def test_parse_point_restriction(bribe):
    text = "player Ann\n  at ann_root: P[Bob = R] = 1\n"
    delta = dsl.parse_restrictions(text, bribe)
    clauses = delta.clauses_for("Ann")
    assert list(clauses) == ["ann_root"]
    cl = clauses["ann_root"][0]
    assert cl.op == "="
    assert cl.rhs == 1
    assert not delta.is_trivial()
    assert delta.clauses_for("Bob") == {}


def test_parse_linear_combination(cleo):
    text = (
        "restrictions for cleo\n"
        "player Cleo\n"
        "  at cleo_root: 2*P[Ann @ ann_after_o = N] - P[Bob @ bob_after_o = W] <= 3/2\n"
    )
    delta = dsl.parse_restrictions(text, cleo)
    cl = delta.clauses_for("Cleo")["cleo_root"][0]
    assert [c for c, _ in cl.terms] == [Fraction(2), Fraction(-1)]


def test_reach_sugar_expands_to_opponent_path(cleo):
    text = "player Cleo\n  at cleo_root: P[reach(O/N/W)] = 1\n"
    delta = dsl.parse_restrictions(text, cleo)
    cl = delta.clauses_for("Cleo")["cleo_root"][0]
    atoms = cl.terms[0][1].atoms
    # Own step (O at the root) is dropped; Ann's N and Bob's W remain.
    assert sorted(a[1] for a in atoms) == ["Ann", "Bob"]


def test_restriction_about_self_rejected(bribe):
    with pytest.raises(dsl.DslSyntaxError):
        dsl.parse_restrictions("player Ann\n  at ann_root: P[Ann = N.P] = 1\n", bribe)


def test_restriction_unknown_infoset(bribe):
    with pytest.raises(dsl.UnknownInfoset):
        dsl.parse_restrictions("player Ann\n  at bob_after_b: P[Bob = R] = 1\n", bribe)


def test_restriction_unknown_strategy(bribe):
    with pytest.raises(dsl.UnknownIdentifier):
        dsl.parse_restrictions("player Ann\n  at ann_root: P[Bob = Q] = 1\n", bribe)


def test_infeasible_clause_rejected(bribe):
    with pytest.raises(dsl.InfeasibleClause):
        dsl.parse_restrictions("player Ann\n  at ann_root: P[Bob = R] = 2\n", bribe)


def test_wrong_game_header(bribe):
    with pytest.raises(dsl.UnknownIdentifier):
        dsl.parse_restrictions("restrictions for other\nplayer Ann\n", bribe)


def test_restriction_fixture_sources(bribe, bribe_delta):
    assert bribe_delta.declared_infosets("Ann") == ["ann_root"]
    assert any("R" in line for line in bribe_delta.describe())


# -- solution serialization --------------------------------------------------


def test_serialize_solution_schema(bribe):
    trace = solvers.rationalizability(bribe)
    doc = json.loads(dsl.serialize_solution(trace))
    assert doc["schema"] == "fisolve.trace/1"
    assert doc["game"] == "bribe"
    assert doc["procedure"] == "rationalizability"
    assert doc["fixed_point_round"] == 3
    assert doc["rounds"][-1] == {"Ann": ["B.I"], "Bob": ["A"]}
    assert doc["outcomes"] == [
        {"leaf": "B/A/I", "payoffs": {"Ann": "1", "Bob": "1"}}
    ]
    assert doc["empty"] is False
    assert {e["strategy"] for e in doc["eliminations"]} == {"B.P", "R", "N.P", "N.I"}
    # Witness beliefs are exact rational strings keyed by opponent labels.
    assert doc["witnesses"]["Ann"]["B.I"]["ann_root"] == {"Bob=A": "1"}


def test_serialize_solution_deterministic(bribe):
    a = dsl.serialize_solution(solvers.rationalizability(bribe))
    b = dsl.serialize_solution(solvers.rationalizability(bribe))
    assert a == b


def test_serialize_solution_empty_run(bribe, bribe_delta):
    trace = solvers.selective_rationalizability(bribe, bribe_delta)
    doc = json.loads(dsl.serialize_solution(trace))
    assert doc["empty"] is True
    assert doc["outcomes"] == []
    assert doc["base"]["procedure"] == "rationalizability"
    assert doc["base"]["fixed_point_round"] == 3
    assert "Ann" not in doc["witnesses"]
