"""Conditional belief systems: structure, validity, and admissibility queries.

Numeric expectations (thresholds like 2/3 on the bribe game) were derived by
hand from the payoff tables and are asserted exactly.
"""

from fractions import Fraction

import pytest

from fisolve import beliefs, dsl


# A game whose conditioning events do not form a forest under inclusion:
# Ann's last infoset is reachable under Bob's b2 only, with two incomparable
# minimal supersets {b1,b2} and {b2,b3}.
TANGLE = """
game tangle
players Ann Bob
tree
  node root owner Bob
    b1 -> node g1 owner Ann
      x -> node h1a owner Ann
        u -> leaf (1, 0)
        v -> leaf (0, 0)
      y -> leaf (0, 0)
    b2 -> node g2 owner Ann
      x -> node h1b owner Ann
        u -> node h0a owner Ann
          p -> leaf (1, 0)
          q -> leaf (0, 0)
        v -> leaf (0, 0)
      y -> node h2a owner Ann
        c -> leaf (0, 0)
        d -> leaf (1, 0)
    b3 -> node g3 owner Ann
      x -> leaf (0, 0)
      y -> node h2b owner Ann
        c -> leaf (1, 0)
        d -> leaf (0, 0)
infosets
  g: Ann { g1 g2 g3 }
  h1: Ann { h1a h1b }
  h2: Ann { h2a h2b }
"""


def strat(game, player, name):
    for s in game.strategies(player):
        if s.name == name:
            return s
    raise KeyError(name)


# -- space structure ---------------------------------------------------------


def test_bribe_space_events(bribe):
    sp = beliefs.space_for(bribe, "Ann")
    assert sp.opponents == ("Bob",)
    assert len(sp.combos) == 2
    assert sp.event["ann_root"] == frozenset({0, 1})
    assert sp.event["ann_after_ba"] == frozenset({1})
    # The smaller event's parent is the root event.
    g_after = sp.group_of["ann_after_ba"]
    g_root = sp.group_of["ann_root"]
    assert sp.parent[g_after] == g_root
    assert sp.parent[g_root] is None
    assert sp.combo_label(1) == "Bob=A"


def test_cleo_space_two_roots(cleo):
    sp = beliefs.space_for(cleo, "Ann")
    assert sp.opponents == ("Bob", "Cleo")
    assert len(sp.combos) == 16
    # Opting out and opting in generate disjoint events: two forest roots.
    assert sp.event["ann_after_o"].isdisjoint(sp.event["ann_after_i"])
    for h in ("ann_after_o", "ann_after_i"):
        assert sp.parent[sp.group_of[h]] is None


def test_cleo_own_space_shares_one_group(cleo):
    # Cleo alone decides whether her matrix choice is reached, so both of her
    # infosets condition on the full opponent set and share a group.
    sp = beliefs.space_for(cleo, "Cleo")
    assert sp.group_of["cleo_root"] == sp.group_of["cleo_matrix"]
    assert len(sp.groups) == 1


def test_space_is_cached(bribe):
    assert beliefs.space_for(bribe, "Ann") is beliefs.space_for(bribe, "Ann")


def test_non_forest_events_rejected():
    game = dsl.parse_game(TANGLE)
    with pytest.raises(beliefs.UnsupportedBeliefStructure):
        beliefs.space_for(game, "Ann")


# -- building and validating systems -----------------------------------------


def test_point_cps_and_validity(bribe):
    bob_a = strat(bribe, "Bob", "A")
    cps = beliefs.point_cps(
        bribe, "Ann", {"ann_root": (bob_a,), "ann_after_ba": (bob_a,)}
    )
    assert beliefs.is_valid_cps(bribe, "Ann", cps)
    assert cps.prob("ann_root", 1) == 1
    assert cps.as_labels()["ann_root"] == {"Bob=A": Fraction(1)}


def test_point_cps_outside_event_rejected(bribe):
    bob_r = strat(bribe, "Bob", "R")
    with pytest.raises(beliefs.DomainMismatch):
        beliefs.point_cps(
            bribe, "Ann", {"ann_root": (bob_r,), "ann_after_ba": (bob_r,)}
        )


def test_lexicographic_cps_always_valid(bribe, cleo):
    for game, player in ((bribe, "Ann"), (bribe, "Bob"), (cleo, "Ann"), (cleo, "Cleo")):
        sp = beliefs.space_for(game, player)
        for first in range(len(sp.combos)):
            cps = beliefs.lexicographic_cps(game, player, [first])
            assert beliefs.is_valid_cps(game, player, cps)


def test_surprise_reset_is_valid(bribe):
    # Mass 1 on R at the root, then full revision to A once Bob accepts.
    cps = beliefs.cps_from_table(
        bribe, "Ann", {"ann_root": {0: 1}, "ann_after_ba": {1: 1}}
    )
    assert beliefs.is_valid_cps(bribe, "Ann", cps)


def test_chain_rule_inheritance(bribe):
    # Positive mass on the sub-event forces Bayes: 1 * (1/3) == p_root(A).
    good = beliefs.cps_from_table(
        bribe,
        "Ann",
        {
            "ann_root": {0: Fraction(2, 3), 1: Fraction(1, 3)},
            "ann_after_ba": {1: 1},
        },
    )
    assert beliefs.explain_invalid_cps(bribe, "Ann", good) is None


def test_equal_events_must_agree(cleo):
    rows = {"cleo_root": {0: 1}, "cleo_matrix": {1: 1}}
    cps = beliefs.cps_from_table(cleo, "Cleo", rows)
    reason = beliefs.explain_invalid_cps(cleo, "Cleo", cps)
    assert reason is not None and "chain rule" in reason


def test_invalid_mass_reported(bribe):
    cps = beliefs.cps_from_table(
        bribe, "Ann", {"ann_root": {0: Fraction(1, 2)}, "ann_after_ba": {1: 1}}
    )
    assert "sums to" in beliefs.explain_invalid_cps(bribe, "Ann", cps)


# -- obligations ---------------------------------------------------------------


def test_strong_belief_mandate_activation(bribe):
    bob_r = strat(bribe, "Bob", "R")
    bob_a = strat(bribe, "Bob", "A")
    m_r = beliefs.strong_belief_mandate(bribe, "Ann", "bob rejects", "Bob", [bob_r])
    # R never reaches Ann's second infoset, so the obligation is inactive there.
    assert set(m_r.allowed) == {"ann_root"}
    assert m_r.allowed["ann_root"] == frozenset({0})
    m_a = beliefs.strong_belief_mandate(bribe, "Ann", "bob accepts", "Bob", [bob_a])
    assert set(m_a.allowed) == {"ann_root", "ann_after_ba"}


def test_strongly_believes(bribe):
    bob_a = strat(bribe, "Bob", "A")
    on_a = beliefs.point_cps(
        bribe, "Ann", {"ann_root": (bob_a,), "ann_after_ba": (bob_a,)}
    )
    assert beliefs.strongly_believes(bribe, "Ann", on_a, "Bob", [bob_a])
    reset = beliefs.cps_from_table(
        bribe, "Ann", {"ann_root": {0: 1}, "ann_after_ba": {1: 1}}
    )
    assert not beliefs.strongly_believes(bribe, "Ann", reset, "Bob", [bob_a])


def test_sequential_best_reply(bribe):
    bob_a = strat(bribe, "Bob", "A")
    on_a = beliefs.point_cps(
        bribe, "Ann", {"ann_root": (bob_a,), "ann_after_ba": (bob_a,)}
    )
    assert beliefs.sequential_best_reply(bribe, "Ann", strat(bribe, "Ann", "B.I"), on_a)
    # Pulling out pays -1 where following through pays 1.
    assert not beliefs.sequential_best_reply(
        bribe, "Ann", strat(bribe, "Ann", "B.P"), on_a
    )


def test_best_replies_under_rejection(bribe):
    reset = beliefs.cps_from_table(
        bribe, "Ann", {"ann_root": {0: 1}, "ann_after_ba": {1: 1}}
    )
    assert [s.name for s in beliefs.best_replies(bribe, "Ann", reset)] == [
        "N.P",
        "N.I",
    ]


# -- admissibility queries -------------------------------------------------------


def test_never_optimal_strategy_has_no_witness(bribe):
    assert (
        beliefs.exists_admissible_cps(bribe, "Ann", strat(bribe, "Ann", "B.P"))
        is None
    )


def test_witness_respects_mandates(bribe):
    bob_a = strat(bribe, "Bob", "A")
    item = beliefs.strong_belief_mandate(bribe, "Ann", "sb A", "Bob", [bob_a])
    cps = beliefs.exists_admissible_cps(
        bribe, "Ann", strat(bribe, "Ann", "B.I"), [item]
    )
    assert cps is not None
    assert beliefs.is_valid_cps(bribe, "Ann", cps)
    assert beliefs.strongly_believes(bribe, "Ann", cps, item)
    assert beliefs.sequential_best_reply(
        bribe, "Ann", strat(bribe, "Ann", "B.I"), cps
    )
    # The same mandate kills N.P: believing in acceptance makes bribing strictly
    # better than staying out.
    assert (
        beliefs.exists_admissible_cps(bribe, "Ann", strat(bribe, "Ann", "N.P"), [item])
        is None
    )


def test_witness_respects_restrictions(bribe, bribe_delta):
    # Point restriction on R keeps N optimal and blocks B.I.
    assert (
        beliefs.exists_admissible_cps(
            bribe, "Ann", strat(bribe, "Ann", "N.P"), (), bribe_delta
        )
        is not None
    )
    assert (
        beliefs.exists_admissible_cps(
            bribe, "Ann", strat(bribe, "Ann", "B.I"), (), bribe_delta
        )
        is None
    )


def test_bribe_threshold_is_exact(bribe):
    """B.I needs P(A) >= 2/3 at the root; a cap just below that blocks it."""
    low = dsl.parse_restrictions(
        "player Ann\n  at ann_root: P[Bob = A] <= 2/3\n", bribe
    )
    assert (
        beliefs.exists_admissible_cps(
            bribe, "Ann", strat(bribe, "Ann", "B.I"), (), low
        )
        is not None
    )
    lower = dsl.parse_restrictions(
        "player Ann\n  at ann_root: P[Bob = A] <= 665/1000\n", bribe
    )
    assert (
        beliefs.exists_admissible_cps(
            bribe, "Ann", strat(bribe, "Ann", "B.I"), (), lower
        )
        is None
    )


def test_contradictory_clauses_raise_empty_polytope(bribe):
    text = (
        "player Ann\n"
        "  at ann_root: P[Bob = R] >= 2/3\n"
        "  at ann_root: P[Bob = A] >= 2/3\n"
    )
    delta = dsl.parse_restrictions(text, bribe)
    assert beliefs.empty_restriction_infosets(
        bribe, "Ann", delta.clauses_for("Ann")
    ) == ["ann_root"]
    with pytest.raises(beliefs.EmptyPolytope):
        beliefs.exists_admissible_cps(
            bribe, "Ann", strat(bribe, "Ann", "N.P"), (), delta
        )


# -- coupled queries ----------------------------------------------------------


def test_coupled_pair_merged_fast_path(bribe):
    bob_a = strat(bribe, "Bob", "A")
    item = beliefs.strong_belief_mandate(bribe, "Ann", "sb A", "Bob", [bob_a])
    pair = beliefs.coupled_admissible_pair(
        bribe,
        "Ann",
        strat(bribe, "Ann", "B.I"),
        [item],
        [item],
        None,
        ("ann_root", "ann_after_ba"),
    )
    assert pair is not None
    mu, bar = pair
    assert mu.table == bar.table


def test_coupled_pair_agreement_binds(bribe):
    bob_r = strat(bribe, "Bob", "R")
    bob_a = strat(bribe, "Bob", "A")
    sb_r = beliefs.strong_belief_mandate(bribe, "Ann", "sb R", "Bob", [bob_r])
    sb_a = beliefs.strong_belief_mandate(bribe, "Ann", "sb A", "Bob", [bob_a])
    # Without agreement the two slots can split: mu on R, bar on A.
    pair = beliefs.coupled_admissible_pair(
        bribe, "Ann", strat(bribe, "Ann", "N.P"), [sb_r], [sb_a], None, ()
    )
    assert pair is not None
    mu, bar = pair
    assert mu.prob("ann_root", 0) == 1
    assert bar.prob("ann_root", 1) == 1
    # Forcing agreement at the root makes the slots contradictory.
    assert (
        beliefs.coupled_admissible_pair(
            bribe,
            "Ann",
            strat(bribe, "Ann", "N.P"),
            [sb_r],
            [sb_a],
            None,
            ("ann_root", "ann_after_ba"),
        )
        is None
    )


def test_agreement_must_be_upward_closed(bribe):
    bob_r = strat(bribe, "Bob", "R")
    bob_a = strat(bribe, "Bob", "A")
    sb_r = beliefs.strong_belief_mandate(bribe, "Ann", "sb R", "Bob", [bob_r])
    sb_a = beliefs.strong_belief_mandate(bribe, "Ann", "sb A", "Bob", [bob_a])
    with pytest.raises(beliefs.UnsupportedBeliefStructure):
        beliefs.coupled_admissible_pair(
            bribe,
            "Ann",
            strat(bribe, "Ann", "N.P"),
            [sb_r],
            [sb_a],
            None,
            ("ann_after_ba",),
        )


def test_agreement_closure_membership(bribe, bribe_delta):
    bob_r = strat(bribe, "Bob", "R")
    bob_a = strat(bribe, "Bob", "A")
    on_r = beliefs.cps_from_table(
        bribe, "Ann", {"ann_root": {0: 1}, "ann_after_ba": {1: 1}}
    )
    on_a = beliefs.point_cps(
        bribe, "Ann", {"ann_root": (bob_a,), "ann_after_ba": (bob_a,)}
    )
    assert beliefs.cps_in_agreement_closure(
        bribe, "Ann", on_r, (), bribe_delta, ("ann_root",)
    )
    assert not beliefs.cps_in_agreement_closure(
        bribe, "Ann", on_a, (), bribe_delta, ("ann_root",)
    )
    # With an empty agreement set every system is in the closure.
    assert beliefs.cps_in_agreement_closure(
        bribe, "Ann", on_a, (), bribe_delta, ()
    )
