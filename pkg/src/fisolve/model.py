"""Finite extensive-form games with perfect recall.

The model is deliberately plain: named decision nodes and leaves, information
sets grouping decision nodes, exact rational payoffs, and full strategies (one
action per information set of the owner, including sets the strategy itself
makes unreachable). There are no chance moves.

Strategy and profile orderings everywhere follow declaration order: players in
the order of the players list, information sets in declaration order, actions
in the order they appear at their node. All derived enumerations (strategy
lists, opponent profile lists) are products in that order with the rightmost
coordinate varying fastest, so output is reproducible byte for byte.
"""

from dataclasses import dataclass
from fractions import Fraction
from itertools import product


class ModelError(Exception):
    """Base class for game-construction and validation failures."""


class DanglingNode(ModelError):
    """A child reference points nowhere, or part of the tree is unreachable."""


class MalformedInfoSet(ModelError):
    """Owner or action lists are inconsistent inside one information set."""


class PerfectRecallViolation(ModelError):
    """An information set pools nodes with different own histories."""


@dataclass(frozen=True)
class Leaf:
    name: str
    payoffs: tuple  # Fraction per player, aligned with GameTree.players


@dataclass(frozen=True)
class DecisionNode:
    name: str
    owner: str
    actions: tuple  # action labels
    children: tuple  # child node/leaf names, parallel to actions


@dataclass(frozen=True)
class InfoSet:
    name: str
    owner: str
    nodes: tuple  # decision node names
    actions: tuple


@dataclass(frozen=True)
class Strategy:
    """A full strategy: one action index per information set of the player."""

    player: str
    choices: tuple  # action indices aligned with the player's infoset list
    name: str
    index: int  # position in the canonical strategy list

    def action_at(self, game, infoset_name):
        pos = game.player_infosets[self.player].index(infoset_name)
        return game.infosets[infoset_name].actions[self.choices[pos]]


class GameTree:
    def __init__(self, name, players, root, nodes, leaves, infosets, infoset_order):
        self.name = name
        self.players = tuple(players)
        self.root = root
        self.nodes = dict(nodes)
        self.leaves = dict(leaves)
        self.infosets = dict(infosets)
        self.infoset_order = list(infoset_order)
        self._derived = None

    # -- structural identity (used by DSL round-trip tests) ------------------

    def _key(self):
        return (
            self.name,
            self.players,
            self.root,
            tuple(sorted(self.nodes.items(), key=lambda kv: kv[0])),
            tuple(sorted(self.leaves.items(), key=lambda kv: kv[0])),
            tuple((n, self.infosets[n]) for n in self.infoset_order),
        )

    def __eq__(self, other):
        return isinstance(other, GameTree) and self._key() == other._key()

    def __hash__(self):
        return hash((self.name, self.players, self.root))

    # -- validation -----------------------------------------------------------

    def validate(self):
        """Check tree structure, information sets, payoffs, perfect recall.

        Raises DanglingNode / MalformedInfoSet / PerfectRecallViolation.
        Returns self so calls can be chained.
        """
        if not self.players:
            raise ModelError("game has no players")
        if len(set(self.players)) != len(self.players):
            raise ModelError("duplicate player names")
        if self.root not in self.nodes:
            raise DanglingNode("root %r is not a decision node" % (self.root,))

        all_names = set(self.nodes) | set(self.leaves)
        if len(all_names) != len(self.nodes) + len(self.leaves):
            raise ModelError("a name is used for both a node and a leaf")

        referenced = {}
        for node in self.nodes.values():
            if node.owner not in self.players:
                raise ModelError("node %r owned by unknown player %r" % (node.name, node.owner))
            if not node.actions:
                raise MalformedInfoSet("node %r has no actions" % (node.name,))
            if len(node.actions) != len(set(node.actions)):
                raise MalformedInfoSet("node %r repeats an action label" % (node.name,))
            if len(node.actions) != len(node.children):
                raise ModelError("node %r actions/children mismatch" % (node.name,))
            for child in node.children:
                if child not in all_names:
                    raise DanglingNode("node %r references unknown child %r" % (node.name, child))
                if child in referenced:
                    raise DanglingNode("child %r referenced twice" % (child,))
                referenced[child] = node.name
        if self.root in referenced:
            raise DanglingNode("root %r appears as a child" % (self.root,))
        for name in all_names:
            if name != self.root and name not in referenced:
                raise DanglingNode("node %r is unreachable" % (name,))

        for leaf in self.leaves.values():
            if len(leaf.payoffs) != len(self.players):
                raise ModelError(
                    "leaf %r has %d payoffs for %d players"
                    % (leaf.name, len(leaf.payoffs), len(self.players))
                )

        seen_nodes = {}
        for isname in self.infoset_order:
            h = self.infosets[isname]
            if h.owner not in self.players:
                raise MalformedInfoSet("infoset %r owned by unknown player" % (isname,))
            if not h.nodes:
                raise MalformedInfoSet("infoset %r is empty" % (isname,))
            for nn in h.nodes:
                node = self.nodes.get(nn)
                if node is None:
                    raise MalformedInfoSet("infoset %r lists unknown node %r" % (isname, nn))
                if node.owner != h.owner:
                    raise MalformedInfoSet(
                        "infoset %r pools node %r of another player" % (isname, nn)
                    )
                if node.actions != h.actions:
                    raise MalformedInfoSet(
                        "infoset %r pools nodes with different action lists" % (isname,)
                    )
                if nn in seen_nodes:
                    raise MalformedInfoSet("node %r is in two infosets" % (nn,))
                seen_nodes[nn] = isname
        for nn in self.nodes:
            if nn not in seen_nodes:
                raise MalformedInfoSet("decision node %r belongs to no infoset" % (nn,))

        self._derived = None
        d = self._ensure_derived(check_recall=True)
        return self

    # -- derived structure ------------------------------------------------------

    def _ensure_derived(self, check_recall=False):
        if self._derived is not None and not check_recall:
            return self._derived

        infoset_of_node = {}
        for isname in self.infoset_order:
            for nn in self.infosets[isname].nodes:
                infoset_of_node[nn] = isname

        # Path of each node/leaf: ordered (decision node, action index) pairs.
        paths = {self.root: ()}
        stack = [self.root]
        while stack:
            cur = stack.pop()
            node = self.nodes.get(cur)
            if node is None:
                continue
            for ai, child in enumerate(node.children):
                paths[child] = paths[cur] + ((cur, ai),)
                stack.append(child)

        # Own history of a node: the player's (infoset, action index) pairs
        # strictly before it. Perfect recall: constant across an infoset.
        own_history = {}
        for isname in self.infoset_order:
            h = self.infosets[isname]
            seqs = set()
            for nn in h.nodes:
                seq = tuple(
                    (infoset_of_node[step_node], ai)
                    for step_node, ai in paths[nn]
                    if self.nodes[step_node].owner == h.owner
                )
                seqs.add(seq)
            if check_recall and len(seqs) > 1:
                raise PerfectRecallViolation(
                    "infoset %r pools nodes with different own histories" % (isname,)
                )
            own_history[isname] = next(iter(seqs))
            if check_recall:
                for hh, _ai in own_history[isname]:
                    if hh == isname:
                        raise PerfectRecallViolation(
                            "infoset %r occurs twice on one path" % (isname,)
                        )

        player_infosets = {p: [] for p in self.players}
        for isname in self.infoset_order:
            player_infosets[self.infosets[isname].owner].append(isname)

        strategies = {}
        for p in self.players:
            hs = player_infosets[p]
            strategies[p] = []
            ranges = [range(len(self.infosets[h].actions)) for h in hs]
            for idx, choices in enumerate(product(*ranges)):
                label = ".".join(
                    self.infosets[h].actions[c] for h, c in zip(hs, choices)
                ) or "(idle)"
                strategies[p].append(Strategy(p, tuple(choices), label, idx))

        infoset_pos = {}
        for p, hs in player_infosets.items():
            for k, isname in enumerate(hs):
                infoset_pos[isname] = k

        # Per-node requirements: player -> ((infoset position, action index), ...).
        requirements = {}
        for name, path in paths.items():
            req = {}
            for step_node, ai in path:
                owner = self.nodes[step_node].owner
                req.setdefault(owner, []).append(
                    (infoset_pos[infoset_of_node[step_node]], ai)
                )
            requirements[name] = {p: tuple(v) for p, v in req.items()}

        self._derived = {
            "infoset_of_node": infoset_of_node,
            "paths": paths,
            "own_history": own_history,
            "player_infosets": player_infosets,
            "infoset_pos": infoset_pos,
            "strategies": strategies,
            "requirements": requirements,
            "reach_cache": {},
            "joint_cache": {},
        }
        return self._derived

    @property
    def player_infosets(self):
        return self._ensure_derived()["player_infosets"]

    def strategies(self, player):
        return self._ensure_derived()["strategies"][player]

    def infoset_of_node(self, node_name):
        return self._ensure_derived()["infoset_of_node"][node_name]

    def own_history(self, infoset_name):
        """The (infoset, action index) pairs of the owner before this set."""
        return self._ensure_derived()["own_history"][infoset_name]

    # -- play -------------------------------------------------------------------

    def profile_from(self, mapping):
        """Normalize {player: Strategy} to a tuple in player order."""
        return tuple(mapping[p] for p in self.players)

    def outcome(self, profile):
        """The leaf reached by a full strategy profile."""
        if isinstance(profile, dict):
            profile = self.profile_from(profile)
        by_player = {s.player: s for s in profile}
        d = self._ensure_derived()
        cur = self.root
        while cur in self.nodes:
            node = self.nodes[cur]
            s = by_player[node.owner]
            pos = d["infoset_pos"][d["infoset_of_node"][cur]]
            cur = node.children[s.choices[pos]]
        return self.leaves[cur]

    def payoff(self, player, profile):
        leaf = self.outcome(profile)
        return leaf.payoffs[self.players.index(player)]

    # -- reachability -------------------------------------------------------------

    @staticmethod
    def _consistent(strategy, reqs):
        for pos, ai in reqs:
            if strategy.choices[pos] != ai:
                return False
        return True

    def strategies_reaching(self, player, infoset_name):
        """Strategies of the player consistent with some node of the infoset."""
        d = self._ensure_derived()
        key = (player, infoset_name)
        cached = d["reach_cache"].get(key)
        if cached is not None:
            return cached
        h = self.infosets[infoset_name]
        out = []
        for s in d["strategies"][player]:
            for nn in h.nodes:
                reqs = d["requirements"][nn].get(player, ())
                if self._consistent(s, reqs):
                    out.append(s)
                    break
        d["reach_cache"][key] = out
        return out

    def joint_reaching(self, player, infoset_name):
        """Opponent profiles (tuples in player order, `player` omitted) that
        allow some node of the infoset to be reached."""
        d = self._ensure_derived()
        key = (player, infoset_name)
        cached = d["joint_cache"].get(key)
        if cached is not None:
            return cached
        opponents = [p for p in self.players if p != player]
        h = self.infosets[infoset_name]
        out = []
        for combo in product(*(d["strategies"][j] for j in opponents)):
            ok = False
            for nn in h.nodes:
                reqs = d["requirements"][nn]
                if all(self._consistent(s, reqs.get(s.player, ())) for s in combo):
                    ok = True
                    break
            if ok:
                out.append(combo)
        d["joint_cache"][key] = out
        return out

    def immediate_predecessor(self, infoset_name):
        """The owner's closest preceding infoset, or None."""
        hist = self.own_history(infoset_name)
        return hist[-1][0] if hist else None


def validate(game):
    return game.validate()


def outcome(game, profile):
    return game.outcome(profile)


def strategies_reaching(game, player, infoset_name):
    return game.strategies_reaching(player, infoset_name)


def immediate_predecessor(game, infoset_name):
    return game.immediate_predecessor(infoset_name)


def compatible_infosets(game, player, restriction):
    """Infosets of the player at which the restricted product set is alive.

    restriction: {player: iterable of Strategy} for any subset of players.
    An infoset qualifies iff every restricted player has at least one listed
    strategy that allows the set to be reached.
    """
    out = []
    for isname in game.player_infosets[player]:
        ok = True
        for j, allowed in restriction.items():
            allowed = set(allowed)
            if not allowed.intersection(game.strategies_reaching(j, isname)):
                ok = False
                break
        if ok:
            out.append(isname)
    return out


class ProfileSet:
    """A product set of strategies, one component set per player.

    Components keep canonical order (subsequences of the full strategy lists),
    so iteration and serialization are deterministic.
    """

    def __init__(self, game, per_player):
        self.game = game
        self.per_player = {}
        for p in game.players:
            chosen = per_player.get(p, game.strategies(p))
            keep = set(s.index for s in chosen)
            self.per_player[p] = tuple(
                s for s in game.strategies(p) if s.index in keep
            )

    @classmethod
    def full(cls, game):
        return cls(game, {})

    def strategies(self, player):
        return self.per_player[player]

    def is_empty(self):
        return any(not v for v in self.per_player.values())

    def profiles(self):
        if self.is_empty():
            return
        for combo in product(*(self.per_player[p] for p in self.game.players)):
            yield combo

    def outcomes(self):
        """Leaves induced by the product set, in first-reached order."""
        seen = []
        names = set()
        for prof in self.profiles():
            leaf = self.game.outcome(prof)
            if leaf.name not in names:
                names.add(leaf.name)
                seen.append(leaf)
        return seen

    def __eq__(self, other):
        return (
            isinstance(other, ProfileSet)
            and self.game is other.game
            and {p: tuple(s.index for s in v) for p, v in self.per_player.items()}
            == {p: tuple(s.index for s in v) for p, v in other.per_player.items()}
        )

    def __repr__(self):
        parts = ", ".join(
            "%s:{%s}" % (p, ",".join(s.name for s in v))
            for p, v in self.per_player.items()
        )
        return "ProfileSet(%s)" % parts
