"""Conditional belief systems and admissibility queries.

A player's beliefs live on the family of conditioning events S_-i(h), one per
own information set h: the opponent strategy profiles that allow h. A valid
system obeys the chain rule across nested events. The central query here is
existence: is there a valid system under which a given strategy is a
sequential best reply, while every conditional obeys the active support
mandates (strong-belief obligations) and the user's linear restriction
clauses?

The search decomposes by "surprise pattern". Conditioning events with equal
support share one conditional; distinct events form a Hasse forest under
strict inclusion. Along each forest edge the child's conditional either
inherits from the parent by Bayes rule (positive mass on the child event) or
the parent assigns the child event zero mass and the child restarts freely.
Fixing one choice per edge makes every requirement linear after clearing
denominators, so each pattern is one exact rational LP; a strictly positive
max-slack certifies the pattern and yields an exact witness. Patterns are
few because the forests of real games are shallow.

The same machinery answers a coupled query used when restrictions are given
implicitly as "agrees on a set of events with some member of a smaller CPS
set": two belief systems, each with its own obligations, tied together by
equality of conditionals on a Hasse-upward-closed set of groups.
"""

from fractions import Fraction
from itertools import product

from . import lp

ZERO = Fraction(0)
ONE = Fraction(1)


class BeliefError(Exception):
    pass


class DomainMismatch(BeliefError):
    """A conditional puts mass outside its conditioning event."""


class EmptyPolytope(BeliefError):
    """The restriction clauses at one infoset admit no distribution at all."""

    def __init__(self, player, infoset):
        super().__init__("restrictions at %s leave %s no belief" % (infoset, player))
        self.player = player
        self.infoset = infoset


class UnsupportedBeliefStructure(BeliefError):
    """The conditioning events fall outside the solvable structure.

    The engine requires the distinct conditioning events to form a forest
    under strict inclusion (each event has at most one minimal strict
    superset), and coupled queries additionally require the agreement events
    to be upward-closed in that forest. Every game in the supported family
    (perfect-information trees and simultaneous blocks) satisfies both.
    """


def space_for(game, player):
    cache = getattr(game, "_belief_spaces", None)
    if cache is None:
        cache = {}
        game._belief_spaces = cache
    sp = cache.get(player)
    if sp is None:
        sp = BeliefSpace(game, player)
        cache[player] = sp
    return sp


class BeliefSpace:
    """Derived belief-side structure for one player: events, groups, forest."""

    def __init__(self, game, player):
        self.game = game
        self.player = player
        self.opponents = tuple(p for p in game.players if p != player)
        self.opp_pos = {p: k for k, p in enumerate(self.opponents)}

        self.combos = tuple(product(*(game.strategies(j) for j in self.opponents)))
        self.index_of = {
            tuple(s.index for s in combo): t for t, combo in enumerate(self.combos)
        }

        self.infosets = tuple(game.player_infosets[player])
        self.event = {}
        for h in self.infosets:
            idxs = frozenset(
                self.index_of[tuple(s.index for s in combo)]
                for combo in game.joint_reaching(player, h)
            )
            self.event[h] = idxs

        # Groups: one per distinct event, in a fixed topological order
        # (larger events first, so parents precede children).
        by_event = {}
        for h in self.infosets:
            by_event.setdefault(self.event[h], []).append(h)
        keys = sorted(by_event, key=lambda ev: (-len(ev), sorted(ev)))
        self.groups = [
            _Group(k, ev, tuple(by_event[ev]), tuple(sorted(ev)))
            for k, ev in enumerate(keys)
        ]
        self.group_of = {}
        for g in self.groups:
            for h in g.infosets:
                self.group_of[h] = g.index

        self.parent = [None] * len(self.groups)
        for g in self.groups:
            supers = [g2 for g2 in self.groups if g.event < g2.event]
            minimal = [
                g2
                for g2 in supers
                if not any(g3.event < g2.event for g3 in supers)
            ]
            if len(minimal) > 1:
                raise UnsupportedBeliefStructure(
                    "event of %s has several minimal supersets" % (g.infosets[0],)
                )
            if minimal:
                self.parent[g.index] = minimal[0].index

        # Own reachability per infoset, as index sets.
        self.reach = {
            h: frozenset(s.index for s in game.strategies_reaching(player, h))
            for h in self.infosets
        }
        self.own = game.strategies(player)
        self._payoff = {}
        self._pi = game.players.index(player)

    def payoff(self, own_index, t):
        """u_i of the profile (own strategy, opponent combo t)."""
        key = (own_index, t)
        v = self._payoff.get(key)
        if v is None:
            combo = self.combos[t]
            prof = {s.player: s for s in combo}
            prof[self.player] = self.own[own_index]
            leaf = self.game.outcome(prof)
            v = leaf.payoffs[self._pi]
            self._payoff[key] = v
        return v

    def combo_label(self, t):
        return ",".join(
            "%s=%s" % (j, s.name) for j, s in zip(self.opponents, self.combos[t])
        )

    def ancestors(self, gi):
        out = []
        p = self.parent[gi]
        while p is not None:
            out.append(p)
            p = self.parent[p]
        return out


class _Group:
    __slots__ = ("index", "event", "infosets", "csorted")

    def __init__(self, index, event, infosets, csorted):
        self.index = index
        self.event = event
        self.infosets = infosets
        self.csorted = csorted


class ConditionalBeliefs:
    """One conditional distribution per own infoset, exact rationals."""

    def __init__(self, space, table):
        self.space = space
        self.table = {h: dict(table[h]) for h in space.infosets}

    @property
    def player(self):
        return self.space.player

    def prob(self, infoset, t):
        return self.table[infoset].get(t, ZERO)

    def support(self, infoset):
        return sorted(t for t, w in self.table[infoset].items() if w > 0)

    def mass(self, infoset, ts):
        row = self.table[infoset]
        return sum((row.get(t, ZERO) for t in ts), ZERO)

    def as_labels(self):
        out = {}
        for h in self.space.infosets:
            out[h] = {
                self.space.combo_label(t): self.table[h][t]
                for t in self.support(h)
            }
        return out

    def __repr__(self):
        parts = []
        for h in self.space.infosets:
            row = ", ".join(
                "%s:%s" % (self.space.combo_label(t), self.table[h][t])
                for t in self.support(h)
            )
            parts.append("%s{%s}" % (h, row))
        return "ConditionalBeliefs(%s)" % "; ".join(parts)


def point_cps(game, player, choice):
    """Point beliefs: choice maps each infoset to one opponent combo.

    A combo may be an index into space.combos, a tuple of Strategy objects,
    or a dict player -> Strategy.
    """
    sp = space_for(game, player)
    table = {}
    for h in sp.infosets:
        t = _combo_index(sp, choice[h])
        if t not in sp.event[h]:
            raise DomainMismatch("combo not in conditioning event of %s" % (h,))
        table[h] = {t: ONE}
    return ConditionalBeliefs(sp, table)


def _combo_index(space, combo):
    if isinstance(combo, int):
        return combo
    if isinstance(combo, dict):
        combo = tuple(combo[j] for j in space.opponents)
    return space.index_of[
        tuple(s if isinstance(s, int) else s.index for s in combo)
    ]


def lexicographic_cps(game, player, order):
    """The CPS putting mass 1, at each infoset, on the first order entry in
    its conditioning event. Valid for every ordering of all opponent combos."""
    sp = space_for(game, player)
    seen = list(order)
    rest = [t for t in range(len(sp.combos)) if t not in set(seen)]
    full = seen + rest
    table = {}
    for h in sp.infosets:
        ev = sp.event[h]
        first = next(t for t in full if t in ev)
        table[h] = {first: ONE}
    return ConditionalBeliefs(sp, table)


def cps_from_table(game, player, rows):
    """Build beliefs from {infoset: {combo: weight}} with flexible combo keys."""
    sp = space_for(game, player)
    table = {}
    for h in sp.infosets:
        table[h] = {}
        for combo, w in rows[h].items():
            table[h][_combo_index(sp, combo)] = Fraction(w)
    return ConditionalBeliefs(sp, table)


def is_valid_cps(game, player, cps):
    return explain_invalid_cps(game, player, cps) is None


def explain_invalid_cps(game, player, cps):
    """None if the system satisfies CPS-1..3; else a short reason string."""
    sp = space_for(game, player)
    for h in sp.infosets:
        if h not in cps.table:
            return "no conditional at %s" % (h,)
        row = cps.table[h]
        total = ZERO
        for t, w in row.items():
            if w < 0:
                return "negative weight at %s" % (h,)
            if w > 0 and t not in sp.event[h]:
                raise DomainMismatch("mass outside conditioning event at %s" % (h,))
            total += w
        if total != 1:
            return "conditional at %s sums to %s" % (h, total)
    # Chain rule over every nested (or equal) pair of conditioning events.
    for ha in sp.infosets:
        for hb in sp.infosets:
            if ha == hb or not (sp.event[hb] <= sp.event[ha]):
                continue
            mass = cps.mass(ha, sp.event[hb])
            for t in sp.event[hb]:
                if cps.prob(hb, t) * mass != cps.prob(ha, t):
                    return "chain rule fails between %s and %s" % (ha, hb)
    return None


class MandateItem:
    """A labeled support obligation: at each listed infoset, conditional mass
    must be 1 on the allowed combo set. Infosets not listed are unconstrained
    (the obligation is inactive there)."""

    __slots__ = ("label", "allowed")

    def __init__(self, label, allowed):
        self.label = label
        self.allowed = {h: frozenset(ts) for h, ts in allowed.items()}

    def key(self):
        return tuple(sorted((h, tuple(sorted(ts))) for h, ts in self.allowed.items()))

    def __repr__(self):
        return "MandateItem(%r)" % (self.label,)


def strong_belief_mandate(game, player, label, opponent, targets):
    """Strong belief in a set of one opponent's strategies.

    Active at h iff some target strategy of the opponent allows h; there the
    allowed combos are those whose opponent component is a target.
    """
    sp = space_for(game, player)
    tset = frozenset(s.index for s in targets)
    jpos = sp.opp_pos[opponent]
    allowed = {}
    for h in sp.infosets:
        reach_j = frozenset(
            s.index for s in game.strategies_reaching(opponent, h)
        )
        if not (tset & reach_j):
            continue
        allowed[h] = frozenset(
            t for t in sp.event[h] if sp.combos[t][jpos].index in tset
        )
    return MandateItem(label, allowed)


def joint_strong_belief_mandate(game, player, label, targets_by_player):
    """Correlated variant: strong belief in the product of opponent sets,
    active where the joint set meets the conditioning event."""
    sp = space_for(game, player)
    tsets = {
        sp.opp_pos[j]: frozenset(s.index for s in ss)
        for j, ss in targets_by_player.items()
    }
    hits = frozenset(
        t
        for t in range(len(sp.combos))
        if all(sp.combos[t][pos].index in ts for pos, ts in tsets.items())
    )
    allowed = {}
    for h in sp.infosets:
        inter = hits & sp.event[h]
        if inter:
            allowed[h] = inter
    return MandateItem(label, allowed)


def strongly_believes(game, player, cps, item_or_opponent, targets=None):
    """Check a strong-belief obligation against a concrete belief system."""
    if targets is not None:
        item = strong_belief_mandate(game, player, "", item_or_opponent, targets)
    else:
        item = item_or_opponent
    for h, allowed in item.allowed.items():
        if cps.mass(h, allowed) != 1:
            return False
    return True


def sequential_best_reply(game, player, strategy, cps):
    """Def.-2 optimality: best at every own infoset the strategy reaches."""
    sp = space_for(game, player)
    si = strategy.index
    for h in sp.infosets:
        if si not in sp.reach[h]:
            continue
        row = cps.table[h]
        mine = sum((w * sp.payoff(si, t) for t, w in row.items()), ZERO)
        for alt in sp.reach[h]:
            if alt == si:
                continue
            val = sum((w * sp.payoff(alt, t) for t, w in row.items()), ZERO)
            if val > mine:
                return False
    return True


def best_replies(game, player, cps):
    return [
        s
        for s in game.strategies(player)
        if sequential_best_reply(game, player, s, cps)
    ]


def clause_row(space, clause):
    """Flatten one restriction clause into (coefs over the event, op, rhs)."""
    ev = space.event[clause.infoset]
    coefs = {}
    for t in ev:
        by_player = {s.player: s for s in space.combos[t]}
        acc = ZERO
        for coef, event in clause.terms:
            if event.matches(by_player):
                acc += coef
        if acc:
            coefs[t] = acc
    op = {"<=": lp.LE, ">=": lp.GE, "=": lp.EQ}[clause.op]
    return coefs, op, Fraction(clause.rhs)


def empty_restriction_infosets(game, player, clauses):
    """Infosets whose joint clause polytope is empty (within its simplex)."""
    sp = space_for(game, player)
    out = []
    for h, cls in clauses.items():
        if not cls:
            continue
        ev = sorted(sp.event[h])
        pos = {t: k for k, t in enumerate(ev)}
        rows = [([ONE] * len(ev), lp.EQ, ONE)]
        for cl in cls:
            coefs, op, rhs = clause_row(sp, cl)
            rows.append(({pos[t]: c for t, c in coefs.items()}, op, rhs))
        if lp.feasible(len(ev), rows) is None:
            out.append(h)
    return out


class _Bundle:
    """Per-slot obligations, organized by event group."""

    def __init__(self, space):
        self.space = space
        self.allowed = {}       # group index -> set of combos (intersection)
        self.rows = {}          # group index -> [(coefs, op, rhs)]
        self.rationality = {}   # group index -> [diff coef dicts, >= 0]
        self.point = {}         # group index -> {t: Fraction} pinned conditional
        self.strategy_index = None

    def add_mandates(self, items):
        for item in items:
            for h, ts in item.allowed.items():
                gi = self.space.group_of[h]
                cur = self.allowed.get(gi)
                self.allowed[gi] = set(ts) if cur is None else (cur & ts)

    def add_clauses(self, clauses):
        for h, cls in clauses.items():
            gi = self.space.group_of[h]
            ev = self.space.groups[gi].event
            for cl in cls:
                coefs, op, rhs = clause_row(self.space, cl)
                support = self._as_support(ev, coefs, op, rhs)
                if support is not None:
                    cur = self.allowed.get(gi)
                    self.allowed[gi] = (
                        set(support) if cur is None else (cur & support)
                    )
                    continue
                self.rows.setdefault(gi, []).append((coefs, op, rhs))

    @staticmethod
    def _as_support(event, coefs, op, rhs):
        """Recognize clauses that just pin the support of the conditional.

        Unit-coefficient mass of 1 on a set M forces support inside M; mass
        of 0 forces support outside M. Returns the allowed set or None.
        """
        if any(c != 1 for c in coefs.values()):
            return None
        hit = frozenset(coefs)
        if rhs == 1 and op in (lp.EQ, lp.GE):
            return hit
        if rhs == 0 and op in (lp.EQ, lp.LE):
            return frozenset(event) - hit
        return None

    def add_rationality(self, strategy_index):
        sp = self.space
        self.strategy_index = strategy_index
        for h in sp.infosets:
            if strategy_index not in sp.reach[h]:
                continue
            gi = sp.group_of[h]
            for alt in sorted(sp.reach[h]):
                if alt == strategy_index:
                    continue
                diff = {}
                for t in sp.event[h]:
                    d = sp.payoff(strategy_index, t) - sp.payoff(alt, t)
                    if d:
                        diff[t] = d
                self.rationality.setdefault(gi, []).append(diff)

    def add_point(self, infoset, conditional):
        gi = self.space.group_of[infoset]
        self.point[gi] = {t: Fraction(w) for t, w in conditional.items()}

    def satisfied_by(self, cps):
        """Exact check of every obligation against a concrete system."""
        sp = self.space
        for gi, ts in self.allowed.items():
            h = sp.groups[gi].infosets[0]
            if cps.mass(h, ts) != 1:
                return False
        for gi, rows in self.rows.items():
            h = sp.groups[gi].infosets[0]
            for coefs, op, rhs in rows:
                val = sum((cps.prob(h, t) * c for t, c in coefs.items()), ZERO)
                if op == lp.LE and val > rhs:
                    return False
                if op == lp.GE and val < rhs:
                    return False
                if op == lp.EQ and val != rhs:
                    return False
        for gi, diffs in self.rationality.items():
            h = sp.groups[gi].infosets[0]
            for diff in diffs:
                if sum((cps.prob(h, t) * d for t, d in diff.items()), ZERO) < 0:
                    return False
        for gi, pinned in self.point.items():
            h = sp.groups[gi].infosets[0]
            ev = sp.event[h]
            for t in ev:
                if cps.prob(h, t) != pinned.get(t, ZERO):
                    return False
        return True


def _point_candidates(space, bundles):
    """Orderings for the lexicographic fast path, most promising first."""
    n = len(space.combos)
    score = [0] * n
    for b in bundles:
        for ts in b.allowed.values():
            for t in ts:
                score[t] += 1
    base = sorted(range(n), key=lambda t: (-score[t], t))
    for t0 in base:
        yield [t0] + [t for t in base if t != t0]


def _try_point(space, bundles, order):
    """Evaluate one lexicographic candidate against all bundles at once."""
    table = {}
    for g in space.groups:
        first = next(t for t in order if t in g.event)
        for h in g.infosets:
            table[h] = {first: ONE}
    cps = ConditionalBeliefs(space, table)
    for b in bundles:
        if b.point:
            return None
        if not b.satisfied_by(cps):
            return None
    return cps


def _solve_patterns(space, bundles, shared):
    """Core search. bundles: one per slot; shared: group indices whose
    conditionals must coincide across slots. Returns a list of systems (one
    per slot) or None."""
    groups = space.groups
    nslots = len(bundles)

    for gi in shared:
        p = space.parent[gi]
        if p is not None and p not in shared:
            raise UnsupportedBeliefStructure(
                "agreement events are not upward-closed in the inclusion forest"
            )

    order = [g.index for g in groups]  # already topological (size-sorted)
    edges = [(gi, space.parent[gi]) for gi in order if space.parent[gi] is not None]

    # One assignment = for every slot and group, the block whose restriction
    # to the group's event carries the conditional. Blocks are created at
    # pattern roots; shared blocks serve all slots.
    results = [None]

    def descend(k, block_of, fresh, zero_rows, eps_rows):
        if results[0] is not None:
            return
        if k == len(order):
            found = _solve_one(space, bundles, block_of, fresh, zero_rows, eps_rows)
            if found is not None:
                results[0] = found
            return
        gi = order[k]
        par = space.parent[gi]
        if par is None:
            if gi in shared:
                key = ("sh", gi)
                b2 = dict(block_of)
                for s in range(nslots):
                    b2[(s, gi)] = key
                descend(k + 1, b2, fresh + [key], zero_rows, eps_rows)
            else:
                b2 = dict(block_of)
                keys = []
                for s in range(nslots):
                    key = (s, gi)
                    b2[(s, gi)] = key
                    keys.append(key)
                descend(k + 1, b2, fresh + keys, zero_rows, eps_rows)
            return

        parent_blocks = [block_of[(s, par)] for s in range(nslots)]
        shared_parent = len(set(parent_blocks)) == 1
        ev = groups[gi].event

        if shared_parent:
            pb = parent_blocks[0]
            # positive mass: inherit (conditionals stay equal across slots)
            b2 = dict(block_of)
            for s in range(nslots):
                b2[(s, gi)] = pb
            descend(k + 1, b2, fresh, zero_rows, eps_rows + [(pb, ev)])
            if results[0] is not None:
                return
            # zero mass: parent drops the event; slots restart
            zr = zero_rows + [(pb, ev)]
            b2 = dict(block_of)
            if gi in shared:
                key = ("sh", gi)
                for s in range(nslots):
                    b2[(s, gi)] = key
                descend(k + 1, b2, fresh + [key], zr, eps_rows)
            else:
                keys = []
                for s in range(nslots):
                    key = (s, gi)
                    b2[(s, gi)] = key
                    keys.append(key)
                descend(k + 1, b2, fresh + keys, zr, eps_rows)
        else:
            # parents already diverged; guard guarantees gi is not shared
            for flags in product((1, 0), repeat=nslots):
                if results[0] is not None:
                    return
                b2 = dict(block_of)
                zr = list(zero_rows)
                er = list(eps_rows)
                keys = []
                for s in range(nslots):
                    pb = block_of[(s, par)]
                    if flags[s]:
                        b2[(s, gi)] = pb
                        er.append((pb, ev))
                    else:
                        key = (s, gi)
                        b2[(s, gi)] = key
                        keys.append(key)
                        zr.append((pb, ev))
                descend(k + 1, b2, fresh + keys, zr, er)

    descend(0, {}, [], [], [])
    return results[0]


def _solve_one(space, bundles, block_of, fresh, zero_rows, eps_rows):
    groups = space.groups
    nslots = len(bundles)

    block_group = {key: key[1] for key in fresh}

    # Variables forced to zero (pattern zero-mass edges, support mandates)
    # are dropped from the program entirely rather than constrained.
    zeroed = set()
    for key, ev in zero_rows:
        for t in ev:
            zeroed.add((key, t))
    for s, b in enumerate(bundles):
        for gi, ts in b.allowed.items():
            key = block_of[(s, gi)]
            for t in groups[gi].event - ts:
                zeroed.add((key, t))

    cols = {}
    ncols = 0
    for key in fresh:
        live = [
            t for t in groups[block_group[key]].csorted if (key, t) not in zeroed
        ]
        if not live:
            return None  # the block cannot carry any mass
        for t in live:
            cols[(key, t)] = ncols
            ncols += 1
    eps = ncols
    ncols += 1

    def term(key, t):
        return cols.get((key, t))

    rows = []
    for key in fresh:
        r = {}
        for t in groups[block_group[key]].csorted:
            c = term(key, t)
            if c is not None:
                r[c] = ONE
        rows.append((r, lp.EQ, ONE))

    seen_eps = set()
    for key, ev in eps_rows:
        mark = (key, tuple(sorted(ev)))
        if mark in seen_eps:
            continue
        seen_eps.add(mark)
        r = {}
        for t in ev:
            c = term(key, t)
            if c is not None:
                r[c] = ONE
        if not r:
            return None  # positive mass demanded on a fully zeroed event
        r[eps] = -ONE
        rows.append((r, lp.GE, ZERO))
    rows.append(({eps: ONE}, lp.LE, ONE))

    for s, b in enumerate(bundles):
        for gi, rws in b.rows.items():
            key = block_of[(s, gi)]
            ev = groups[gi].event
            for coefs, op, rhs in rws:
                r = {}
                for t in ev:
                    c = coefs.get(t, ZERO) - rhs
                    if not c:
                        continue
                    col = term(key, t)
                    if col is not None:
                        r[col] = c
                rows.append((r, op, ZERO))
        for gi, diffs in b.rationality.items():
            key = block_of[(s, gi)]
            for diff in diffs:
                r = {}
                for t, d in diff.items():
                    col = term(key, t)
                    if col is not None:
                        r[col] = d
                rows.append((r, lp.GE, ZERO))
        for gi, pinned in b.point.items():
            key = block_of[(s, gi)]
            ev = groups[gi].event
            for t in ev:
                target = pinned.get(t, ZERO)
                col = term(key, t)
                if col is None:
                    if target:
                        return None  # pinned positive mass on a zeroed variable
                    continue
                r = {col: ONE}
                if target:
                    for t2 in ev:
                        col2 = term(key, t2)
                        if col2 is not None:
                            r[col2] = r.get(col2, ZERO) - target
                # An empty row means the pin cancelled against the block mass
                # (single live column); it holds identically.
                r = {c: v for c, v in r.items() if v}
                if r:
                    rows.append((r, lp.EQ, ZERO))

    res = lp.solve(ncols, {eps: ONE}, rows)
    if res.status != "optimal" or res.value <= 0:
        return None

    out = []
    for s in range(nslots):
        table = {}
        for g in groups:
            key = block_of[(s, g.index)]
            vals = {}
            for t in g.csorted:
                col = term(key, t)
                if col is not None and res.x[col]:
                    vals[t] = res.x[col]
            mass = sum(vals.values(), ZERO)
            conditional = {t: v / mass for t, v in vals.items()}
            for h in g.infosets:
                table[h] = conditional
        out.append(ConditionalBeliefs(space, table))
    return out


def _verify(game, player, bundles, shared, systems):
    sp = space_for(game, player)
    for b, cps in zip(bundles, systems):
        bad = explain_invalid_cps(game, player, cps)
        if bad is not None:
            raise AssertionError("engine produced invalid system: %s" % bad)
        if not b.satisfied_by(cps):
            raise AssertionError("engine witness violates its obligations")
        if b.strategy_index is not None:
            s = game.strategies(player)[b.strategy_index]
            if not sequential_best_reply(game, player, s, cps):
                raise AssertionError("engine witness is not optimal for %s" % s.name)
    for gi in shared:
        h = sp.groups[gi].infosets[0]
        first = systems[0].table[h]
        for cps in systems[1:]:
            if cps.table[h] != first:
                raise AssertionError("agreement violated at %s" % h)


def exists_admissible_cps(game, player, strategy, mandates=(), restrictions=None):
    """Witness CPS under which the strategy is a sequential best reply, all
    mandates hold, and every conditional satisfies the restriction clauses.
    Returns None when no such system exists.

    Raises EmptyPolytope when some infoset's clauses alone are unsatisfiable;
    that is a property of the restrictions, not of the strategy.
    """
    sp = space_for(game, player)
    clauses = _clause_map(game, player, restrictions)
    if clauses:
        empty = empty_restriction_infosets(game, player, clauses)
        if empty:
            raise EmptyPolytope(player, empty[0])

    bundle = _Bundle(sp)
    bundle.add_mandates(mandates)
    if clauses:
        bundle.add_clauses(clauses)
    bundle.add_rationality(strategy.index)

    for ts in bundle.allowed.values():
        if not ts:
            return None

    for order in _point_candidates(sp, [bundle]):
        cps = _try_point(sp, [bundle], order)
        if cps is not None:
            return cps

    found = _solve_patterns(sp, [bundle], frozenset())
    if found is None:
        return None
    _verify(game, player, [bundle], frozenset(), found)
    return found[0]


def _clause_map(game, player, restrictions):
    if restrictions is None:
        return {}
    if hasattr(restrictions, "clauses_for"):
        return restrictions.clauses_for(player)
    return restrictions


def coupled_admissible_pair(
    game,
    player,
    strategy,
    mu_mandates,
    bar_mandates,
    bar_restrictions,
    agreement_infosets,
):
    """Two belief systems (mu, bar) with equal conditionals on the agreement
    events; the strategy must be optimal under mu; bar carries the clause
    polytopes and its own mandates. Returns (mu, bar) or None."""
    sp = space_for(game, player)
    clauses = _clause_map(game, player, bar_restrictions)
    if clauses:
        empty = empty_restriction_infosets(game, player, clauses)
        if empty:
            raise EmptyPolytope(player, empty[0])

    mu = _Bundle(sp)
    mu.add_mandates(mu_mandates)
    mu.add_rationality(strategy.index)

    bar = _Bundle(sp)
    bar.add_mandates(bar_mandates)
    if clauses:
        bar.add_clauses(clauses)

    for b in (mu, bar):
        for ts in b.allowed.values():
            if not ts:
                return None

    shared = frozenset(sp.group_of[h] for h in agreement_infosets)

    # Fast path: one system satisfying both sides serves as mu = bar.
    merged = _Bundle(sp)
    merged.allowed = dict(mu.allowed)
    for gi, ts in bar.allowed.items():
        cur = merged.allowed.get(gi)
        merged.allowed[gi] = set(ts) if cur is None else (cur & ts)
    merged.rows = {gi: list(r) for gi, r in bar.rows.items()}
    merged.rationality = mu.rationality
    merged.strategy_index = mu.strategy_index
    if all(ts for ts in merged.allowed.values()):
        for order in _point_candidates(sp, [merged]):
            cps = _try_point(sp, [merged], order)
            if cps is not None:
                return cps, cps

    found = _solve_patterns(sp, [mu, bar], shared)
    if found is None:
        return None
    _verify(game, player, [mu, bar], shared, found)
    return found[0], found[1]


def cps_in_agreement_closure(
    game, player, cps, bar_mandates, bar_restrictions, agreement_infosets
):
    """Does some system satisfying the bar obligations agree with the given
    one on every agreement event? Implements implicit restriction membership."""
    sp = space_for(game, player)
    clauses = _clause_map(game, player, bar_restrictions)
    bar = _Bundle(sp)
    bar.add_mandates(bar_mandates)
    if clauses:
        bar.add_clauses(clauses)
    for ts in bar.allowed.values():
        if not ts:
            return False
    seen = set()
    for h in agreement_infosets:
        gi = sp.group_of[h]
        if gi in seen:
            continue
        seen.add(gi)
        bar.add_point(h, cps.table[h])
    shared = frozenset()
    found = _solve_patterns(sp, [bar], shared)
    if found is None:
        return False
    _verify(game, player, [bar], shared, found)
    return True
