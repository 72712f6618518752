"""Iterated elimination procedures over admissible belief systems.

One kernel drives everything. A procedure is a start profile (one strategy
set per player), a profile of belief restrictions (linear clauses, or an
implicit closure described below), and a gate: extra strong-belief
obligations applied at every round. Each round keeps a strategy iff some
admissible system exists for it: sequentially optimal, strongly believing
every earlier round's survivors of each opponent separately, satisfying the
gate and the restrictions. All players update simultaneously; the fixed
point is certified by one confirmation round and always arrives within
1 + total strategy count rounds.

The three named procedures instantiate the kernel: rationalizability (full
start, no restrictions, no gate), strong delta rationalizability (full
start, restrictions on), and selective rationalizability (start at the
rationalizability fixed point, restrictions on, gate = strong belief in
every round of the base hierarchy). A fourth variant replaces the gate with
plain membership in the base fixed point; it provably matches selective
rationalizability when the restrictions only bind at infosets the fixed
point keeps reachable, and the suite checks that equality round by round.

rationalize_restrictions builds the closure of a restriction profile: the
set of systems that agree, on every infoset reachable at the base fixed
point, with some system that satisfies the original restrictions and the
full tower of strong-belief obligations of the earlier run. The closure is
kept implicit; the kernel queries it through coupled two-system searches.
"""

from . import beliefs
from .model import ProfileSet, compatible_infosets

EXPLAIN_DEFAULT = True


class PreconditionViolated(Exception):
    pass


class ProcedureSpec:
    """What the kernel needs: start sets, restrictions, gate, toggles."""

    def __init__(
        self,
        game,
        name,
        start=None,
        restrictions=None,
        gate_rounds=None,
        membership=None,
        correlated=False,
        explain=EXPLAIN_DEFAULT,
        base=None,
        workers=1,
    ):
        self.game = game
        self.name = name
        self.start = start if start is not None else ProfileSet.full(game)
        self.restrictions = restrictions
        self.gate_rounds = gate_rounds
        self.membership = membership
        self.correlated = correlated
        self.explain = explain
        self.base = base
        self.workers = max(1, int(workers))


class SolveTrace:
    def __init__(self, game, procedure):
        self.game = game
        self.procedure = procedure
        self.rounds = []
        self.eliminated = {}
        self.witnesses = {}
        self.fixed_point_round = None
        self.notes = []
        self.base = None

    @property
    def survivors(self):
        return self.rounds[-1]

    @property
    def outcomes(self):
        return self.survivors.outcomes()

    def eliminations_flat(self):
        out = []
        for n in sorted(self.eliminated):
            for (player, name), reason in sorted(self.eliminated[n].items()):
                out.append((n, player, name, reason))
        return out

    def __repr__(self):
        return "SolveTrace(%s, %d rounds, fixed at %s)" % (
            self.procedure,
            len(self.rounds),
            self.fixed_point_round,
        )


def _round_mandates(game, player, history, correlated):
    """G2: strong belief in each earlier round's survivors, per opponent.

    history: list of {player: tuple of Strategy} from round 0 up. Obligations
    whose target is the full strategy set are vacuous and skipped; identical
    target sets across rounds collapse to one item.
    """
    items = []
    seen = set()
    full_sizes = {p: len(game.strategies(p)) for p in game.players}
    for q, comp in enumerate(history):
        if correlated:
            targets = {
                j: comp[j]
                for j in game.players
                if j != player and len(comp[j]) < full_sizes[j]
            }
            if not targets:
                continue
            item = beliefs.joint_strong_belief_mandate(
                game, player, "round-%d survivors (joint)" % q, targets
            )
            if item.key() not in seen:
                seen.add(item.key())
                items.append(item)
            continue
        for j in game.players:
            if j == player or len(comp[j]) >= full_sizes[j]:
                continue
            item = beliefs.strong_belief_mandate(
                game, player, "round-%d survivors of %s" % (q, j), j, comp[j]
            )
            if item.key() not in seen:
                seen.add(item.key())
                items.append(item)
    return items


def _gate_mandates(game, player, gate_rounds, correlated):
    if not gate_rounds:
        return []
    items = _round_mandates(game, player, gate_rounds, correlated)
    for it in items:
        it.label = "base " + it.label
    return items


def generalized_solve(spec):
    game = spec.game
    trace = SolveTrace(game, spec.name)
    trace.base = spec.base
    trace.rounds.append(spec.start)

    dead = {}
    restrictions = spec.restrictions
    implicit = isinstance(restrictions, ImplicitRestrictions)
    for player in game.players:
        clauses = _declared(game, player, restrictions)
        if not clauses:
            continue
        bad = beliefs.empty_restriction_infosets(game, player, clauses)
        if bad:
            dead[player] = bad[0]
            trace.notes.append(
                "EmptyPolytope: restrictions at %s leave %s no belief; "
                "all strategies of %s eliminated in round 1" % (bad[0], player, player)
            )

    gate = {
        player: _gate_mandates(game, player, spec.gate_rounds, spec.correlated)
        for player in game.players
    }
    memo = {}
    limit = 1 + sum(len(game.strategies(p)) for p in game.players)
    pool = None
    if spec.workers > 1:
        from concurrent.futures import ThreadPoolExecutor

        for player in game.players:
            beliefs.space_for(game, player)
        pool = ThreadPoolExecutor(max_workers=spec.workers)

    try:
        _solve_rounds(spec, trace, gate, memo, limit, dead, pool)
    finally:
        if pool is not None:
            pool.shutdown()
    return trace


def _solve_rounds(spec, trace, gate, memo, limit, dead, pool):
    game = spec.game
    restrictions = spec.restrictions
    for n in range(1, limit + 1):
        prev = trace.rounds[-1]
        history = [
            {p: r.strategies(p) for p in game.players} for r in trace.rounds
        ]
        new_sets = {}
        elim = {}
        for player in game.players:
            if player in dead:
                for s in prev.strategies(player):
                    elim[(player, s.name)] = (
                        "restriction clauses at %s admit no belief" % dead[player]
                    )
                new_sets[player] = ()
                continue
            mandates = _round_mandates(game, player, history, spec.correlated)
            mandates.extend(gate[player])
            mkey = tuple(sorted(it.key() for it in mandates))
            candidates = []
            for s in prev.strategies(player):
                if spec.membership is not None and s.index not in spec.membership[player]:
                    elim[(player, s.name)] = "not in the base fixed point"
                    continue
                candidates.append(s)
            misses = [
                s for s in candidates if (player, s.index, mkey) not in memo
            ]
            if pool is not None and len(misses) > 1:
                results = list(
                    pool.map(
                        lambda s: _query(game, player, s, mandates, restrictions),
                        misses,
                    )
                )
            else:
                results = [
                    _query(game, player, s, mandates, restrictions)
                    for s in misses
                ]
            for s, witness in zip(misses, results):
                memo[(player, s.index, mkey)] = witness
            keep = []
            for s in candidates:
                witness = memo[(player, s.index, mkey)]
                if witness is None:
                    if spec.explain:
                        elim[(player, s.name)] = _explain(
                            game, player, s, mandates, restrictions
                        )
                    else:
                        elim[(player, s.name)] = "no admissible belief system"
                    continue
                keep.append(s)
                trace.witnesses[(player, s.name)] = witness
            new_sets[player] = tuple(keep)
        cur = ProfileSet(game, new_sets)
        trace.rounds.append(cur)
        if elim:
            trace.eliminated[n] = elim
        dead = {}
        if cur == prev:
            trace.fixed_point_round = n - 1
            break
    else:
        raise AssertionError("no fixed point within %d rounds" % limit)


def _declared(game, player, restrictions):
    if restrictions is None:
        return {}
    if isinstance(restrictions, ImplicitRestrictions):
        return restrictions.delta.clauses_for(player)
    return restrictions.clauses_for(player)


def _query(game, player, strategy, mandates, restrictions):
    if isinstance(restrictions, ImplicitRestrictions):
        pair = beliefs.coupled_admissible_pair(
            game,
            player,
            strategy,
            mandates,
            restrictions.bar_mandates[player],
            restrictions.delta.clauses_for(player),
            restrictions.agreement[player],
        )
        return None if pair is None else pair[0]
    return beliefs.exists_admissible_cps(
        game, player, strategy, mandates, restrictions
    )


def _explain(game, player, strategy, mandates, restrictions):
    """Name an obligation whose removal restores feasibility, if one exists."""
    for k in range(len(mandates)):
        rest = mandates[:k] + mandates[k + 1 :]
        if _query(game, player, strategy, rest, restrictions) is not None:
            return "blocked by obligation: %s" % mandates[k].label
    if restrictions is not None:
        if _query(game, player, strategy, mandates, None) is not None:
            if isinstance(restrictions, ImplicitRestrictions):
                return "blocked by the restriction closure"
            return "blocked by the belief restrictions"
    if _query(game, player, strategy, (), None) is None:
        return "no belief system makes this strategy sequentially optimal"
    return "jointly blocked by the obligations and restrictions"


def rationalizability(game, correlated=False, explain=EXPLAIN_DEFAULT, workers=1):
    spec = ProcedureSpec(
        game, "rationalizability", correlated=correlated, explain=explain,
        workers=workers,
    )
    return generalized_solve(spec)


def strong_delta_rationalizability(game, delta, explain=EXPLAIN_DEFAULT, workers=1):
    spec = ProcedureSpec(
        game, "strong-delta", restrictions=delta, explain=explain,
        workers=workers,
    )
    return generalized_solve(spec)


def selective_rationalizability(
    game, delta, base=None, explain=EXPLAIN_DEFAULT, workers=1
):
    if base is None:
        base = rationalizability(game, explain=explain, workers=workers)
    gate_rounds = [
        {p: r.strategies(p) for p in game.players} for r in base.rounds
    ]
    spec = ProcedureSpec(
        game,
        "selective",
        start=base.survivors,
        restrictions=delta,
        gate_rounds=gate_rounds,
        explain=explain,
        base=base,
        workers=workers,
    )
    return generalized_solve(spec)


def is_rationalizable_restriction(game, delta, base=None):
    """Sufficient syntactic test: every clause sits at an infoset that the
    base fixed point keeps reachable (all components alive there)."""
    if delta is None:
        return True
    if base is None:
        base = rationalizability(game, explain=False)
    fixed = {p: base.survivors.strategies(p) for p in game.players}
    for player in game.players:
        alive = set(compatible_infosets(game, player, fixed))
        for infoset in delta.clauses_for(player):
            if delta.clauses_for(player)[infoset] and infoset not in alive:
                return False
    return True


def solve_without_s3(game, delta, base=None, explain=EXPLAIN_DEFAULT, workers=1):
    if base is None:
        base = rationalizability(game, explain=explain, workers=workers)
    if not is_rationalizable_restriction(game, delta, base):
        raise PreconditionViolated(
            "restriction profile binds at infosets dead under the base fixed point"
        )
    membership = {
        p: frozenset(s.index for s in base.survivors.strategies(p))
        for p in game.players
    }
    spec = ProcedureSpec(
        game,
        "no-s3",
        start=base.survivors,
        restrictions=delta,
        membership=membership,
        explain=explain,
        base=base,
        workers=workers,
    )
    return generalized_solve(spec)


class ImplicitRestrictions:
    """Closure of a restriction profile under agreement at base-reachable
    infosets. Membership of a system mu: some system satisfying the original
    clauses plus the earlier run's full obligation tower must agree with mu
    at every infoset in the agreement set."""

    def __init__(self, game, delta, base, delta_trace):
        self.game = game
        self.delta = delta
        self.base = base
        self.delta_trace = delta_trace
        fixed = {p: base.survivors.strategies(p) for p in game.players}
        self.agreement = {
            p: tuple(compatible_infosets(game, p, fixed)) for p in game.players
        }
        base_rounds = [
            {p: r.strategies(p) for p in game.players} for r in base.rounds
        ]
        run_rounds = [
            {p: r.strategies(p) for p in game.players} for r in delta_trace.rounds
        ]
        self.bar_mandates = {}
        for player in game.players:
            items = _round_mandates(game, player, run_rounds, False)
            for it in items:
                it.label = "restricted-run " + it.label
            items.extend(_gate_mandates(game, player, base_rounds, False))
            seen = set()
            dedup = []
            for it in items:
                if it.key() not in seen:
                    seen.add(it.key())
                    dedup.append(it)
            self.bar_mandates[player] = dedup

    def contains(self, player, cps):
        return beliefs.cps_in_agreement_closure(
            self.game,
            player,
            cps,
            self.bar_mandates[player],
            self.delta.clauses_for(player),
            self.agreement[player],
        )


def rationalize_restrictions(game, delta, base=None, explain=EXPLAIN_DEFAULT):
    if base is None:
        base = rationalizability(game, explain=explain)
    run = selective_rationalizability(game, delta, base=base, explain=explain)
    if run.survivors.is_empty():
        raise PreconditionViolated(
            "the restricted procedure is empty; there is nothing to rationalize"
        )
    return ImplicitRestrictions(game, delta, base, run)


def own_reachable_infosets(game, player, strategies):
    """Infosets of the player that some listed own strategy reaches."""
    return compatible_infosets(game, player, {player: strategies})


def _follows(game, player, later, earlier):
    return later == earlier or earlier in game.own_history(later)


def check_composition_lemma(game, delta_trace, base):
    """Exhaustive check of the splice property on a finished restricted run.

    For every round n, player i, own infoset h that round-n survivors of i
    reach but the base fixed point does not keep reachable, whose nearest
    own predecessor is base-reachable: every base-fixed-point strategy of i
    reaching h must agree, from h onward, with some round-n survivor.
    Returns a list of violation descriptions; empty means the property holds.
    """
    violations = []
    fixed = {p: base.survivors.strategies(p) for p in game.players}
    for n, rnd in enumerate(delta_trace.rounds):
        for player in game.players:
            surv = rnd.strategies(player)
            if not surv:
                continue
            own_reach = set(own_reachable_infosets(game, player, surv))
            alive = set(compatible_infosets(game, player, fixed))
            pos = {h: k for k, h in enumerate(game.player_infosets[player])}
            for h in own_reach - alive:
                p_h = game.immediate_predecessor(h)
                if p_h is None or p_h not in alive:
                    continue
                later = [
                    h2 for h2 in game.player_infosets[player]
                    if _follows(game, player, h2, h)
                ]
                for s in base.survivors.strategies(player):
                    if s.index not in set(
                        x.index for x in game.strategies_reaching(player, h)
                    ):
                        continue
                    if not any(
                        all(
                            star.choices[pos[h2]] == s.choices[pos[h2]]
                            for h2 in later
                        )
                        for star in surv
                    ):
                        violations.append(
                            "round %d, %s, infoset %s, strategy %s has no "
                            "matching survivor from %s onward"
                            % (n, player, h, s.name, h)
                        )
    return violations
