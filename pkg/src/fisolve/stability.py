"""Mixed strategies, equilibrium checks, and trembling perturbations.

This module works on the normal form induced by a game tree, in floating
point: the profiles of interest involve irrational weights, so the exact
rational regime of the solver modules does not apply here. Tolerances are
explicit arguments with conservative defaults (1e-9 for equilibrium checks,
1e-12 for arithmetic identities).

A perturbation substitutes every pure strategy with a mixture that trembles
onto a fixed completely mixed profile. The lab answers spot questions about
a candidate equilibrium set: does the perturbed game still have an
equilibrium near it? Claims are checked against declared finite families
only; no universal quantifier over perturbations is decided here.

Scenario files (JSON) bundle named profiles, perturbation families, and a
list of checks; weights may be strings like "1 - 1/sqrt(2)" which are
evaluated with a tiny arithmetic interpreter.
"""

import ast
import itertools
import json
import math

import numpy as np
from scipy.optimize import least_squares


class StabilityError(Exception):
    pass


class SearchBudgetExceeded(StabilityError):
    """Support enumeration would exceed the configured budget."""


class MixedStrategy:
    """One player's weights over their full strategies, by strategy name."""

    def __init__(self, game, player, weights, tol=1e-12):
        names = [s.name for s in game.strategies(player)]
        vec = np.zeros(len(names))
        for name, w in weights.items():
            if name not in names:
                raise StabilityError(
                    "%s has no strategy named %s" % (player, name)
                )
            vec[names.index(name)] = float(w)
        if vec.min() < -tol:
            raise StabilityError("negative weight for %s" % player)
        if abs(vec.sum() - 1.0) > max(tol, 1e-12):
            raise StabilityError(
                "weights of %s sum to %r, not 1" % (player, vec.sum())
            )
        self.game = game
        self.player = player
        self.names = names
        self.vector = np.clip(vec, 0.0, None)

    def weight(self, name):
        return float(self.vector[self.names.index(name)])

    def as_dict(self):
        return {
            n: float(w) for n, w in zip(self.names, self.vector) if w > 0
        }

    def __repr__(self):
        inside = ", ".join(
            "%s:%.6g" % (n, w) for n, w in self.as_dict().items()
        )
        return "MixedStrategy(%s; %s)" % (self.player, inside)


class NormalForm:
    """Payoff tensors of the induced normal form, one per player."""

    def __init__(self, game, tensors):
        self.game = game
        self.players = game.players
        self.shape = tuple(len(game.strategies(p)) for p in game.players)
        self.tensors = tensors

    @classmethod
    def from_game(cls, game):
        shape = tuple(len(game.strategies(p)) for p in game.players)
        tensors = {p: np.zeros(shape) for p in game.players}
        lists = [game.strategies(p) for p in game.players]
        for combo in itertools.product(*lists):
            idx = tuple(s.index for s in combo)
            leaf = game.outcome({s.player: s for s in combo})
            for k, p in enumerate(game.players):
                tensors[p][idx] = float(leaf.payoffs[k])
        return cls(game, tensors)


def normal_form(game):
    nf = getattr(game, "_normal_form", None)
    if nf is None:
        nf = NormalForm.from_game(game)
        game._normal_form = nf
    return nf


def _as_nf(game_or_nf):
    if isinstance(game_or_nf, NormalForm):
        return game_or_nf
    return normal_form(game_or_nf)


def _vectors(nf, profile):
    out = []
    for p in nf.players:
        mixed = profile[p]
        vec = mixed.vector if isinstance(mixed, MixedStrategy) else np.asarray(mixed)
        out.append(vec)
    return out


def expected_utility(game_or_nf, profile, player):
    """Expectation of the player's payoff under independent mixing."""
    nf = _as_nf(game_or_nf)
    vecs = _vectors(nf, profile)
    operands = [nf.tensors[player], list(range(len(nf.players)))]
    for axis, vec in enumerate(vecs):
        operands.extend([vec, [axis]])
    operands.append([])
    return float(np.einsum(*operands))


def pure_values(game_or_nf, profile, player):
    """Utility of each of the player's pure strategies vs the others' mix."""
    nf = _as_nf(game_or_nf)
    vecs = _vectors(nf, profile)
    axis = nf.players.index(player)
    operands = [nf.tensors[player], list(range(len(nf.players)))]
    for k, vec in enumerate(vecs):
        if k != axis:
            operands.extend([vec, [k]])
    operands.append([axis])
    return np.einsum(*operands)


def is_nash(game_or_nf, profile, tol=1e-9):
    """True plus per-player regret when no pure deviation gains above tol."""
    nf = _as_nf(game_or_nf)
    regrets = {}
    ok = True
    for p in nf.players:
        values = pure_values(nf, profile, p)
        current = float(values @ _vectors(nf, profile)[nf.players.index(p)])
        regret = max(0.0, float(values.max()) - current)
        regrets[p] = regret
        if regret > tol:
            ok = False
    return ok, regrets


class PerturbationSpec:
    """Completely mixed tremble targets with per-player magnitudes.

    deltas may be a scalar (shared by all players) or a per-player map;
    magnitudes of zero are allowed and leave the game unchanged.
    """

    def __init__(self, sigma_tilde, deltas, delta0=None, epsilon=None):
        self.sigma_tilde = sigma_tilde
        players = list(sigma_tilde)
        if not isinstance(deltas, dict):
            deltas = {p: float(deltas) for p in players}
        self.deltas = deltas
        self.delta0 = delta0
        self.epsilon = epsilon
        for p, mixed in sigma_tilde.items():
            if np.min(mixed.vector) <= 0:
                raise StabilityError(
                    "tremble target of %s is not completely mixed" % p
                )
            d = self.deltas.get(p, 0.0)
            if d < 0 or (delta0 is not None and d > delta0):
                raise StabilityError("tremble magnitude %r out of range" % d)


def perturb_game(game_or_nf, spec):
    """Replace each pure strategy by its trembled mixture, per player."""
    nf = _as_nf(game_or_nf)
    tensors = {}
    mats = []
    for axis, p in enumerate(nf.players):
        n = nf.shape[axis]
        d = spec.deltas.get(p, 0.0)
        target = spec.sigma_tilde[p].vector
        mats.append((1.0 - d) * np.eye(n) + d * np.tile(target, (n, 1)))
    for p in nf.players:
        t = nf.tensors[p]
        for axis, m in enumerate(mats):
            t = np.moveaxis(np.tensordot(m, t, axes=([1], [axis])), 0, axis)
        tensors[p] = t
    return NormalForm(nf.game, tensors)


def _support_orders(n, target_vec, cap):
    """Supports of size <= cap, nearest to the target support first."""
    tgt = frozenset(int(i) for i in np.nonzero(target_vec > 1e-12)[0])
    subsets = []
    for size in range(1, min(cap, n) + 1):
        subsets.extend(itertools.combinations(range(n), size))
    subsets.sort(key=lambda s: (len(tgt.symmetric_difference(s)), len(s), s))
    return subsets


def find_equilibrium_near(
    game_or_nf,
    target,
    epsilon,
    tol=1e-9,
    support_cap=3,
    budget=20000,
):
    """Search for a Nash profile within epsilon (max-norm over all pure
    strategy weights) of the target, by support enumeration plus a local
    root find on the indifference and feasibility conditions. Returns a
    profile dict or None. Raises SearchBudgetExceeded when the support
    grid is larger than the budget."""
    nf = _as_nf(game_or_nf)
    target_vecs = _vectors(nf, target)
    orders = [
        _support_orders(nf.shape[k], target_vecs[k], support_cap)
        for k in range(len(nf.players))
    ]
    total = 1
    for o in orders:
        total *= len(o)
    if total > budget:
        raise SearchBudgetExceeded(
            "%d support combinations exceed the budget of %d" % (total, budget)
        )

    for combo in itertools.product(*orders):
        # Quick reject: the target puts weight above epsilon outside the
        # support, so nothing on this support can be epsilon-close.
        bad = False
        for k, supp in enumerate(combo):
            outside = [
                i for i in range(nf.shape[k]) if i not in supp
            ]
            if outside and float(np.max(target_vecs[k][outside])) > epsilon:
                bad = True
                break
        if bad:
            continue
        found = _solve_support(nf, combo, target_vecs, tol)
        if found is None:
            continue
        close = all(
            float(np.max(np.abs(found[k] - target_vecs[k]))) <= epsilon
            for k in range(len(nf.players))
        )
        if not close:
            continue
        return {
            p: MixedStrategy(
                nf.game,
                p,
                {
                    s.name: float(found[k][s.index])
                    for s in nf.game.strategies(p)
                    if found[k][s.index] > 0
                },
            )
            for k, p in enumerate(nf.players)
        }
    return None


def _solve_support(nf, supports, target_vecs, tol):
    nplayers = len(nf.players)
    sizes = [len(s) for s in supports]
    offsets = np.cumsum([0] + sizes)

    def unpack(z):
        vecs = []
        for k in range(nplayers):
            v = np.zeros(nf.shape[k])
            w = z[offsets[k] : offsets[k + 1]]
            v[list(supports[k])] = w
            vecs.append(v)
        return vecs

    def residual(z):
        vecs = unpack(z)
        res = []
        for k, p in enumerate(nf.players):
            w = z[offsets[k] : offsets[k + 1]]
            res.append(np.sum(w) - 1.0)
            res.extend(np.minimum(w, 0.0))
            values = pure_values(nf, {q: vecs[j] for j, q in enumerate(nf.players)}, p)
            supp = list(supports[k])
            base = values[supp[0]]
            for i in supp[1:]:
                res.append(values[i] - base)
            inside = float(np.min(values[supp]))
            for i in range(nf.shape[k]):
                if i not in supports[k]:
                    res.append(max(0.0, values[i] - inside))
        return np.asarray(res)

    start = []
    for k in range(nplayers):
        w = target_vecs[k][list(supports[k])]
        s = w.sum()
        if s < 1e-9:
            w = np.ones(sizes[k]) / sizes[k]
        else:
            w = w / s
        start.extend(w)
    sol = least_squares(residual, np.asarray(start), xtol=1e-14, ftol=1e-14, gtol=1e-14)
    if float(np.max(np.abs(residual(sol.x)))) > 1e-10:
        return None
    vecs = unpack(sol.x)
    vecs = [np.clip(v, 0.0, None) for v in vecs]
    vecs = [v / v.sum() for v in vecs]
    profile = {p: vecs[k] for k, p in enumerate(nf.players)}
    ok, _ = is_nash(nf, profile, tol)
    if not ok:
        return None
    return vecs


def _safe_expr(text):
    """Evaluate a small arithmetic expression: numbers, + - * /, sqrt."""
    node = ast.parse(str(text), mode="eval")

    def walk(n):
        if isinstance(n, ast.Expression):
            return walk(n.body)
        if isinstance(n, ast.Constant) and isinstance(n.value, (int, float)):
            return float(n.value)
        if isinstance(n, ast.BinOp) and isinstance(
            n.op, (ast.Add, ast.Sub, ast.Mult, ast.Div)
        ):
            a, b = walk(n.left), walk(n.right)
            if isinstance(n.op, ast.Add):
                return a + b
            if isinstance(n.op, ast.Sub):
                return a - b
            if isinstance(n.op, ast.Mult):
                return a * b
            return a / b
        if isinstance(n, ast.UnaryOp) and isinstance(n.op, ast.USub):
            return -walk(n.operand)
        if (
            isinstance(n, ast.Call)
            and isinstance(n.func, ast.Name)
            and n.func.id == "sqrt"
            and len(n.args) == 1
        ):
            return math.sqrt(walk(n.args[0]))
        raise StabilityError("unsupported expression: %r" % text)

    return walk(node)


def parse_scenario(text):
    return json.loads(text)


def _profile_from_doc(game, doc):
    return {
        player: MixedStrategy(
            game, player, {name: _safe_expr(w) for name, w in weights.items()}
        )
        for player, weights in doc.items()
    }


def run_scenario(game, scenario):
    """Execute scenario checks; returns rows (description, passed, detail)."""
    profiles = {
        name: _profile_from_doc(game, doc)
        for name, doc in scenario.get("profiles", {}).items()
    }
    rows = []
    for check in scenario.get("checks", ()):
        kind = check["check"]
        if kind == "nash":
            tol = float(check.get("tol", 1e-9))
            profile = profiles[check["profile"]]
            ok, regrets = is_nash(game, profile, tol)
            worst = max(regrets.values())
            rows.append((
                "nash %s (tol %g)" % (check["profile"], tol),
                ok,
                "max regret %.3g" % worst,
            ))
        elif kind == "indifference":
            tol = float(check.get("tol", 1e-9))
            profile = profiles[check["profile"]]
            player = check["player"]
            values = pure_values(game, profile, player)
            names = [s.name for s in game.strategies(player)]
            a, b = check["between"]
            gap = abs(values[names.index(a)] - values[names.index(b)])
            rows.append((
                "indifference %s: %s vs %s" % (check["profile"], a, b),
                gap < tol,
                "gap %.3g" % gap,
            ))
        elif kind == "perturbed-equilibrium":
            tremble = _profile_from_doc(game, check["tremble"])
            delta = float(check["delta"])
            eps = float(check["epsilon"])
            spec = PerturbationSpec(tremble, delta, delta0=delta, epsilon=eps)
            perturbed = perturb_game(game, spec)
            expect = check["expect"]
            hits = []
            for name in check["targets"]:
                found = find_equilibrium_near(perturbed, profiles[name], eps)
                hits.append((name, found))
            if expect == "found":
                ok = all(f is not None for _, f in hits)
            else:
                ok = all(f is None for _, f in hits)
            detail = ", ".join(
                "%s:%s" % (n, "hit" if f is not None else "none") for n, f in hits
            )
            rows.append((
                "perturbed equilibrium near {%s} delta %g eps %g expect %s"
                % (",".join(check["targets"]), delta, eps, expect),
                ok,
                detail,
            ))
        else:
            raise StabilityError("unknown check kind %r" % kind)
    return rows
