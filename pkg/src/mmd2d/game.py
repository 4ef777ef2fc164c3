"""Beamwidth selection as a potential game, solved by log-linear learning.

Players are established D2D links; a player's action is the beamwidth both
of its endpoints adopt. Profiles are handled internally as integer arrays
indexing each player's sorted action list, and exposed as tuples of
radians.

Utilities are in bit/s. Learning temperatures apply to utilities divided by
``game.unit`` (1 Gbit/s by default), so ``tau = 1`` means one Gbit/s of
utility difference changes odds by a factor ``e``.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .channel import ChannelParams, gain_pattern, main_lobe_gain, path_loss
from .linkdyn import TimingBudget, alignment_efficiency, alignment_time, common_feasible_mask, \
    feasible_beamwidths, stability_time_array

REL_TOL = 1e-9


class OracleBudgetError(ValueError):
    """Raised when exhaustive enumeration would exceed the profile budget."""


@dataclass(frozen=True)
class UtilityParams:
    interference_threshold: float = 1e-12  # W (-90 dBm)
    unit: float = 1e9  # bit/s per utility unit seen by the learner
    penalty_scalar: Optional[float] = None  # bit/s; None = best interference-free rate of the link

    def __post_init__(self):
        if self.penalty_scalar is not None and self.penalty_scalar <= 0:
            raise ValueError("penalty scalar must be positive")
        if self.interference_threshold < 0:
            raise ValueError("interference threshold must be >= 0")
        if self.unit <= 0:
            raise ValueError("utility unit must be positive")


def _individual(sig, gam, window, penalty, demand, interference, noise, bandwidth):
    """Vectorized individual utility: rate minus the deadline penalty."""
    rate = gam * bandwidth * np.log2(1.0 + sig / (noise + interference))
    with np.errstate(divide="ignore", invalid="ignore"):
        t_data = np.where(demand > 0, demand / rate, 0.0)
        eps = np.abs(1.0 - window / t_data)
    late = t_data > window
    eps = np.where(rate > 0, np.minimum(eps, 1.0), 1.0)
    return rate - np.where(late, penalty * eps, 0.0)


class BeamwidthGame:
    """A beamwidth selection game over fixed geometry.

    Parameters are per player ``l``:

    ``actions[l]``      sorted feasible beamwidths (rad)
    ``signal[l]``       desired received power per action, unit fading (W)
    ``gamma[l]``        alignment efficiency per action
    ``window[l]``       stable time left after alignment per action (s)
    ``penalty[l]``      penalty scalar (bit/s)
    ``demand[l]``       bits to deliver
    ``neighbors[l]``    interacting players (symmetric)
    ``interference[(l, i)]`` power at receiver ``l`` from transmitter ``i``,
                        shape ``(len(actions[l]), len(actions[i]))`` (W)
    """

    def __init__(self, actions, signal, gamma, window, penalty, demand, neighbors, interference,
                 noise: float, bandwidth: float, unit: float = 1e9, links=None):
        self.actions = [np.asarray(a, dtype=float) for a in actions]
        self.signal = [np.asarray(s, dtype=float) for s in signal]
        self.gamma = [np.asarray(g, dtype=float) for g in gamma]
        self.window = [np.asarray(w, dtype=float) for w in window]
        self.penalty = np.asarray(penalty, dtype=float)
        self.demand = np.asarray(demand, dtype=float)
        self.neighbors = [tuple(sorted(int(i) for i in h)) for h in neighbors]
        self.interference = {k: np.asarray(v, dtype=float) for k, v in interference.items()}
        self.noise = float(noise)
        self.bandwidth = float(bandwidth)
        self.unit = float(unit)
        self.links = links
        for l, h in enumerate(self.neighbors):
            if not len(self.actions[l]):
                raise ValueError(f"player {l} has no feasible action")
            for i in h:
                if l not in self.neighbors[i]:
                    raise ValueError(f"neighborhoods are not symmetric ({l}, {i})")
                if (l, i) not in self.interference:
                    raise ValueError(f"missing interference table for ({l}, {i})")
        self._flatten()

    def _flatten(self) -> None:
        # flat copies of the per-player tables so the potential is a handful of numpy calls
        sizes = np.array([len(a) for a in self.actions], dtype=int)
        self._act_off = np.concatenate([[0], np.cumsum(sizes)[:-1]]).astype(int) if len(sizes) else sizes
        cat = lambda xs: np.concatenate(xs) if xs else np.zeros(0)  # noqa: E731
        self._sig, self._gam, self._win = cat(self.signal), cat(self.gamma), cat(self.window)
        edges = [(l, i) for l, h in enumerate(self.neighbors) for i in h]
        self._e_rx = np.array([e[0] for e in edges], dtype=int)
        self._e_tx = np.array([e[1] for e in edges], dtype=int)
        self._e_cols = sizes[self._e_tx] if edges else np.zeros(0, dtype=int)
        tables = [self.interference[e].ravel() for e in edges]
        self._e_off = np.concatenate([[0], np.cumsum([t.size for t in tables])[:-1]]).astype(int) \
            if edges else np.zeros(0, dtype=int)
        self._e_flat = cat(tables)

    @property
    def n_players(self) -> int:
        return len(self.actions)

    @property
    def sizes(self) -> tuple[int, ...]:
        return tuple(len(a) for a in self.actions)

    def values(self, idx) -> tuple[float, ...]:
        return tuple(float(self.actions[l][a]) for l, a in enumerate(idx))

    def indices(self, profile: Sequence[float]) -> np.ndarray:
        """Map a profile of beamwidths onto action indices (exact membership)."""
        out = np.empty(self.n_players, dtype=int)
        for l, phi in enumerate(profile):
            hits = np.flatnonzero(np.isclose(self.actions[l], phi, rtol=1e-12, atol=0.0))
            if not hits.size:
                raise ValueError(f"{phi} is not an action of player {l}")
            out[l] = hits[0]
        return out

    # --- utilities -------------------------------------------------------
    def interference_at(self, l: int, idx) -> float:
        return sum(self.interference[(l, i)][idx[l], idx[i]] for i in self.neighbors[l])

    def rate(self, l: int, idx) -> float:
        a = idx[l]
        return float(self.gamma[l][a] * self.bandwidth
                     * math.log2(1.0 + self.signal[l][a] / (self.noise + self.interference_at(l, idx))))

    def individual_utility(self, l: int, idx) -> float:
        a = idx[l]
        return float(_individual(self.signal[l][a], self.gamma[l][a], self.window[l][a], self.penalty[l],
                                 self.demand[l], self.interference_at(l, idx), self.noise, self.bandwidth))

    def penalty_active(self, l: int, idx) -> bool:
        r = self.rate(l, idx)
        if self.demand[l] <= 0:
            return False
        return (math.inf if r <= 0 else self.demand[l] / r) > self.window[l][idx[l]]

    def total_utility(self, l: int, idx) -> float:
        return self.individual_utility(l, idx) + sum(self.individual_utility(i, idx) for i in self.neighbors[l])

    def utilities(self, idx) -> np.ndarray:
        """Individual utility of every player at ``idx`` (vectorized)."""
        idx = np.asarray(idx, dtype=int)
        n = self.n_players
        vals = self._e_flat[self._e_off + idx[self._e_rx] * self._e_cols + idx[self._e_tx]]
        interf = np.bincount(self._e_rx, weights=vals, minlength=n) if vals.size else np.zeros(n)
        at = self._act_off + idx
        return _individual(self._sig[at], self._gam[at], self._win[at], self.penalty, self.demand,
                           interf, self.noise, self.bandwidth)

    def potential(self, idx) -> float:
        return float(self.utilities(idx).sum()) if self.n_players else 0.0

    def _u_over_own_actions(self, l: int, idx) -> np.ndarray:
        interf = np.zeros(len(self.actions[l]))
        for i in self.neighbors[l]:
            interf = interf + self.interference[(l, i)][:, idx[i]]
        return _individual(self.signal[l], self.gamma[l], self.window[l], self.penalty[l], self.demand[l],
                           interf, self.noise, self.bandwidth)

    def _u_neighbor_over(self, i: int, l: int, idx) -> np.ndarray:
        """Utility of neighbor ``i`` as a function of player ``l``'s action."""
        base = sum(self.interference[(i, j)][idx[i], idx[j]] for j in self.neighbors[i] if j != l)
        interf = base + self.interference[(i, l)][idx[i], :]
        a = idx[i]
        return _individual(self.signal[i][a], self.gamma[i][a], self.window[i][a], self.penalty[i],
                           self.demand[i], interf, self.noise, self.bandwidth)

    def total_utility_over_actions(self, l: int, idx) -> np.ndarray:
        """``U_l(a, a_-l)`` for every action ``a`` of player ``l``."""
        out = self._u_over_own_actions(l, idx)
        for i in self.neighbors[l]:
            out = out + self._u_neighbor_over(i, l, idx)
        return out

    # --- grid evaluation (oracle side) -----------------------------------
    def potential_grid(self, budget: int = 10 ** 7) -> np.ndarray:
        """Potential of every joint profile as an ``L``-dimensional array."""
        n = self.n_players
        total = math.prod(self.sizes) if n else 1
        if total > budget:
            raise OracleBudgetError(f"{total} joint profiles exceed the enumeration budget {budget}")
        grid = np.zeros(self.sizes if n else ())
        for l in range(n):
            axes = (l,) + self.neighbors[l]
            order = sorted(axes)
            shape = [1] * n
            for ax in order:
                shape[ax] = self.sizes[ax]

            def expand(arr, arr_axes):
                # place arr's axes at positions arr_axes in an n-dim broadcastable view
                perm = np.argsort(arr_axes)
                arr = np.transpose(arr, perm)
                sh = [1] * n
                for ax in sorted(arr_axes):
                    sh[ax] = self.sizes[ax]
                return arr.reshape(sh)

            interf = np.zeros([1] * n)
            for i in self.neighbors[l]:
                interf = interf + expand(self.interference[(l, i)], (l, i))
            u = _individual(expand(self.signal[l], (l,)), expand(self.gamma[l], (l,)),
                            expand(self.window[l], (l,)), self.penalty[l], self.demand[l],
                            interf, self.noise, self.bandwidth)
            grid = grid + np.broadcast_to(u, shape)
        return grid

    def feasible_value(self, l: int, phi: float) -> bool:
        """Whether an arbitrary beamwidth satisfies link ``l``'s constraints."""
        if self.links is None:
            return bool(np.any(np.isclose(self.actions[l], phi)))
        return self.links.feasible(l, phi)


@dataclass
class LinkGeometry:
    """Per-link quantities needed to rebuild constraints for arbitrary beamwidths."""
    distance: np.ndarray
    transverse_speed: np.ndarray
    timing: TimingBudget
    psi: float

    def stability(self, l: int, phi):
        return stability_time_array(self.distance[l], phi, self.transverse_speed[l],
                                    self.timing.misalignment_threshold)

    def feasible(self, l: int, phi: float) -> bool:
        return bool(feasible_beamwidths([phi], self.psi, self.psi, self.timing.t_pilot,
                                        lambda p: float(self.stability(l, p))))


def _link_offsets(tx_xy: np.ndarray, rx_xy: np.ndarray):
    """Distances and antenna offsets on every transmitter i -> receiver l path."""
    tx_bore = np.arctan2(rx_xy[:, 1] - tx_xy[:, 1], rx_xy[:, 0] - tx_xy[:, 0])
    rx_bore = np.arctan2(tx_xy[:, 1] - rx_xy[:, 1], tx_xy[:, 0] - rx_xy[:, 0])
    dx = rx_xy[:, None, 0] - tx_xy[None, :, 0]
    dy = rx_xy[:, None, 1] - tx_xy[None, :, 1]
    d = np.hypot(dx, dy)
    ang = np.arctan2(dy, dx)
    wrap = lambda t: np.remainder(t + math.pi, 2.0 * math.pi) - math.pi  # noqa: E731
    return d, wrap(ang - tx_bore[None, :]), wrap(ang + math.pi - rx_bore[:, None])


def neighborhoods(params: ChannelParams, tx_xy: np.ndarray, rx_xy: np.ndarray, widest: np.ndarray,
                  d_t: float, i_t: float, cross_los: Optional[np.ndarray] = None,
                  symmetric: bool = True) -> list[tuple[int, ...]]:
    """Interacting links of each link.

    Link ``i`` interacts with ``l`` when transmitter ``i`` lies within ``d_t``
    of receiver ``l``, has LOS to it, and its unit-fading interference with
    both ends at their widest beams is at least ``i_t``. The relation is then
    closed under symmetry.
    """
    n = len(tx_xy)
    if n == 0:
        return []
    d, off_tx, off_rx = _link_offsets(tx_xy, rx_xy)
    widest = np.asarray(widest, dtype=float)
    g = gain_pattern(widest[None, :], off_tx) * gain_pattern(widest[:, None], off_rx)
    safe_d = np.where(d > 0, d, 1.0)
    power = params.tx_power * g * path_loss(params, safe_d)
    los = np.ones((n, n), dtype=bool) if cross_los is None else np.asarray(cross_los, dtype=bool)
    rel = (d <= d_t) & los & (power >= i_t) & (d > 0)
    np.fill_diagonal(rel, False)
    if symmetric:
        rel = rel | rel.T
    return [tuple(int(i) for i in np.flatnonzero(rel[l])) for l in range(n)]


def build_game(params: ChannelParams, timing: TimingBudget, tx_xy: np.ndarray, rx_xy: np.ndarray,
               transverse_speed: np.ndarray, demand_bits: np.ndarray, action_set: Sequence[float],
               psi: float, d_t: float, uparams: UtilityParams = UtilityParams(),
               cross_los: Optional[np.ndarray] = None) -> tuple[BeamwidthGame, np.ndarray]:
    """Build the game for a set of links.

    Returns the game and the indices of links that kept at least one
    feasible action; infeasible links are not players.
    """
    tx_xy = np.asarray(tx_xy, dtype=float).reshape(-1, 2)
    rx_xy = np.asarray(rx_xy, dtype=float).reshape(-1, 2)
    n_all = len(tx_xy)
    d_link = np.hypot(*(tx_xy - rx_xy).T) if n_all else np.zeros(0)
    transverse_speed = np.asarray(transverse_speed, dtype=float)
    action_set = sorted(float(a) for a in action_set)

    grid = np.asarray(action_set)
    t_s_all = stability_time_array(d_link[:, None], grid[None, :], transverse_speed[:, None],
                                   timing.misalignment_threshold) if n_all else np.zeros((0, len(grid)))
    mask = common_feasible_mask(grid, psi, psi, timing.t_pilot, t_s_all)
    keep = [l for l in range(n_all) if mask[l].any()]
    actions = [grid[mask[l]] for l in keep]
    keep = np.array(keep, dtype=int)
    tx, rx = tx_xy[keep], rx_xy[keep]
    d_l, v_l = d_link[keep], transverse_speed[keep]
    demand = np.asarray(demand_bits, dtype=float)[keep]
    los = None if cross_los is None else np.asarray(cross_los, dtype=bool)[np.ix_(keep, keep)]
    n = len(keep)

    noise = params.noise_power
    # every quantity on the full action grid first, then cut down to each link's feasible actions
    g_peak = main_lobe_gain(grid)
    sig_all = params.tx_power * (g_peak * g_peak)[None, :] * np.asarray(path_loss(params, d_l)).reshape(-1, 1) \
        if n else np.zeros((0, len(grid)))
    safe = np.minimum(grid, psi)
    t_a_grid = np.asarray(alignment_time(psi, psi, safe, safe, timing.t_pilot), dtype=float)
    t_s_kept = t_s_all[keep]
    gam_all = np.asarray(alignment_efficiency(t_a_grid[None, :], t_s_kept), dtype=float).reshape(n, -1)
    rate_all = gam_all * params.bandwidth * np.log2(1.0 + sig_all / noise)
    m = mask[keep]
    signal = [sig_all[l][m[l]] for l in range(n)]
    gamma = [gam_all[l][m[l]] for l in range(n)]
    window = [(t_s_kept[l] - t_a_grid)[m[l]] for l in range(n)]
    penalty = [float(rate_all[l][m[l]].max()) if uparams.penalty_scalar is None else uparams.penalty_scalar
               for l in range(n)]

    widest = np.array([a[-1] for a in actions]) if n else np.zeros(0)
    hood = neighborhoods(params, tx, rx, widest, d_t, uparams.interference_threshold, los)
    interference = {}
    if n:
        d, off_tx, off_rx = _link_offsets(tx, rx)
        for l in range(n):
            for i in hood[l]:
                if los is not None and not los[l, i]:
                    interference[(l, i)] = np.zeros((len(actions[l]), len(actions[i])))
                    continue
                g_rx = gain_pattern(actions[l][:, None], off_rx[l, i])
                g_tx = gain_pattern(actions[i][None, :], off_tx[l, i])
                interference[(l, i)] = params.tx_power * g_rx * g_tx * path_loss(params, d[l, i])
    geometry = LinkGeometry(d_l, v_l, timing, psi)
    game = BeamwidthGame(actions, signal, gamma, window, penalty, demand, hood, interference,
                         noise=noise, bandwidth=params.bandwidth, unit=uparams.unit, links=geometry)
    return game, keep


# --- learning ------------------------------------------------------------

def boltzmann_update(utilities, tau: float) -> np.ndarray:
    """Softmax of ``utilities / tau`` with a max shift."""
    if not tau > 0:
        raise ValueError("temperature must be positive")
    u = np.asarray(utilities, dtype=float)
    z = (u - u.max()) / tau
    p = np.exp(z)
    return p / p.sum()


def select_update_set(n: int, neighbors: Sequence[Sequence[int]], cap: int,
                      rng: np.random.Generator) -> list[int]:
    """Random greedy independent set of at most ``cap`` players."""
    chosen: list[int] = []
    blocked = np.zeros(n, dtype=bool)
    for l in rng.permutation(n):
        if len(chosen) >= cap:
            break
        if blocked[l]:
            continue
        chosen.append(int(l))
        blocked[l] = True
        blocked[list(neighbors[l])] = True
    return chosen


@dataclass
class LLLResult:
    profile: tuple[float, ...]
    indices: np.ndarray
    iterations: int
    converged: bool
    theta_trace: list[float] = field(default_factory=list)
    gap_trace: Optional[list[float]] = None


def best_response_gap(game: BeamwidthGame, idx) -> float:
    """Largest utility gain any single player could get by deviating (bit/s)."""
    gap = 0.0
    for l in range(game.n_players):
        u = game.total_utility_over_actions(l, idx)
        gap = max(gap, float(u.max() - u[idx[l]]))
    return gap


class LogLinearLearner:
    """Synchronous log-linear learning state.

    Each step draws an independent set of at most ``cap`` players; every
    drawn player evaluates its total utility over all its actions with the
    others frozen, refreshes its mixed strategy with the Boltzmann rule and
    samples its next action from it.
    """

    def __init__(self, game: BeamwidthGame, rng: np.random.Generator, cap: int = 8,
                 initial: Optional[np.ndarray] = None):
        if cap < 1:
            raise ValueError("update-set cap must be >= 1")
        self.game = game
        self.rng = rng
        self.cap = cap
        if initial is None:
            initial = np.array([rng.integers(s) for s in game.sizes], dtype=int)
        self.idx = np.asarray(initial, dtype=int).copy()
        self.mixed = [np.full(s, 1.0 / s) for s in game.sizes]
        self.k = 0

    def step(self, tau: float) -> list[int]:
        """Advance one iteration; returns the players whose action changed."""
        g = self.game
        chosen = select_update_set(g.n_players, g.neighbors, self.cap, self.rng)
        new = self.idx.copy()
        for l in chosen:
            u = g.total_utility_over_actions(l, self.idx) / g.unit
            p = boltzmann_update(u, tau)
            self.mixed[l] = p
            new[l] = min(int(np.searchsorted(np.cumsum(p), self.rng.random(), side="right")), len(p) - 1)
        changed = [int(l) for l in chosen if new[l] != self.idx[l]]
        self.idx = new
        self.k += 1
        return changed


def lll_run(game: BeamwidthGame, rng: np.random.Generator, tau: Optional[float] = None, cap: int = 8,
            t_max: int = 50, prob_threshold: float = 0.99, max_iterations: int = 10_000,
            trace_gap: bool = False) -> LLLResult:
    """Run log-linear learning until the profile settles.

    ``tau=None`` uses the schedule ``tau_k = 1/k``; a number fixes it.
    Stops when the potential has not moved (relative 1e-9) for ``t_max``
    consecutive iterations at a Nash equilibrium, or when every player's Boltzmann distribution at
    the current profile puts more than ``prob_threshold`` on the action it
    is playing. If the budget runs out the best profile seen is returned
    with ``converged=False``.
    """
    n = game.n_players
    if n == 0:
        return LLLResult((), np.zeros(0, dtype=int), 0, True, [0.0], [0.0] if trace_gap else None)
    learner = LogLinearLearner(game, rng, cap)
    theta = game.potential(learner.idx)
    trace = [theta]
    gaps = [best_response_gap(game, learner.idx)] if trace_gap else None
    best_theta, best_idx = theta, learner.idx.copy()
    stagnant = 0
    settled = np.zeros(n, dtype=bool)
    two_hop = [set(game.neighbors[l]).union(*(game.neighbors[i] for i in game.neighbors[l])) | {l}
               for l in range(n)]

    for k in range(1, max_iterations + 1):
        t = (1.0 / k) if tau is None else tau
        changed = learner.step(t)
        for l in changed:
            settled[list(two_hop[l])] = False
        theta_new = game.potential(learner.idx)
        trace.append(theta_new)
        if trace_gap:
            gaps.append(best_response_gap(game, learner.idx))
        if abs(theta_new - theta) <= REL_TOL * max(1.0, abs(theta)):
            stagnant += 1
        else:
            stagnant = 0
        theta = theta_new
        if theta > best_theta:
            best_theta, best_idx = theta, learner.idx.copy()
        if stagnant >= t_max:
            if is_nash_equilibrium(game, learner.idx):
                return LLLResult(game.values(learner.idx), learner.idx.copy(), k, True, trace, gaps)
            stagnant = 0
        if tau is None or stagnant:
            for l in np.flatnonzero(~settled):
                u = game.total_utility_over_actions(int(l), learner.idx) / game.unit
                p = boltzmann_update(u, t)
                if p[learner.idx[l]] > prob_threshold:
                    settled[l] = True
                elif tau is None:
                    break
            if settled.all():
                return LLLResult(game.values(learner.idx), learner.idx.copy(), k, True, trace, gaps)
    return LLLResult(game.values(best_idx), best_idx, max_iterations, False, trace, gaps)


# --- oracle and analysis ----------------------------------------------------

def exhaustive_optimum(game: BeamwidthGame, budget: int = 10 ** 7) -> tuple[tuple[float, ...], float]:
    """Global potential maximizer by enumeration.

    Ties (within relative 1e-12) go to the lexicographically smallest index
    profile, i.e. the narrowest beams first.
    """
    if game.n_players == 0:
        return (), 0.0
    grid = game.potential_grid(budget)
    flat = grid.ravel()
    top = flat.max()
    first = int(np.flatnonzero(flat >= top - 1e-12 * max(1.0, abs(top)))[0])
    idx = np.array(np.unravel_index(first, grid.shape))
    return game.values(idx), float(game.potential(idx))


def is_nash_equilibrium(game: BeamwidthGame, profile, rel_tol: float = REL_TOL) -> bool:
    """No player can raise its total utility by more than ``rel_tol`` relative."""
    idx = profile if isinstance(profile, np.ndarray) and profile.dtype.kind == "i" else game.indices(profile)
    for l in range(game.n_players):
        u = game.total_utility_over_actions(l, idx)
        cur = u[idx[l]]
        if u.max() - cur > rel_tol * max(1.0, abs(cur)):
            return False
    return True


def stationary_distribution(game: BeamwidthGame, tau: float, budget: int = 10 ** 4):
    """Gibbs distribution of the potential over all joint profiles.

    Returns ``(profiles, probabilities)`` with profiles as index tuples in
    lexicographic order.
    """
    if not tau > 0:
        raise ValueError("temperature must be positive")
    grid = game.potential_grid(budget) / game.unit
    p = boltzmann_update(grid.ravel(), tau)
    profiles = list(itertools.product(*(range(s) for s in game.sizes)))
    return profiles, p


def potential_identity_gaps(game: BeamwidthGame, idx) -> list[tuple[int, int, float, float]]:
    """Every unilateral deviation from ``idx`` as ``(player, action, dU, dTheta)``."""
    base_theta = game.potential(idx)
    out = []
    for l in range(game.n_players):
        base_u = game.total_utility(l, idx)
        for a in range(len(game.actions[l])):
            if a == idx[l]:
                continue
            dev = np.array(idx, copy=True)
            dev[l] = a
            out.append((l, a, game.total_utility(l, dev) - base_u, game.potential(dev) - base_theta))
    return out


# --- baselines ---------------------------------------------------------------

def cbws(game: BeamwidthGame, phi: float) -> tuple[float, ...]:
    """Every player uses ``phi``; players for which it is infeasible take the
    nearest feasible action (narrower on ties)."""
    out = []
    for l in range(game.n_players):
        if game.feasible_value(l, phi):
            out.append(float(phi))
        else:
            acts = game.actions[l]
            out.append(float(acts[int(np.argmin(np.abs(acts - phi)))]))
    return tuple(out)


def rbws(game: BeamwidthGame, rng: np.random.Generator) -> tuple[float, ...]:
    """Independent uniform draw from each player's feasible actions."""
    return tuple(float(a[rng.integers(len(a))]) for a in game.actions)
