"""Peer association: the context-aware heuristic and the DAA/MDA/RPA baselines.

Every matcher works on an :class:`AssociationContext`, a snapshot of one
round seen from the requesters' side: pairwise distances, sampled LOS,
transverse relative speeds and segment availability, all indexed
``[requester, transmitter]``.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .content import RequestState
from .linkdyn import TimingBudget, stability_time_array


class Unmatched(enum.Enum):
    NO_FEASIBLE_DT = "no_feasible_dt"
    NO_CONTENT = "no_content"
    ACK_TIMEOUT = "ack_timeout"
    SWITCHED_TO_CELLULAR = "switched_to_cellular"


@dataclass
class Matching:
    pairs: dict[int, int] = field(default_factory=dict)  # requester id -> transmitter id
    unmatched: dict[int, Unmatched] = field(default_factory=dict)
    overhead: float = 0.0  # seconds taken out of every matched link's window
    proposals: int = 0

    def check_one_to_one(self) -> None:
        txs = list(self.pairs.values())
        if len(set(txs)) != len(txs):
            raise AssertionError("a transmitter is matched to more than one requester")
        if set(self.pairs) & set(self.unmatched):
            raise AssertionError("a requester is both matched and unmatched")


@dataclass(frozen=True)
class PAUtilityParams:
    stability_norm: float = 60.0  # s
    availability_norm: Optional[float] = None  # segments; None -> requester's own request size

    def __post_init__(self):
        if self.stability_norm <= 0:
            raise ValueError("stability_norm must be positive")
        if self.availability_norm is not None and self.availability_norm <= 0:
            raise ValueError("availability_norm must be positive")


@dataclass
class AssociationContext:
    requester_ids: np.ndarray
    transmitter_ids: np.ndarray
    dist: np.ndarray
    los: np.ndarray
    transverse_speed: np.ndarray  # |V sin(mu)| per pair
    availability: np.ndarray  # requested segments the transmitter holds
    request_size: np.ndarray  # remaining segments per requester
    d_t: float = 50.0

    @property
    def shape(self) -> tuple[int, int]:
        return self.dist.shape

    def in_range(self) -> np.ndarray:
        return self.dist <= self.d_t

    def feasible(self) -> np.ndarray:
        return self.in_range() & self.los

    def stability(self, beamwidth: float, alpha: float) -> np.ndarray:
        return np.asarray(stability_time_array(self.dist, beamwidth, self.transverse_speed, alpha))


def feasible_transmitters(requester_xy, transmitter_xy: np.ndarray, transmitter_ids: Sequence[int],
                          d_t: float, los: np.ndarray) -> set[int]:
    """Transmitters within ``d_t`` (inclusive) whose link to the requester is LOS."""
    if d_t <= 0:
        raise ValueError("coverage distance must be positive")
    if len(transmitter_ids) == 0:
        return set()
    d = np.hypot(*(np.asarray(transmitter_xy) - np.asarray(requester_xy)).T)
    ok = (d <= d_t) & np.asarray(los, dtype=bool)
    return {int(t) for t, keep in zip(transmitter_ids, ok) if keep}


def pa_utility(stability, availability, params: PAUtilityParams, availability_norm=None):
    """Stability term plus availability term, each normalized.

    Stability above the norm is clipped so the first term stays in [0, 1].
    """
    norm_delta = availability_norm if availability_norm is not None else params.availability_norm
    if norm_delta is None:
        raise ValueError("an availability normalization is required")
    stab = np.minimum(np.asarray(stability, dtype=float), params.stability_norm)
    out = stab / params.stability_norm + np.asarray(availability, dtype=float) / norm_delta
    return float(out) if np.ndim(out) == 0 else out


def utility_matrix(ctx: AssociationContext, params: PAUtilityParams, timing: TimingBudget,
                   narrowest: float) -> np.ndarray:
    """Utility of every requester/transmitter pair, stability taken at the
    narrowest beamwidth."""
    stab = ctx.stability(narrowest, timing.misalignment_threshold)
    if params.availability_norm is not None:
        norm = np.full(len(ctx.requester_ids), params.availability_norm, dtype=float)
    else:
        norm = np.maximum(ctx.request_size.astype(float), 1.0)
    return pa_utility(stab, ctx.availability, params, availability_norm=norm[:, None])


def _ineligible(ctx: AssociationContext, requests: Optional[dict[int, RequestState]]) -> np.ndarray:
    if requests is None:
        return np.zeros(len(ctx.requester_ids), dtype=bool)
    return np.array([requests[int(r)].failure_counter >= requests[int(r)].max_trials
                     for r in ctx.requester_ids], dtype=bool)


def hpa_round(ctx: AssociationContext, params: PAUtilityParams, timing: TimingBudget,
              narrowest: float, rng: np.random.Generator,
              requests: Optional[dict[int, RequestState]] = None) -> Matching:
    """One round of the heuristic association.

    Each eligible requester collects replies from its feasible transmitters,
    picks the one with the highest utility, and waits for an ACK. A
    transmitter picked by several requesters acknowledges the one whose
    utility toward it is highest (lower requester id on ties); the others
    time out.
    """
    n_req, n_tx = ctx.shape
    out = Matching()
    feasible = ctx.feasible()
    cand = feasible & (ctx.availability > 0)
    util = np.where(cand, utility_matrix(ctx, params, timing, narrowest), -np.inf)
    skip = _ineligible(ctx, requests)

    picks: dict[int, list[int]] = {}
    for r in rng.permutation(n_req):
        rid = int(ctx.requester_ids[r])
        if skip[r]:
            out.unmatched[rid] = Unmatched.SWITCHED_TO_CELLULAR
        elif not feasible[r].any():
            out.unmatched[rid] = Unmatched.NO_FEASIBLE_DT
        elif not cand[r].any():
            out.unmatched[rid] = Unmatched.NO_CONTENT
        else:
            picks.setdefault(int(np.argmax(util[r])), []).append(r)

    for t, rs in picks.items():
        winner = max(rs, key=lambda r: (util[r, t], -int(ctx.requester_ids[r])))
        for r in rs:
            rid = int(ctx.requester_ids[r])
            if r == winner:
                out.pairs[rid] = int(ctx.transmitter_ids[t])
            else:
                out.unmatched[rid] = Unmatched.ACK_TIMEOUT
    return out


def daa_match(ctx: AssociationContext, params: PAUtilityParams, timing: TimingBudget,
              narrowest: float, requests: Optional[dict[int, RequestState]] = None,
              los_aware: bool = True) -> Matching:
    """Requester-proposing deferred acceptance on the association utility.

    Both sides rank by the same utility over transmitters in coverage that
    hold requested segments; with ``los_aware=False`` blocked transmitters
    are not screened out. Every proposal costs one reply/decision/ACK
    exchange, and the total is charged as overhead to each matched link.
    """
    n_req, n_tx = ctx.shape
    out = Matching()
    feasible = ctx.feasible() if los_aware else ctx.in_range()
    cand = feasible & (ctx.availability > 0)
    util = utility_matrix(ctx, params, timing, narrowest)
    skip = _ineligible(ctx, requests)

    prefs: dict[int, list[int]] = {}
    for r in range(n_req):
        rid = int(ctx.requester_ids[r])
        if skip[r]:
            out.unmatched[rid] = Unmatched.SWITCHED_TO_CELLULAR
        elif not feasible[r].any():
            out.unmatched[rid] = Unmatched.NO_FEASIBLE_DT
        elif not cand[r].any():
            out.unmatched[rid] = Unmatched.NO_CONTENT
        else:
            ts = np.flatnonzero(cand[r])
            # descending utility, lower transmitter id first on ties
            prefs[r] = sorted(ts.tolist(), key=lambda t: (-util[r, t], int(ctx.transmitter_ids[t])))

    held: dict[int, int] = {}  # transmitter index -> requester index
    nxt = {r: 0 for r in prefs}
    free = sorted(prefs, key=lambda r: int(ctx.requester_ids[r]))
    proposals = 0
    while free:
        r = free.pop(0)
        if nxt[r] >= len(prefs[r]):
            continue
        t = prefs[r][nxt[r]]
        nxt[r] += 1
        proposals += 1
        cur = held.get(t)
        if cur is None:
            held[t] = r
        elif (util[r, t], -int(ctx.requester_ids[r])) > (util[cur, t], -int(ctx.requester_ids[cur])):
            held[t] = r
            free.append(cur)
        else:
            free.append(r)

    matched = {r: t for t, r in held.items()}
    for r in prefs:
        rid = int(ctx.requester_ids[r])
        if r in matched:
            out.pairs[rid] = int(ctx.transmitter_ids[matched[r]])
        else:
            out.unmatched[rid] = Unmatched.ACK_TIMEOUT
    out.proposals = proposals
    out.overhead = proposals * timing.association_exchange
    return out


def _baseline_candidates(ctx: AssociationContext, los_aware: bool) -> np.ndarray:
    return ctx.feasible() if los_aware else ctx.in_range()


def mda_match(ctx: AssociationContext, rng: Optional[np.random.Generator] = None, los_aware: bool = False,
              requests: Optional[dict[int, RequestState]] = None) -> Matching:
    """Minimum-distance association, greedy in ascending pair distance.

    Content is not checked; with ``los_aware=False`` neither is LOS, so the
    chosen link may turn out unusable.
    """
    out = Matching()
    cand = _baseline_candidates(ctx, los_aware)
    skip = _ineligible(ctx, requests)
    r_idx, t_idx = np.nonzero(cand & ~skip[:, None])
    order = np.lexsort((ctx.transmitter_ids[t_idx], ctx.requester_ids[r_idx], ctx.dist[r_idx, t_idx]))
    taken_r: set[int] = set()
    taken_t: set[int] = set()
    for k in order:
        r, t = int(r_idx[k]), int(t_idx[k])
        if r in taken_r or t in taken_t:
            continue
        taken_r.add(r)
        taken_t.add(t)
        out.pairs[int(ctx.requester_ids[r])] = int(ctx.transmitter_ids[t])
    _fill_unmatched(ctx, cand, skip, taken_r, out)
    return out


def rpa_match(ctx: AssociationContext, rng: np.random.Generator, los_aware: bool = False,
              requests: Optional[dict[int, RequestState]] = None) -> Matching:
    """Random association: requesters, in random order, pick uniformly among
    the unclaimed transmitters in coverage."""
    out = Matching()
    cand = _baseline_candidates(ctx, los_aware)
    skip = _ineligible(ctx, requests)
    taken_r: set[int] = set()
    claimed = np.zeros(ctx.shape[1], dtype=bool)
    for r in rng.permutation(ctx.shape[0]):
        if skip[r]:
            continue
        options = np.flatnonzero(cand[r] & ~claimed)
        if options.size == 0:
            continue
        t = int(options[rng.integers(options.size)])
        claimed[t] = True
        taken_r.add(int(r))
        out.pairs[int(ctx.requester_ids[r])] = int(ctx.transmitter_ids[t])
    _fill_unmatched(ctx, cand, skip, taken_r, out)
    return out


def _fill_unmatched(ctx, cand, skip, taken_r, out: Matching) -> None:
    for r in range(ctx.shape[0]):
        if r in taken_r:
            continue
        rid = int(ctx.requester_ids[r])
        if skip[r]:
            out.unmatched[rid] = Unmatched.SWITCHED_TO_CELLULAR
        elif not cand[r].any():
            out.unmatched[rid] = Unmatched.NO_FEASIBLE_DT
        else:
            out.unmatched[rid] = Unmatched.ACK_TIMEOUT


def record_failures(matching: Matching, requests: dict[int, RequestState]) -> list[int]:
    """Bump failure counters of requesters that did not get a peer.

    Returns the requesters that reached their trial limit and must fall
    back to the cellular network.
    """
    switched = []
    for rid, reason in matching.unmatched.items():
        state = requests[rid]
        if reason is Unmatched.SWITCHED_TO_CELLULAR:
            switched.append(rid)
            continue
        state.failure_counter += 1
        if state.failure_counter >= state.max_trials:
            matching.unmatched[rid] = Unmatched.SWITCHED_TO_CELLULAR
            switched.append(rid)
    return switched


def blocking_pairs(ctx: AssociationContext, util: np.ndarray, acceptable: np.ndarray,
                   matching: Matching) -> list[tuple[int, int]]:
    """Requester/transmitter index pairs that would both rather be together.

    Being unmatched ranks below every acceptable partner.
    """
    rid_to_r = {int(r): k for k, r in enumerate(ctx.requester_ids)}
    tid_to_t = {int(t): k for k, t in enumerate(ctx.transmitter_ids)}
    partner_of_r = {rid_to_r[r]: tid_to_t[t] for r, t in matching.pairs.items()}
    partner_of_t = {t: r for r, t in partner_of_r.items()}
    out = []
    for r, t in zip(*np.nonzero(acceptable)):
        r, t = int(r), int(t)
        if partner_of_r.get(r) == t:
            continue
        cur_t = partner_of_r.get(r)
        r_wants = cur_t is None or (util[r, t], -int(ctx.transmitter_ids[t])) > \
            (util[r, cur_t], -int(ctx.transmitter_ids[cur_t]))
        cur_r = partner_of_t.get(t)
        t_wants = cur_r is None or (util[r, t], -int(ctx.requester_ids[r])) > \
            (util[cur_r, t], -int(ctx.requester_ids[cur_r]))
        if r_wants and t_wants:
            out.append((r, t))
    return out


ASSOCIATION_ALGORITHMS = ("hpa", "daa", "mda", "rpa")


def associate(algorithm: str, ctx: AssociationContext, params: PAUtilityParams, timing: TimingBudget,
              narrowest: float, rng: np.random.Generator,
              requests: Optional[dict[int, RequestState]] = None, los_aware_baselines: bool = False) -> Matching:
    if algorithm == "hpa":
        return hpa_round(ctx, params, timing, narrowest, rng, requests)
    if algorithm == "daa":
        return daa_match(ctx, params, timing, narrowest, requests, los_aware_baselines)
    if algorithm == "mda":
        return mda_match(ctx, rng, los_aware_baselines, requests)
    if algorithm == "rpa":
        return rpa_match(ctx, rng, los_aware_baselines, requests)
    raise ValueError(f"unknown association algorithm {algorithm!r}")
