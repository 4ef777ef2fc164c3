"""One Monte Carlo trial: placement, caching, association rounds, beamwidth
selection and evaluation under fading.

Three scenarios are supported:

``network``         requesters and transmitters dropped uniformly; requesters
                    associate over up to ``max_rounds`` frames and fall back to
                    the cellular network after ``max_trials`` failed attempts.
``test_requester``  a single requester at the origin among transmitters.
``links``           already-established links with random lengths and
                    request sizes; only beamwidth selection runs.

Random draws come from independent streams keyed by ``(seed, trial,
stream[, round])``, so every association algorithm and beamwidth strategy
sees the same topology, caches, blockage and fading for a given trial.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .association import AssociationContext, Unmatched, associate
from .channel import los_probability, network_sinr, sample_fading
from .config import ExperimentConfig, parse_strategy
from .content import MEGABYTE_BITS, RequestState, SegmentSet, deliver, deliverable_segments, populate_caches
from .game import BeamwidthGame, build_game, cbws, exhaustive_optimum, lll_run, rbws
from .geometry import Role, draw_trajectories, pairwise_distances, place_uniform
from .linkdyn import alignment_efficiency, alignment_time, stability_time_array
from .metrics import LinkOutcome, TrialMetrics, delivered_bits, eq8_throughput, trial_metrics

# stream ids under (seed, trial)
_PLACE, _CACHE, _REQUEST, _ROUND, _LINKS = range(5)
# sub-streams under (seed, trial, _ROUND, round)
_LOS, _MOBILITY, _FADING, _ASSOC, _GAME = range(5)


def stream(seed: int, trial: int, *key: int) -> np.random.Generator:
    """Generator for one named stream of one trial; independent of every other."""
    return np.random.default_rng(np.random.SeedSequence(entropy=seed, spawn_key=(trial,) + key))


@dataclass(frozen=True)
class LinkRecord:
    round: int
    link: int
    tx: int
    rx: int
    distance: float
    beamwidth_deg: float
    sinr_db: float
    rate: float
    eq8_throughput: Optional[float]
    delivered_bits: float
    stability_time: float
    alignment_time: float
    penalty_active: bool
    requested_bits: float


@dataclass
class TrialResult:
    index: int
    metrics: TrialMetrics
    links: list[LinkRecord] = field(default_factory=list)


@dataclass
class ServedLinks:
    """Outcome of one transmission frame over a set of established links."""
    keep: np.ndarray  # indices (into the input) of links that had a feasible beamwidth
    beams: np.ndarray  # rad, per kept link
    sinr: np.ndarray
    outcomes: list[LinkOutcome]
    iterations: int
    converged: bool
    game: BeamwidthGame


def select_beamwidths(cfg: ExperimentConfig, game: BeamwidthGame, rng: np.random.Generator):
    """Profile chosen by the configured strategy: ``(beams, iterations, converged)``."""
    kind, phi = parse_strategy(cfg.game.strategy)
    if kind == "lll":
        g = cfg.game
        res = lll_run(game, rng, tau=g.tau, cap=g.update_cap, t_max=g.t_max, prob_threshold=g.prob_threshold,
                      max_iterations=g.max_iterations)
        return np.array(res.profile, dtype=float), res.iterations, res.converged
    if kind == "cbws":
        return np.array(cbws(game, phi), dtype=float), 0, True
    if kind == "rbws":
        return np.array(rbws(game, rng), dtype=float), 0, True
    profile, _ = exhaustive_optimum(game, cfg.game.exhaustive_budget)
    return np.array(profile, dtype=float), 0, True


def serve_links(cfg: ExperimentConfig, tx_xy: np.ndarray, rx_xy: np.ndarray, transverse: np.ndarray,
                demand: np.ndarray, cross_los: np.ndarray, fading: np.ndarray, rng: np.random.Generator,
                overhead: float = 0.0) -> ServedLinks:
    """Select beamwidths for the given links and evaluate one transmission frame.

    ``cross_los[l, i]`` and ``fading[l, i]`` describe the path from
    transmitter ``i`` to receiver ``l``; the fading diagonal is the desired
    link. ``overhead`` is association time taken out of every window.
    """
    params, timing = cfg.channel_params(), cfg.timing_budget()
    game, keep = build_game(params, timing, tx_xy, rx_xy, transverse, demand, cfg.action_set(), cfg.psi,
                            cfg.network.coverage_m, cfg.utility_params(), cross_los)
    beams, iterations, converged = select_beamwidths(cfg, game, rng)
    sub = np.ix_(keep, keep)
    sinr = network_sinr(params, tx_xy[keep], rx_xy[keep], beams, cross_los[sub], fading[sub])
    d = np.hypot(*(tx_xy[keep] - rx_xy[keep]).T) if keep.size else np.zeros(0)
    t_s = np.atleast_1d(stability_time_array(d, beams, transverse[keep], timing.misalignment_threshold))
    t_a = np.atleast_1d(alignment_time(cfg.psi, cfg.psi, beams, beams, timing.t_pilot)) if keep.size \
        else np.zeros(0)
    gamma = np.atleast_1d(alignment_efficiency(t_a, t_s))
    rate = gamma * params.bandwidth * np.log2(1.0 + sinr)
    outcomes = []
    for k, l in enumerate(keep):
        req = float(demand[l])
        bits = delivered_bits(rate[k], t_s[k], t_a[k] + overhead, req)
        window = t_s[k] - t_a[k] - overhead
        late = req > 0 and (rate[k] <= 0 or req / rate[k] > window)
        outcomes.append(LinkOutcome(float(rate[k]), eq8_throughput(rate[k], t_s[k], req), bits,
                                    float(t_s[k]), float(t_a[k]), bool(late), req))
    return ServedLinks(keep, beams, sinr, outcomes, iterations, converged, game)


def _transverse(rx_xy, rx_v, tx_xy, tx_v) -> np.ndarray:
    """|V sin(mu)| of each receiver relative to each transmitter, shape (rx, tx)."""
    ray = tx_xy[None, :, :] - rx_xy[:, None, :]
    norm = np.hypot(ray[..., 0], ray[..., 1])
    norm = np.where(norm > 0, norm, 1.0)
    v = rx_v[:, None, :] - tx_v[None, :, :]
    cross = (ray[..., 0] * v[..., 1] - ray[..., 1] * v[..., 0]) / norm
    return np.abs(cross)


def _velocities(speeds, headings) -> np.ndarray:
    return np.column_stack([speeds * np.cos(headings), speeds * np.sin(headings)])


def _place(cfg: ExperimentConfig, rng: np.random.Generator):
    """Positions and velocities of requesters and transmitters."""
    n = cfg.network
    if n.scenario == "test_requester":
        nodes = place_uniform(n.arena_side_m, n.transmitter_density, 1.0, rng, n.speed_mph, first_id=1)
        tx = [x for x in nodes if x.role is Role.TRANSMITTER]
        speeds, headings = draw_trajectories(1, rng, n.speed_mph)
        rx_xy = np.zeros((1, 2))
        rx_v = _velocities(speeds, headings)
        rx_ids = np.array([0])
    else:
        total = n.transmitter_density + n.requester_density
        mix = n.transmitter_density / total if total > 0 else 0.0
        nodes = place_uniform(n.arena_side_m, total, mix, rng, n.speed_mph)
        tx = [x for x in nodes if x.role is Role.TRANSMITTER]
        rx = [x for x in nodes if x.role is Role.REQUESTER]
        rx_xy = np.array([[x.position.x, x.position.y] for x in rx]).reshape(-1, 2)
        rx_v = np.array([x.trajectory.velocity for x in rx]).reshape(-1, 2)
        rx_ids = np.array([x.id for x in rx], dtype=int)
    tx_xy = np.array([[x.position.x, x.position.y] for x in tx]).reshape(-1, 2)
    tx_v = np.array([x.trajectory.velocity for x in tx]).reshape(-1, 2)
    tx_ids = np.array([x.id for x in tx], dtype=int)
    return rx_ids, rx_xy, rx_v, tx_ids, tx_xy, tx_v


def run_network_trial(cfg: ExperimentConfig, index: int) -> TrialResult:
    seed = cfg.run.seed
    net, ct, asc = cfg.network, cfg.content, cfg.association
    params, timing = cfg.channel_params(), cfg.timing_budget()
    catalog = cfg.catalog()
    narrowest = min(cfg.action_set())

    rx_ids, rx_xy, rx_v, tx_ids, tx_xy, tx_v = _place(cfg, stream(seed, index, _PLACE))
    caches = populate_caches(tx_ids.tolist(), catalog, ct.cache_probability, stream(seed, index, _CACHE),
                             ct.partial_fraction)
    wanted = stream(seed, index, _REQUEST).integers(len(catalog), size=len(rx_ids))
    requests = {int(r): RequestState(int(r), SegmentSet.full(catalog[int(p)]), asc.max_trials)
                for r, p in zip(rx_ids, wanted)}
    seg_bits = np.array([catalog[int(p)].segment_size for p in wanted], dtype=np.int64)
    demanded = int(sum(len(requests[int(r)].request) * int(b) for r, b in zip(rx_ids, seg_bits)))

    dist = pairwise_distances(rx_xy, tx_xy)
    in_range = dist <= net.coverage_m
    p_los = los_probability(params.blockage_beta, dist) if dist.size else dist
    # a requester with no transmitter in coverage can never associate; skipping its
    # remaining attempts changes no outcome, only the work done
    switched = ~in_range.any(axis=1) if len(tx_ids) else np.ones(len(rx_ids), dtype=bool)
    ever_linked = np.zeros(len(rx_ids), dtype=bool)
    d2d_bits = 0
    segments = 0
    outcomes: list[LinkOutcome] = []
    records: list[LinkRecord] = []
    iterations, converged = 0, True
    tx_pos = {int(t): k for k, t in enumerate(tx_ids)}

    for rnd in range(net.max_rounds):
        active = np.array([not switched[k] and not requests[int(r)].done for k, r in enumerate(rx_ids)], dtype=bool)
        if not active.any():
            break
        los = stream(seed, index, _ROUND, rnd, _LOS).random(dist.shape) < p_los
        if rnd > 0:
            mob = stream(seed, index, _ROUND, rnd, _MOBILITY)
            s, h = draw_trajectories(len(rx_ids), mob, net.speed_mph)
            rx_v = _velocities(s, h)
            s, h = draw_trajectories(len(tx_ids), mob, net.speed_mph)
            tx_v = _velocities(s, h)
        fading = sample_fading(params.nakagami_shape, stream(seed, index, _ROUND, rnd, _FADING), dist.shape)

        rows = np.flatnonzero(active)
        avail = np.zeros((rows.size, len(tx_ids)), dtype=int)
        for i, k in enumerate(rows):
            req = requests[int(rx_ids[k])].request
            for t in np.flatnonzero(in_range[k]):
                avail[i, t] = len(deliverable_segments(caches.lookup(int(tx_ids[t]), req.content_id), req))
        transverse = _transverse(rx_xy[rows], rx_v[rows], tx_xy, tx_v)
        ctx = AssociationContext(rx_ids[rows], tx_ids, dist[rows], los[rows], transverse, avail,
                                 np.array([len(requests[int(rx_ids[k])].request) for k in rows]), net.coverage_m)
        matching = associate(asc.algorithm, ctx, cfg.pa_params(), timing, narrowest,
                             stream(seed, index, _ROUND, rnd, _ASSOC), requests, asc.los_aware_baselines)
        matching.check_one_to_one()

        # links only carry data if the pair really is LOS and the cache has something to send
        row_of = {int(rx_ids[k]): i for i, k in enumerate(rows)}
        links = []
        for rid, tid in sorted(matching.pairs.items()):
            i, t = row_of[rid], tx_pos[tid]
            if los[rows[i], t] and avail[i, t] > 0:
                links.append((rows[i], t, i))
        failed = {int(rx_ids[k]) for k in rows} - {int(rx_ids[k]) for k, _, _ in links}

        if links:
            ks = np.array([k for k, _, _ in links])
            ts = np.array([t for _, t, _ in links])
            demand = np.array([avail[i, t] * seg_bits[k] for k, t, i in links], dtype=float)
            served = serve_links(cfg, tx_xy[ts], rx_xy[ks], transverse[[i for _, _, i in links], ts], demand,
                                 los[np.ix_(ks, ts)], fading[np.ix_(ks, ts)],
                                 stream(seed, index, _ROUND, rnd, _GAME), matching.overhead)
            iterations += served.iterations
            converged &= served.converged
            kept = set(served.keep.tolist())
            for j, (k, t, i) in enumerate(links):
                rid = int(rx_ids[k])
                if j not in kept:
                    failed.add(rid)
            for pos, j in enumerate(served.keep):
                k, t, i = links[j]
                rid = int(rx_ids[k])
                out = served.outcomes[pos]
                n_seg = min(int(out.delivered_bits // seg_bits[k]), int(avail[i, t]))
                state = requests[rid]
                cache = caches.lookup(int(tx_ids[t]), state.request.content_id)
                deliver(state, deliverable_segments(cache, state.request)[:n_seg])
                d2d_bits += n_seg * int(seg_bits[k])
                segments += n_seg
                ever_linked[k] = True
                outcomes.append(out)
                records.append(LinkRecord(rnd, len(records), int(tx_ids[t]), rid, float(dist[k, t]),
                                          math.degrees(served.beams[pos]), _db(served.sinr[pos]), out.rate,
                                          out.eq8_throughput, float(n_seg * int(seg_bits[k])), out.stability_time,
                                          out.alignment_time, out.penalty_active, out.requested_bits))

        for rid in failed:
            state = requests[rid]
            if matching.unmatched.get(rid) is Unmatched.SWITCHED_TO_CELLULAR:
                switched[np.flatnonzero(rx_ids == rid)] = True
                continue
            state.failure_counter += 1
            if state.failure_counter >= state.max_trials:
                switched[np.flatnonzero(rx_ids == rid)] = True

    metrics = trial_metrics(outcomes, segments, d2d_bits, demanded, iterations,
                            float(ever_linked.mean()) if len(rx_ids) else 0.0, converged)
    return TrialResult(index, metrics, records)


@dataclass
class LinkGeometry:
    tx_xy: np.ndarray
    rx_xy: np.ndarray
    distance: np.ndarray
    transverse: np.ndarray
    demand: np.ndarray  # bits
    cross_los: np.ndarray
    fading: np.ndarray


def links_geometry(cfg: ExperimentConfig, index: int) -> LinkGeometry:
    """Random established links: transmitters uniform in the arena, each
    receiver at a uniform distance in a uniform direction."""
    net, ct = cfg.network, cfg.content
    params = cfg.channel_params()
    rng = stream(cfg.run.seed, index, _LINKS)
    if net.link_count is not None:
        n = net.link_count
    else:
        mean = net.link_density * (net.arena_side_m / 1000.0) ** 2
        n = int(rng.poisson(mean)) if mean > 0 else 0
    half = net.arena_side_m / 2.0
    tx_xy = rng.uniform(-half, half, size=(n, 2))
    d = rng.uniform(*net.link_distance_m, size=n)
    ang = rng.uniform(-math.pi, math.pi, size=n)
    rx_xy = tx_xy + np.column_stack([d * np.cos(ang), d * np.sin(ang)])
    s, h = draw_trajectories(2 * n, rng, net.speed_mph)
    v = _velocities(s, h)
    demand = np.floor(rng.uniform(*ct.demand_mb, size=n) * MEGABYTE_BITS)
    dist = pairwise_distances(rx_xy, tx_xy)
    cross_los = rng.random((n, n)) < los_probability(params.blockage_beta, dist)
    np.fill_diagonal(cross_los, True)
    fading = sample_fading(params.nakagami_shape, rng, (n, n))
    transverse = np.diagonal(_transverse(rx_xy, v[n:], tx_xy, v[:n])).copy() if n else np.zeros(0)
    return LinkGeometry(tx_xy, rx_xy, d, transverse, demand, cross_los, fading)


def links_game(cfg: ExperimentConfig, index: int) -> tuple[BeamwidthGame, np.ndarray]:
    """The beamwidth game of trial ``index`` of a links-scenario config."""
    g = links_geometry(cfg, index)
    return build_game(cfg.channel_params(), cfg.timing_budget(), g.tx_xy, g.rx_xy, g.transverse, g.demand,
                      cfg.action_set(), cfg.psi, cfg.network.coverage_m, cfg.utility_params(), g.cross_los)


def run_links_trial(cfg: ExperimentConfig, index: int) -> TrialResult:
    """Setup with pre-established links; only beamwidth selection and transmission."""
    g = links_geometry(cfg, index)
    n = len(g.distance)
    served = serve_links(cfg, g.tx_xy, g.rx_xy, g.transverse, g.demand, g.cross_los, g.fading,
                         stream(cfg.run.seed, index, _LINKS, 1))
    seg = cfg.catalog()[0].segment_size
    records, bits_total, segments = [], 0, 0
    for pos, l in enumerate(served.keep):
        out = served.outcomes[pos]
        b = int(out.delivered_bits)
        bits_total += b
        segments += b // seg
        records.append(LinkRecord(0, int(l), int(l), int(l), float(g.distance[l]), math.degrees(served.beams[pos]),
                                  _db(served.sinr[pos]), out.rate, out.eq8_throughput, float(b),
                                  out.stability_time, out.alignment_time, out.penalty_active, out.requested_bits))
    metrics = trial_metrics(served.outcomes, segments, bits_total, int(g.demand.sum()), served.iterations,
                            served.keep.size / n if n else 0.0, served.converged)
    return TrialResult(index, metrics, records)


def run_trial(cfg: ExperimentConfig, index: int) -> TrialResult:
    """Run trial ``index``; the result depends only on ``(cfg, index)``."""
    if cfg.network.scenario == "links":
        return run_links_trial(cfg, index)
    return run_network_trial(cfg, index)


def _db(x: float) -> float:
    return 10.0 * math.log10(x) if x > 0 else -math.inf
