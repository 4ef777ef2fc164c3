"""Content catalog, segment sets, caches and requests."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

import numpy as np

MEGABYTE_BITS = 8_000_000
GIGABIT_BITS = 1_000_000_000


@dataclass(frozen=True)
class ContentItem:
    content_id: int
    segment_count: int
    segment_size: int  # bits

    def __post_init__(self):
        if self.segment_count < 1:
            raise ValueError("a content needs at least one segment")
        if self.segment_size <= 0:
            raise ValueError("segment size must be positive")

    @property
    def total_bits(self) -> int:
        return self.segment_count * self.segment_size


@dataclass(frozen=True)
class ContentCatalog:
    contents: tuple[ContentItem, ...]

    @classmethod
    def uniform(cls, n_contents: int, size_bits: int, segment_count: int = 100) -> "ContentCatalog":
        """``n_contents`` items of ``size_bits`` each, split into equal segments."""
        seg = max(1, size_bits // segment_count)
        return cls(tuple(ContentItem(p, segment_count, seg) for p in range(n_contents)))

    def __len__(self) -> int:
        return len(self.contents)

    def __getitem__(self, content_id: int) -> ContentItem:
        return self.contents[content_id]


@dataclass(frozen=True)
class SegmentSet:
    content_id: int
    segments: frozenset[int] = frozenset()

    @classmethod
    def full(cls, item: ContentItem) -> "SegmentSet":
        return cls(item.content_id, frozenset(range(1, item.segment_count + 1)))

    def __len__(self) -> int:
        return len(self.segments)


@dataclass
class CacheState:
    """Per-transmitter cached segment sets, keyed by node id then content id."""
    caches: dict[int, dict[int, SegmentSet]] = field(default_factory=dict)

    def lookup(self, node_id: int, content_id: int) -> Optional[SegmentSet]:
        return self.caches.get(node_id, {}).get(content_id)


@dataclass
class RequestState:
    node_id: int
    request: SegmentSet
    max_trials: int = 3
    failure_counter: int = 0

    @property
    def done(self) -> bool:
        return len(self.request) == 0


def availability(cache: Optional[SegmentSet], request: SegmentSet) -> int:
    """Number of requested segments present in ``cache``."""
    if cache is None or cache.content_id != request.content_id:
        return 0
    return len(cache.segments & request.segments)


def populate_caches(transmitter_ids: Iterable[int], catalog: ContentCatalog, p_cache: float,
                    rng: np.random.Generator, partial_fraction: float = 1.0) -> CacheState:
    """Each transmitter caches each catalog item independently with
    probability ``p_cache``.

    With ``partial_fraction < 1`` a cached item keeps a uniformly random
    subset of ``ceil(partial_fraction * M_p)`` segments instead of all of them.
    """
    if not 0.0 <= p_cache <= 1.0:
        raise ValueError("cache probability must lie in [0, 1]")
    if not 0.0 < partial_fraction <= 1.0:
        raise ValueError("partial_fraction must lie in (0, 1]")
    ids = list(transmitter_ids)
    draws = rng.random((len(ids), len(catalog)))
    state = CacheState()
    full = {item.content_id: SegmentSet.full(item) for item in catalog.contents}
    for row, node_id in enumerate(ids):
        held: dict[int, SegmentSet] = {}
        for item in catalog.contents:
            if draws[row, item.content_id] >= p_cache:
                continue
            if partial_fraction >= 1.0:
                held[item.content_id] = full[item.content_id]
            else:
                k = int(np.ceil(partial_fraction * item.segment_count))
                picked = rng.choice(item.segment_count, size=k, replace=False) + 1
                held[item.content_id] = SegmentSet(item.content_id, frozenset(int(s) for s in picked))
        state.caches[node_id] = held
    return state


def update_request(state: RequestState, delivered_segments: int) -> RequestState:
    """Drop the lowest-indexed ``delivered_segments`` from the request and
    reset the failure counter."""
    remaining = sorted(state.request.segments)
    if delivered_segments > len(remaining):
        raise ValueError("cannot deliver more segments than requested")
    state.request = SegmentSet(state.request.content_id, frozenset(remaining[delivered_segments:]))
    state.failure_counter = 0
    return state


def deliverable_segments(cache: Optional[SegmentSet], request: SegmentSet) -> list[int]:
    """Requested segment indices the cache can serve, in delivery order."""
    if cache is None or cache.content_id != request.content_id:
        return []
    return sorted(cache.segments & request.segments)


def deliver(state: RequestState, served: Sequence[int]) -> RequestState:
    """Remove specific served segments (used when the cache is partial)."""
    state.request = SegmentSet(state.request.content_id, state.request.segments - frozenset(served))
    state.failure_counter = 0
    return state
