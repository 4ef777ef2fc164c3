"""Node placement, trajectories and relative motion.

Coordinates are metres in a square arena centred on the origin, so an arena
of side ``s`` spans ``[-s/2, s/2]`` on both axes.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

MPH_TO_MPS = 0.44704


class Role(enum.Enum):
    TRANSMITTER = "transmitter"
    REQUESTER = "requester"


@dataclass(frozen=True)
class Position:
    x: float
    y: float

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y])


def wrap_angle(theta: float) -> float:
    """Normalize an angle to (-pi, pi]."""
    wrapped = math.remainder(theta, 2.0 * math.pi)
    if wrapped <= -math.pi:
        wrapped += 2.0 * math.pi
    return wrapped


@dataclass(frozen=True)
class Trajectory:
    speed: float  # m/s
    heading: float  # rad

    def __post_init__(self):
        if not self.speed >= 0.0:
            raise ValueError(f"speed must be >= 0, got {self.speed}")
        object.__setattr__(self, "heading", wrap_angle(self.heading))

    @property
    def velocity(self) -> np.ndarray:
        return self.speed * np.array([math.cos(self.heading), math.sin(self.heading)])


@dataclass
class Node:
    id: int
    role: Role
    position: Position
    trajectory: Trajectory = field(default_factory=lambda: Trajectory(0.0, 0.0))
    # Set once the node is paired; points at the peer.
    boresight: Optional[float] = None


@dataclass(frozen=True)
class RelativeMotion:
    relative_speed: float
    relative_angle: float


def distance(a: Position, b: Position) -> float:
    return math.hypot(a.x - b.x, a.y - b.y)


def bearing(src: Position, dst: Position) -> float:
    """Direction of the ray from ``src`` toward ``dst`` in (-pi, pi]."""
    return wrap_angle(math.atan2(dst.y - src.y, dst.x - src.x))


def draw_trajectories(n: int, rng: np.random.Generator,
                      speed_range_mph: tuple[float, float] = (1.0, 3.0)) -> tuple[np.ndarray, np.ndarray]:
    """Speeds (m/s) uniform over ``speed_range_mph`` and headings uniform over (-pi, pi)."""
    lo, hi = speed_range_mph
    speeds = rng.uniform(lo, hi, size=n) * MPH_TO_MPS
    headings = rng.uniform(-math.pi, math.pi, size=n)
    return speeds, headings


def place_uniform(arena_side: float, density: float, role_mix: float,
                  rng: np.random.Generator,
                  speed_range_mph: tuple[float, float] = (1.0, 3.0),
                  first_id: int = 0) -> list[Node]:
    """Drop a homogeneous Poisson field of nodes into the arena.

    ``density`` is in nodes per km^2, so the expected count is
    ``density * (arena_side / 1000)**2``. Each node is a transmitter with
    probability ``role_mix``; trajectories follow ``draw_trajectories``.
    """
    if arena_side <= 0:
        raise ValueError("arena_side must be positive")
    if not 0.0 <= role_mix <= 1.0:
        raise ValueError("role_mix must lie in [0, 1]")
    if density < 0:
        raise ValueError("density must be non-negative")
    expected = density * (arena_side / 1000.0) ** 2
    n = int(rng.poisson(expected)) if expected > 0 else 0
    if n == 0:
        return []
    half = arena_side / 2.0
    xy = rng.uniform(-half, half, size=(n, 2))
    is_tx = rng.random(n) < role_mix
    speeds, headings = draw_trajectories(n, rng, speed_range_mph)
    return [
        Node(id=first_id + k,
             role=Role.TRANSMITTER if is_tx[k] else Role.REQUESTER,
             position=Position(float(xy[k, 0]), float(xy[k, 1])),
             trajectory=Trajectory(float(speeds[k]), float(headings[k])))
        for k in range(n)
    ]


def relative_motion(receiver: Node, transmitter: Node) -> RelativeMotion:
    """Motion of the receiver relative to the transmitter, measured from the
    receiver's boresight (the ray receiver -> transmitter)."""
    v = receiver.trajectory.velocity - transmitter.trajectory.velocity
    ray = transmitter.position.as_array() - receiver.position.as_array()
    speed, angle = relative_motion_arrays(v[None, :], ray[None, :])
    return RelativeMotion(float(speed[0]), float(angle[0]))


def relative_motion_arrays(rel_velocity: np.ndarray, ray: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized relative speed and unsigned angle in [0, pi].

    ``rel_velocity`` and ``ray`` are (n, 2). Zero relative speed maps to angle 0.
    """
    rel_velocity = np.atleast_2d(rel_velocity)
    ray = np.atleast_2d(ray)
    speed = np.hypot(rel_velocity[:, 0], rel_velocity[:, 1])
    cross = ray[:, 0] * rel_velocity[:, 1] - ray[:, 1] * rel_velocity[:, 0]
    dot = ray[:, 0] * rel_velocity[:, 0] + ray[:, 1] * rel_velocity[:, 1]
    angle = np.abs(np.arctan2(cross, dot))
    angle = np.where(speed > 0.0, angle, 0.0)
    return speed, angle


def positions_array(nodes: Sequence[Node]) -> np.ndarray:
    if not nodes:
        return np.zeros((0, 2))
    return np.array([[n.position.x, n.position.y] for n in nodes], dtype=float)


def velocities_array(nodes: Sequence[Node]) -> np.ndarray:
    if not nodes:
        return np.zeros((0, 2))
    return np.array([n.trajectory.velocity for n in nodes], dtype=float)


def pairwise_distances(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """(len(a), len(b)) matrix of Euclidean distances."""
    diff = a[:, None, :] - b[None, :, :]
    return np.hypot(diff[..., 0], diff[..., 1])
