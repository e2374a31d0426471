"""Domain types and traffic generation for framed random access protocols.

Users transmit one or more replicas (or coded segments) of a packet into the
slots of a MAC frame. The number of replicas per user is drawn from a degree
distribution; replica positions are uniform without replacement within the
frame. Everything here is immutable and safe to share across workers.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Sequence

import numpy as np

PROB_TOL = 1e-9          # distributions must sum to 1 within this
PARSE_PROB_TOL = 1e-6    # literal parser renormalizes within this


class ProtocolKind(str, Enum):
    SLOTTED_ALOHA = "sa"
    CRDSA = "crdsa"
    IRSA = "irsa"
    CSA = "csa"


@dataclass(frozen=True, slots=True)
class DegreeDistribution:
    """Probability mass over repetition degrees (or CSA segment counts)."""

    entries: tuple[tuple[int, float], ...]
    name: str = ""

    def __post_init__(self) -> None:
        if not self.entries:
            raise ValueError("degree distribution needs at least one entry")
        entries = tuple((int(d), float(p)) for d, p in self.entries)
        object.__setattr__(self, "entries", entries)
        degrees = [d for d, _ in entries]
        if any(d < 1 for d in degrees):
            raise ValueError(f"degrees must be >= 1, got {degrees}")
        if len(set(degrees)) != len(degrees):
            raise ValueError(f"duplicate degrees in {degrees}")
        for d, p in entries:
            if not 0.0 < p <= 1.0:
                raise ValueError(f"probability for degree {d} must be in (0,1], got {p}")
        total = sum(p for _, p in entries)
        if abs(total - 1.0) > PROB_TOL:
            raise ValueError(f"probabilities sum to {total!r}, expected 1 within {PROB_TOL}")

    @property
    def max_degree(self) -> int:
        return max(d for d, _ in self.entries)

    @property
    def min_degree(self) -> int:
        return min(d for d, _ in self.entries)

    @classmethod
    def constant(cls, degree: int, name: str = "") -> "DegreeDistribution":
        return cls(((degree, 1.0),), name=name or f"const-{degree}")


#: Irregular repetition mix used as the default IRSA configuration. Tuned
#: distributions of this shape push the decoding threshold close to 1 pk/slot.
REFERENCE_DISTRIBUTION = DegreeDistribution(
    ((2, 0.5), (3, 0.28), (8, 0.22)), name="irsa-ref"
)


def avg_degree(dist: DegreeDistribution) -> float:
    """Mean number of replicas per user."""
    return sum(d * p for d, p in dist.entries)


def edge_perspective(dist: DegreeDistribution) -> DegreeDistribution:
    """Distribution of the degree seen from a uniformly random replica.

    Entry for degree d gets probability d*p_d / avg_degree; this is the
    polynomial the density-evolution recursion iterates on.
    """
    mean = avg_degree(dist)
    weights = [(d, d * p / mean) for d, p in dist.entries]
    total = sum(w for _, w in weights)  # guard float drift from the division
    return DegreeDistribution(
        tuple((d, w / total) for d, w in weights),
        name=f"{dist.name}-edge" if dist.name else "edge",
    )


def parse_distribution(text: str, name: str = "") -> DegreeDistribution:
    """Parse the ``d1:p1,d2:p2,...`` literal, e.g. ``2:0.5,3:0.28,8:0.22``.

    Inputs whose probabilities sum to 1 within 1e-6 are renormalized;
    anything further off is rejected.
    """
    entries = []
    for part in text.split(","):
        part = part.strip()
        if not part:
            raise ValueError(f"empty entry in distribution literal {text!r}")
        try:
            deg_s, prob_s = part.split(":")
            deg, prob = int(deg_s), float(prob_s)
        except ValueError:
            raise ValueError(f"bad distribution entry {part!r}, expected degree:prob") from None
        entries.append((deg, prob))
    total = sum(p for _, p in entries)
    if abs(total - 1.0) > PARSE_PROB_TOL:
        raise ValueError(f"distribution {text!r} sums to {total!r}, expected 1 within {PARSE_PROB_TOL}")
    return DegreeDistribution(tuple((d, p / total) for d, p in entries), name=name)


def format_distribution(dist: DegreeDistribution) -> str:
    """Render the literal form; floats use repr so parsing round-trips exactly."""
    return ",".join(f"{d}:{p!r}" for d, p in dist.entries)


@dataclass(frozen=True, slots=True)
class ProtocolConfig:
    """Which access scheme is simulated and with what degree distribution.

    For CRDSA/IRSA the degree is the replica count; for CSA it is the number
    of coded segments n_h, of which any csa_k recover the user.
    """

    kind: ProtocolKind
    distribution: DegreeDistribution
    csa_k: int | None = None

    def __post_init__(self) -> None:
        kind, dist = self.kind, self.distribution
        if kind is ProtocolKind.CSA:
            if self.csa_k is None:
                raise ValueError("csa requires csa_k")
            if not 1 <= self.csa_k <= dist.min_degree:
                raise ValueError(
                    f"csa_k={self.csa_k} must be in [1, min degree {dist.min_degree}]"
                )
        elif self.csa_k is not None:
            raise ValueError(f"csa_k only applies to csa, not {kind.value}")
        if kind is ProtocolKind.SLOTTED_ALOHA and dist.entries != ((1, 1.0),):
            raise ValueError("slotted ALOHA is fixed at degree distribution 1:1.0")
        if kind is ProtocolKind.CRDSA:
            if len(dist.entries) != 1 or dist.min_degree < 2:
                raise ValueError("crdsa requires a constant degree >= 2")

    @classmethod
    def slotted_aloha(cls) -> "ProtocolConfig":
        return cls(ProtocolKind.SLOTTED_ALOHA, DegreeDistribution.constant(1, "sa"))

    @classmethod
    def crdsa(cls, degree: int = 2) -> "ProtocolConfig":
        return cls(ProtocolKind.CRDSA, DegreeDistribution.constant(degree))

    @classmethod
    def irsa(cls, distribution: DegreeDistribution = REFERENCE_DISTRIBUTION) -> "ProtocolConfig":
        return cls(ProtocolKind.IRSA, distribution)

    @classmethod
    def csa(cls, distribution: DegreeDistribution, k: int) -> "ProtocolConfig":
        return cls(ProtocolKind.CSA, distribution, csa_k=k)


@dataclass(frozen=True, slots=True)
class FrameConfig:
    """One MAC frame: n_users active users contend over n_slots slots."""

    n_slots: int
    n_users: int
    protocol: ProtocolConfig

    def __post_init__(self) -> None:
        if self.n_slots < 1:
            raise ValueError(f"n_slots must be positive, got {self.n_slots}")
        if self.n_users < 0:
            raise ValueError(f"n_users must be non-negative, got {self.n_users}")
        if self.protocol.distribution.max_degree > self.n_slots:
            raise ValueError(
                f"max degree {self.protocol.distribution.max_degree} exceeds "
                f"frame of {self.n_slots} slots"
            )

    @property
    def load(self) -> float:
        """Channel load G in packets per slot."""
        return self.n_users / self.n_slots


@dataclass(frozen=True, slots=True)
class TransmissionSchedule:
    """Replica placements for one frame: per user, the distinct slots used."""

    n_slots: int
    placements: tuple[tuple[int, ...], ...]
    # flat (user, slot) arrays, cached by generate_schedule so the decoder
    # does not rebuild them; absent for hand-injected schedules
    _flat: tuple[np.ndarray, np.ndarray] | None = field(
        default=None, repr=False, compare=False
    )

    def __post_init__(self) -> None:
        if self.n_slots < 1:
            raise ValueError(f"n_slots must be positive, got {self.n_slots}")
        if self._flat is not None:
            # Generated schedules carry the flat form; validate it vectorized.
            users, slots = self._flat
            if slots.size:
                if int(slots.min()) < 0 or int(slots.max()) >= self.n_slots:
                    raise ValueError(f"slot index outside frame of {self.n_slots}")
                key = users * np.int64(self.n_slots) + slots
                if np.unique(key).size != key.size:
                    raise ValueError("a user repeats a replica slot")
            return
        for user, slots in enumerate(self.placements):
            if len(set(slots)) != len(slots):
                raise ValueError(f"user {user} repeats a replica slot: {slots}")
            for s in slots:
                if not 0 <= s < self.n_slots:
                    raise ValueError(f"user {user} slot {s} outside frame of {self.n_slots}")

    @property
    def n_users(self) -> int:
        return len(self.placements)

    def flat_edges(self) -> tuple[np.ndarray, np.ndarray]:
        """(users, slots) arrays with one entry per transmitted replica."""
        if self._flat is not None:
            return self._flat
        lengths = np.fromiter((len(p) for p in self.placements), dtype=np.int64,
                              count=len(self.placements))
        users = np.repeat(np.arange(len(self.placements), dtype=np.int64), lengths)
        slots = np.fromiter(
            (s for p in self.placements for s in p), dtype=np.int64, count=int(lengths.sum())
        )
        return users, slots


def inject_schedule(n_slots: int, placements: Iterable[Sequence[int]]) -> TransmissionSchedule:
    """Build a schedule from explicit placements (deterministic replays, tests)."""
    return TransmissionSchedule(n_slots, tuple(tuple(int(s) for s in p) for p in placements))


def _sample_degrees(rng: np.random.Generator, dist: DegreeDistribution, n: int) -> np.ndarray:
    degrees = np.array([d for d, _ in dist.entries], dtype=np.int64)
    probs = np.array([p for _, p in dist.entries], dtype=np.float64)
    probs /= probs.sum()
    return rng.choice(degrees, size=n, p=probs)


def _sample_slots(rng: np.random.Generator, degrees: np.ndarray, n_slots: int) -> np.ndarray:
    """Distinct uniform slots per user, vectorized Floyd sampling.

    Row u holds degrees[u] valid entries, padded with -1. Step t draws, for
    every user still active, a uniform slot in [0, n_slots - d + t]; a value
    that collides with an earlier pick is replaced by the step's upper bound,
    which cannot itself be taken yet.
    """
    n = degrees.shape[0]
    max_d = int(degrees.max()) if n else 0
    chosen = np.full((n, max_d), -1, dtype=np.int64)
    for t in range(max_d):
        active = degrees > t
        upper = n_slots - degrees + t  # inclusive bound of this step's draw
        draw = (rng.random(n) * (upper + 1)).astype(np.int64)
        if t:
            dup = (chosen[:, :t] == draw[:, None]).any(axis=1)
            draw = np.where(dup, upper, draw)
        chosen[:, t] = np.where(active, draw, -1)
    return chosen


def generate_schedule(cfg: FrameConfig, seed: int) -> TransmissionSchedule:
    """Sample a frame's replica placements. Pure function of (cfg, seed).

    The seed feeds a PCG64 stream that is consumed in a fixed order (degrees
    first, then one draw column per Floyd step), so identical inputs always
    reproduce the same schedule within one build of this package.
    """
    rng = np.random.Generator(np.random.PCG64(seed))
    if cfg.n_users == 0:
        return TransmissionSchedule(cfg.n_slots, ())
    degrees = _sample_degrees(rng, cfg.protocol.distribution, cfg.n_users)
    chosen = _sample_slots(rng, degrees, cfg.n_slots)
    rows = chosen.tolist()
    degs = degrees.tolist()
    placements = tuple(tuple(row[:d]) for row, d in zip(rows, degs))
    users = np.repeat(np.arange(cfg.n_users, dtype=np.int64), degrees)
    slots = chosen[chosen >= 0]
    return TransmissionSchedule(cfg.n_slots, placements, _flat=(users, slots))
