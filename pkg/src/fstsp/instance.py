"""Problem data: immutable instances, the benchmark-style generator and JSON I/O.

Node convention: 0 is the start depot, 1..c are customers, c+1 is the end
depot.  Nodes 0 and c+1 are the same physical location, so the travel time
between them is 0 for both vehicles.  All times are minutes, stored at a
fixed 1e-6 resolution so that serialization round-trips bit-exactly.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Iterator, Optional, Sequence

TIME_RESOLUTION = 6  # decimal digits of a minute kept everywhere

TRUCK_SPEED_MPH = 25.0

DEPOT_POSITIONS = {
    "a": (4.0, 4.0),   # barycentre of the customer square
    "b": (8.0, 4.0),   # right border, vertically centred
    "c": (8.0, 0.0),   # right border, bottom corner
    "d": (8.0, -4.0),  # below the square, offset by the barycentre distance
}

RNG_NAME = "splitmix64"

FILE_VERSION = 1


class ParameterError(ValueError):
    """Invalid generator parameter (ratio out of range, nonpositive endurance, ...)."""


class InstanceFormatError(ValueError):
    """Malformed instance file; ``field`` names the offending entry."""

    def __init__(self, message: str, field: str = "") -> None:
        super().__init__(f"{field}: {message}" if field else message)
        self.field = field


class SplitMix64:
    """Deterministic 64-bit generator (splitmix64), the stream behind every
    generated instance.  Small and fully specified here so golden files never
    depend on a third-party RNG implementation."""

    MASK = (1 << 64) - 1

    def __init__(self, seed: int) -> None:
        self.state = seed & self.MASK

    def next_u64(self) -> int:
        self.state = (self.state + 0x9E3779B97F4A7C15) & self.MASK
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & self.MASK
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & self.MASK
        return z ^ (z >> 31)

    def uniform(self) -> float:
        """Uniform double in [0, 1) from the top 53 bits."""
        return (self.next_u64() >> 11) * 2.0 ** -53

    def sample(self, population: Sequence[int], k: int) -> list[int]:
        """k distinct items via a partial Fisher-Yates pass."""
        pool = list(population)
        out = []
        for _ in range(k):
            idx = int(self.uniform() * len(pool))
            idx = min(idx, len(pool) - 1)
            out.append(pool.pop(idx))
        return out


def _round_time(value: float) -> float:
    return round(value, TIME_RESOLUTION)


@dataclass(frozen=True)
class Instance:
    """Immutable FSTSP instance.

    ``truck_time`` and ``drone_time`` are (c+2) x (c+2) tuples of minutes with
    ``None`` on the diagonal.  ``drone_eligible`` is the subset of customers a
    sortie may serve.  Safe to share across concurrent solver runs.
    """

    c: int
    drone_eligible: frozenset[int]
    truck_time: tuple[tuple[Optional[float], ...], ...]
    drone_time: tuple[tuple[Optional[float], ...], ...]
    sigma_l: float
    sigma_r: float
    endurance: float
    coords: Optional[tuple[tuple[float, float], ...]] = None
    meta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self) -> None:
        n = self.c + 2
        if self.c < 1:
            raise InstanceFormatError("need at least one customer", "c")
        for name, mat in (("truck_time", self.truck_time), ("drone_time", self.drone_time)):
            if len(mat) != n or any(len(row) != n for row in mat):
                raise InstanceFormatError(f"matrix must be {n}x{n}", name)
            for i in range(n):
                for j in range(n):
                    v = mat[i][j]
                    if i == j:
                        continue
                    if v is None or not math.isfinite(v):
                        raise InstanceFormatError(f"entry ({i},{j}) must be a finite number", name)
                    if v < 0:
                        raise InstanceFormatError(f"entry ({i},{j}) is negative", name)
            if mat[0][n - 1] != 0:
                raise InstanceFormatError("depot split time must be 0", name)
        if not self.drone_eligible <= frozenset(self.customers()):
            raise InstanceFormatError("eligible ids must be customers 1..c", "eligible")
        if self.sigma_l < 0 or self.sigma_r < 0:
            raise InstanceFormatError("service times must be >= 0", "sigma")
        if self.endurance <= 0:
            raise InstanceFormatError("endurance must be > 0", "endurance")
        if self.coords is not None and len(self.coords) != n:
            raise InstanceFormatError(f"need {n} coordinate pairs", "coords")

    # -- node sets ---------------------------------------------------------

    @property
    def end_depot(self) -> int:
        return self.c + 1

    def nodes(self) -> range:
        return range(self.c + 2)

    def customers(self) -> range:
        return range(1, self.c + 1)

    def launch_nodes(self) -> range:
        """N0: every node the drone may launch from."""
        return range(0, self.c + 1)

    def rendezvous_nodes(self) -> range:
        """N+: every node the drone may return to."""
        return range(1, self.c + 2)

    def arcs(self) -> Iterator[tuple[int, int]]:
        for i in self.launch_nodes():
            for j in self.rendezvous_nodes():
                if i != j:
                    yield (i, j)

    def tau_truck(self, i: int, j: int) -> float:
        v = self.truck_time[i][j]
        assert v is not None
        return v

    def tau_drone(self, i: int, j: int) -> float:
        v = self.drone_time[i][j]
        assert v is not None
        return v

    def sortie_energy(self, i: int, j: int, k: int) -> float:
        """Flight time of <i,j,k> plus the rendezvous service charge."""
        return self.tau_drone(i, j) + self.tau_drone(j, k) + self.sigma_r


@dataclass(frozen=True)
class SortieCatalog:
    """All triplets <launch i, customer j, rendezvous k> flyable within the
    endurance: tau_D(i,j) + tau_D(j,k) + sigma_r <= E."""

    triplets: frozenset[tuple[int, int, int]]

    def __contains__(self, triplet: tuple[int, int, int]) -> bool:
        return triplet in self.triplets

    def __len__(self) -> int:
        return len(self.triplets)

    def sorted(self) -> list[tuple[int, int, int]]:
        return sorted(self.triplets)


def sortie_catalog(inst: Instance) -> SortieCatalog:
    out = set()
    for i in inst.launch_nodes():
        for j in sorted(inst.drone_eligible):
            if j == i:
                continue
            for k in inst.rendezvous_nodes():
                if k == i or k == j:
                    continue
                if inst.sortie_energy(i, j, k) <= inst.endurance:
                    out.add((i, j, k))
    return SortieCatalog(frozenset(out))


def generate_instance(
    seed: int,
    c: int,
    depot_pos: str,
    endurance: float,
    drone_speed: float,
    eligible_ratio: float,
    sigma_l: float = 1.0,
    sigma_r: float = 1.0,
) -> Instance:
    """Random benchmark-style instance: customers uniform in the 8x8-mile
    square, truck on Manhattan distances at 25 mph, drone on Euclidean
    distances at ``drone_speed`` mph.  Deterministic in all arguments.
    """
    if c < 1:
        raise ParameterError("c must be >= 1")
    if not 0.0 < eligible_ratio <= 1.0:
        raise ParameterError("eligible_ratio must be in (0, 1]")
    if endurance <= 0:
        raise ParameterError("endurance must be > 0")
    if drone_speed <= 0:
        raise ParameterError("drone_speed must be > 0")
    if depot_pos not in DEPOT_POSITIONS:
        raise ParameterError(f"depot_pos must be one of {sorted(DEPOT_POSITIONS)}")

    rng = SplitMix64(seed)
    depot = DEPOT_POSITIONS[depot_pos]
    pts = [depot]
    for _ in range(c):
        x = round(rng.uniform() * 8.0, TIME_RESOLUTION)
        y = round(rng.uniform() * 8.0, TIME_RESOLUTION)
        pts.append((x, y))
    pts.append(depot)

    n = c + 2
    truck = [[None] * n for _ in range(n)]
    drone = [[None] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            if i == j:
                continue
            dx = abs(pts[i][0] - pts[j][0])
            dy = abs(pts[i][1] - pts[j][1])
            truck[i][j] = _round_time((dx + dy) / TRUCK_SPEED_MPH * 60.0)
            drone[i][j] = _round_time(math.hypot(dx, dy) / drone_speed * 60.0)
    # the two depot copies are one physical point
    truck[0][n - 1] = truck[n - 1][0] = 0.0
    drone[0][n - 1] = drone[n - 1][0] = 0.0

    n_eligible = math.ceil(eligible_ratio * c)
    eligible = frozenset(rng.sample(list(range(1, c + 1)), n_eligible))

    return Instance(
        c=c,
        drone_eligible=eligible,
        truck_time=tuple(tuple(row) for row in truck),
        drone_time=tuple(tuple(row) for row in drone),
        sigma_l=float(sigma_l),
        sigma_r=float(sigma_r),
        endurance=float(endurance),
        coords=tuple(pts),
        meta={
            "seed": seed,
            "depot_pos": depot_pos,
            "drone_speed": drone_speed,
            "eligible_ratio": eligible_ratio,
            "rng": RNG_NAME,
        },
    )


# -- JSON I/O ---------------------------------------------------------------


def instance_to_dict(inst: Instance) -> dict:
    return {
        "version": FILE_VERSION,
        "c": inst.c,
        "eligible": sorted(inst.drone_eligible),
        "sigma_l": inst.sigma_l,
        "sigma_r": inst.sigma_r,
        "endurance": inst.endurance,
        "truck_time": [list(row) for row in inst.truck_time],
        "drone_time": [list(row) for row in inst.drone_time],
        "coords": [list(p) for p in inst.coords] if inst.coords is not None else None,
        "meta": dict(inst.meta),
    }


def write_instance(inst: Instance) -> str:
    return json.dumps(instance_to_dict(inst), indent=1, sort_keys=True)


def instance_from_dict(data: dict) -> Instance:
    if not isinstance(data, dict):
        raise InstanceFormatError("root must be an object")
    if data.get("version") != FILE_VERSION:
        raise InstanceFormatError(f"expected version {FILE_VERSION}", "version")
    try:
        c = int(data["c"])
        eligible = frozenset(int(x) for x in data["eligible"])
        sigma_l = float(data["sigma_l"])
        sigma_r = float(data["sigma_r"])
        endurance = float(data["endurance"])
        truck = data["truck_time"]
        drone = data["drone_time"]
    except KeyError as exc:
        raise InstanceFormatError("missing required field", str(exc.args[0])) from None
    except (TypeError, ValueError) as exc:
        raise InstanceFormatError(str(exc)) from None

    def _matrix(raw: object, name: str) -> tuple:
        if not isinstance(raw, list):
            raise InstanceFormatError("must be a list of rows", name)
        rows = []
        for i, row in enumerate(raw):
            if not isinstance(row, list):
                raise InstanceFormatError(f"row {i} must be a list", name)
            vals = []
            for j, v in enumerate(row):
                if v is None:
                    vals.append(None)
                elif isinstance(v, (int, float)):
                    vals.append(float(v))
                else:
                    raise InstanceFormatError(f"entry ({i},{j}) must be a number or null", name)
            rows.append(tuple(vals))
        return tuple(rows)

    coords_raw = data.get("coords")
    coords = None
    if coords_raw is not None:
        coords = tuple((float(p[0]), float(p[1])) for p in coords_raw)
    return Instance(
        c=c,
        drone_eligible=eligible,
        truck_time=_matrix(truck, "truck_time"),
        drone_time=_matrix(drone, "drone_time"),
        sigma_l=sigma_l,
        sigma_r=sigma_r,
        endurance=endurance,
        coords=coords,
        meta=dict(data.get("meta") or {}),
    )


def read_instance(text: str) -> Instance:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InstanceFormatError(f"invalid JSON: {exc}") from None
    return instance_from_dict(data)
