"""Weighted contiguous column partition of the tableau across compute lanes.

Lane 0 is always the CPU pool; device lanes follow in id order.  A fraction
``theta`` of the columns is offloaded to the devices and split between them in
proportion to their capabilities.
"""

from __future__ import annotations

import bisect
import math
from dataclasses import dataclass
from typing import Sequence

from .errors import EmptyCapabilities, LaneSpecError, ThetaOutOfRange, TooFewColumns

CPU_POOL = "cpu_pool"
DEVICE = "device"

# remainders closer than this are treated as ties
_TIE_DIGITS = 9


@dataclass(frozen=True)
class LaneSpec:
    lane_id: int
    kind: str
    capability: float = 1.0

    def __post_init__(self):
        if self.kind not in (CPU_POOL, DEVICE):
            raise LaneSpecError(f"unknown lane kind {self.kind!r}")
        if not self.capability > 0:
            raise LaneSpecError(f"lane {self.lane_id}: capability must be positive")


@dataclass(frozen=True)
class PartitionPlan:
    theta: float
    device_weights: tuple
    cpu_weight: float
    ranges: tuple  # (start, end) per lane, in lane order
    total_cols: int
    lane_ids: tuple

    @property
    def weights(self) -> tuple:
        return (self.cpu_weight,) + tuple(self.device_weights)

    @property
    def sizes(self) -> tuple:
        return tuple(end - start for start, end in self.ranges)

    def range_of(self, lane_id: int) -> tuple:
        return self.ranges[self.lane_ids.index(lane_id)]

    def owner_of(self, col: int) -> int:
        """Lane id whose range contains ``col``."""
        if not 0 <= col < self.total_cols:
            raise IndexError(f"column {col} outside [0, {self.total_cols})")
        ends = [end for _, end in self.ranges]
        return self.lane_ids[bisect.bisect_right(ends, col)]


def validate_lanes(lanes: Sequence[LaneSpec]) -> None:
    if not lanes:
        raise LaneSpecError("at least one lane is required")
    ids = [lane.lane_id for lane in lanes]
    if ids != list(range(len(lanes))):
        raise LaneSpecError(f"lane ids must be dense from 0 in order, got {ids}")
    if lanes[0].kind != CPU_POOL or any(lane.kind == CPU_POOL for lane in lanes[1:]):
        raise LaneSpecError("lane 0 must be the single cpu_pool lane")


def split_theta(theta: float, capabilities: Sequence[float]) -> tuple:
    """Share ``theta`` between devices in proportion to their capabilities."""
    if not 0.0 <= theta <= 1.0:
        raise ThetaOutOfRange(f"theta={theta} outside [0, 1]")
    if len(capabilities) == 0:
        raise EmptyCapabilities("no device capabilities given")
    if any(not c > 0 for c in capabilities):
        raise EmptyCapabilities(f"capabilities must be positive, got {list(capabilities)}")
    total = math.fsum(capabilities)
    return tuple(theta * c / total for c in capabilities)


def _largest_remainder(weights: Sequence[float], total: int) -> list:
    quotas = []
    for w in weights:
        q = w * total
        if abs(q - round(q)) < 1e-9:
            q = float(round(q))
        quotas.append(q)
    sizes = [int(math.floor(q)) for q in quotas]
    leftover = total - sum(sizes)
    order = sorted(range(len(weights)), key=lambda i: (-round(quotas[i] - sizes[i], _TIE_DIGITS), i))
    for i in order[:leftover]:
        sizes[i] += 1
    return sizes


def plan_partition(total_cols: int, theta: float, lanes: Sequence[LaneSpec]) -> PartitionPlan:
    validate_lanes(lanes)
    devices = lanes[1:]
    if not 0.0 <= theta <= 1.0:
        raise ThetaOutOfRange(f"theta={theta} outside [0, 1]")
    if devices:
        device_weights = split_theta(theta, [d.capability for d in devices])
    elif theta != 0.0:
        raise ThetaOutOfRange(f"theta={theta} requires at least one device lane")
    else:
        device_weights = ()
    cpu_weight = 1.0 - theta
    weights = (cpu_weight,) + device_weights

    guaranteed = sum(1 for w in weights if w * total_cols >= 1.0 - 1e-9)
    if total_cols < 1 or total_cols < guaranteed:
        raise TooFewColumns(f"{total_cols} columns cannot cover {guaranteed} lanes")

    sizes = _largest_remainder(weights, total_cols)
    ranges, start = [], 0
    for size in sizes:
        ranges.append((start, start + size))
        start += size
    return PartitionPlan(theta, device_weights, cpu_weight, tuple(ranges), total_cols,
                         tuple(lane.lane_id for lane in lanes))


def parse_lane_spec(text: str):
    """Parse ``cpu:<workers>[,dev:<capability>]*``.

    Returns ``(lanes, cpu_workers)``.
    """
    parts = [p.strip() for p in text.split(",") if p.strip()]
    if not parts:
        raise LaneSpecError("empty lane spec")
    kind, _, value = parts[0].partition(":")
    if kind != "cpu" or not value:
        raise LaneSpecError(f"lane spec must start with cpu:<workers>, got {parts[0]!r}")
    try:
        workers = int(value)
    except ValueError:
        raise LaneSpecError(f"bad worker count {value!r}") from None
    if workers < 1:
        raise LaneSpecError("cpu worker count must be >= 1")
    lanes = [LaneSpec(0, CPU_POOL, 1.0)]
    for part in parts[1:]:
        kind, _, value = part.partition(":")
        if kind != "dev":
            raise LaneSpecError(f"expected dev:<capability>, got {part!r}")
        try:
            capability = float(value)
        except ValueError:
            raise LaneSpecError(f"bad capability {value!r}") from None
        lanes.append(LaneSpec(len(lanes), DEVICE, capability))
    return lanes, workers


def format_lane_spec(lanes: Sequence[LaneSpec], cpu_workers: int) -> str:
    return ",".join([f"cpu:{cpu_workers}"] + [f"dev:{lane.capability:g}" for lane in lanes[1:]])
