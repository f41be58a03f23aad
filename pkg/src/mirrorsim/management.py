"""Probe and effector boundary between a managing system and the simulator.

The probe is the read-only monitoring surface; the effector queues adaptation
commands. Both are bound to exactly one simulation instance and must be
called from a single loop between steps (no concurrent access to one
instance).
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Iterator, Optional

from .network import Monitorables, Topology, round_half_up


class ProbeError(RuntimeError):
    """Raised when a scalar metric is probed before any timestep completed."""


class EffectorError(ValueError):
    """Raised when an effector command violates the simulator's invariants."""


class CommandKind(enum.Enum):
    SET_NETWORK_TOPOLOGY = "set_network_topology"
    SET_ACTIVE_LINKS = "set_active_links"
    SET_TIME_TO_WRITE = "set_time_to_write"
    SET_BANDWIDTH_CONSUMPTION = "set_bandwidth_consumption"
    SET_CURRENT_TOPOLOGY = "set_current_topology"


@dataclass(frozen=True)
class EffectorCommand:
    """One adaptation command as issued, for auditing and replay."""

    kind: CommandKind
    payload: object
    issued_at: int
    target_timestep: Optional[int] = None  # SET_NETWORK_TOPOLOGY only


class CommandLog:
    """Append-only record of every effector command issued during a run."""

    def __init__(self) -> None:
        self._entries: list[EffectorCommand] = []

    def append(self, command: EffectorCommand) -> None:
        self._entries.append(command)

    @property
    def entries(self) -> tuple[EffectorCommand, ...]:
        return tuple(self._entries)

    def issued_at(self, timestep: int) -> tuple[EffectorCommand, ...]:
        return tuple(cmd for cmd in self._entries if cmd.issued_at == timestep)

    def __len__(self) -> int:
        return len(self._entries)

    def __iter__(self) -> Iterator[EffectorCommand]:
        return iter(self._entries)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, CommandLog):
            return NotImplemented
        return self._entries == other._entries


class Probe:
    """Read-only view of the simulation state; never consumes randomness."""

    def __init__(self, sim) -> None:
        self._sim = sim

    def get_current_topology(self) -> Topology:
        """Topology in effect at the most recently completed timestep.

        Before the first step this is the scenario's initial topology.
        """
        return self._sim.current_topology

    def get_active_links(self) -> int:
        return self._latest().active_links

    def get_bandwidth_consumption(self) -> int:
        """Bandwidth consumption in GBps, rounded half-up at this interface."""
        return round_half_up(self._latest().bandwidth_consumption)

    def get_time_to_write(self) -> int:
        """Time to write in ms, rounded half-up at this interface."""
        return round_half_up(self._latest().time_to_write)

    def get_monitorables(self) -> Optional[Monitorables]:
        """The full unrounded record, or None before the first completed step."""
        return self._sim.latest_monitorables

    def _latest(self) -> Monitorables:
        latest = self._sim.latest_monitorables
        if latest is None:
            raise ProbeError("no completed timestep to observe yet")
        return latest


class Effector:
    """Write-only command surface; everything lands in the command log."""

    def __init__(self, sim) -> None:
        self._sim = sim

    def set_network_topology(self, timestep: int, topology: object) -> None:
        """Switch topology when the simulation advances into ``timestep``.

        The change lands before that step's monitorables are sampled; a later
        command for the same target wins.
        """
        target = self._parse_topology(topology)
        if not isinstance(timestep, int) or isinstance(timestep, bool):
            raise EffectorError(f"timestep must be an integer, got {timestep!r}")
        if timestep < self._sim.timestep:
            raise EffectorError(
                f"cannot target past timestep {timestep}"
                f" (current is {self._sim.timestep})"
            )
        self._sim.schedule_topology(timestep, target)
        self._log(CommandKind.SET_NETWORK_TOPOLOGY, target, target_timestep=timestep)

    def set_current_topology(self, topology: object) -> None:
        """Switch topology for the next executed step.

        Sugar for :meth:`set_network_topology` targeting the current timestep.
        """
        target = self._parse_topology(topology)
        self._sim.schedule_topology(self._sim.timestep, target)
        self._log(CommandKind.SET_CURRENT_TOPOLOGY, target)

    def set_active_links(self, active_links: int) -> None:
        """Override the next step's sampled active-link count (one step only)."""
        if not isinstance(active_links, int) or isinstance(active_links, bool):
            raise EffectorError(f"active_links must be an integer, got {active_links!r}")
        if active_links < 0:
            raise EffectorError("active_links must be >= 0")
        if active_links > self._sim.network.total_links:
            raise EffectorError(
                f"active_links {active_links} exceeds total links"
                f" {self._sim.network.total_links}"
            )
        self._sim.queue_override("active_links", active_links)
        self._log(CommandKind.SET_ACTIVE_LINKS, active_links)

    def set_time_to_write(self, time_to_write: float) -> None:
        """Override the next step's write time in ms (one step only)."""
        value = self._checked_scalar("time_to_write", time_to_write)
        self._sim.queue_override("time_to_write", value)
        self._log(CommandKind.SET_TIME_TO_WRITE, value)

    def set_bandwidth_consumption(self, bandwidth_consumption: float) -> None:
        """Override the next step's bandwidth in GBps (one step only)."""
        value = self._checked_scalar("bandwidth_consumption", bandwidth_consumption)
        self._sim.queue_override("bandwidth_consumption", value)
        self._log(CommandKind.SET_BANDWIDTH_CONSUMPTION, value)

    @staticmethod
    def _parse_topology(topology: object) -> Topology:
        try:
            return Topology.parse(topology)
        except ValueError as exc:
            raise EffectorError(str(exc)) from None

    @staticmethod
    def _checked_scalar(name: str, value: object) -> float:
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise EffectorError(f"{name} must be a number, got {value!r}")
        value = float(value)
        if math.isnan(value) or math.isinf(value) or value < 0:
            raise EffectorError(f"{name} must be a finite value >= 0, got {value}")
        return value

    def _log(self, kind: CommandKind, payload: object, target_timestep: Optional[int] = None) -> None:
        self._sim.command_log.append(
            EffectorCommand(
                kind=kind,
                payload=payload,
                issued_at=self._sim.timestep,
                target_timestep=target_timestep,
            )
        )
