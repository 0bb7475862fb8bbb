"""Walker state and time evolution U = S (G x I): coin first, then shift."""

from __future__ import annotations

import struct
from dataclasses import dataclass, replace

import numpy as np

from . import coinshift
from .gasket import PERIODIC, REFLECTIVE

__all__ = [
    "WalkerState",
    "ObserverError",
    "initial_state",
    "step",
    "evolve",
    "norm",
    "save_checkpoint",
    "load_checkpoint",
]


class ObserverError(RuntimeError):
    """An evolve() observer raised; carries the step index it failed at."""

    def __init__(self, step_index, cause):
        super().__init__(f"observer failed at step {step_index}: {cause!r}")
        self.step_index = step_index


@dataclass(frozen=True)
class WalkerState:
    """Complex amplitudes over (vertex, direction) ports at one time step.

    The array has a fixed 6-slot row per vertex; slots outside the vertex's
    valid direction set are pinned to exactly zero.  Total probability stays
    1 up to accumulated round-off.
    """

    graph: object
    amplitudes: np.ndarray
    time: int = 0

    def norm(self):
        a = self.amplitudes
        return float(np.sqrt((a.real ** 2 + a.imag ** 2).sum()))


def norm(state):
    return state.norm()


def initial_state(graph, v0):
    """Uniform coin state over the valid ports of v0: amplitude 1/sqrt(deg).

    At degree-4 vertices this is the unbiased diagonal coin state; at the
    reflective corners it is its natural two-port analogue.
    """
    i = graph.index_of(v0)
    amps = np.zeros((graph.num_vertices, 6), dtype=np.complex128)
    d = int(graph.degrees[i])
    amps[i, graph.dirmask[i]] = 1.0 / np.sqrt(d)
    return WalkerState(graph=graph, amplitudes=amps, time=0)


def step(graph, shift, coin, state):
    """Advance one step: Grover coin per vertex, then flip-flop shift."""
    if coin is None:
        coin = coinshift.build_coin(graph)
    after_coin = coin.apply(state)
    after_shift = coinshift.apply_shift(shift, after_coin)
    return replace(after_shift, time=state.time + 1)


def evolve(graph, shift, coin, state, steps, observer=None):
    """Apply `step` exactly `steps` times, reporting each new state.

    The observer gets read access to the state after every application; an
    observer exception aborts the run and is wrapped with its step index.
    """
    if steps < 0:
        raise ValueError(f"steps must be >= 0, got {steps}")
    for i in range(steps):
        state = step(graph, shift, coin, state)
        if observer is not None:
            try:
                observer(state)
            except Exception as exc:
                raise ObserverError(state.time, exc) from exc
    return state


def _raw_step(gainmask, forward, amps):
    """One unvalidated step on a bare (N, 6) amplitude array."""
    s = amps.sum(axis=1)
    amps = gainmask * s[:, None] - amps
    return amps.reshape(-1)[forward].reshape(amps.shape)


def _loop_amplitudes(state):
    """Amplitudes prepared for a long raw-step loop.

    The operator is real, so exactly-real states (every uniform start) can
    run in float64: identical bits at half the memory traffic.
    """
    amps = state.amplitudes
    if not amps.imag.any():
        return amps.real.copy()
    return amps.copy()


def _vertex_probabilities(amps):
    if np.iscomplexobj(amps):
        return (amps.real ** 2 + amps.imag ** 2).sum(axis=1)
    return (amps * amps).sum(axis=1)


# -- binary checkpoints ----------------------------------------------------

_HEADER = struct.Struct("<iiqi")  # generation, boundary flag, time, port count
_BOUNDARY_FLAG = {PERIODIC: 0, REFLECTIVE: 1}
_FLAG_BOUNDARY = {v: k for k, v in _BOUNDARY_FLAG.items()}


def save_checkpoint(path, state):
    """Write header plus little-endian float64 (re, im) pairs per valid port."""
    graph = state.graph
    header = _HEADER.pack(
        graph.generation, _BOUNDARY_FLAG[graph.boundary], state.time, graph.port_count
    )
    ports = state.amplitudes.reshape(-1)[graph.dirmask.reshape(-1)]
    pairs = np.empty((graph.port_count, 2), dtype="<f8")
    pairs[:, 0] = ports.real
    pairs[:, 1] = ports.imag
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(pairs.tobytes())


def load_checkpoint(path, graph):
    with open(path, "rb") as fh:
        raw = fh.read(_HEADER.size)
        g, flag, t, port_count = _HEADER.unpack(raw)
        if g != graph.generation or _FLAG_BOUNDARY[flag] != graph.boundary:
            raise ValueError(
                f"checkpoint is for generation {g} {_FLAG_BOUNDARY[flag]}, "
                f"graph is generation {graph.generation} {graph.boundary}"
            )
        if port_count != graph.port_count:
            raise ValueError(f"checkpoint has {port_count} ports, graph has {graph.port_count}")
        pairs = np.frombuffer(fh.read(), dtype="<f8").reshape(port_count, 2)
    amps = np.zeros((graph.num_vertices, 6), dtype=np.complex128)
    amps.reshape(-1)[graph.dirmask.reshape(-1)] = pairs[:, 0] + 1j * pairs[:, 1]
    return WalkerState(graph=graph, amplitudes=amps, time=int(t))
