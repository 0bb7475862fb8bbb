"""Probability fields, position spreads, time averages, TVD, CSV exports."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "ProbabilityField",
    "StdDevSample",
    "TimeAverage",
    "probability",
    "stddev",
    "time_averaged",
    "tvd",
    "write_field_csv",
    "write_x_marginal_csv",
    "write_sigma_csv",
    "write_tvd_csv",
    "fmt",
]


def fmt(x):
    """Shortest round-trip decimal form of a float, for CSV output."""
    return repr(float(x))


@dataclass(frozen=True)
class ProbabilityField:
    """Nonnegative reals over the vertices of one graph, summing to 1."""

    graph: object
    p: np.ndarray
    label: str = "instant"

    def total(self):
        return float(self.p.sum())


def _require_same_graph(a, b):
    if a.graph is not b.graph and not a.graph.same_structure(b.graph):
        raise ValueError(
            f"probability fields live on different graphs: "
            f"g={a.graph.generation}/{a.graph.boundary} vs g={b.graph.generation}/{b.graph.boundary}"
        )


def probability(state):
    """Born-rule vertex distribution p(v) = sum_k |amplitude(v, k)|^2."""
    a = state.amplitudes
    p = (a.real ** 2 + a.imag ** 2).sum(axis=1)
    return ProbabilityField(graph=state.graph, p=p)


@dataclass(frozen=True)
class StdDevSample:
    t: int
    sigma_x: float
    sigma_y: float
    sigma: float


def position_moments(xy, p):
    """First and second moments of x and y under p: (Ex, Ex2, Ey, Ey2)."""
    x = xy[:, 0].astype(np.float64)
    y = xy[:, 1].astype(np.float64)
    return float(p @ x), float(p @ (x * x)), float(p @ y), float(p @ (y * y))


def stddev(field, t=0):
    """Position spread of a field: sigma^2 = sigma_x^2 + sigma_y^2.

    The x and y marginals are formed on the fly; a point mass gives exactly
    (0, 0, 0).
    """
    ex, ex2, ey, ey2 = position_moments(field.graph.xy, field.p)
    vx = max(ex2 - ex * ex, 0.0)
    vy = max(ey2 - ey * ey, 0.0)
    return StdDevSample(t=t, sigma_x=np.sqrt(vx), sigma_y=np.sqrt(vy), sigma=np.sqrt(vx + vy))


class TimeAverage:
    """Running Cesaro mean over per-step fields.

    Keeps a plain running sum and divides once on readout, so the result is
    independent of readout frequency and bit-reproducible.
    """

    def __init__(self, graph):
        self.graph = graph
        self._sum = np.zeros(graph.num_vertices, dtype=np.float64)
        self.count = 0

    def add(self, field):
        _require_same_graph(field, self)
        self._sum += field.p
        self.count += 1
        return self

    def mean(self):
        if self.count == 0:
            raise ValueError("no fields accumulated yet")
        return ProbabilityField(graph=self.graph, p=self._sum / self.count, label="time-averaged")


def time_averaged(accumulator, field, T):
    """Fold one more per-step field into the accumulator; return the mean.

    After the T-th call the result is the average of the first T fields.
    """
    accumulator.add(field)
    if accumulator.count != T:
        raise ValueError(f"accumulator holds {accumulator.count} fields, caller claims T={T}")
    return accumulator.mean()


def tvd(p, q):
    """Total variation distance, half the L1 distance; lies in [0, 1]."""
    _require_same_graph(p, q)
    return 0.5 * float(np.abs(p.p - q.p).sum())


# -- CSV exports -----------------------------------------------------------


def write_field_csv(path, field):
    """Vertex field dump ``x,y,p`` in (y, x) order."""
    with open(path, "w") as fh:
        fh.write("x,y,p\n")
        for (x, y), val in zip(field.graph.xy, field.p):
            fh.write(f"{int(x)},{int(y)},{fmt(val)}\n")


def write_x_marginal_csv(path, field):
    """Marginal over y: all probabilities with the same x added up."""
    xs = field.graph.xy[:, 0]
    uniq = np.unique(xs)
    sums = np.zeros(uniq.size)
    for i, x in enumerate(uniq):
        sums[i] = field.p[xs == x].sum()
    with open(path, "w") as fh:
        fh.write("x,p\n")
        for x, val in zip(uniq, sums):
            fh.write(f"{int(x)},{fmt(val)}\n")


def write_sigma_csv(path, samples):
    with open(path, "w") as fh:
        fh.write("t,sigma_x,sigma_y,sigma\n")
        for s in samples:
            fh.write(f"{s.t},{fmt(s.sigma_x)},{fmt(s.sigma_y)},{fmt(s.sigma)}\n")


def write_tvd_csv(path, series):
    """Decay series rows ``t,tvd`` with t starting at 1."""
    with open(path, "w") as fh:
        fh.write("t,tvd\n")
        for t, val in enumerate(series, start=1):
            fh.write(f"{t},{fmt(val)}\n")
