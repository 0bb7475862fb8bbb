"""Power-law fits, exponent sweeps, mixing times, and the classical comparator.

The all-vertex sweep batches many independent walkers into one array and
advances them together; work is split into fixed-size chunks so that results
are byte-identical no matter how many workers process them.
"""

from __future__ import annotations

import concurrent.futures
from dataclasses import dataclass

import numpy as np

from . import coinshift, evolution, spectral
from .gasket import PERIODIC, REFLECTIVE, build_gasket
from .observables import fmt

__all__ = [
    "PowerLawFit",
    "fit_power_law",
    "ExponentHistogram",
    "sweep_exponents",
    "sigma_series",
    "MixingResult",
    "tvd_decay_series",
    "scan_mixing_time",
    "envelope_prefactor",
    "fit_mixing_time",
    "mixing_time",
    "mixing_scaling",
    "classical_walk_series",
    "write_exponents_csv",
    "write_histogram_csv",
    "write_mean_sigma_csv",
    "write_mixing_csv",
]

# Fixed batch width of the sweep engine.  Chunk boundaries, not worker
# assignment, determine summation order, so any worker count reproduces
# the same bytes.
SWEEP_CHUNK = 128

HISTOGRAM_BINS = 40


@dataclass(frozen=True)
class PowerLawFit:
    """Least-squares line in log-log space: value ~ prefactor * t^exponent."""

    prefactor: float
    exponent: float
    window: tuple
    residual: float


def _fit_rows(t, rows, window, min_points=5):
    """Vectorized log-log line fit of every row over the window.

    Returns (prefactor, exponent, residual) arrays.  Shared by the scalar
    fit and the sweep so both produce identical numbers.
    """
    t = np.asarray(t, dtype=np.float64)
    rows = np.atleast_2d(np.asarray(rows, dtype=np.float64))
    lo, hi = window
    if lo > hi:
        raise ValueError(f"empty fit window [{lo}, {hi}]")
    sel = (t >= lo) & (t <= hi)
    if sel.sum() < min_points:
        raise ValueError(f"fit window [{lo}, {hi}] holds {int(sel.sum())} points, need >= {min_points}")
    tw = t[sel]
    if np.any(tw < 1):
        raise ValueError("fit abscissae must be >= 1")
    vals = rows[:, sel]
    bad = np.argwhere(vals <= 0)
    if bad.size:
        r, c = bad[0]
        raise ValueError(f"nonpositive value {vals[r, c]} at series index {int(np.nonzero(sel)[0][c])}")
    x = np.log(tw)
    y = np.log(vals)
    xc = x - x.mean()
    denom = float(xc @ xc)
    if denom == 0.0:
        raise ValueError("degenerate fit window: all abscissae equal")
    slope = (y @ xc) / denom
    intercept = y.mean(axis=1) - slope * x.mean()
    resid = y - (intercept[:, None] + slope[:, None] * x[None, :])
    rms = np.sqrt((resid ** 2).mean(axis=1))
    return np.exp(intercept), slope, rms


def fit_power_law(t, values, window=None):
    """Fit value = a * t^b by least squares on log-log axes.

    Exact power-law inputs are reproduced to full precision; the residual is
    the rms misfit of log(value) inside the window.
    """
    t = np.asarray(t, dtype=np.float64)
    if window is None:
        window = (float(t.min()), float(t.max()))
    a, b, rms = _fit_rows(t, values, window)
    return PowerLawFit(prefactor=float(a[0]), exponent=float(b[0]), window=tuple(window), residual=float(rms[0]))


# -- batched sigma series ---------------------------------------------------


def _position_moment_matrix(graph):
    x = graph.xy[:, 0].astype(np.float64)
    y = graph.xy[:, 1].astype(np.float64)
    return np.column_stack([x, x * x, y, y * y])


def _sigma_chunk(graph, forward, start_indices, steps):
    """Sigma(t) series for a batch of initial vertices, t = 0..steps.

    Uniform starts are real and the evolution operator is a real matrix
    (permutation times real Grover blocks), so the whole run stays real;
    float64 amplitudes give bit-identical results at half the memory
    traffic of the complex path.
    """
    n = graph.num_vertices
    b = len(start_indices)
    amps = np.zeros((b, n, 6))
    inv_sqrt_deg = 1.0 / np.sqrt(graph.degrees.astype(np.float64))
    for row, vi in enumerate(start_indices):
        amps[row, vi, graph.dirmask[vi]] = inv_sqrt_deg[vi]
    moments = _position_moment_matrix(graph)
    gain = graph.coin_gainmask[None, :, :]
    out = np.zeros((b, steps + 1))
    work = np.empty_like(amps)
    prob = np.empty((b, n))
    for t in range(1, steps + 1):
        s = amps.sum(axis=2)
        np.multiply(gain, s[:, :, None], out=work)
        np.subtract(work, amps, out=work)
        np.take(work.reshape(b, -1), forward, axis=1, out=amps.reshape(b, -1))
        np.multiply(amps, amps, out=work)
        np.sum(work, axis=2, out=prob)
        m = prob @ moments
        vx = np.clip(m[:, 1] - m[:, 0] ** 2, 0.0, None)
        vy = np.clip(m[:, 3] - m[:, 2] ** 2, 0.0, None)
        out[:, t] = np.sqrt(vx + vy)
    return out


_WORKER_GRAPH = None


def _sweep_worker_init(spec):
    global _WORKER_GRAPH
    graph = build_gasket(spec)
    _WORKER_GRAPH = (graph, coinshift.build_shift(graph).forward)


def _sweep_worker_task(args):
    lo, hi, steps = args
    graph, forward = _WORKER_GRAPH
    return _sigma_chunk(graph, forward, np.arange(lo, hi), steps)


def sigma_series(graph, start, steps):
    """Sigma(t) for t = 0..steps from one initial vertex."""
    forward = coinshift.build_shift(graph).forward
    return _sigma_chunk(graph, forward, [graph.index_of(start)], steps)[0]


def _all_sigma_series(graph, steps, workers=None):
    n = graph.num_vertices
    bounds = [(lo, min(lo + SWEEP_CHUNK, n), steps) for lo in range(0, n, SWEEP_CHUNK)]
    if workers and workers > 1 and len(bounds) > 1:
        with concurrent.futures.ProcessPoolExecutor(
            max_workers=workers, initializer=_sweep_worker_init, initargs=(graph.spec,)
        ) as pool:
            chunks = list(pool.map(_sweep_worker_task, bounds))
    else:
        forward = coinshift.build_shift(graph).forward
        chunks = [_sigma_chunk(graph, forward, np.arange(lo, hi), steps) for lo, hi, _ in bounds]
    return np.vstack(chunks)


@dataclass(frozen=True)
class ExponentHistogram:
    """Per-start diffusion-exponent census of one gasket.

    dw holds the fitted walk dimension 1/exponent per initial vertex, in
    graph order; bin counts always add up to the vertex count.
    """

    xy: np.ndarray
    prefactor: np.ndarray
    exponent: np.ndarray
    residual: np.ndarray
    dw: np.ndarray
    bin_edges: np.ndarray
    counts: np.ndarray
    mean_series: np.ndarray
    mean_fit: PowerLawFit
    window: tuple
    steps: int


def sweep_exponents(graph, steps, window=None, workers=None):
    """Fit the spread exponent from every initial vertex (reflective walks).

    Each vertex seeds its local uniform coin state; sigma(t) is recorded for
    t <= steps and fitted over the window, by default [1, steps]: slowly
    spreading starts saturate early, so their power-law regime is the early
    growth and a late-only window would underestimate their exponent.  Also
    emits the mean series sigma_bar(t) and its fit.  Displacement runs stay
    below the wrap cutoff, so steps may not exceed 2^g.
    """
    if graph.boundary != REFLECTIVE:
        raise ValueError("exponent sweeps use reflective boundary conditions")
    if steps > 2 ** graph.generation:
        raise ValueError(
            f"steps={steps} beyond the saturation guard 2^g={2 ** graph.generation}; "
            f"fits need the pre-cutoff regime"
        )
    if window is None:
        window = (1, steps)
    sigma = _all_sigma_series(graph, steps, workers=workers)
    t = np.arange(steps + 1)
    a, b, rms = _fit_rows(t, sigma, window)
    dw = 1.0 / b
    lo, hi = float(dw.min()), float(dw.max())
    if lo == hi:
        lo, hi = lo - 0.02, hi + 0.02
    edges = np.linspace(lo, hi, HISTOGRAM_BINS + 1)
    counts, _ = np.histogram(dw, bins=edges)
    mean_series = sigma.mean(axis=0)
    am, bm, rm = _fit_rows(t, mean_series, window)
    mean_fit = PowerLawFit(prefactor=float(am[0]), exponent=float(bm[0]), window=tuple(window), residual=float(rm[0]))
    return ExponentHistogram(
        xy=graph.xy,
        prefactor=a,
        exponent=b,
        residual=rms,
        dw=dw,
        bin_edges=edges,
        counts=counts,
        mean_series=mean_series,
        mean_fit=mean_fit,
        window=tuple(window),
        steps=steps,
    )


# -- mixing -----------------------------------------------------------------


@dataclass(frozen=True)
class MixingResult:
    """Mixing time at one threshold; tau is None when the scan never settles."""

    epsilon: float
    tau: int | None
    horizon: int
    method: str = "scan"

    @property
    def mixed(self):
        return self.tau is not None


def tvd_decay_series(graph, initial, horizon, pi):
    """Total variation distance of the running average to pi, T = 1..horizon."""
    shift = coinshift.build_shift(graph)
    amps = evolution._loop_amplitudes(initial)
    gain, fwd = graph.coin_gainmask, shift.forward
    target = pi.p
    acc = evolution._vertex_probabilities(amps)
    out = np.empty(horizon)
    out[0] = 0.5 * np.abs(acc - target).sum()
    for T in range(2, horizon + 1):
        amps = evolution._raw_step(gain, fwd, amps)
        acc += evolution._vertex_probabilities(amps)
        out[T - 1] = 0.5 * np.abs(acc / T - target).sum()
    return out


def scan_mixing_time(series, epsilon, horizon=None, method="scan"):
    """Last-crossing-plus-one scan: smallest computed T with the tail under epsilon.

    The series is indexed from T = 1.  When even the final value exceeds
    epsilon the chain has not mixed within the horizon (tau = None).
    """
    series = np.asarray(series)
    if horizon is None:
        horizon = series.size
    if series[-1] > epsilon:
        return MixingResult(epsilon=epsilon, tau=None, horizon=horizon, method=method)
    above = np.nonzero(series > epsilon)[0]
    tau = int(above[-1]) + 2 if above.size else 1
    return MixingResult(epsilon=epsilon, tau=tau, horizon=horizon, method=method)


def envelope_prefactor(series, t_min=20):
    """Level c of the 1/T envelope: least-squares fit of the model c/T.

    With the slope pinned at -1 the estimate is the geometric mean of
    T * tvd(T), which is what a best fit of the form c/T reports.
    """
    series = np.asarray(series)
    t = np.arange(1, series.size + 1)
    sel = t >= t_min
    if not sel.any():
        raise ValueError(f"no points at T >= {t_min}")
    return float(np.exp(np.mean(np.log(t[sel] * series[sel]))))


def fit_mixing_time(series, epsilon, horizon=None, t_min=20):
    """Mixing time extrapolated from the fitted 1/T envelope: tau = c/eps.

    This is the route the reference analysis takes for its size-scaling
    study; the scan route crosses large thresholds in the pre-asymptotic
    regime on small graphs, where tau has not yet reached the envelope.
    """
    c = envelope_prefactor(series, t_min=t_min)
    tau = int(np.ceil(c / epsilon))
    if horizon is None:
        horizon = len(series)
    return MixingResult(epsilon=epsilon, tau=tau, horizon=horizon, method="fit-extrapolated")


def resolve_limiting(graph, initial, dense_cap=spectral.DENSE_PORT_CAP, empirical_horizon=100_000, prefer=None):
    """Pick the limiting distribution route: spectral when it fits, else empirical."""
    use_spectral = graph.port_count <= dense_cap if prefer is None else prefer == "spectral"
    if use_spectral:
        decomp = spectral.spectral_decomposition(graph, cap=dense_cap)
        return spectral.limiting_distribution(decomp, initial)
    return spectral.empirical_limiting(graph, initial, horizon=empirical_horizon)


def mixing_time(
    graph,
    initial,
    epsilon,
    horizon,
    pi=None,
    dense_cap=spectral.DENSE_PORT_CAP,
    empirical_horizon=100_000,
    method="scan",
):
    """Mixing time against pi, by direct scan or by 1/T-envelope extrapolation.

    The mixing analysis runs on periodic corners, following the convention
    of computing limiting behavior on the 4-regular wiring.
    """
    if graph.boundary != PERIODIC:
        raise ValueError("mixing analysis uses periodic boundary conditions")
    if not (0.0 < epsilon < 1.0):
        raise ValueError(f"epsilon must lie in (0, 1), got {epsilon}")
    if horizon < 1:
        raise ValueError(f"horizon must be >= 1, got {horizon}")
    if method not in ("scan", "fit"):
        raise ValueError(f"method must be 'scan' or 'fit', got {method!r}")
    if pi is None:
        pi = resolve_limiting(graph, initial, dense_cap=dense_cap, empirical_horizon=empirical_horizon)
    series = tvd_decay_series(graph, initial, horizon, pi)
    if method == "fit":
        return fit_mixing_time(series, epsilon, horizon)
    return scan_mixing_time(series, epsilon, horizon)


def mixing_scaling(results):
    """Power-law fit of tau versus vertex count over several generations."""
    results = list(results)
    if len(results) < 3:
        raise ValueError(f"need at least 3 (N, tau) pairs, got {len(results)}")
    ns = np.array([float(n) for n, _ in results])
    taus = np.array([float(tau) for _, tau in results])
    if np.unique(ns).size != ns.size:
        raise ValueError("duplicate N values make the scaling fit degenerate")
    order = np.argsort(ns)
    a, b, rms = _fit_rows(ns[order], taus[order], (ns.min(), ns.max()), min_points=3)
    return PowerLawFit(prefactor=float(a[0]), exponent=float(b[0]), window=(float(ns.min()), float(ns.max())), residual=float(rms[0]))


# -- classical comparator ----------------------------------------------------


def classical_walk_series(graph, start, steps):
    """Sigma(t) of the simple random walk iterated as an exact distribution.

    p_{t+1}(v) = sum over neighbors u of p_t(u)/deg(u); the per-step kernel
    is the graph's wired adjacency, so corners bounce or wrap exactly as the
    quantum walk's shift does.
    """
    n = graph.num_vertices
    p = np.zeros(n)
    p[graph.index_of(start)] = 1.0
    deg = graph.degrees.astype(np.float64)
    nbr = graph.nbr_vertex
    mask = graph.dirmask
    moments = _position_moment_matrix(graph)

    def sigma_of(dist):
        m = dist @ moments
        vx = max(m[1] - m[0] ** 2, 0.0)
        vy = max(m[3] - m[2] ** 2, 0.0)
        return np.sqrt(vx + vy)

    t = np.arange(steps + 1)
    sig = np.zeros(steps + 1)
    sig[0] = sigma_of(p)
    for i in range(1, steps + 1):
        q = p / deg
        p = np.where(mask, q[nbr], 0.0).sum(axis=1)
        sig[i] = sigma_of(p)
    return t, sig


# -- CSV exports --------------------------------------------------------------


def write_exponents_csv(path, hist):
    with open(path, "w") as fh:
        fh.write("x,y,a,exponent,residual\n")
        for (x, y), a, b, r in zip(hist.xy, hist.prefactor, hist.exponent, hist.residual):
            fh.write(f"{int(x)},{int(y)},{fmt(a)},{fmt(b)},{fmt(r)}\n")


def write_histogram_csv(path, hist):
    with open(path, "w") as fh:
        fh.write("bin_lo,bin_hi,count\n")
        for lo, hi, c in zip(hist.bin_edges[:-1], hist.bin_edges[1:], hist.counts):
            fh.write(f"{fmt(lo)},{fmt(hi)},{int(c)}\n")


def write_mean_sigma_csv(path, hist):
    with open(path, "w") as fh:
        fh.write("t,sigma_mean\n")
        for t, s in enumerate(hist.mean_series):
            fh.write(f"{t},{fmt(s)}\n")


def write_mixing_csv(path, rows):
    """Rows of (N, epsilon, tau); unmixed scans are written with tau = -1."""
    with open(path, "w") as fh:
        fh.write("N,epsilon,tau\n")
        for n, eps, tau in rows:
            fh.write(f"{int(n)},{fmt(eps)},{-1 if tau is None else int(tau)}\n")
