"""Dense evolution operator, eigenstructure, and limiting distributions.

Everything here works on the compact port basis (valid ports only, in graph
order), which keeps the dense operator at 4N (periodic) or 4N-6 (reflective)
dimensions.  The eigendecomposition doubles as the independent oracle for the
sparse evolution path and yields the Cesaro limit pi explicitly.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from . import coinshift, evolution
from .observables import ProbabilityField

__all__ = [
    "DENSE_PORT_CAP",
    "DimensionCapError",
    "build_dense_unitary",
    "SpectralDecomposition",
    "spectral_decomposition",
    "limiting_distribution",
    "exact_time_average",
    "empirical_limiting",
    "state_to_port_vector",
    "port_vector_to_state",
    "EIGENVALUE_TOL",
]

DENSE_PORT_CAP = 8192
EIGENVALUE_TOL = 1e-9


class DimensionCapError(RuntimeError):
    """Dense construction refused: the port space exceeds the configured cap."""

    def __init__(self, port_count, cap):
        super().__init__(
            f"dense operator needs {port_count} ports, above the cap of {cap}; "
            f"raise the cap explicitly or use the empirical route"
        )
        self.port_count = port_count
        self.cap = cap


def state_to_port_vector(graph, state):
    return state.amplitudes.reshape(-1)[graph.dirmask.reshape(-1)].copy()


def port_vector_to_state(graph, vec, time=0):
    amps = np.zeros((graph.num_vertices, 6), dtype=np.complex128)
    amps.reshape(-1)[graph.dirmask.reshape(-1)] = vec
    return evolution.WalkerState(graph=graph, amplitudes=amps, time=time)


def _compact_forward(graph):
    """Shift involution re-indexed to the compact port basis."""
    shift = coinshift.build_shift(graph)
    flat_valid = np.nonzero(graph.dirmask.reshape(-1))[0]
    return graph.port_index.reshape(-1)[shift.forward[flat_valid]]


def build_dense_unitary(graph, cap=DENSE_PORT_CAP):
    """Materialize U = S (G x I) on the compact port basis.

    The coin factor is block diagonal with one Grover block per vertex; the
    shift factor permutes rows.  Refuses graphs whose port space exceeds the
    cap instead of silently thrashing memory.
    """
    n_ports = graph.port_count
    if n_ports > cap:
        raise DimensionCapError(n_ports, cap)
    coin = np.zeros((n_ports, n_ports))
    offset = 0
    for d in graph.degrees:
        d = int(d)
        coin[offset : offset + d, offset : offset + d] = coinshift.coin_matrix(d)
        offset += d
    return coin[_compact_forward(graph), :].astype(np.complex128)


@dataclass(frozen=True)
class SpectralDecomposition:
    """Schur-based eigenstructure of the dense evolution operator.

    eigenvalues holds one unit-modulus representative per eigenspace after
    grouping nearly equal values; groups lists the orthonormal column index
    set of each eigenspace inside vectors.
    """

    graph: object
    eigenvalues: np.ndarray
    groups: tuple
    vectors: np.ndarray
    tol: float

    @property
    def multiplicities(self):
        return np.array([len(g) for g in self.groups])

    def raw_eigenvalues(self):
        """Ungrouped eigenvalues, one per port dimension."""
        out = np.empty(self.vectors.shape[0], dtype=np.complex128)
        for lam, idx in zip(self.eigenvalues, self.groups):
            out[list(idx)] = lam
        return out

    def reconstruct(self):
        """Sum of lambda_c P_c over eigenspaces; should reproduce U."""
        q = self.vectors
        u = np.zeros_like(q)
        for lam, idx in zip(self.eigenvalues, self.groups):
            block = q[:, list(idx)]
            u += lam * (block @ block.conj().T)
        return u

    def eigenvalue_rows(self):
        """CSV dump rows ``re,im,multiplicity`` in phase order."""
        return [
            (float(lam.real), float(lam.imag), len(idx))
            for lam, idx in zip(self.eigenvalues, self.groups)
        ]


def _group_unit_eigenvalues(evals, tol):
    """Partition unit-circle eigenvalues into clusters of spacing <= tol."""
    order = np.argsort(np.angle(evals), kind="stable")
    groups = []
    current = [order[0]]
    for idx in order[1:]:
        if abs(evals[idx] - evals[current[-1]]) <= tol:
            current.append(idx)
        else:
            groups.append(current)
            current = [idx]
    groups.append(current)
    # The circle wraps: merge the first and last cluster when they touch.
    if len(groups) > 1 and abs(evals[groups[0][0]] - evals[groups[-1][-1]]) <= tol:
        groups[0] = groups.pop() + groups[0]
    return [tuple(int(i) for i in g) for g in groups]


def spectral_decomposition(graph, tol=EIGENVALUE_TOL, cap=DENSE_PORT_CAP):
    """Eigendecompose the dense U via a complex Schur form.

    U is normal, so the Schur triangle is numerically diagonal and the Schur
    basis is an exactly orthonormal eigenbasis, degeneracies included.  The
    representative eigenvalue of each group is renormalized to unit modulus
    so that long geometric sums do not drift.
    """
    u = build_dense_unitary(graph, cap=cap)
    t, q = scipy.linalg.schur(u, output="complex")
    evals = np.diag(t).copy()
    offdiag = np.abs(t - np.diag(evals)).max()
    if offdiag > 1e-8:
        raise AssertionError(f"Schur form of a unitary should be diagonal; off-diagonal {offdiag:.2e}")
    groups = _group_unit_eigenvalues(evals, tol)
    reps = np.empty(len(groups), dtype=np.complex128)
    for i, idx in enumerate(groups):
        lam = evals[list(idx)].mean()
        reps[i] = lam / abs(lam)
    return SpectralDecomposition(graph=graph, eigenvalues=reps, groups=tuple(groups), vectors=q, tol=tol)


def _eigenspace_amplitudes(decomp, psi0):
    """Rows A[c] = P_c psi0, the projection of the start onto each eigenspace."""
    q = decomp.vectors
    coeffs = q.conj().T @ psi0
    a = np.empty((len(decomp.groups), psi0.size), dtype=np.complex128)
    for i, idx in enumerate(decomp.groups):
        cols = list(idx)
        a[i] = q[:, cols] @ coeffs[cols]
    return a


def _ports_to_vertices(graph, per_port):
    return np.bincount(graph.vertex_of_port, weights=per_port, minlength=graph.num_vertices)


def limiting_distribution(decomp, initial):
    """Cesaro-limit distribution pi from the eigenprojectors.

    pi(v) = sum over ports of v and over eigenspaces of |<port|P_c|psi0>|^2.
    Completeness of the projectors makes it sum to 1.
    """
    graph = decomp.graph
    psi0 = state_to_port_vector(graph, initial)
    a = _eigenspace_amplitudes(decomp, psi0)
    per_port = (a.real ** 2 + a.imag ** 2).sum(axis=0)
    return ProbabilityField(graph=graph, p=_ports_to_vertices(graph, per_port), label="spectral")


def exact_time_average(decomp, initial, T):
    """Closed-form Cesaro average over the first T steps.

    Equal-eigenvalue pairs contribute their constant cross terms; unequal
    pairs contribute geometric sums ((lambda mu*)^T - 1)/((lambda mu*) - 1)/T,
    which is what makes the distance to pi fall off as 1/T.
    """
    if T < 1:
        raise ValueError(f"T must be >= 1, got {T}")
    graph = decomp.graph
    psi0 = state_to_port_vector(graph, initial)
    a = _eigenspace_amplitudes(decomp, psi0)
    lam = decomp.eigenvalues
    z = lam[:, None] * lam[None, :].conj()
    with np.errstate(divide="ignore", invalid="ignore"):
        f = (z ** T - 1.0) / (z - 1.0) / T
    np.fill_diagonal(f, 1.0)
    per_port = np.sum(np.conj(a) * (f.T @ a), axis=0).real
    return ProbabilityField(graph=graph, p=_ports_to_vertices(graph, per_port), label="exact-time-averaged")


def empirical_limiting(graph, initial, horizon=100_000):
    """Approximate pi by the long-run time average over `horizon` steps.

    The fallback route for graphs whose port space is over the dense cap;
    the 1/T decay bounds its error by about 2/horizon in total variation.
    """
    if horizon < 1:
        raise ValueError(f"horizon must be >= 1, got {horizon}")
    shift = coinshift.build_shift(graph)
    amps = evolution._loop_amplitudes(initial)
    gain, fwd = graph.coin_gainmask, shift.forward
    acc = evolution._vertex_probabilities(amps)
    for _ in range(horizon - 1):
        amps = evolution._raw_step(gain, fwd, amps)
        acc += evolution._vertex_probabilities(amps)
    return ProbabilityField(graph=graph, p=acc / horizon, label="empirical")


def write_eigenvalue_csv(path, decomp):
    with open(path, "w") as fh:
        fh.write("re,im,multiplicity\n")
        for re, im, mult in decomp.eigenvalue_rows():
            fh.write(f"{re!r},{im!r},{mult}\n")
