import numpy as np
import pytest

from gasketwalk import (
    PERIODIC,
    REFLECTIVE,
    ObserverError,
    apply_coin,
    apply_shift,
    build_dense_unitary,
    build_shift,
    evolve,
    initial_state,
    load_checkpoint,
    probability,
    save_checkpoint,
    step,
)
from gasketwalk.spectral import state_to_port_vector


def test_initial_state_uniform_over_ports(graph_of):
    graph = graph_of(1, PERIODIC)
    state = initial_state(graph, (2, 0))
    i = graph.index_of((2, 0))
    assert np.allclose(state.amplitudes[i, :4], 0.5)
    assert state.norm() == 1.0
    assert state.time == 0


def test_initial_state_reflective_corner(graph_of):
    graph = graph_of(1, REFLECTIVE)
    state = initial_state(graph, (0, 0))
    i = graph.index_of((0, 0))
    assert np.allclose(state.amplitudes[i, [3, 4]], 1 / np.sqrt(2))
    assert np.count_nonzero(state.amplitudes) == 2
    assert abs(state.norm() - 1.0) < 1e-15


def test_initial_state_unknown_vertex(graph_of):
    graph = graph_of(1, PERIODIC)
    with pytest.raises(ValueError):
        initial_state(graph, (1, 0))


def test_one_step_quarter_probabilities(graph_of):
    graph = graph_of(1, PERIODIC)
    shift = build_shift(graph)
    state = step(graph, shift, None, initial_state(graph, (2, 0)))
    field = probability(state)
    for v in ((0, 0), (4, 0), (1, 1), (3, 1)):
        assert field.p[graph.index_of(v)] == pytest.approx(0.25, abs=1e-15)
    assert state.time == 1


@pytest.mark.parametrize("bc", [PERIODIC, REFLECTIVE])
def test_two_steps_match_dense_operator(graph_of, bc):
    graph = graph_of(1, bc)
    shift = build_shift(graph)
    u = build_dense_unitary(graph)
    state = initial_state(graph, (2, 0))
    expected = u @ (u @ state_to_port_vector(graph, state))
    state = step(graph, shift, None, step(graph, shift, None, state))
    assert np.abs(state_to_port_vector(graph, state) - expected).max() < 1e-13


def test_invalid_ports_stay_exactly_zero(graph_of):
    graph = graph_of(2, REFLECTIVE)
    shift = build_shift(graph)
    state = initial_state(graph, (4, 0))
    for _ in range(25):
        state = step(graph, shift, None, state)
    assert np.all(state.amplitudes[~graph.dirmask] == 0)


def test_norm_stable_over_thousand_steps(graph_of):
    graph = graph_of(3, PERIODIC)
    shift = build_shift(graph)
    state = evolve(graph, shift, None, initial_state(graph, (8, 0)), 1000)
    assert abs(state.norm() - 1.0) < 1e-12
    assert state.time == 1000


def test_time_reversal(graph_of):
    graph = graph_of(2, PERIODIC)
    shift = build_shift(graph)
    start = initial_state(graph, (4, 0))
    state = evolve(graph, shift, None, start, 100)
    # U^{-1} = C S since both factors are involutions
    for _ in range(100):
        state = apply_coin(graph, apply_shift(shift, state))
    assert np.abs(state.amplitudes - start.amplitudes).max() < 1e-9


def test_evolve_zero_steps_and_composition(graph_of):
    graph = graph_of(1, REFLECTIVE)
    shift = build_shift(graph)
    start = initial_state(graph, (2, 0))
    same = evolve(graph, shift, None, start, 0)
    assert np.array_equal(same.amplitudes, start.amplitudes)
    one_go = evolve(graph, shift, None, start, 48)
    two_legs = evolve(graph, shift, None, evolve(graph, shift, None, start, 30), 18)
    assert np.array_equal(one_go.amplitudes, two_legs.amplitudes)
    with pytest.raises(ValueError):
        evolve(graph, shift, None, start, -1)


def test_evolve_observer_sees_every_step(graph_of):
    graph = graph_of(1, PERIODIC)
    shift = build_shift(graph)
    seen = []
    evolve(graph, shift, None, initial_state(graph, (2, 0)), 128, observer=lambda s: seen.append(s.time))
    assert seen == list(range(1, 129))


def test_evolve_observer_failure_reports_step(graph_of):
    graph = graph_of(1, PERIODIC)
    shift = build_shift(graph)

    def boom(state):
        if state.time == 3:
            raise RuntimeError("probe failure")

    with pytest.raises(ObserverError) as err:
        evolve(graph, shift, None, initial_state(graph, (2, 0)), 10, observer=boom)
    assert err.value.step_index == 3


def test_checkpoint_roundtrip(tmp_path, graph_of):
    graph = graph_of(2, REFLECTIVE)
    shift = build_shift(graph)
    state = evolve(graph, shift, None, initial_state(graph, (4, 0)), 37)
    path = tmp_path / "walk.ckpt"
    save_checkpoint(path, state)
    loaded = load_checkpoint(path, graph)
    assert loaded.time == 37
    assert np.array_equal(loaded.amplitudes, state.amplitudes)
    resumed = evolve(graph, shift, None, loaded, 5)
    direct = evolve(graph, shift, None, state, 5)
    assert np.array_equal(resumed.amplitudes, direct.amplitudes)


def test_checkpoint_graph_mismatch(tmp_path, graph_of):
    graph = graph_of(2, REFLECTIVE)
    state = initial_state(graph, (4, 0))
    path = tmp_path / "walk.ckpt"
    save_checkpoint(path, state)
    with pytest.raises(ValueError):
        load_checkpoint(path, graph_of(2, PERIODIC))
    with pytest.raises(ValueError):
        load_checkpoint(path, graph_of(3, REFLECTIVE))
