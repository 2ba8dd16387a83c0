import numpy as np
import pytest
from scipy.stats import chisquare

from typewalk.errors import (DegenerateNodeError, EmptyGraphError,
                             ParameterError, ParseError)
from typewalk.generate import complete_graph, path_graph, star_graph
from typewalk.graph import (AliasTable, Graph, WalkParams, build_alias,
                            build_first_order, build_second_order,
                            connected_components, is_connected,
                            load_edge_list, save_edge_list,
                            second_order_weights)


def write(tmp_path, text, name="g.edges"):
    p = tmp_path / name
    p.write_text(text)
    return p


class TestLoading:
    def test_triangle(self, tmp_path):
        g = load_edge_list(write(tmp_path, "0 1\n1 2\n2 0\n"))
        assert g.num_nodes == 3
        assert g.num_edges == 3
        assert g.degrees.tolist() == [2, 2, 2]

    def test_self_loop_dropped_and_ids_remapped(self, tmp_path):
        g = load_edge_list(write(tmp_path, "5 5\n5 6\n"))
        assert g.num_nodes == 2
        assert g.num_edges == 1
        assert g.original_ids.tolist() == [5, 6]
        assert g.internal_id(5) == 0 and g.internal_id(6) == 1

    def test_duplicates_and_reverses_merged(self, tmp_path):
        g = load_edge_list(write(tmp_path, "0 1\n1 0\n0 1\n"))
        assert g.num_edges == 1

    def test_comments_blanks_and_extra_tokens(self, tmp_path):
        g = load_edge_list(write(tmp_path, "# c\n% c\n\n0 1 9.5 extra\n1 2\n"))
        assert g.num_nodes == 3 and g.num_edges == 2

    def test_non_integer_token_reports_line(self, tmp_path):
        with pytest.raises(ParseError, match=":2:"):
            load_edge_list(write(tmp_path, "0 1\n1 x\n"))

    def test_single_token_line(self, tmp_path):
        with pytest.raises(ParseError):
            load_edge_list(write(tmp_path, "0\n"))

    def test_negative_id(self, tmp_path):
        with pytest.raises(ParseError):
            load_edge_list(write(tmp_path, "-1 2\n"))

    def test_empty_after_cleaning(self, tmp_path):
        with pytest.raises(EmptyGraphError):
            load_edge_list(write(tmp_path, "3 3\n7 7\n"))

    def test_unreadable_file(self, tmp_path):
        with pytest.raises(OSError):
            load_edge_list(tmp_path / "missing.edges")

    def test_round_trip_is_idempotent(self, tmp_path):
        text = "10 40\n40 7\n7 10\n99 40\n7 123\n"
        g1 = load_edge_list(write(tmp_path, text))
        save_edge_list(g1, tmp_path / "out.edges")
        g2 = load_edge_list(tmp_path / "out.edges")
        assert np.array_equal(g1.original_ids, g2.original_ids)
        assert np.array_equal(g1.indptr, g2.indptr)
        assert np.array_equal(g1.indices, g2.indices)


class TestGraphInvariants:
    def test_adjacency_sorted_and_symmetric(self):
        g = Graph.from_edges([(2, 0), (0, 1), (2, 1), (3, 0)])
        for i in range(g.num_nodes):
            nb = g.neighbors(i)
            assert np.all(np.diff(nb) > 0)
            for j in nb:
                assert g.has_edge(int(j), i)
        assert g.degrees.sum() == 2 * g.num_edges

    def test_asymmetric_csr_rejected(self):
        with pytest.raises(ValueError):
            Graph(np.array([0, 1, 1]), np.array([1]))

    def test_isolated_nodes_retained(self):
        g = Graph.from_edges([(0, 1)], num_nodes=4)
        assert g.num_nodes == 4
        assert g.degrees.tolist() == [1, 1, 0, 0]

    def test_components(self):
        g = Graph.from_edges([(0, 1), (2, 3)], num_nodes=5)
        labels = connected_components(g)
        assert labels.tolist() == [0, 0, 1, 1, 2]
        assert not is_connected(g)
        assert is_connected(path_graph(4))


class TestWalkParams:
    def test_defaults_valid(self):
        p = WalkParams()
        assert p.is_unbiased

    @pytest.mark.parametrize("kwargs", [
        dict(walks_per_node=0), dict(walk_length=0),
        dict(return_param=0.0), dict(inout_param=-1.0)])
    def test_rejects_bad_values(self, kwargs):
        with pytest.raises(ParameterError):
            WalkParams(**kwargs)


class TestAlias:
    def test_reconstruction_matches_input_exactly(self):
        rng = np.random.default_rng(0)
        for _ in range(50):
            n = int(rng.integers(1, 40))
            w = rng.random(n) * rng.integers(1, 100)
            table = build_alias(w)
            np.testing.assert_allclose(table.reconstructed(), w / w.sum(), atol=1e-12)
            assert abs(table.reconstructed().sum() - 1.0) < 1e-9

    def test_uniform_weights_build_exact_table(self):
        table = build_alias(np.ones(7))
        assert np.all(table.prob == 1.0)

    def test_zero_weight_outcomes_never_sampled(self):
        table = build_alias([0.0, 1.0, 0.0, 2.0])
        draws = table.sample(np.random.default_rng(1), size=5000)
        assert set(np.unique(draws)) <= {1, 3}

    def test_chi_square_goodness_of_fit(self):
        rng = np.random.default_rng(7)
        w = rng.random(6) + 0.05
        table = build_alias(w)
        draws = table.sample(rng, size=100_000)
        observed = np.bincount(draws, minlength=6)
        _, p = chisquare(observed, 100_000 * w / w.sum())
        assert p > 0.001

    def test_bad_weights(self):
        for bad in ([], [0.0, 0.0], [-1.0, 2.0], [np.nan, 1.0]):
            with pytest.raises(ParameterError):
                build_alias(bad)

    def test_sample_index_consumes_two_uniforms(self):
        table = build_alias([1.0, 3.0])
        assert table.sample_index(0.0, 0.0) in (0, 1)
        assert table.sample_index(0.999, 0.0) == 1


class TestFirstOrder:
    def test_triangle_is_half_half(self):
        g = complete_graph(3)
        table = build_first_order(g)[0]
        np.testing.assert_allclose(table.reconstructed(), [0.5, 0.5])

    def test_star_center_uniform(self):
        g = star_graph(4)
        table = build_first_order(g)[0]
        np.testing.assert_allclose(table.reconstructed(), np.full(4, 0.25))

    def test_isolated_node_has_no_table(self):
        g = Graph.from_edges([(0, 1)], num_nodes=3)
        assert build_first_order(g)[2] is None

    def test_monte_carlo_matches_uniform(self):
        g = star_graph(3)  # center has degree 3
        table = build_first_order(g)[0]
        draws = table.sample(np.random.default_rng(5), size=1_000_000)
        freqs = np.bincount(draws, minlength=3) / 1e6
        assert np.all(np.abs(freqs - 1.0 / 3.0) < 0.01)


class TestSecondOrder:
    def test_unbiased_equals_first_order(self):
        g = complete_graph(4)
        params = WalkParams(return_param=1.0, inout_param=1.0)
        second = build_second_order(g, params)
        first = build_first_order(g)
        for v in range(4):
            for t in g.neighbors(v):
                np.testing.assert_array_equal(
                    second.table(int(t), v).reconstructed(),
                    first[v].reconstructed())

    def test_path_state_weights(self):
        # state (a -> b) on a-b-c: back to a gets 1/p, c gets 1/q
        g = path_graph(3)
        params = WalkParams(return_param=0.25, inout_param=4.0)
        w = second_order_weights(g, 0, 1, params)
        np.testing.assert_allclose(w, [4.0, 0.25])
        dist = build_second_order(g, params).table(0, 1).reconstructed()
        np.testing.assert_allclose(dist, [4.0 / 4.25, 0.25 / 4.25], atol=1e-12)

    @pytest.mark.parametrize("p,q", [(0.25, 4.0), (2.0, 0.5), (1.0, 3.0)])
    def test_triangle_closure_probability(self, p, q):
        # from state (0 -> 1) candidate 2 is adjacent to 0: P(2) = 1/(1/p + 1)
        g = complete_graph(3)
        params = WalkParams(return_param=p, inout_param=q)
        dist = build_second_order(g, params).table(0, 1).reconstructed()
        nb = g.neighbors(1).tolist()
        assert dist[nb.index(2)] == pytest.approx(1.0 / (1.0 / p + 1.0))

    def test_table_rejects_non_edges(self):
        g = path_graph(3)
        tables = build_second_order(g, WalkParams())
        with pytest.raises(ParameterError):
            tables.table(0, 2)
