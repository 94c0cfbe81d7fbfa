import warnings

import numpy as np
import pytest

from voronoicur.analysis.generators import SnnConfig, gen_snn
from voronoicur.linalg import OrthonormalBasis
from voronoicur.misc.errors import DegenerateSetError, ParameterError
from voronoicur.partition import (
    ALGORITHM_DEFAULTS,
    CentroidSet,
    PartitionConfig,
    Partitioner,
    VoronoiPartition,
    carry_multi_index,
    default_multi_index,
    energy_g1,
    energy_g2,
    find_voronoi_sets,
    init_partition,
    lloyd_run,
    repair_empty_sets,
    update_centroids_adapt,
    update_centroids_fixed,
)


ALGORITHMS = list(ALGORITHM_DEFAULTS)


def test_default_multi_index():
    assert default_multi_index(10, 3).tolist() == [4, 3, 3]
    assert default_multi_index(6, 3).tolist() == [2, 2, 2]
    assert int(np.sum(default_multi_index(37, 5))) == 37


def test_init_partition_is_seeded_and_nonempty(rng):
    A = rng.standard_normal((5, 30))
    first = init_partition(A, 6, seed=11)
    assert first == init_partition(A, 6, seed=11)
    assert np.all(first.sizes > 0)
    assert first.n == 30


def test_init_partition_fills_every_set_when_k_equals_n(rng):
    A = rng.standard_normal((3, 7))
    partition = init_partition(A, 7, seed=0)
    assert partition.sizes.tolist() == [1] * 7


def test_init_partition_rejects_too_many_sets(rng):
    with pytest.raises(ParameterError):
        init_partition(rng.standard_normal((3, 4)), 5)


def test_partition_sets_and_means():
    A = np.array([[1.0, 2.0, 3.0, 4.0], [0.0, 0.0, 2.0, 2.0]])
    partition = VoronoiPartition([1, 0, 1, 0], 3)
    sets = partition.sets()
    assert sets[0].tolist() == [1, 3]
    assert sets[1].tolist() == [0, 2]
    assert sets[2].size == 0
    means = partition.means(A)
    assert np.allclose(means[:, 0], [3.0, 1.0])
    assert np.allclose(means[:, 1], [2.0, 1.0])
    assert np.allclose(means[:, 2], 0.0)


def test_compact_drops_empty_sets():
    partition = VoronoiPartition([2, 0, 2], 4)
    compacted, kept = partition.compact()
    assert kept.tolist() == [0, 2]
    assert compacted.labels.tolist() == [1, 0, 1]
    assert compacted.num_sets == 2
    with pytest.raises(ParameterError):
        partition.compact(keep=[False, True, True, True])


def test_assignment_picks_nearest_subspace_and_breaks_ties_low():
    e = np.eye(3)
    centroids = CentroidSet([e[:, [0]], e[:, [1]]])
    A = np.array([[2.0, 0.1, 0.0], [0.1, 3.0, 0.0], [0.0, 0.0, 1.0]])
    partition, residuals = find_voronoi_sets(A, centroids, return_distances=True)
    # The last column is equidistant from both lines.
    assert partition.labels.tolist() == [0, 1, 0]
    assert np.allclose(residuals, [0.01, 0.01, 1.0])


def test_assignment_with_empty_basis_uses_shift_distance():
    centroids = CentroidSet(
        [OrthonormalBasis.empty(2), OrthonormalBasis.empty(2)],
        shifts=np.array([[0.0, 10.0], [0.0, 0.0]]),
    )
    A = np.array([[1.0, 9.0], [0.0, 0.0]])
    assert find_voronoi_sets(A, centroids).labels.tolist() == [0, 1]


def test_repair_moves_largest_residual():
    partition = VoronoiPartition([0, 0, 0, 1], 3)
    repaired, moved = repair_empty_sets(partition, np.array([0.5, 3.0, 1.0, 9.0]))
    # Column 3 is alone in set 1 and cannot move.
    assert moved == [1]
    assert repaired.labels.tolist() == [0, 2, 0, 1]
    with pytest.raises(DegenerateSetError):
        repair_empty_sets(VoronoiPartition([0, 1], 3), np.ones(2))


def test_update_centroids_fixed_dimensions(rng):
    parts = [rng.standard_normal((6, 5)), rng.standard_normal((6, 4))]
    centroids = update_centroids_fixed(parts, [2, 3])
    assert centroids.dims.tolist() == [2, 3]
    assert centroids.shortfall.tolist() == [0, 0]
    for basis in centroids.bases:
        assert np.allclose(basis.basis.T @ basis.basis, np.eye(basis.dim), atol=1e-12)


def test_update_centroids_fixed_shortfall(rng):
    rank_one = np.zeros((6, 5))
    rank_one[0] = [1.0, 2.0, 3.0, 4.0, 5.0]
    parts = [rank_one, rng.standard_normal((6, 5))]
    with pytest.warns(UserWarning):
        kept = update_centroids_fixed(parts, [2, 2], redistribute=False)
    assert kept.dims.tolist() == [1, 2]
    assert kept.shortfall.tolist() == [1, 0]
    with pytest.warns(UserWarning):
        moved = update_centroids_fixed(parts, [2, 2], redistribute=True)
    assert moved.dims.tolist() == [1, 3]


def test_update_centroids_fixed_rejects_empty_part(rng):
    with pytest.raises(DegenerateSetError) as info:
        update_centroids_fixed([rng.standard_normal((3, 2)), np.zeros((3, 0))], [1, 1])
    assert info.value.set_index == 1


def test_update_centroids_adapt_pools_singular_values():
    # Set 0 carries singular values 5 and 4, set 1 carries 3 and 0.5.
    parts = [np.diag([5.0, 4.0, 0.0, 0.0])[:, :2], np.diag([0.0, 0.0, 3.0, 0.5])[:, 2:]]
    centroids, k_active = update_centroids_adapt(parts, 2)
    assert centroids.dims.tolist() == [2, 0]
    assert k_active == 1
    centroids, k_active = update_centroids_adapt(parts, 3)
    assert centroids.dims.tolist() == [2, 1]
    assert k_active == 2
    with pytest.raises(ParameterError, match="maximum is 4"):
        update_centroids_adapt(parts, 5)


def pooled_dims(parts, r):
    """Per-set dimensions from sorting all singular values, ties by set then position."""
    pooled = []
    for i, Y in enumerate(parts):
        for j, s in enumerate(np.linalg.svd(Y, compute_uv=False)):
            pooled.append((-s, i, j))
    dims = np.zeros(len(parts), dtype=np.int64)
    for _, i, _ in sorted(pooled)[:r]:
        dims[i] += 1
    return dims


def test_update_centroids_adapt_matches_pooled_sort():
    rng = np.random.default_rng(12)
    parts = [
        float(scale) * rng.standard_normal((8, int(n)))
        for scale, n in zip([3.0, 1.0, 0.5, 2.0, 1.5], rng.integers(3, 7, size=5))
    ]
    centroids, k_active = update_centroids_adapt(parts, 12)

    dims = pooled_dims(parts, 12)
    assert centroids.dims.tolist() == dims.tolist()
    assert k_active == int(np.count_nonzero(dims))
    for Y, basis, d in zip(parts, centroids.bases, dims):
        U = np.linalg.svd(Y, full_matrices=False)[0][:, :d]
        assert np.allclose(basis.basis @ basis.basis.T, U @ U.T, atol=1e-10)


def test_carry_multi_index_keeps_redistributed_dimensions():
    assert carry_multi_index([2, 2, 2, 2, 2], [3, 2, 2, 2, 1]).tolist() == [3, 2, 2, 2, 1]
    # Nothing was redistributed, so the short set gets its request back.
    assert carry_multi_index([2, 2], [1, 2]).tolist() == [2, 2]
    assert carry_multi_index([3, 2, 2], [1, 3, 2]).tolist() == [2, 3, 2]


def test_energies_by_hand():
    A = np.array([[1.0, 3.0], [1.0, 1.0]])
    partition = VoronoiPartition([0, 0], 1)
    centroids = CentroidSet([np.array([[1.0], [0.0]])])
    assert energy_g1(A, partition, centroids) == pytest.approx(2.0)
    shifted = centroids.with_shifts(partition.means(A))
    # Centered columns (-1, 0) and (1, 0) lie on the centroid line.
    assert energy_g2(A, partition, shifted) == pytest.approx(0.0)


def test_energies_match_column_loop(rng):
    A = rng.standard_normal((6, 25))
    partition = VoronoiPartition(np.arange(25) % 3, 3)
    means = partition.means(A)
    plain = update_centroids_fixed(partition.parts(A), [2, 1, 2])
    centered_parts = [Y - means[:, [i]] for i, Y in enumerate(partition.parts(A))]
    centered = update_centroids_fixed(centered_parts, [2, 1, 2]).with_shifts(means)

    g1 = g2 = 0.0
    for j, i in enumerate(partition.labels):
        U = plain.bases[i].basis
        x = A[:, j]
        g1 += np.sum(np.square(x - U @ (U.T @ x)))
        U = centered.bases[i].basis
        x = A[:, j] - means[:, i]
        g2 += np.sum(np.square(x - U @ (U.T @ x)))

    assert energy_g1(A, partition, plain) == pytest.approx(g1, rel=1e-10)
    assert energy_g2(A, partition, centered) == pytest.approx(g2, rel=1e-10)


def test_single_set_energy_is_svd_tail(rng):
    A = rng.standard_normal((10, 15))
    _, _, trace = lloyd_run(A, PartitionConfig("cvod", 1, 3, seed=0))
    s = np.linalg.svd(A, compute_uv=False)
    assert trace.energies[-1] == pytest.approx(np.sum(s[3:] ** 2), rel=1e-10)


def test_voronoi_sets_are_a_fixed_point():
    rng = np.random.default_rng(1)
    A = 1e-3 * rng.standard_normal((3, 20))
    A[0, :10] += 1 + 0.1 * np.arange(10)
    A[1, 10:] += 1 + 0.1 * np.arange(10)
    partition = VoronoiPartition([0] * 10 + [1] * 10, 2)

    centroids = update_centroids_fixed(partition.parts(A), [1, 1])
    assigned = find_voronoi_sets(A, centroids)
    assert assigned == partition
    refitted = update_centroids_fixed(assigned.parts(A), [1, 1])
    assert find_voronoi_sets(A, refitted) == assigned


def test_partition_config_validation():
    config = PartitionConfig("cvod", 3, 10)
    assert config.multi_index.tolist() == [4, 3, 3]
    assert PartitionConfig("adapt_cvod", 5, 3).multi_index is None
    with pytest.raises(ParameterError):
        PartitionConfig("kmeans", 3, 10)
    with pytest.raises(ParameterError):
        PartitionConfig("vqpca", 5, 3)
    with pytest.raises(ParameterError):
        PartitionConfig("cvod", 2, 4, multi_index=[3, 2])
    with pytest.raises(ParameterError):
        PartitionConfig("cvod", 2, 4, epsilon=0)
    with pytest.raises(ParameterError):
        PartitionConfig("cvod", 2, 4, stopping="sometimes")
    with pytest.raises(ParameterError):
        PartitionConfig("cvod", 2, 4).validate(np.ones((3, 8)))


@pytest.mark.parametrize("algorithm", ALGORITHMS)
def test_lloyd_energy_is_monotone(snn_desk, algorithm):
    config = PartitionConfig(algorithm, 5, 20, epsilon=1e-3, max_iters=30, seed=1)
    partition, centroids, trace = lloyd_run(snn_desk, config)
    assert len(trace) >= 2
    assert trace.is_monotone(rtol=1e-10)
    assert partition.num_sets == centroids.num_sets
    assert int(np.sum(centroids.dims)) == 20


@pytest.mark.parametrize("algorithm", ["adapt_cvod", "adapt_vqpca"])
def test_adaptive_dimensions_sum_to_rank(snn_desk, algorithm):
    config = PartitionConfig(algorithm, 5, 20, epsilon=1e-3, max_iters=30, seed=2)
    partition, _, trace = lloyd_run(snn_desk, config)
    for dims in trace.dims:
        assert int(np.sum(dims)) == 20
    assert np.all(np.diff(trace.num_sets) <= 0)
    assert partition.num_sets <= 5
    assert np.all(partition.sizes > 0)


def test_fixed_dimensions_are_constant(snn_desk):
    config = PartitionConfig("cvod", 4, 12, epsilon=1e-3, max_iters=20, seed=4)
    _, _, trace = lloyd_run(snn_desk, config)
    for dims in trace.dims:
        assert dims.tolist() == [3, 3, 3, 3]


def test_same_seed_same_run(snn_small):
    config = PartitionConfig("vqpca", 3, 9, seed=5)
    first = lloyd_run(snn_small, config)
    second = lloyd_run(snn_small, config)
    assert first[0] == second[0]
    assert np.array_equal(first[2].energies, second[2].energies)


def test_truncation_warns():
    rng = np.random.default_rng(0)
    A = rng.standard_normal((10, 40))
    partitioner = Partitioner(A, 4, 4, seed=0)
    with pytest.warns(UserWarning, match="iteration cap"):
        _, _, trace = partitioner.optimize("cvod", maxiter=1, epsilon=1e-6)
    assert trace.truncated
    assert partitioner.truncated
    assert not partitioner.converged


def test_callback_stops_early():
    rng = np.random.default_rng(1)
    A = rng.standard_normal((10, 40))
    partitioner = Partitioner(A, 4, 8, seed=0)
    seen = []

    def callback(p):
        seen.append(p.iter)
        return p.iter >= 2

    partitioner.optimize("adapt_cvod", maxiter=50, epsilon=1e-12, callback=callback)
    assert seen == [1, 2]
    assert partitioner.iter == 2
    assert not partitioner.truncated


def test_first_iteration_never_stops():
    A = np.eye(4)
    partitioner = Partitioner(A, 1, 4, seed=0)
    _, _, trace = partitioner.optimize("cvod", maxiter=10, epsilon=0.5)
    # The energy is zero from the start; the decrement is only tested from the second iteration.
    assert len(trace) == 2
    assert partitioner.converged


class ScriptedPartitioner(Partitioner):
    """Partitioner whose iterations replay a fixed energy sequence."""

    energies = [7.0, 4.0, 5.0, 5.0]

    def _iterate(self):
        energy = self.energies[self.iter]
        if self.iter >= 1:
            self._delta = self._energy - energy
        self.stats["energy"].append(energy)
        self._energy = energy
        self.iter += 1


def test_energy_increase_is_not_convergence(rng):
    partitioner = ScriptedPartitioner(rng.standard_normal((6, 20)), 2, 4, seed=0)
    with pytest.warns(UserWarning, match="raised the energy at iteration 3"):
        partitioner.optimize("cvod", maxiter=4, epsilon=0.5)
    # The negative decrement at iteration 3 is skipped; the zero one at 4 stops the run.
    assert partitioner.converged
    assert partitioner.iter == 4


def test_decrement_equal_to_epsilon_continues(rng):
    partitioner = ScriptedPartitioner(rng.standard_normal((6, 20)), 2, 4, seed=0)
    partitioner.energies = [7.0, 4.0, 3.5, 3.5]
    partitioner.optimize("cvod", maxiter=4, epsilon=0.5)
    assert partitioner.stats["energy"] == [7.0, 4.0, 3.5, 3.5]
    assert partitioner.converged
    assert partitioner.iter == 4


def test_redistributed_dimensions_keep_energy_monotone():
    # A set of this run drops below its requested rank, so dimensions move between sets.
    A = gen_snn(SnnConfig(200, 200, 20, 0.05, seed=12))
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        _, centroids, trace = lloyd_run(A, PartitionConfig("cvod", 5, 10, seed=12))
    assert trace.is_monotone(rtol=1e-10)
    assert not any("raised the energy" in str(w.message) for w in caught)
    assert int(np.sum(centroids.dims)) == 10
    for dims in trace.dims:
        assert int(np.sum(dims)) == 10


@pytest.mark.parametrize("algorithm", ["vqpca", "adapt_vqpca"])
def test_vqpca_is_translation_invariant(snn_small, algorithm):
    shift = np.random.default_rng(4).standard_normal((snn_small.shape[0], 1))
    config = PartitionConfig(algorithm, 3, 9, seed=5)
    partition, _, trace = lloyd_run(snn_small, config)
    moved, _, moved_trace = lloyd_run(snn_small + shift, config)
    assert moved == partition
    assert np.allclose(moved_trace.energies, trace.energies, rtol=1e-8, atol=1e-10)


def test_relative_stopping_override(snn_small):
    partitioner = Partitioner(snn_small, 3, 9, seed=0)
    partitioner.optimize("cvod", maxiter=20, epsilon=0.5, stopping="relative")
    assert partitioner.flags["stopping"] == "relative"
    assert partitioner.flags["shifted"] is False
    with pytest.raises(ParameterError):
        partitioner.optimize("cvod", stopping="sideways")


def test_save_load_and_resume(tmp_path, snn_small):
    partitioner = Partitioner(snn_small, 4, 12, seed=3)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        partitioner.optimize("adapt_vqpca", maxiter=2, epsilon=1e-14)
    path = str(tmp_path / "run.h5")
    partitioner.save(path)

    loaded = Partitioner.load(path, snn_small)
    assert loaded.partition == partitioner.partition
    assert loaded.iter == 2
    assert loaded.k_initial == 4
    assert loaded.flags["method"] == "adapt_vqpca"
    assert np.array_equal(loaded.set_ids, partitioner.set_ids)
    assert np.array_equal(loaded.centroids.dims, partitioner.centroids.dims)
    assert np.allclose(loaded.centroids.shifts, partitioner.centroids.shifts)
    assert loaded.stats["energy"] == partitioner.stats["energy"]

    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        _, _, trace = loaded.optimize("adapt_vqpca", maxiter=2, epsilon=1e-14)
    # Resumed runs extend the saved trace; an exact fixed point may stop after one step.
    assert len(trace) == loaded.iter
    assert loaded.iter in (3, 4)


def test_plot_stats(snn_small):
    import matplotlib.pyplot as plt

    partitioner = Partitioner(snn_small, 3, 6, seed=0)
    partitioner.optimize("adapt_cvod", maxiter=20, epsilon=1e-3)
    ax_energy, ax_dims = partitioner.plot_stats()
    assert len(ax_energy.lines) == 1
    assert len(ax_dims.lines) == 3
    plt.close("all")
