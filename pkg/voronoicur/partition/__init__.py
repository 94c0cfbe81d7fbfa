"""
Voronoi partitioning of matrix columns around subspace centroids.

The columns of a data matrix are split into sets, and every set is summarized
by a low-dimensional subspace (its generalized centroid). Lloyd-type
alternating minimization improves the partition: centroids are refitted to the
sets, then every column moves to the centroid that represents it best.
Four algorithms are provided through :class:`Partitioner`:

- ``"cvod"`` : Centroidal Voronoi orthogonal decomposition with a fixed
  multi-index of per-set dimensions.
- ``"vqpca"`` : Vector-quantization PCA; as CVOD, but every set is centered
  on its mean.
- ``"adapt_cvod"``, ``"adapt_vqpca"`` : Adaptive variants that redistribute
  the total rank across sets every iteration and drop sets that empty out.

Note
~~~~
Internally, partition is split into several hidden files
to enhance clarity and reduce file length.

- ``_header.py`` : The common imports and algorithm defaults.
- ``_sets.py`` : The partition itself, initialization and Voronoi assignment.
- ``_centroids.py`` : Centroid updates and energies.
- ``_stats.py`` : Statistics, saving, and plotting (:class:`EnergyTrace`).
- ``_lloyd.py`` : The core file. Contains the iteration (:class:`Partitioner`).
"""
from voronoicur.partition._header import *

from voronoicur.partition._sets import (
    ASSIGNMENT_BLOCK,
    VoronoiPartition,
    init_partition,
    assignment_distances,
    find_voronoi_sets,
    repair_empty_sets,
)
from voronoicur.partition._centroids import (
    CentroidSet,
    carry_multi_index,
    default_multi_index,
    update_centroids_fixed,
    update_centroids_adapt,
    energy_g1,
    energy_g2,
)
from voronoicur.partition._stats import EnergyTrace
from voronoicur.partition._lloyd import BASELINE_NAMES, PartitionConfig, lloyd_run
from voronoicur.partition._lloyd import Partitioner as _Partitioner

# Hack to get automodule to put the classes in the correct location.
class Partitioner(_Partitioner):
    pass
