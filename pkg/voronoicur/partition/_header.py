import matplotlib.pyplot as plt
from tqdm.auto import tqdm
import warnings
import pprint

# Import numpy dependencies.
import numpy as np

# Import helper functions
from voronoicur.linalg import OrthonormalBasis, orthonormal_residual, svd_all
from voronoicur.misc.errors import DegenerateSetError, ParameterError
from voronoicur.misc.math import REAL_TYPES, as_matrix, check_count
from voronoicur.analysis.files import save_h5, load_h5

# List of algorithms and default parameters.
# See PartitionConfig for parameter definitions.
#  - "centroids" selects the centroid update: one multi-index per set ("fixed")
#    or the pooled top-r singular values across all sets ("adapt").
#  - "shifted" centers every set on its mean (VQPCA family).
#  - "stopping" compares the energy decrement absolutely or relative to the
#    previous energy.
# Caution: The order of these algorithms is used by ALGORITHM_INDEX and by the
#          row order of sweep output.
ALGORITHM_DEFAULTS = {
    "cvod": {"centroids": "fixed", "shifted": False, "stopping": "absolute"},
    "vqpca": {"centroids": "fixed", "shifted": True, "stopping": "relative"},
    "adapt_cvod": {"centroids": "adapt", "shifted": False, "stopping": "absolute"},
    "adapt_vqpca": {"centroids": "adapt", "shifted": True, "stopping": "relative"},
}
ALGORITHM_INDEX = {key : i for i, key in enumerate(ALGORITHM_DEFAULTS.keys())}

STOPPING_OPTIONS = ["absolute", "relative"]

# Lloyd iterations are capped; the alternating minimization has no cap of its own.
DEFAULT_MAX_ITERS = 100

# Roundoff allowed in an energy increase, relative to the first energy.
MONOTONE_RTOL = 1e-10
