import time
import warnings

# Import numpy and scipy dependencies.
import numpy as np
import scipy.linalg

# Import helper functions
from voronoicur.linalg import (
    OrthonormalBasis,
    fro_norm,
    orthonormal_residual,
    pinv_apply,
    svd_all,
    tail_norm,
    thin_qr,
    truncated_svd,
)
from voronoicur.misc.errors import DegenerateInputError, ParameterError, RankDeficiencyError
from voronoicur.misc.math import EPS, as_matrix, check_count
from voronoicur.partition import (
    EnergyTrace,
    VoronoiPartition,
    PartitionConfig,
    lloyd_run,
)
from voronoicur.analysis.generators import SketchOperator

# Relative slack allowed in the partitioned error inequality.
INTERMEDIATE_RTOL = 1e-12
