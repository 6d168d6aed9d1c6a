"""Error bounds for rank-constrained affine matrix sets.

Residual, lift and slope computations for

    S = {X : A(X) = b, rank(X) <= r},

the explicit Lojasiewicz exponent ``tau(m, n, r)``, an alternating-projections
distance oracle, and a harness that measures the error-bound and slope
exponents empirically.
"""

from .distance import DistReport, dist_estimate, project_affine, project_rank
from .experiments import (BoundsReport, FitResult, RegularityReport, StabilityReport, SweepTable,
                          check_bounds, fit_loglog, fit_power_law, frame_distance,
                          probe_regularity, probe_stability, sweep_local, sweep_rays)
from .exponent import LogScalar, num_variables, r_value, tau
from .instance import (SPEC_VERSION, Instance, PlantedWitness, apply_adjoint, apply_map,
                       generate_planted, load_point, save_point)
from .residual import FrameFamily, ResidualReport, argmin_frames, is_stiefel, lift_g, residual_f
from .variational import SlopeReport, grad_g_V, grad_g_X, multiplier_Y, slope_mf

__version__ = "0.1.0"
