"""zurn: simulation and verification lab for the integer addition urn.

Draw two balls with replacement, add a ball labeled with the sum; repeat.
The package provides the exact simulator (`zurn.urn`), closed-form moment
and limit-law oracles (`zurn.oracle`), a population-dynamics engine for the
recursive distributional equations (`zurn.fixedpoint`), statistical
estimators (`zurn.analysis`) and the experiment harness behind the ``zurn``
command line tool (`zurn.harness`).
"""

from .rng import RngStream
from .urn import UrnState, UrnOverflowError, Snapshot, new_urn, draw_index, sample_draw, step, run
from .oracle import (
    MomentPair,
    moment_recursion,
    annealed_mean_sum,
    a_second_moment_lower_bound,
    limit_cdf,
    gamma_cf,
    sample_exp_signed,
    sample_gamma2,
    sample_shared_gamma,
)
from .fixedpoint import SamplePool, iterate_pool, iterate_exp_pool, wasserstein, contraction_estimate, step_ratios
from .analysis import (
    ATrace,
    NormalizedSample,
    LimitFit,
    SignConcentration,
    compute_a,
    normalized_labels,
    ks_statistic,
    ks_two_sample,
    ks_critical,
    fit_limits,
    empirical_cf,
    sign_concentration,
    coordinate_coupling,
)

__version__ = "0.1.0"
