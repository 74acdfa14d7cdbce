"""Blinded sample size re-estimation with delayed outcomes.

Calculators, recruitment models and a vectorised Monte Carlo engine for
measuring how pipeline participants distort internal-pilot SSR designs.
"""
from .design import (DesignSpec, ceil_to_even, reference_binary_design, reference_continuous_design,
                     reestimate_n_binary, reestimate_n_continuous, required_n_binary,
                     required_n_continuous)
from .engine import (OutcomeBatch, ReplicateOutcome, ScenarioTruth, binary_u_statistic,
                     final_sample_size, lumped_variance, pooled_success_rate,
                     pooled_within_arm_variance, run_replicate_binary, run_replicate_continuous)
from .harness import (ConfigError, ScenarioGrid, emit_figure_data, load_config, reproduce_table,
                      run_cells, run_grid, table_grid)
from .metrics import (ScenarioSummary, cost, delay_impact, empirical_power, mse, rmse,
                      single_stage_metrics, summarize)
from .recruitment import (RecruitmentPlan, linear_gamma, linear_t1, pipeline_linear,
                          pipeline_uniform, uniform_rate)
from .rng import RngStream, derive_stream, draw_bernoulli, draw_normal
from .statdist import (central_t_quantile, power_binary, power_continuous, std_normal_cdf,
                       std_normal_quantile, two_sample_t_test)

__version__ = "0.1.0"
