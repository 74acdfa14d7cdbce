"""Binary endpoints: a bounded re-estimate means the pipeline takes over early."""
from ssr_delay import harness
from ssr_delay.engine import max_binary_n_star
from ssr_delay.recruitment import RecruitmentPlan

grid = harness.table_grid("S3", replicates=2000)
design = grid.design
plan = grid.plan("uniform")
cap = max_binary_n_star(design)
print(f"largest possible re-estimate {cap:.2f}, so stage 2 never asks for more than "
      f"{2 * -(-cap // 2) - design.n1:.0f}")
for m in (12, 15, 18):
    print(f"m {m}: pipeline {plan.n_delay(m):.2f}")

# From m = 18 the pipeline alone exceeds anything the re-estimate can ask for,
# so the delay fixes every final size.
for s in harness.run_grid(grid):
    if s.m in (0, 12, 18):
        print(f"p1 {s.truth_param}: m {s.m:2g} power {s.empirical_power:.3f} "
              f"avg N* {s.avg_n_final:7.3f} impact {s.delay_impact:.3f} cost {s.cost_ssr:.3f}")

linear = RecruitmentPlan.fit(design, "linear")
print(f"linear accrual at m 3 puts {linear.n_delay(3):.2f} in the pipeline")
