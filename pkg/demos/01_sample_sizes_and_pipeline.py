"""Planning sizes, re-estimated sizes and pipeline counts, no simulation needed."""
import numpy as np

from ssr_delay import (RecruitmentPlan, reference_binary_design, reference_continuous_design,
                       reestimate_n_binary, required_n_binary, required_n_continuous)

# Total size for a mean difference of 3.5 at one-sided alpha 0.05, power 0.8.
for sd in (8, 10, 12):
    print(f"sd {sd:2d}: n = {required_n_continuous(sd, 3.5, 0.05, 0.2):.2f}")

# Binary: control rate p1, experimental p1 + 0.25.
for p1 in (0.1, 0.3, 0.5):
    print(f"p1 {p1}: n = {required_n_binary(p1, p1 + 0.25, 0.05, 0.2):.3f}")

# The blinded binary re-estimate only sees the pooled rate and peaks at 0.5,
# so no stage-1 outcome can ask for more than about 99 participants.
p = np.linspace(0, 1, 11)
print(np.round(reestimate_n_binary(p, 0.25, 0.05, 0.2), 2))

# Participants recruited while stage-1 outcomes are still maturing.
cont = reference_continuous_design()
uniform = RecruitmentPlan.fit(cont, "uniform")
linear = RecruitmentPlan.fit(cont, "linear")
print(f"rate {uniform.rate_lambda:.3f}/month, gamma {linear.gamma:.5f}, t1 {linear.t1:.3f}")
for m in range(0, 25, 3):
    print(f"m {m:2d}: uniform {uniform.n_delay(m):7.2f}  linear {linear.n_delay(m):7.2f}")

# With linear accrual the stage-1 cohort finishes late, so the pipeline grows fast.
# The fit for t1 can follow the closed form for n1 or the one matching the published columns.
text = RecruitmentPlan.fit(cont, "linear", t1_mode="paper-text")
print(f"m 3 pipeline: table-compatible {linear.n_delay(3):.2f}, paper-text {text.n_delay(3):.2f}")

binary = reference_binary_design()
print(f"binary: n_init {binary.n_init:.3f}, m 3 uniform {RecruitmentPlan.fit(binary, 'uniform').n_delay(3):.3f}")
