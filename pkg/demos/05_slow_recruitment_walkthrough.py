"""Back-of-envelope pipeline count for a slowly recruiting trial.

Six participants a month, a primary outcome read 32 weeks after
randomisation and an interim once 60 outcomes are in.
"""
from ssr_delay.recruitment import pipeline_uniform

rate = 6.0
weeks = 32
n1 = 60

# 32 weeks is a little over seven months.
months = weeks * 7 / (365.25 / 12)
print(f"{weeks} weeks = {months:.2f} months -> {pipeline_uniform(months, rate):.1f} in the pipeline")

# Counting whole months instead gives the rounder figure often quoted.
print(f"8 months -> {pipeline_uniform(8, rate):.0f} in the pipeline")

# Either way the interim on 60 participants arrives with 44 to 48 more already
# randomised, so any re-estimate below about 104 to 108 cannot be honoured.
for nd in (pipeline_uniform(months, rate), pipeline_uniform(8, rate)):
    print(f"smallest reachable total: {n1 + nd:.0f}")
