"""A larger internal pilot helps with estimation but leaves less room before the pipeline binds."""
import csv
import io

from ssr_delay import harness

grid = harness.table_grid("S1", replicates=2000)
grid.truths = [grid.truths[1]]          # true SD equal to the planning value
grid.delays_m = [0, 6, 12, 18]

for n1 in (50, 70, 90):
    text = harness.emit_figure_data(harness.with_n1(grid, n1), "rmse")
    rows = list(csv.DictReader(io.StringIO(text)))
    vals = "  ".join(f"m {float(r['m']):2g}: {float(r['value']):6.2f}" for r in rows)
    print(f"n1 {n1}: RMSE {vals}")

# The nstar-dist metric gives one row per replicate for histograms.
rows = list(csv.DictReader(io.StringIO(harness.emit_figure_data(grid, "nstar-dist"))))
print(len(rows), "replicate rows; first:", rows[0])
