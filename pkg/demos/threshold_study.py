"""Pseudo-threshold and threshold estimation from a Monte Carlo sweep.

Runs a reduced MWPM sweep at d=3 and d=5, writes the CSV artifact, and
estimates the pseudo-threshold (identity-line crossing) and the threshold
(crossing of the two distance curves).  Reduced budgets keep this quick;
scale trials/instances up for production-quality numbers.
"""

from pathlib import Path

from surfdec import harness
from surfdec.harness import SweepConfig, estimate_pseudo_threshold, estimate_threshold

out = Path("demo_output")
out.mkdir(exist_ok=True)

config = SweepConfig(
    distances=(3, 5),
    p_grid=(0.0005, 0.001, 0.002, 0.004, 0.008, 0.014, 0.02, 0.028),
    decoders=("mwpm",),
    trials=5000,
    instances=3,
    base_seed=12,
)
print("running sweep:", len(config.distances), "distances x",
      len(config.p_grid), "p values x", config.instances, "instances ...")
points = harness.run_sweep(config)
csv_path = out / "mwpm_sweep.csv"
harness.write_curve_csv(points, csv_path, manifest=config.manifest())
print("wrote", csv_path)

print(f"\n{'d':>3} {'p_step':>9} {'p_cycle':>9} {'p_L':>9} {'sd':>8}")
for pt in points:
    print(f"{pt.d:>3} {pt.p_step:>9.4f} {pt.p_cycle:>9.4f} "
          f"{pt.logical_error_rate:>9.5f} {pt.sd:>8.5f}")

for d in (3, 5):
    series = harness.select_points(points, d=d, decoder="mwpm", level="LLD")
    est = estimate_pseudo_threshold(series)
    if est.found:
        print(f"\npseudo-threshold d={d}: {est.value:.5f} "
              f"(95% CI [{est.ci_low:.5f}, {est.ci_high:.5f}])")
    else:
        print(f"\npseudo-threshold d={d}: no crossing in range "
              f"({est.method['reason']})")

curves = {d: harness.select_points(points, d=d, decoder="mwpm", level="LLD")
          for d in (3, 5)}
thr = estimate_threshold(curves)
if thr.found:
    print(f"threshold (d=3/5 crossing): {thr.value:.4f} "
          f"(95% CI [{thr.ci_low:.4f}, {thr.ci_high:.4f}])")
else:
    print("threshold: no crossing in range")
print("\nplot this CSV with plots/plot_threshold_curves.py")
