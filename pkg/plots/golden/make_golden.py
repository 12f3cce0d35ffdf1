"""Regenerate the committed golden CSVs from the workbench (fixed seeds).

Run from the repository root with the package installed:

    python plots/golden/make_golden.py

Budgets are intentionally small: the goldens exist to exercise the figure
scripts, not to be publication-grade data.
"""

from pathlib import Path

from surfdec import harness, neural
from surfdec.harness import SweepConfig

HERE = Path(__file__).parent


def main():
    config = SweepConfig(
        distances=(3, 5, 7),
        p_grid=(0.001, 0.002, 0.004, 0.008, 0.014, 0.02, 0.028),
        decoders=("mwpm",), trials=4000, instances=2, base_seed=90001)
    points = harness.run_sweep(config)
    harness.write_curve_csv(points, HERE / "threshold_curves.csv",
                            manifest=config.manifest())
    print("wrote threshold_curves.csv")

    config = SweepConfig(
        distances=(3,), p_grid=(0.004, 0.01, 0.02, 0.04),
        decoders=("ffnn-simple", "ffnn-complex"), trials=1000, instances=2,
        base_seed=90002, dataset_size=8000,
        train=neural.TrainConfig(batch_size=64, epochs=120, learning_rate=0.5, seed=0))
    points = harness.run_sweep(config)
    harness.write_curve_csv(points, HERE / "model_comparison.csv",
                            manifest=config.manifest())
    print("wrote model_comparison.csv")

    rows = harness.train_test_ratio_study(
        3, "ffnn-simple", (0.001, 0.02, 0.08),
        ratios=(0.9, 0.8, 0.7, 0.6, 0.5, 0.4, 0.3, 0.2, 0.1),
        instances=3, dataset_size=8000,
        train=neural.TrainConfig(batch_size=32, epochs=150, learning_rate=1.0, seed=0),
        base_seed=90003)
    harness.write_ratio_csv(rows, HERE / "ratio_study.csv",
                            manifest={"study": "train-test-ratio golden"})
    print("wrote ratio_study.csv")


if __name__ == "__main__":
    main()
