"""Reproduce the assessment tables for the bundled 20-sample data set.

Builds all six convex-model variants from the sample-correlation (SCC)
and enclosure-correlation (CCC) measures, then prints the enclosed-count
and volume-ratio table for each method side by side.
"""

import argparse
import sys
import warnings
from pathlib import Path

import numpy as np

import convexuq as cq

VARIANTS = (
    cq.ModelVariant.ME,
    cq.ModelVariant.MP2,
    cq.ModelVariant.MP1,
    cq.ModelVariant.RECT,
    cq.ModelVariant.LTRI,
    cq.ModelVariant.UTRI,
)


def print_matrix(entries: np.ndarray) -> None:
    for row in entries:
        print("    " + "  ".join(f"{v:8.4f}" for v in row))


def assessment_table(method: str, spec, samples, u) -> None:
    print(f"\n== {method.upper()} construction ==")
    if method == "scc":
        shared = cq.fit_correlation_matrix("scc", None, u)
        print("  correlation matrix:")
        print_matrix(shared.entries)
    print(f"  {'variant':8s} {'kappa':>7s} {'nu':>8s} {'nu_bar':>8s}")
    for variant in VARIANTS:
        if method == "scc":
            R = shared
        else:
            R = cq.fit_correlation_matrix("ccc", variant, u, on_infeasible="relax")
        model = cq.build_model(variant, spec, R)
        report = cq.fitness(model, samples)
        print(
            f"  {variant.label:8s} {report.enclosed:>4d}/{report.total:<2d} "
            f"{100 * report.nu:7.2f}% {100 * report.nu_bar:7.2f}%"
        )
        if method == "ccc" and variant in (cq.ModelVariant.ME, cq.ModelVariant.MP2):
            print(f"  {variant.label} correlation matrix:")
            print_matrix(R.entries)


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument(
        "--data-dir",
        type=Path,
        default=Path(__file__).resolve().parents[1] / "tests" / "data",
        help="directory holding the bundled CSV fixtures",
    )
    args = parser.parse_args(argv)

    spec = cq.read_intervals_csv(args.data_dir / "standard_intervals.csv")
    samples = cq.read_samples_csv(args.data_dir / "standard_samples.csv")
    u = cq.regularize(spec, samples).rows
    print(f"{samples.n_samples} samples, {spec.n} variables: {', '.join(spec.names)}")

    with warnings.catch_warnings():
        warnings.simplefilter("ignore", cq.errors.DegenerateData)
        assessment_table("scc", spec, samples, u)
        assessment_table("ccc", spec, samples, u)
    return 0


if __name__ == "__main__":
    sys.exit(main())
