"""Cold-cache medians for every benchmark suite, written as CSV."""

import argparse
import csv
import sys

from haarint.bench import SUITES, run_suite


def main():
    p = argparse.ArgumentParser()
    p.add_argument("--samples", type=int, default=30)
    p.add_argument("--suite", default="all", choices=sorted(SUITES))
    p.add_argument("--out", help="CSV path (default stdout)")
    args = p.parse_args()
    rows = run_suite(args.suite, args.samples)
    fh = open(args.out, "w", newline="") if args.out else sys.stdout
    w = csv.DictWriter(fh, fieldnames=["group", "integrand", "dimension", "median_ms", "samples"])
    w.writeheader()
    for r in rows:
        w.writerow(r.as_dict())
    if args.out:
        fh.close()


if __name__ == "__main__":
    main()
