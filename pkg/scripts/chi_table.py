#!/usr/bin/env python3
"""Normalization-ratio table chi_N^(M) over (d, N, M).

Tabulates the closed form next to the explicit-construction oracle and
the chi_{N+1}/chi_N ratio with its lower bound; the ratio approaching
one is the bosonic-quality signal.
"""

import sys

from cobosons.cli import main

ARGS = [
    "chi",
    "--d", "2:12",
    "--n", "1:4",
    "--m", "1:4",
    "--out", "chi_table.csv",
]

if __name__ == "__main__":
    sys.exit(main(ARGS + sys.argv[1:]))
