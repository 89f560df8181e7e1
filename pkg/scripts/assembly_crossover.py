#!/usr/bin/env python3
"""Assembly crossover in the effective hard-core-pair model (d = 10).

Produces one CSV per particle number with the fidelities of every
partition state: as gamma*U/J^2 grows, the weight moves from the
all-singleton state through the mixed assemblies to the single
2N-fermion molecule.
"""

import sys

from cobosons.cli import main

SWEEPS = {
    3: "partition:1+1+1,partition:2+1,partition:3",
    4: "partition:1+1+1+1,partition:2+1+1,partition:2+2,partition:3+1,partition:4",
}


def run():
    for n, targets in SWEEPS.items():
        code = main([
            "fidelity-scan",
            "--model", "effective",
            "--d", "10",
            "--n", str(n),
            "--J", "1",
            "--U", "1000",
            "--gamma-grid", "4:20:81",
            "--targets", targets,
            "--out", f"assembly_crossover_n{n}.csv",
        ])
        if code:
            return code
    return 0


if __name__ == "__main__":
    sys.exit(run())
