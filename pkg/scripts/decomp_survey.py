"""Primal/dual decomposability search over the generated corpus.

Prints verdict counts per family and timing; exits nonzero if any map gets
both a decomposition and a witness.
"""

import collections
import sys
import time

import numpy as np

from posmap.corpus import decomposability_corpus
from posmap.decomp import Decomposed, WitnessFound, classify_decomposability


def main(seed=0):
    counts = collections.Counter()
    clash = []
    worst_res = 0.0
    t0 = time.time()
    for label, phi in decomposability_corpus(seed):
        out = classify_decomposability(phi)
        fam = label.rsplit("-", 1)[0]
        counts[(fam, out["verdict"])] += 1
        if isinstance(out["primal"], Decomposed):
            worst_res = max(worst_res, out["primal"].residual)
            if isinstance(out["dual"], WitnessFound):
                clash.append(label)
    for (fam, verdict), n in sorted(counts.items()):
        print(f"{fam:<12} {verdict:<16} {n}")
    print(f"maps={sum(counts.values())}  worst decomposition residual={worst_res:.2e}  time={time.time() - t0:.1f}s")
    if clash:
        print("both verdicts:", clash)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main(int(sys.argv[1]) if len(sys.argv) > 1 else 0))
