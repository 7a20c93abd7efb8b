"""Monte Carlo episodes vs the enumerated control-outcome law.

Bob picks b uniformly from the d+1 bases; his outcome is Born-sampled.
Prints observed and exact frequencies for each control outcome.

    python scripts/sampled_episodes.py --d 3 --family a --trials 100000 --seed 1
"""
import argparse
import math
from collections import Counter

import numpy as np

from urm.collective import MesFamily, MesLabel, gamma_matrix, mes_state
from urm.mub import Computational, basis_labels
from urm.oracle import enumerate_support, urm_projector
from urm.protocol import Undetermined, infer_basis, infer_outcome, is_correct, sample_episodes


def exact_law(d, prepared, family):
    law = {lab.key: 0.0 for lab in gamma_matrix(d, family)[0]}
    state = mes_state(d, prepared)
    for basis in basis_labels(d):
        for m in range(d):
            s = urm_projector(d, basis, m) @ state
            pm = float(np.vdot(s, s).real)
            for o, q in enumerate_support(d, prepared, basis, m, family).outcomes:
                law[o.key] += pm * q / (d + 1)
    return law


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--d", type=int, default=3)
    ap.add_argument("--family", choices=["a", "b"], default="a")
    ap.add_argument("--prepared", default="0,0")
    ap.add_argument("--trials", type=int, default=100_000)
    ap.add_argument("--seed", type=int, default=1)
    args = ap.parse_args()

    family = MesFamily.parse(args.family)
    mdd, m0 = (int(t) for t in args.prepared.split(","))
    prepared = MesLabel.of(args.d, "a", mdd, m0)
    episodes = sample_episodes(args.d, prepared, family, args.trials, args.seed)
    counts = Counter(ep.outcome.key for ep in episodes)
    law = exact_law(args.d, prepared, family)

    print(f"{'outcome':>10} {'observed':>10} {'exact':>10} {'z':>7}")
    for key, p in sorted(law.items()):
        f = counts[key] / args.trials
        z = (f - p) / math.sqrt(p * (1 - p) / args.trials) if 0 < p < 1 else 0.0
        print(f"{str(key):>10} {f:10.5f} {p:10.5f} {z:7.2f}")

    verdicts = Counter()
    for ep in episodes:
        if family is MesFamily.A:
            v = infer_basis(prepared, ep.outcome)
            verdicts["undetermined" if isinstance(v, Undetermined)
                     else "correct" if is_correct(v, ep.hidden.basis) else "wrong"] += 1
        elif isinstance(ep.hidden.basis, Computational):
            verdicts["not_applicable"] += 1
        else:
            ok = infer_outcome(prepared, ep.outcome, ep.hidden.basis) == ep.hidden.m
            verdicts["correct" if ok else "wrong"] += 1
    print(dict(verdicts))


if __name__ == "__main__":
    main()
