"""Exhaustive protocol sweeps and oracle cross-validation over several dimensions.

    python scripts/exhaustive_sweep.py --dims 3 5 7 11 --no-oracle-above 7
"""
import argparse
import json

from urm.oracle import cross_validate
from urm.protocol import sweep_protocol_a, sweep_protocol_b


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--dims", type=int, nargs="+", default=[3, 5, 7])
    ap.add_argument("--no-oracle-above", type=int, default=7,
                    help="skip the O(d^6) oracle for larger d")
    ap.add_argument("--json", action="store_true")
    args = ap.parse_args()

    rows = []
    for d in args.dims:
        a, b = sweep_protocol_a(d), sweep_protocol_b(d)
        row = {
            "d": d,
            "a_wrong": a.wrong_definite,
            "a_undetermined": a.undetermined,
            "a_correct": a.correct_definite,
            "a_ms": round(a.elapsed_ms),
            "b_recovery": b.extras["recovery_rate"],
            "b_wrong": b.wrong_definite,
            "b_ms": round(b.elapsed_ms),
        }
        if d <= args.no_oracle_above:
            cv = cross_validate(d)
            row["oracle_mismatches"] = len(cv.mismatches)
            row["oracle_ms"] = round(cv.elapsed_ms)
        rows.append(row)
        if not args.json:
            print("  ".join(f"{k}={v}" for k, v in row.items()), flush=True)
    if args.json:
        print(json.dumps(rows, indent=2))


if __name__ == "__main__":
    main()
