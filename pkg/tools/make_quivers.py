"""Regenerate the packaged exchange-matrix tables.

Derives the extended exchange rows from the bracket for the shipped pair
catalog and freezes them into src/gcdouble/data/quivers.json.  Each entry
records the rows and which of them were confirmed against printed
relations; the rest are pinned by the bracket together with bidegree
balance, falling back to exchange divisibility where a row is not
bihomogeneously balanceable.

Run from the repository root:

    python3 tools/make_quivers.py
"""

import json
import pathlib
import sys
import time

sys.path.insert(0, str(pathlib.Path(__file__).resolve().parent.parent / "src"))

from gcdouble.bd import BDPair, BDTriple
from gcdouble.seed import build_initial_seed, pair_key, validate_quiver

CATALOG = [
    ("standard n=2", BDPair.standard(2)),
    ("standard n=3", BDPair.standard(3)),
    ("standard n=4", BDPair.standard(4)),
    ("standard n=5", BDPair.standard(5)),
    ("Cremmer-Gervais n=3", BDPair.cremmer_gervais(3)),
    ("Cremmer-Gervais n=4", BDPair.cremmer_gervais(4)),
    ("Cremmer-Gervais n=5", BDPair.cremmer_gervais(5)),
    ("opposite Cremmer-Gervais n=4", BDPair.cremmer_gervais(4).opposite()),
    ("single row pair 1>2, n=4",
     BDPair(BDTriple(4, {1: 2}), BDTriple.standard(4))),
    ("single column pair 1>2, n=4",
     BDPair(BDTriple.standard(4), BDTriple(4, {1: 2}))),
]


def main():
    table = {}
    for label, pair in CATALOG:
        t0 = time.time()
        seed = build_initial_seed(pair, matrix="derive")
        rep = validate_quiver(seed)
        if not rep["ok"]:
            bad = [c["name"] for c in rep["checks"] if not c["ok"]]
            raise SystemExit(f"{label}: validation failed: {bad}")
        table[pair_key(pair)] = {
            "label": label,
            "n": pair.n,
            "rows": {k: dict(seed.ext_row(k)) for k in seed.mutable_names},
            "rows_confirmed": rep["rows_confirmed"],
            "rows_unconfirmed": rep["rows_unconfirmed"],
        }
        print(f"{label}: {time.time() - t0:.1f}s, "
              f"{len(rep['rows_confirmed'])} confirmed, "
              f"{len(rep['rows_unconfirmed'])} bracket-only")
    out = pathlib.Path(__file__).resolve().parent.parent / \
        "src" / "gcdouble" / "data" / "quivers.json"
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(json.dumps(table, indent=1, sort_keys=True) + "\n")
    print(f"wrote {out} ({out.stat().st_size} bytes)")


if __name__ == "__main__":
    main()
