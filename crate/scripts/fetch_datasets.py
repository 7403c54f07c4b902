#!/usr/bin/env python3
"""Export the bladder1, lung and ovarian tables from the R `survival` package
to CSV files under ./data (or the directory given as the first argument).

The tables are read from the `rdatasets` Python package, which bundles the
R datasets:  pip install rdatasets
"""
import os
import sys

import rdatasets
import pandas as pd


def load(item):
    base = os.path.join(os.path.dirname(rdatasets.__file__), "_data", "survival")
    return pd.read_pickle(os.path.join(base, f"{item}.pkl.compress"), compression="xz")


def main():
    out = sys.argv[1] if len(sys.argv) > 1 else "data"
    os.makedirs(out, exist_ok=True)
    # `cancer` is the NCCTG lung cancer table (survival::lung).
    for item, name in [("bladder1", "bladder1"), ("cancer", "lung"), ("ovarian", "ovarian")]:
        df = load(item).drop(columns=["rownames"], errors="ignore")
        path = os.path.join(out, f"{name}.csv")
        df.to_csv(path, index=False, na_rep="NA")
        print(f"{path}: {len(df)} rows")


if __name__ == "__main__":
    main()
