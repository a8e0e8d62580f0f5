#!/usr/bin/env python3
"""Regenerate data/ccs.csv and data/bcw.csv from the copies shipped in the
`rdatasets` PyPI package (modeldata::concrete and MASS::biopsy).

Both are the UCI records (Concrete Compressive Strength; original Breast
Cancer Wisconsin). Output uses the canonical layout: features..., label.
"""
import argparse
import pathlib

import rdatasets


def main() -> None:
    ap = argparse.ArgumentParser()
    ap.add_argument("--out", default=str(pathlib.Path(__file__).resolve().parent.parent / "data"))
    args = ap.parse_args()
    out = pathlib.Path(args.out)
    out.mkdir(parents=True, exist_ok=True)

    ccs = rdatasets.data("modeldata", "concrete").drop(columns=["rownames"])
    ccs.to_csv(out / "ccs.csv", index=False)

    bcw = rdatasets.data("MASS", "biopsy").drop(columns=["rownames", "ID"]).dropna()
    bcw["class"] = (bcw["class"] == "malignant").astype(int)
    bcw[[f"V{i}" for i in range(1, 10)]] = bcw[[f"V{i}" for i in range(1, 10)]].astype(int)
    bcw.to_csv(out / "bcw.csv", index=False)


if __name__ == "__main__":
    main()
