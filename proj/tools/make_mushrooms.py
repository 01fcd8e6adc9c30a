#!/usr/bin/env python3
"""Rebuild data/mushrooms.libsvm from the UCI mushroom samples bundled with xgboost.

The xgboost source tree ships the 8124 UCI mushroom records as one-hot sparse
matrices (R-package/data/agaricus.{train,test}.rda). This script concatenates
both splits, drops one-hot columns that never occur, and writes LibSVM text
with labels 1 (edible) / 2 (poisonous).

usage: make_mushrooms.py <xgboost-source-dir> <output-file>
requires: pip install rdata
"""
import sys
import warnings

import rdata


def load(path, name):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        obj = rdata.conversion.convert(rdata.parser.parse_file(path))[name]
    m = obj["data"]
    nrow, ncol = (int(v) for v in m.Dim)
    rows = [[] for _ in range(nrow)]
    for col in range(ncol):
        for k in range(int(m.p[col]), int(m.p[col + 1])):
            rows[int(m.i[k])].append(col)
    return rows, [int(v) for v in obj["label"]]


def main():
    src, out = sys.argv[1], sys.argv[2]
    rows, labels = [], []
    for split in ("train", "test"):
        r, l = load(f"{src}/R-package/data/agaricus.{split}.rda", f"agaricus.{split}")
        rows += r
        labels += l
    used = sorted({c for r in rows for c in r})
    remap = {c: j + 1 for j, c in enumerate(used)}
    with open(out, "w") as f:
        for r, y in zip(rows, labels):
            feats = " ".join(f"{remap[c]}:1" for c in sorted(r))
            f.write(f"{y + 1} {feats}\n")


if __name__ == "__main__":
    main()
