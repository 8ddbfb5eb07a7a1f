"""Convert the UCI multiple-features (handwritten numerals) CSVs into per-view files.

The input directory holds ``mfeat-<view>.csv`` files whose last column is the
digit label (this is the layout shipped inside the mvlearn wheel, under
``mvlearn/datasets/UCImultifeature``). Output, one file per view plus a
labels file, is what ``configs/numerals.json`` reads:

    python scripts/prepare_numerals.py path/to/UCImultifeature data/numerals
"""

import argparse
from pathlib import Path

import numpy as np

VIEWS = {"fou": "fourier", "fac": "profile", "pix": "pixel", "zer": "zernike"}


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("source", type=Path)
    parser.add_argument("dest", type=Path)
    args = parser.parse_args(argv)
    args.dest.mkdir(parents=True, exist_ok=True)
    labels = None
    for short, name in VIEWS.items():
        data = np.loadtxt(args.source / f"mfeat-{short}.csv", delimiter=",", skiprows=1)
        X, y = data[:, :-1], data[:, -1].astype(int)
        if labels is None:
            labels = y
        elif not np.array_equal(labels, y):
            raise SystemExit(f"mfeat-{short}.csv: labels are not row-aligned with the other views")
        header = ",".join(f"{name}_{j}" for j in range(X.shape[1]))
        np.savetxt(args.dest / f"{name}.csv", X, delimiter=",", header=header, comments="", fmt="%.10g")
        print(f"{name}: {X.shape[0]} x {X.shape[1]}")
    np.savetxt(args.dest / "labels.csv", labels, header="digit", comments="", fmt="%d")


if __name__ == "__main__":
    main()
