#!/usr/bin/env python3
"""Convert a MATLAB hyperspectral cube + ground truth to the native format.

The native format is three files sharing a stem:
  <stem>.json    {"height", "width", "bands", "dtype": "f64le", "order": "pixel-major"}
  <stem>.bin     float64 little-endian, all bands of pixel (0,0), then (0,1), ...
  <stem>.gt.csv  height rows of width comma-separated integer labels, 0 = unlabeled

Works with the public scene files, e.g.:
  convert_mat.py SalinasA_corrected.mat SalinasA_gt.mat $SRDL_DATA_DIR/salinas_a
  convert_mat.py Indian_pines_corrected.mat Indian_pines_gt.mat \
      $SRDL_DATA_DIR/indian_pines_subset --crop 30 80 25 50

Values are divided by the cube-wide maximum so spectra land in [0, 1]
(pass --raw to keep the original reflectance integers).
"""

import argparse
import json
import sys

import numpy as np
import scipy.io


def load_array(path):
    mat = scipy.io.loadmat(path)
    arrays = [v for k, v in mat.items() if not k.startswith("__") and hasattr(v, "ndim")]
    if not arrays:
        sys.exit(f"{path}: no data array found")
    return max(arrays, key=lambda a: a.size)


def main():
    ap = argparse.ArgumentParser(description=__doc__,
                                 formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("cube_mat", help=".mat file holding the height x width x bands cube")
    ap.add_argument("gt_mat", help=".mat file holding the height x width label image")
    ap.add_argument("out_stem", help="output path without extension")
    ap.add_argument("--crop", nargs=4, type=int, metavar=("R0", "R1", "C0", "C1"),
                    help="keep rows [R0,R1) and columns [C0,C1) before writing")
    ap.add_argument("--raw", action="store_true", help="skip the divide-by-max scaling")
    args = ap.parse_args()

    cube = np.asarray(load_array(args.cube_mat), dtype=np.float64)
    gt = np.asarray(load_array(args.gt_mat)).astype(np.int64)
    if cube.ndim != 3 or gt.shape != cube.shape[:2]:
        sys.exit(f"shape mismatch: cube {cube.shape}, gt {gt.shape}")

    if args.crop:
        r0, r1, c0, c1 = args.crop
        cube, gt = cube[r0:r1, c0:c1], gt[r0:r1, c0:c1]

    if not args.raw:
        cube /= cube.max()

    # relabel to a dense 1..K range (0 stays "unlabeled")
    ids = sorted(set(gt.ravel().tolist()) - {0})
    remap = {old: new for new, old in enumerate(ids, start=1)}
    gt = np.vectorize(lambda v: remap.get(v, 0))(gt)

    h, w, b = cube.shape
    with open(args.out_stem + ".json", "w") as f:
        json.dump({"height": h, "width": w, "bands": b,
                   "dtype": "f64le", "order": "pixel-major"}, f, indent=2)
        f.write("\n")
    cube.astype("<f8").tofile(args.out_stem + ".bin")
    np.savetxt(args.out_stem + ".gt.csv", gt, fmt="%d", delimiter=",")
    print(f"{args.out_stem}: {h}x{w}x{b}, {len(ids)} classes, "
          f"{int((gt > 0).sum())} labeled pixels")


if __name__ == "__main__":
    main()
