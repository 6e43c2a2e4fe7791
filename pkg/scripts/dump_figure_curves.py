#!/usr/bin/env python3
"""Dump value/gradient curves for every activation, at both plot ranges.

Writes <outdir>/<fn>_<preset>.csv for fn in {softstep, htan, elu, modhtan}
and preset in {within, exploding}.  The "within" range covers ordinary
inputs; "exploding" sweeps +-1000 to show which functions stay bounded.
"""

import argparse
import pathlib

from modhtan.activations import ACTIVATION_NAMES, parse_activation
from modhtan.bench import CURVE_PRESETS, dump_curves


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--outdir", type=pathlib.Path, default=pathlib.Path("curves"))
    args = ap.parse_args()
    args.outdir.mkdir(parents=True, exist_ok=True)

    for name in ACTIVATION_NAMES:
        for preset, (lo, hi, step) in CURVE_PRESETS.items():
            out = args.outdir / f"{name}_{preset}.csv"
            dump_curves(parse_activation(name), lo, hi, step, out)
            print(f"wrote {out}")


if __name__ == "__main__":
    main()
