"""Monochromatic peak width versus pulse duration (diffraction limit)."""
import argparse

from _common import run_config


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--output", default="out/width_scan")
    args = ap.parse_args()
    m = run_config("width_scan.json", args.output)
    print(f"first T: hwhm {m['hwhm_first']:.3f} d, last T: hwhm {m['hwhm_last']:.3f} d")
    print(f"narrowest at T = {m['T_at_min']} tau: {m['min_hwhm']:.3f} d")
    print(f"per-T table in {args.output}/width_scan.csv")


if __name__ == "__main__":
    main()
