"""Length and time units for argon at a few field-gradient strengths."""
import argparse

from debroglie.core import AMU
from debroglie.runner import units_report


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--mass-amu", type=float, default=40.0)
    ap.add_argument("--gradients", type=float, nargs="+", default=[1e9, 1e10, 1e11, 1e12],
                    help="Hz/cm")
    args = ap.parse_args()
    print(f"{'Hz/cm':>10} {'d [nm]':>10} {'tau [us]':>10}")
    for g in args.gradients:
        r = units_report(args.mass_amu * AMU, g * 100)
        print(f"{g:10.3g} {r['d_nm']:10.3f} {r['tau_us']:10.4g}")
    print(r["note"])


if __name__ == "__main__":
    main()
