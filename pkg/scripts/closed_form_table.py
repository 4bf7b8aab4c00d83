"""Cross-check every closed-form branch against quadrature and the ODE; prints a table.

    python scripts/closed_form_table.py [--json report.json]
"""
import argparse
import json

from invgeo.closed_forms import BRANCH_CASES, crosscheck_closed_form


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--json", help="also write the reports here")
    args = ap.parse_args()
    rows = []
    print(f"{'branch':<18}{'sign':>5}{'|dv| quad':>12}{'|dv| ode':>12}{'deriv':>12}  pass")
    for case in BRANCH_CASES:
        fam, sol, rng = case.build()
        rep = crosscheck_closed_form(fam, sol, rng)
        rows.append({"u_range": [rng.lo, rng.hi], "K": case.K, "c": case.c, **rep.to_json()})
        print(f"{rep.branch:<18}{rep.sign:>5}{rep.max_dev_quadrature:>12.2e}{rep.max_dev_ode:>12.2e}"
              f"{rep.max_derivative_mismatch:>12.2e}  {rep.passed}")
    if args.json:
        with open(args.json, "w") as fh:
            json.dump(rows, fh, indent=2)


if __name__ == "__main__":
    main()
