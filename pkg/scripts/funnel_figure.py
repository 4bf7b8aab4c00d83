"""Five funnel geodesics through u0 = 0 (slants 0, 0.5, 1, 1.2, sqrt 2) as CSV plus one SVG.

    python scripts/funnel_figure.py --out-dir figures
"""
import argparse
import math
from pathlib import Path

import numpy as np

from invgeo import export
from invgeo.cli import main as cli_main
from invgeo.spaces import funnel_embedding

SLANTS = (0.0, 0.5, 1.0, 1.2, math.sqrt(2.0))


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out-dir", default="figures")
    ap.add_argument("--length", type=float, default=6.0)
    args = ap.parse_args()
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)

    curves, ambient = [], []
    for c in SLANTS:
        csv_path = out / f"funnel_c{c:.4f}.csv"
        code = cli_main(["trace", "--fixture", "funnel", "--u0", "0", "--slant", repr(c),
                         "--length", str(args.length), "--out", str(csv_path)])
        if code:
            raise SystemExit(code)
        _, cols = export.read_path_csv(csv_path.read_text())
        pts = np.array([funnel_embedding(u, v) for u, v in zip(cols["u"], cols["v"])])
        label = f"c={c:.4g}"
        curves.append((cols["v"], cols["u"], label))
        ambient.append((pts[:, 0], pts[:, 1], label))
        print(f"{label:>10}  max slant residual {np.max(np.abs(cols['slant_residual'])):.2e}  -> {csv_path}")

    svg = out / "funnel_geodesics.svg"
    export.write_svg(svg, curves, "v", "u", title="funnel geodesics through u=0", ambient=ambient)
    print(f"wrote {svg}")


if __name__ == "__main__":
    main()
