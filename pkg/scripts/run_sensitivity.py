"""Detection probability as a single outlier sweeps a grid around the clusters."""

import sys

from _common import COMBOS, parser, run

if __name__ == "__main__":
    p = parser(__doc__)
    p.add_argument("--grid-step", default="5")
    opts = p.parse_args()
    codes = [run("sensitivity", f"{em}_{bic}", ["--em-loss", em, "--bic-loss", bic, "--grid-step", opts.grid_step], opts)
             for em, bic in COMBOS]
    sys.exit(max(codes))
