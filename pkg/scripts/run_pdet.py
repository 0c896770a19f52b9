"""Detection probability versus samples per cluster, clean and 5% contaminated."""

import sys

from _common import COMBOS, parser, run

if __name__ == "__main__":
    opts = parser(__doc__).parse_args()
    codes = []
    for em, bic in COMBOS:
        for eps in ("0", "0.05"):
            args = ["--em-loss", em, "--bic-loss", bic, "--penalty", "all", "--eps", eps]
            codes.append(run("pdet", f"{em}_{bic}_eps{eps}", args, opts))
    sys.exit(max(codes))
