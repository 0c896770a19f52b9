"""Detection probability versus outlier fraction for every loss combination."""

import sys

from _common import COMBOS, parser, run

if __name__ == "__main__":
    opts = parser(__doc__).parse_args()
    codes = [run("breakdown", f"{em}_{bic}", ["--em-loss", em, "--bic-loss", bic, "--penalty", "all"], opts)
             for em, bic in COMBOS]
    sys.exit(max(codes))
