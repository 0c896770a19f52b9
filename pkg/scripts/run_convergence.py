"""Finite-sample versus asymptotic criterion curves as N_k grows."""

import sys

from _common import parser, run

if __name__ == "__main__":
    opts = parser(__doc__).parse_args()
    codes = [run("convergence", f"huber_{bic}", ["--em-loss", "huber", "--bic-loss", bic, "--penalty", "all"], opts)
             for bic in ("huber", "tukey")]
    sys.exit(max(codes))
