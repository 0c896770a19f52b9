"""Runtime of each penalty versus N (three blobs) and versus r (t_3 pairs)."""

import sys

from _common import parser, run

if __name__ == "__main__":
    opts = parser(__doc__).parse_args()
    codes = [run("runtime", f"huber_{sweep}", ["--em-loss", "huber", "--penalty", "all", "--sweep", sweep], opts)
             for sweep in ("n", "r")]
    sys.exit(max(codes))
