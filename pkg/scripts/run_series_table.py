"""Reproduce the ten-entry F(D; 100000) reference table.

Writes out/series_table.csv plus its manifest.  Runtime is about a
minute single-threaded.
"""

import pathlib
import sys

from mordell.cli import main

OUT = pathlib.Path(__file__).resolve().parent.parent / "out"

if __name__ == "__main__":
    OUT.mkdir(exist_ok=True)
    sys.exit(
        main(
            [
                "fdy",
                "--D-list", "-5,-3,-2,0,1,3,4,6,7,9",
                "--Y", "100000",
                "--out", str(OUT / "series_table.csv"),
            ]
        )
    )
