"""Full-range histogram of F(D; 10000) over |D| <= 45000.

Squares and the vanishing residue class are excluded by the histogram
engine.  Writes out/series_histogram.csv with bin edges and counts; the
extrema and moments land on stderr and in the manifest's config echo.
About a minute of runtime.
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
                "--D-range", "-45000..45000",
                "--Y", "10000",
                "--histogram", "120",
                "--out", str(OUT / "series_histogram.csv"),
            ]
        )
    )
