"""Frozen numerical constants measured once and shipped with the package.

calibration.json holds regression pins (decay rates, error-constant
ceilings, a few expensive reference integrals) that were computed by
scripts/calibrate.py and then frozen.  Tests and the verification
suites compare fresh computations against these pins; nothing in the
library derives new mathematics from them.
"""

from __future__ import annotations

import hashlib
import json
from functools import lru_cache
from pathlib import Path

_CALIB_PATH = Path(__file__).with_name("calibration.json")


@lru_cache(maxsize=1)
def load_calibration() -> dict:
    with open(_CALIB_PATH, "rb") as fh:
        return json.loads(fh.read())


@lru_cache(maxsize=1)
def calibration_sha256() -> str:
    with open(_CALIB_PATH, "rb") as fh:
        return hashlib.sha256(fh.read()).hexdigest()
