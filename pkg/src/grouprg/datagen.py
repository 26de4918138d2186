"""Regenerate the shipped JSON data: group catalog files, irrep catalog
files, and the calibrated parameter store.

Run as `python -m grouprg.datagen [dest]`; tests assert that regeneration
reproduces the committed files byte for byte.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

from .groups import catalog_group, group_to_json
from .harness import calibrate
from .reps import irrep_catalog, irreps_to_json

CATALOG_NAMES = [
    "Z2", "Z3", "Z4", "Z5", "Z6", "Z8", "Z9",
    "Q8", "D4", "S3", "Z2wrZ2", "UT3(2)", "UT3(3)",
    "Z2xZ3", "Q8xZ2", "Q8xZ3",
]

# Calibration targets: (construction, group, n, eps, corpus_size, perms)
CALIBRATION_TARGETS = [
    ("pgroup", "Q8", 12, 0.1, 50, 20),
    ("spill-pgroup", "Q8", 10, 0.1, 30, 5),
]

ACCEPTANCE_SEED = 20260810


def _fname(name: str) -> str:
    return name.replace("(", "_").replace(")", "").lower()


def write_group_files(dest: Path) -> None:
    out = dest / "groups"
    out.mkdir(parents=True, exist_ok=True)
    for name in CATALOG_NAMES:
        G = catalog_group(name)
        (out / f"{_fname(name)}.json").write_text(group_to_json(G) + "\n")


def write_irrep_files(dest: Path) -> None:
    out = dest / "irreps"
    out.mkdir(parents=True, exist_ok=True)
    for name in CATALOG_NAMES:
        S = irrep_catalog(name)
        (out / f"{_fname(name)}.json").write_text(irreps_to_json(S) + "\n")


def write_calibrated(dest: Path) -> None:
    store = {}
    for construction, gname, n, eps, count, perms in CALIBRATION_TARGETS:
        G = catalog_group(gname)
        params = calibrate(construction, G, n, eps, corpus_size=count,
                           perms=perms, base_seed=ACCEPTANCE_SEED)
        params["n"] = n
        params["eps"] = eps
        store[f"{construction}/{gname}"] = params
    (dest / "calibrated.json").write_text(json.dumps(store, indent=1) + "\n")


def main(argv=None) -> int:
    argv = argv if argv is not None else sys.argv[1:]
    dest = Path(argv[0]) if argv else Path(__file__).parent / "data"
    write_group_files(dest)
    write_irrep_files(dest)
    write_calibrated(dest)
    print(f"wrote catalogs and calibration data under {dest}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
