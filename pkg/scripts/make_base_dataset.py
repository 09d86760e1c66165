"""Regenerate src/kmcluster/data/two_group_base.csv.

Synthetic two-group data with six measurements per item, modelled loosely on
banknote-style measurements: group means in the range of genuine vs
counterfeit notes, within-group spreads halved so the two groups are cleanly
separable by k-means. It is NOT the Swiss banknote data.
"""

from pathlib import Path

import numpy as np

COLUMNS = ["length", "left", "right", "bottom", "top", "diagonal"]
GROUPS = {
    "genuine": ([214.97, 129.94, 129.72, 8.31, 10.17, 141.52], [0.38, 0.36, 0.35, 0.64, 0.65, 0.45]),
    "counterfeit": ([214.82, 130.30, 130.19, 10.53, 11.13, 139.45], [0.35, 0.26, 0.29, 1.13, 0.64, 0.56]),
}


def main(seed: int = 20221121, per_group: int = 100, spread: float = 0.5) -> None:
    rng = np.random.Generator(np.random.PCG64(seed))
    out = Path(__file__).resolve().parents[1] / "src" / "kmcluster" / "data" / "two_group_base.csv"
    lines = [",".join(COLUMNS + ["status"])]
    for name, (mean, sd) in GROUPS.items():
        x = rng.normal(mean, spread * np.asarray(sd), size=(per_group, len(COLUMNS)))
        for row in np.round(x, 1):
            lines.append(",".join(f"{v:.1f}" for v in row) + f",{name}")
    out.write_text("\n".join(lines) + "\n")


if __name__ == "__main__":
    main()
