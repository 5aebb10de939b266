#!/usr/bin/env python3
"""Regenerates the synthetic image fixtures under tests/fixtures.

synthetic8x6:    three classes x 10 images, 8x6, class color patterns with
                 brightness jitter and pixel noise.
separable16x12:  two classes x 10 images, 16x12, disjoint supports (top half
                 vs bottom half).
"""

import argparse
from pathlib import Path

import numpy as np


def write_ppm(path: Path, rgb: np.ndarray) -> None:
    h, w, _ = rgb.shape
    with open(path, "wb") as f:
        f.write(b"P6\n%d %d\n255\n" % (w, h))
        f.write(rgb.astype(np.uint8).tobytes())


def synthetic(root: Path, rng: np.random.Generator) -> None:
    rows, cols = 8, 6
    r, c = np.mgrid[0:rows, 0:cols]
    templates = {
        "disc": (((r - 3.5) ** 2 + (c - 2.5) ** 2) < 7.0)[..., None] * np.array([0.9, 0.3, 0.2]),
        "stripes": ((c % 2) == 0)[..., None] * np.array([0.2, 0.8, 0.3]),
        "wedge": (r > c)[..., None] * np.array([0.25, 0.35, 0.9]),
    }
    for label, t in templates.items():
        d = root / label
        d.mkdir(parents=True, exist_ok=True)
        for k in range(10):
            img = t * rng.uniform(0.7, 1.0) + rng.normal(0.0, 0.06, t.shape) + 0.05
            write_ppm(d / f"{k:02d}.ppm", np.clip(np.rint(img * 255), 0, 255))


def separable(root: Path, rng: np.random.Generator) -> None:
    rows, cols = 16, 12
    colors = {"top": np.array([0.9, 0.3, 0.2]), "bottom": np.array([0.2, 0.4, 0.9])}
    for label, color in colors.items():
        d = root / label
        d.mkdir(parents=True, exist_ok=True)
        for k in range(10):
            img = np.zeros((rows, cols, 3))
            half = slice(0, rows // 2) if label == "top" else slice(rows // 2, rows)
            img[half] = color * rng.uniform(0.6, 1.0) * rng.uniform(0.85, 1.0, (rows // 2, cols, 1))
            write_ppm(d / f"{k:02d}.ppm", np.clip(np.rint(img * 255), 0, 255))


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", type=Path, default=Path(__file__).resolve().parent.parent / "tests" / "fixtures")
    ap.add_argument("--seed", type=int, default=20240501)
    args = ap.parse_args()
    rng = np.random.default_rng(args.seed)
    synthetic(args.out / "synthetic8x6", rng)
    separable(args.out / "separable16x12", rng)


if __name__ == "__main__":
    main()
