#!/usr/bin/env python3
"""Build the bundled handwritten-digit dataset in MNIST IDX format.

Sources the scikit-learn `digits` corpus (UCI Optical Recognition of
Handwritten Digits, 1797 8x8 grayscale images), upscales each digit to
28x28 with bilinear interpolation, and augments with small random
shifts to reach 5000 training and 1000 test items. Train and test draw
from disjoint source images. Output is bit-exact IDX (big-endian
headers, unsigned bytes), drop-in compatible with MNIST tooling.

Usage: python3 tools/make_dataset.py [out_dir]
"""

import struct
import sys
from pathlib import Path

import numpy as np
from scipy import ndimage
from sklearn.datasets import load_digits

TRAIN_N = 5000
TEST_N = 1000
SEED = 12345
SCALE = 3.0  # 8x8 -> 24x24 inside the 28x28 frame


def upscale(img8, shift_r, shift_c):
    img = ndimage.zoom(img8.astype(np.float64), SCALE, order=1)
    img = np.clip(img * (255.0 / 16.0), 0, 255)
    out = np.zeros((28, 28), dtype=np.float64)
    r0 = 2 + shift_r
    c0 = 2 + shift_c
    out[r0 : r0 + 24, c0 : c0 + 24] = img
    return out.astype(np.uint8)


def build(pool_imgs, pool_labels, count, rng):
    images = np.zeros((count, 28, 28), dtype=np.uint8)
    labels = np.zeros(count, dtype=np.uint8)
    idx = rng.integers(0, len(pool_imgs), size=count)
    shifts = rng.integers(-2, 3, size=(count, 2))
    for i in range(count):
        images[i] = upscale(pool_imgs[idx[i]], shifts[i, 0], shifts[i, 1])
        labels[i] = pool_labels[idx[i]]
    return images, labels


def write_idx_images(path, images):
    n = images.shape[0]
    with open(path, "wb") as f:
        f.write(struct.pack(">IIII", 0x00000803, n, 28, 28))
        f.write(images.tobytes())


def write_idx_labels(path, labels):
    with open(path, "wb") as f:
        f.write(struct.pack(">II", 0x00000801, len(labels)))
        f.write(labels.tobytes())


def main():
    out = Path(sys.argv[1]) if len(sys.argv) > 1 else Path("data")
    out.mkdir(parents=True, exist_ok=True)
    digits = load_digits()
    imgs = digits.images  # (1797, 8, 8) floats 0..16
    labels = digits.target.astype(np.uint8)

    # Disjoint source split: last 300 source images feed only the test set.
    split = len(imgs) - 300
    rng = np.random.default_rng(SEED)
    train_images, train_labels = build(imgs[:split], labels[:split], TRAIN_N, rng)
    test_images, test_labels = build(imgs[split:], labels[split:], TEST_N, rng)

    write_idx_images(out / "train-images-idx3-ubyte", train_images)
    write_idx_labels(out / "train-labels-idx1-ubyte", train_labels)
    write_idx_images(out / "t10k-images-idx3-ubyte", test_images)
    write_idx_labels(out / "t10k-labels-idx1-ubyte", test_labels)
    print(f"wrote {TRAIN_N} train / {TEST_N} test images to {out}/")
    print(f"train label counts: {np.bincount(train_labels, minlength=10)}")
    print(f"test  label counts: {np.bincount(test_labels, minlength=10)}")
    print(f"mean intensity: {train_images.mean():.2f}")


if __name__ == "__main__":
    main()
