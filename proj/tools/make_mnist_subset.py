#!/usr/bin/env python3
"""Build the small MNIST IDX fixture used by the test suites.

The source is the `mnist` npm package (MIT), which ships 10000 MNIST digits
as JSON arrays of pixel intensities rounded to three decimals. Every value is
an exact byte/255 ratio, so round(x * 255) recovers the original bytes.

Digits are interleaved round-robin by class so that any prefix is balanced.

    npm pack mnist && tar xzf mnist-*.tgz
    python3 tools/make_mnist_subset.py package/src/digits tests/data
"""

import argparse
import json
import pathlib
import struct

ROWS = COLS = 28


def load_digits(src: pathlib.Path):
    per_class = []
    for digit in range(10):
        flat = json.loads((src / f"{digit}.json").read_text())["data"]
        images = [flat[i:i + ROWS * COLS] for i in range(0, len(flat), ROWS * COLS)]
        per_class.append([bytes(round(x * 255) for x in img) for img in images])
    return per_class


def interleave(per_class):
    out = []
    depth = max(len(c) for c in per_class)
    for k in range(depth):
        for digit, images in enumerate(per_class):
            if k < len(images):
                out.append((digit, images[k]))
    return out


def write_images(path: pathlib.Path, images):
    with path.open("wb") as f:
        f.write(struct.pack(">IIII", 2051, len(images), ROWS, COLS))
        for img in images:
            f.write(img)


def write_labels(path: pathlib.Path, labels):
    with path.open("wb") as f:
        f.write(struct.pack(">II", 2049, len(labels)))
        f.write(bytes(labels))


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("digits_dir", type=pathlib.Path)
    parser.add_argument("out_dir", type=pathlib.Path)
    parser.add_argument("--train", type=int, default=1000)
    parser.add_argument("--test", type=int, default=500)
    args = parser.parse_args()

    samples = interleave(load_digits(args.digits_dir))
    train = samples[:args.train]
    test = samples[args.train:args.train + args.test]

    args.out_dir.mkdir(parents=True, exist_ok=True)
    for name, part in (("train", train), ("test", test)):
        write_images(args.out_dir / f"mnist-{name}-images.idx3-ubyte", [img for _, img in part])
        write_labels(args.out_dir / f"mnist-{name}-labels.idx1-ubyte", [d for d, _ in part])


if __name__ == "__main__":
    main()
