"""Regenerates data/mnist_*.csv from the 5000-sample MNIST extract bundled with mlxtend.

Rows are label-first, 784 pixel values in 0..255. The split is stratified and
seeded, so reruns produce identical files.
"""

import json
import pathlib

import numpy as np
from mlxtend.data import mnist_data

TRAIN_PER_CLASS = 50
TEST_PER_CLASS = 25
SEED = 20240601

out = pathlib.Path(__file__).resolve().parent.parent / "data"
x, y = mnist_data()
rng = np.random.default_rng(SEED)
train, test = [], []
for label in range(10):
    idx = rng.permutation(np.flatnonzero(y == label))
    train.extend(idx[:TRAIN_PER_CLASS])
    test.extend(idx[TRAIN_PER_CLASS:TRAIN_PER_CLASS + TEST_PER_CLASS])


def write(name, rows):
    rows = sorted(rows)
    with open(out / name, "w") as f:
        for i in rows:
            f.write(",".join([str(int(y[i]))] + [str(int(v)) for v in x[i]]) + "\n")


write("mnist_train.csv", train)
write("mnist_test.csv", test)
(out / "mnist.json").write_text(json.dumps({
    "name": "mnist-subsample",
    "width": 28,
    "height": 28,
    "classes": [str(d) for d in range(10)],
    "files": ["mnist_train.csv", "mnist_test.csv"],
}, indent=2) + "\n")
