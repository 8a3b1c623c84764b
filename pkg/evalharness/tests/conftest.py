import csv

import numpy as np
import pytest


def write_feature_csv(path, X, ids=None):
    X = np.asarray(X, dtype=float)
    ids = ids or [f"cell{i}" for i in range(X.shape[0])]
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["cell_id", *(f"f{j}" for j in range(X.shape[1]))])
        for cid, row in zip(ids, X):
            writer.writerow([cid, *(repr(float(v)) for v in row)])
    return ids


def write_label_csv(path, labels, ids):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["cell_id", "label"])
        for cid, label in zip(ids, labels):
            writer.writerow([cid, label])


@pytest.fixture
def three_cluster_csvs(tmp_path):
    """60 cells in three well-separated Gaussian clusters, 8 features."""
    rng = np.random.default_rng(0)
    X = np.concatenate(
        [rng.normal(loc=8.0 * c, scale=0.3, size=(20, 8)) for c in range(3)]
    )
    labels = [f"type{c}" for c in range(3) for _ in range(20)]
    features = tmp_path / "features.csv"
    labels_path = tmp_path / "labels.csv"
    ids = write_feature_csv(features, X)
    write_label_csv(labels_path, labels, ids)
    return features, labels_path
