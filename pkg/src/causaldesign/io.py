"""File formats: canonical JSON, orders, nets, SEMs, partitions, sample CSVs.

Canonical JSON sorts keys and rounds floats to 12 significant digits, so a
file re-read and re-written reproduces itself byte for byte. All points and
variable indices are 1-based on disk.
"""

from __future__ import annotations

import csv
import json

import numpy as np

from .bayesnet import DiscreteNet
from .orders import HasseDag, KPartition, StrictOrder
from .sem import LinearSem

__all__ = [
    "canonical_json",
    "write_json",
    "load_json",
    "hasse_to_obj",
    "hasse_from_obj",
    "order_to_obj",
    "order_from_obj",
    "net_to_obj",
    "net_from_obj",
    "sem_to_obj",
    "sem_from_obj",
    "partition_to_obj",
    "partition_from_obj",
    "write_samples_csv",
    "read_samples_csv",
    "read_float_csv",
]


def _canon(obj):
    if isinstance(obj, dict):
        return {str(k): _canon(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_canon(v) for v in obj]
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating,)):
        obj = float(obj)
    if isinstance(obj, float):
        if obj != obj or obj in (float("inf"), float("-inf")):
            raise ValueError("non-finite float cannot be serialized canonically")
        if obj == int(obj) and abs(obj) < 1e15:
            return obj
        return float(f"{obj:.12g}")
    if isinstance(obj, np.ndarray):
        return _canon(obj.tolist())
    return obj


def canonical_json(obj):
    return json.dumps(_canon(obj), sort_keys=True, indent=2) + "\n"


def write_json(path, obj):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(canonical_json(obj))


def load_json(path):
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)


def hasse_to_obj(dag):
    return {"n": dag.n, "covers": [[a + 1, b + 1] for a, b in dag.covers]}


def hasse_from_obj(obj):
    return HasseDag(int(obj["n"]), [(a - 1, b - 1) for a, b in obj["covers"]])


def order_to_obj(order):
    return {"n": order.n, "relations": [[a + 1, b + 1] for a, b in order.relations()]}


def order_from_obj(obj):
    n = int(obj["n"])
    if "relations" in obj:
        return StrictOrder.from_relations(n, [(a - 1, b - 1) for a, b in obj["relations"]])
    return None


def net_to_obj(net):
    nodes = []
    for i, name in enumerate(net.names):
        nodes.append(
            {
                "name": name,
                "card": net.cards[i],
                "parents": [net.names[p] for p in net.parents[i]],
                "cpt": net.cpts[i].tolist(),
            }
        )
    return {"nodes": nodes}


def net_from_obj(obj):
    entries = obj["nodes"]
    names = [str(e["name"]) for e in entries]
    index = {name: i for i, name in enumerate(names)}
    cards, parents, cpts = [], [], []
    for e in entries:
        cards.append(int(e["card"]))
        pa = []
        for pname in e.get("parents", []):
            if pname not in index:
                raise ValueError(f"node {e['name']!r} references unknown parent {pname!r}")
            pa.append(index[pname])
        parents.append(tuple(pa))
        cpts.append(np.array(e["cpt"], dtype=np.float64))
    return DiscreteNet(names, cards, parents, cpts)


def sem_to_obj(sem):
    obj = {
        "n": sem.n,
        "order": list(range(1, sem.n + 1)),
        "A": sem.a_matrix.tolist(),
        "noise_vars": sem.noise_vars.tolist(),
    }
    if sem.noise_means.any():
        obj["means"] = sem.noise_means.tolist()
    if sem.partition is not None:
        obj["partition"] = list(sem.partition.assignment)
    return obj


def sem_from_obj(obj):
    part = None
    if obj.get("partition") is not None:
        assignment = tuple(int(v) for v in obj["partition"])
        part = KPartition(max(assignment), assignment)
    return LinearSem(
        np.array(obj["A"], dtype=np.float64),
        np.array(obj["noise_vars"], dtype=np.float64),
        noise_means=obj.get("means"),
        partition=part,
    )


def partition_to_obj(part, names=None):
    if names is not None:
        return {"k": part.k, "layers": {names[i]: lev for i, lev in enumerate(part.assignment)}}
    return {"k": part.k, "assignment": list(part.assignment)}


def partition_from_obj(obj, names=None):
    k = int(obj["k"])
    if "layers" in obj:
        if names is None:
            raise ValueError("named partition needs the model's node names")
        layers = obj["layers"]
        missing = [n for n in names if n not in layers]
        if missing:
            raise ValueError(f"partition is missing node {missing[0]!r}")
        return KPartition(k, tuple(int(layers[n]) for n in names))
    return KPartition(k, tuple(int(v) for v in obj["assignment"]))


def write_samples_csv(path, names, matrix):
    matrix = np.asarray(matrix)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(names)
        writer.writerows(matrix.tolist())


def read_samples_csv(path):
    """Discrete sample CSV: header of node names, 0-based category indices."""
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        try:
            names = next(reader)
        except StopIteration:
            raise ValueError(f"{path}: empty sample file") from None
        rows = []
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            try:
                rows.append([int(v) for v in row])
            except ValueError:
                raise ValueError(f"{path}:{lineno}: non-integer sample value") from None
    if not rows:
        raise ValueError(f"{path}: no sample rows")
    matrix = np.array(rows, dtype=np.int64)
    if matrix.shape[1] != len(names):
        raise ValueError(f"{path}: rows disagree with the header width")
    return [str(n) for n in names], matrix


def read_float_csv(path):
    """Float CSV with a header; returns {column name: array}."""
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        try:
            names = next(reader)
        except StopIteration:
            raise ValueError(f"{path}: empty file") from None
        cols = {str(n): [] for n in names}
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(names):
                raise ValueError(f"{path}:{lineno}: row width disagrees with the header")
            for name, v in zip(names, row):
                try:
                    cols[str(name)].append(float(v))
                except ValueError:
                    raise ValueError(f"{path}:{lineno}: non-numeric value {v!r}") from None
    return {k: np.array(v, dtype=np.float64) for k, v in cols.items()}
