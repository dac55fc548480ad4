"""Dataset ingestion (LIBSVM text), synthetic generation, and client partitioning.

Labels are canonicalized to {-1, +1}: when a file carries two distinct raw
label values, the smaller maps to -1 and the larger to +1, so {0,1}, {1,2}
and {-1,+1} files all land on the same convention.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Sequence

import numpy as np

from fedsketch.errors import FedsketchError


class DataError(FedsketchError, ValueError):
    pass


class MalformedLine(DataError):
    pass


class NonIncreasingIndex(DataError):
    pass


class MoreThanTwoClasses(DataError):
    pass


class EmptyInput(DataError):
    pass


class InvalidNoise(DataError):
    pass


class TooManyClients(DataError):
    pass


@dataclass(frozen=True)
class Dataset:
    """Dense feature rows plus ±1 labels."""

    features: np.ndarray  # (n, M) float64
    labels: np.ndarray  # (n,) float64, entries in {-1.0, +1.0}

    def __post_init__(self):
        feats = np.ascontiguousarray(self.features, dtype=np.float64)
        labs = np.ascontiguousarray(self.labels, dtype=np.float64)
        if feats.ndim != 2 or feats.shape[0] < 1 or feats.shape[1] < 1:
            raise DataError(f"features must be a non-empty 2-D array, got shape {feats.shape}")
        if labs.shape != (feats.shape[0],):
            raise DataError("labels must be a vector with one entry per row")
        if not np.all(np.isfinite(feats)):
            raise DataError("features contain non-finite entries")
        if not np.all(np.isin(labs, (-1.0, 1.0))):
            raise DataError("labels must be -1 or +1")
        object.__setattr__(self, "features", feats)
        object.__setattr__(self, "labels", labs)

    @property
    def row_count(self) -> int:
        return self.features.shape[0]

    @property
    def feature_dim(self) -> int:
        return self.features.shape[1]

    def take(self, idx: np.ndarray) -> "Dataset":
        return Dataset(self.features[idx], self.labels[idx])


@dataclass(frozen=True)
class ClientDataset:
    client_id: int
    data: Dataset
    weight: float  # n_j / N


class PartitionKind(Enum):
    UNIFORM_RANDOM = "uniform"
    SORTED_BY_LABEL_SHARDS = "label_shards"


@dataclass(frozen=True)
class PartitionScheme:
    kind: PartitionKind
    seed: int = 0


def parse_libsvm(text: str | Iterable[str], feature_dim: int | None = None) -> Dataset:
    """Parse LIBSVM-format text into a dense Dataset.

    Each non-empty line is ``<label> <idx>:<val> ...`` with 1-based strictly
    increasing indices. ``feature_dim`` overrides the inferred dimension (the
    maximum index seen), for files whose trailing all-zero features are
    omitted.
    """
    if isinstance(text, str):
        lines: Iterable[str] = text.splitlines()
    else:
        lines = text

    raw_labels: list[float] = []
    rows: list[list[tuple[int, float]]] = []
    max_index = 0
    for lineno, line in enumerate(lines, start=1):
        line = line.strip()
        if not line:
            continue
        tokens = line.split()
        try:
            label = float(tokens[0])
        except ValueError:
            raise MalformedLine(f"line {lineno}: bad label token {tokens[0]!r}")
        entries: list[tuple[int, float]] = []
        prev_idx = 0
        for tok in tokens[1:]:
            parts = tok.split(":")
            if len(parts) != 2:
                raise MalformedLine(f"line {lineno}: bad feature token {tok!r}")
            try:
                idx = int(parts[0])
                val = float(parts[1])
            except ValueError:
                raise MalformedLine(f"line {lineno}: bad feature token {tok!r}")
            if idx < 1:
                raise MalformedLine(f"line {lineno}: index {idx} is not 1-based")
            if idx <= prev_idx:
                raise NonIncreasingIndex(
                    f"line {lineno}: index {idx} after {prev_idx} (must be strictly increasing)"
                )
            prev_idx = idx
            entries.append((idx, val))
        max_index = max(max_index, prev_idx)
        raw_labels.append(label)
        rows.append(entries)

    if not rows:
        raise EmptyInput("no data lines found")

    dim = feature_dim if feature_dim is not None else max_index
    if dim < 1:
        raise EmptyInput("no feature indices found and no feature_dim override")
    if max_index > dim:
        raise MalformedLine(f"feature index {max_index} exceeds feature_dim override {dim}")

    features = np.zeros((len(rows), dim))
    for i, entries in enumerate(rows):
        for idx, val in entries:
            features[i, idx - 1] = val

    distinct = sorted(set(raw_labels))
    if len(distinct) > 2:
        raise MoreThanTwoClasses(f"found {len(distinct)} distinct label values: {distinct[:5]}...")
    if len(distinct) == 2:
        lo, hi = distinct
        labels = np.where(np.asarray(raw_labels) == lo, -1.0, 1.0)
    else:
        # Single class: only unambiguous if the file already uses ±1.
        if distinct[0] not in (-1.0, 1.0):
            raise MoreThanTwoClasses(
                f"single label value {distinct[0]} cannot be oriented to ±1"
            )
        labels = np.full(len(rows), distinct[0])
    return Dataset(features, labels)


def write_libsvm(data: Dataset) -> str:
    """Serialize a Dataset as LIBSVM text (zeros omitted, 17 significant digits)."""
    out = []
    for row, lab in zip(data.features, data.labels):
        toks = [f"{int(lab):+d}"]
        for j, v in enumerate(row, start=1):
            if v != 0.0:
                toks.append(f"{j}:{v:.17g}")
        out.append(" ".join(toks))
    return "\n".join(out) + "\n"


def synth_logistic_truth(
    n: int, dim: int, seed: int, noise: float
) -> tuple[Dataset, np.ndarray]:
    """Like synth_logistic but also returns the planted weight vector."""
    if not (0.0 <= noise < 0.5):
        raise InvalidNoise(f"noise must lie in [0, 0.5), got {noise}")
    if n < 1 or dim < 1:
        raise DataError("need n >= 1 and dim >= 1")
    rng = np.random.default_rng(seed)
    w_true = rng.standard_normal(dim)
    features = rng.standard_normal((n, dim))
    clean = np.where(features @ w_true >= 0.0, 1.0, -1.0)
    flips = rng.random(n) < noise
    labels = np.where(flips, -clean, clean)
    return Dataset(features, labels), w_true


def synth_logistic(n: int, dim: int, seed: int, noise: float) -> Dataset:
    """Standard-normal rows with labels sign(x · w_true), each flipped with
    probability ``noise``; bit-identical for identical arguments."""
    return synth_logistic_truth(n, dim, seed, noise)[0]


def partition(data: Dataset, m: int, scheme: PartitionScheme) -> list[ClientDataset]:
    """Split a dataset across m clients.

    UNIFORM_RANDOM permutes rows and deals out near-equal chunks (sizes differ
    by at most one). SORTED_BY_LABEL_SHARDS sorts rows by label, cuts 2m
    contiguous shards, and deals a random pair of shards to each client - the
    standard label-skew recipe for heterogeneous splits.
    """
    n = data.row_count
    if m > n:
        raise TooManyClients(f"cannot split {n} rows across {m} clients")
    if m < 1:
        raise DataError("need at least one client")
    rng = np.random.default_rng(scheme.seed)
    if scheme.kind is PartitionKind.UNIFORM_RANDOM:
        chunks: Sequence[np.ndarray] = np.array_split(rng.permutation(n), m)
    elif scheme.kind is PartitionKind.SORTED_BY_LABEL_SHARDS:
        if 2 * m > n:
            raise TooManyClients(
                f"label-shard partition needs at least 2 rows per client ({m} clients, {n} rows)"
            )
        order = np.argsort(data.labels, kind="stable")
        shards = np.array_split(order, 2 * m)
        deal = rng.permutation(2 * m)
        chunks = [
            np.concatenate((shards[deal[2 * j]], shards[deal[2 * j + 1]])) for j in range(m)
        ]
    else:
        raise DataError(f"unknown partition kind {scheme.kind}")
    return [
        ClientDataset(client_id=j, data=data.take(idx), weight=len(idx) / n)
        for j, idx in enumerate(chunks)
    ]
