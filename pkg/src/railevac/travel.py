"""All-pairs train travel time with stop and line-change penalties."""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import ContractError, ParseError
from .network import NetworkModel, haversine_km

DEFAULT_TRAIN_SPEED = 800.0  # m/min
DEFAULT_STOP_TIME = 1.0  # min per stop
DEFAULT_TRANSFER_TIME = 7.5  # min per line change


@dataclass(frozen=True)
class TravelParams:
    train_speed: float = DEFAULT_TRAIN_SPEED
    stop_time: float = DEFAULT_STOP_TIME
    transfer_time: float = DEFAULT_TRANSFER_TIME
    penalty_aware: bool = False

    def __post_init__(self):
        for name in ("train_speed", "stop_time", "transfer_time"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v > 0):
                raise ContractError(f"{name} must be positive, got {v}")


@dataclass(frozen=True)
class TrainTimeMatrix:
    """Minutes between every station pair; ``inf`` where no rail path exists."""

    values: np.ndarray

    def __post_init__(self):
        v = np.array(self.values, dtype=float)
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @property
    def n(self) -> int:
        return self.values.shape[0]


def edge_csr(net: NetworkModel, train_speed: float):
    """CSR arrays (indptr, indices, minutes) of the undirected rail graph."""
    lat, lon = net.coords()
    n = net.n
    nbrs: list[list[tuple[int, float]]] = [[] for _ in range(n)]
    for i, j in net.sorted_edges():
        metres = float(haversine_km(lat[i], lon[i], lat[j], lon[j])) * 1000.0
        t = metres / train_speed
        nbrs[i].append((j, t))
        nbrs[j].append((i, t))
    indptr = np.zeros(n + 1, dtype=np.int64)
    indices, weights = [], []
    for i, row in enumerate(nbrs):
        row.sort()
        indices.extend(v for v, _ in row)
        weights.extend(w for _, w in row)
        indptr[i + 1] = len(indices)
    return indptr, np.array(indices, dtype=np.int64), np.array(weights, dtype=float)


def line_codes(net: NetworkModel) -> np.ndarray:
    codes: dict[str, int] = {}
    return np.array([codes.setdefault(s.line_id, len(codes)) for s in net.stations], dtype=np.int64)


def train_time_matrix(net: NetworkModel, params: TravelParams | None = None,
                      backend: str | None = None) -> TrainTimeMatrix:
    """Build the train time matrix.

    For each source the shortest-time tree is computed on in-train minutes
    (haversine metres / speed); along the tree path to each target the
    penalties ``stop_time * (len(path) - 1)`` and ``transfer_time * changes``
    are added, where ``changes`` counts line-label switches between
    consecutive stations. With ``params.penalty_aware`` the penalties are
    part of the search weight instead.

    Ties in path time are broken by fewer line changes, then by lower
    predecessor index.
    """
    params = params or TravelParams()
    indptr, indices, weights = edge_csr(net, params.train_speed)
    values = kernels.all_pairs_train_time(
        indptr, indices, weights, line_codes(net),
        float(params.stop_time), float(params.transfer_time), bool(params.penalty_aware),
        backend=backend,
    )
    np.fill_diagonal(values, 0.0)
    return TrainTimeMatrix(values)


def write_matrix(values, target) -> None:
    """Write a square matrix as CSV, 6 decimals, ``inf`` for unreachable."""
    values = np.asarray(getattr(values, "values", values), dtype=float)

    def emit(fh):
        for row in values:
            fh.write(",".join("inf" if math.isinf(x) else f"{x:.6f}" for x in row))
            fh.write("\n")

    if isinstance(target, (str, bytes)) or hasattr(target, "__fspath__"):
        with open(target, "w", encoding="utf-8") as fh:
            emit(fh)
    else:
        emit(target)


def read_matrix(source) -> np.ndarray:
    if isinstance(source, (str, bytes)) or hasattr(source, "__fspath__"):
        with open(source, newline="", encoding="utf-8") as fh:
            return read_matrix(fh)
    rows = []
    for row in csv.reader(source):
        if not row:
            continue
        try:
            rows.append([float(x) for x in row])
        except ValueError as exc:
            raise ParseError(getattr(source, "name", "<matrix>"), len(rows) + 1, str(exc)) from None
    a = np.array(rows, dtype=float)
    if a.size and (a.ndim != 2 or a.shape[0] != a.shape[1]):
        raise ContractError(f"matrix is not square: {a.shape}")
    return a
