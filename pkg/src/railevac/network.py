"""Station/edge ingestion and the geometric matrices built from it."""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from typing import IO, Iterable

import numpy as np

from .errors import ContractError, DuplicateStationError, ParseError, UnknownStationError

#: Mean Earth radius used for every great-circle distance, in km.
EARTH_RADIUS_KM = 6371.0

STATION_COLUMNS = ("id", "name", "lat", "lon", "line_id", "operator_id", "daily_passengers")
EDGE_COLUMNS = ("from_id", "to_id")


@dataclass(frozen=True)
class Station:
    id: str
    name: str
    lat: float
    lon: float
    line_id: str
    operator_id: str
    daily_passengers: float

    def __post_init__(self):
        if not -90.0 <= self.lat <= 90.0:
            raise ContractError(f"station {self.id!r}: latitude {self.lat} out of range")
        if not -180.0 <= self.lon <= 180.0:
            raise ContractError(f"station {self.id!r}: longitude {self.lon} out of range")
        if not self.daily_passengers >= 0:
            raise ContractError(f"station {self.id!r}: negative daily_passengers")


@dataclass(frozen=True)
class NetworkModel:
    """Immutable station graph.

    ``stations[i]`` is station index ``i`` for every matrix in the package.
    ``adjacency`` holds unordered pairs stored as ``(i, j)`` with ``i < j``.
    """

    stations: tuple[Station, ...]
    adjacency: frozenset[tuple[int, int]] = field(default_factory=frozenset)

    def __post_init__(self):
        object.__setattr__(self, "stations", tuple(self.stations))
        n = len(self.stations)
        seen: set[str] = set()
        for s in self.stations:
            if s.id in seen:
                raise DuplicateStationError(s.id)
            seen.add(s.id)
        pairs = set()
        for i, j in self.adjacency:
            if i == j or not (0 <= i < n and 0 <= j < n):
                raise ContractError(f"invalid adjacency pair ({i}, {j}) for {n} stations")
            pairs.add((min(i, j), max(i, j)))
        object.__setattr__(self, "adjacency", frozenset(pairs))
        object.__setattr__(self, "_index", {s.id: k for k, s in enumerate(self.stations)})

    @property
    def n(self) -> int:
        return len(self.stations)

    @property
    def ids(self) -> list[str]:
        return [s.id for s in self.stations]

    def index_of(self, station_id: str) -> int:
        try:
            return self._index[station_id]
        except KeyError:
            raise UnknownStationError(station_id) from None

    def stations_on_line(self, line_id: str) -> list[int]:
        return [k for k, s in enumerate(self.stations) if s.line_id == line_id]

    def coords(self) -> tuple[np.ndarray, np.ndarray]:
        lat = np.array([s.lat for s in self.stations], dtype=float)
        lon = np.array([s.lon for s in self.stations], dtype=float)
        return lat, lon

    def daily_passengers(self) -> np.ndarray:
        return np.array([s.daily_passengers for s in self.stations], dtype=float)

    def sorted_edges(self) -> list[tuple[int, int]]:
        return sorted(self.adjacency)


def _open_text(source) -> tuple[IO[str], str, bool]:
    if isinstance(source, (str, bytes)) or hasattr(source, "__fspath__"):
        return open(source, newline="", encoding="utf-8"), str(source), True
    return source, getattr(source, "name", "<stream>"), False


def _rows(source, columns: tuple[str, ...]) -> Iterable[tuple[int, list[str]]]:
    fh, name, owned = _open_text(source)
    try:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            raise ParseError(name, 1, "empty file, expected header")
        header = [h.strip() for h in header]
        if header and header[0].startswith("﻿"):
            header[0] = header[0][1:]
        if tuple(header) != columns:
            raise ParseError(name, 1, f"expected header {','.join(columns)}, got {','.join(header)}")
        for row in reader:
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != len(columns):
                raise ParseError(name, reader.line_num, f"expected {len(columns)} fields, got {len(row)}")
            yield name, reader.line_num, [c.strip() for c in row]
    finally:
        if owned:
            fh.close()


def load_network(stations_source, edges_source) -> NetworkModel:
    """Read a station CSV and an edge CSV (paths or open text streams)."""
    stations: list[Station] = []
    index: dict[str, int] = {}
    for name, line, (sid, sname, lat, lon, line_id, op, daily) in _rows(stations_source, STATION_COLUMNS):
        if not sid:
            raise ParseError(name, line, "empty station id")
        try:
            latf, lonf, dailyf = float(lat), float(lon), float(daily)
        except ValueError as exc:
            raise ParseError(name, line, f"non-numeric field: {exc}") from None
        if not all(math.isfinite(v) for v in (latf, lonf, dailyf)):
            raise ParseError(name, line, "non-finite numeric field")
        if sid in index:
            raise DuplicateStationError(sid, line)
        try:
            st = Station(sid, sname, latf, lonf, line_id, op, dailyf)
        except ContractError as exc:
            raise ParseError(name, line, str(exc)) from None
        index[sid] = len(stations)
        stations.append(st)

    pairs: set[tuple[int, int]] = set()
    for name, line, (a, b) in _rows(edges_source, EDGE_COLUMNS):
        for sid in (a, b):
            if sid not in index:
                raise UnknownStationError(sid, f"{name}:{line}")
        i, j = index[a], index[b]
        if i == j:
            raise ParseError(name, line, f"self-loop on station {a!r}")
        pairs.add((min(i, j), max(i, j)))
    return NetworkModel(tuple(stations), frozenset(pairs))


def _fmt(x: float) -> str:
    return repr(float(x)) if not float(x).is_integer() else str(int(x))


def write_network(net: NetworkModel, stations_out, edges_out) -> None:
    """Inverse of :func:`load_network`; values are written losslessly."""
    for target, writer_fn in ((stations_out, _write_stations), (edges_out, _write_edges)):
        if isinstance(target, (str, bytes)) or hasattr(target, "__fspath__"):
            with open(target, "w", newline="", encoding="utf-8") as fh:
                writer_fn(net, fh)
        else:
            writer_fn(net, target)


def _write_stations(net: NetworkModel, fh) -> None:
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(STATION_COLUMNS)
    for s in net.stations:
        w.writerow([s.id, s.name, repr(float(s.lat)), repr(float(s.lon)), s.line_id, s.operator_id, _fmt(s.daily_passengers)])


def _write_edges(net: NetworkModel, fh) -> None:
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(EDGE_COLUMNS)
    for i, j in net.sorted_edges():
        w.writerow([net.stations[i].id, net.stations[j].id])


def network_from_strings(stations_csv: str, edges_csv: str) -> NetworkModel:
    return load_network(io.StringIO(stations_csv), io.StringIO(edges_csv))


def haversine_km(lat1, lon1, lat2, lon2):
    """Great-circle distance in km; broadcasts over numpy arrays.

    Both the haversine term and its complement are formed as sums of
    non-negative products so that near-antipodal pairs stay accurate.
    """
    p1, p2 = np.radians(lat1), np.radians(lat2)
    half_dphi = (p2 - p1) / 2.0
    half_sum = (p2 + p1) / 2.0
    s_dlmb = np.sin((np.radians(lon2) - np.radians(lon1)) / 2.0) ** 2
    hav = np.sin(half_dphi) ** 2 + np.cos(p1) * np.cos(p2) * s_dlmb
    comp = np.cos(half_dphi) ** 2 * (1.0 - s_dlmb) + np.sin(half_sum) ** 2 * s_dlmb
    return 2.0 * EARTH_RADIUS_KM * np.arctan2(np.sqrt(hav), np.sqrt(comp))


def connectivity_matrix(net: NetworkModel) -> np.ndarray:
    """Binary symmetric adjacency matrix with a zero diagonal."""
    a = np.zeros((net.n, net.n), dtype=np.int8)
    if net.adjacency:
        ij = np.array(net.sorted_edges(), dtype=np.intp)
        a[ij[:, 0], ij[:, 1]] = 1
        a[ij[:, 1], ij[:, 0]] = 1
    return a


def distance_matrix(net: NetworkModel) -> np.ndarray:
    """Pairwise haversine distances in km."""
    lat, lon = net.coords()
    d = haversine_km(lat[:, None], lon[:, None], lat[None, :], lon[None, :])
    d = np.asarray(d, dtype=float)
    # exact symmetry regardless of rounding order
    d = np.minimum(d, d.T)
    np.fill_diagonal(d, 0.0)
    return d
