"""Seeded grid-of-lines test network.

Horizontal and vertical lines criss-cross a square area; consecutive
stations on a line are adjacent, and where two lines cross their two
closest stations are joined by a transfer link. Daily passenger counts
are log-normal.
"""
from __future__ import annotations

import math

import numpy as np

from .network import EARTH_RADIUS_KM, NetworkModel, Station

CENTER = (35.6812, 139.7671)


def grid_network(n_lines: int = 40, stations_per_line: int = 25, extent_km: float = 12.0,
                 seed: int = 0, median_daily: float = 20000.0, sigma: float = 0.8,
                 n_operators: int = 7, jitter_km: float = 0.05) -> NetworkModel:
    """``n_lines`` lines (half horizontal, half vertical) of ``stations_per_line`` each."""
    rng = np.random.default_rng(seed)
    n_h = n_lines // 2
    n_v = n_lines - n_h
    lat0, lon0 = CENTER
    km_per_deg_lat = math.pi * EARTH_RADIUS_KM / 180.0
    km_per_deg_lon = km_per_deg_lat * math.cos(math.radians(lat0))
    half = extent_km / 2.0

    def offsets(count):
        return np.linspace(-half, half, count) if count > 1 else np.zeros(1)

    stations: list[Station] = []
    xy: list[tuple[float, float]] = []
    lines: list[list[int]] = []
    along = offsets(stations_per_line)
    for li in range(n_lines):
        horizontal = li < n_h
        across = offsets(n_h)[li] if horizontal else offsets(n_v)[li - n_h]
        # stagger so horizontal and vertical stations do not coincide
        shift = (along[1] - along[0]) / 2.0 if (not horizontal and stations_per_line > 1) else 0.0
        line_id = f"{'H' if horizontal else 'V'}{li if horizontal else li - n_h:02d}"
        members = []
        for si in range(stations_per_line):
            a = along[si] + shift * (1 if si % 2 else -1) / 2.0
            x, y = (a, across) if horizontal else (across, a)
            x += rng.normal(0.0, jitter_km)
            y += rng.normal(0.0, jitter_km)
            lat = lat0 + y / km_per_deg_lat
            lon = lon0 + x / km_per_deg_lon
            daily = float(round(median_daily * math.exp(sigma * rng.standard_normal())))
            sid = f"{line_id}-{si:02d}"
            members.append(len(stations))
            stations.append(Station(sid, f"{line_id} station {si}", round(float(lat), 7), round(float(lon), 7),
                                    line_id, f"OP{li % n_operators}", daily))
            xy.append((x, y))
        lines.append(members)

    edges: set[tuple[int, int]] = set()
    for members in lines:
        for a, b in zip(members, members[1:]):
            edges.add((a, b))
    pts = np.array(xy)
    for h in lines[:n_h]:
        for v in lines[n_h:]:
            d = np.linalg.norm(pts[h][:, None, :] - pts[v][None, :, :], axis=2)
            a, b = np.unravel_index(np.argmin(d), d.shape)
            i, j = h[a], v[b]
            edges.add((min(i, j), max(i, j)))
    return NetworkModel(tuple(stations), frozenset(edges))
