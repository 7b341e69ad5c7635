import io
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import haversine_km as ref_haversine
from railevac.errors import DuplicateStationError, ParseError, UnknownStationError
from railevac.network import (EARTH_RADIUS_KM, NetworkModel, Station, connectivity_matrix, distance_matrix,
                              haversine_km, load_network, network_from_strings, write_network)
from railevac.synthetic import grid_network

from conftest import TOY_EDGES, TOY_STATIONS

HEADER = "id,name,lat,lon,line_id,operator_id,daily_passengers\n"

# independent atan2-form haversine, R = 6371 km
TOKYO_SHINJUKU_KM = 6.0782158586650405


def test_load_minimal_chain(toy_net):
    assert toy_net.n == 3
    assert toy_net.adjacency == {(0, 1), (1, 2)}
    assert toy_net.ids == ["A", "B", "C"]


def test_unknown_edge_reference_names_station():
    with pytest.raises(UnknownStationError, match="'X'"):
        network_from_strings(TOY_STATIONS, "from_id,to_id\nA,X\n")


def test_duplicate_station_id():
    with pytest.raises(DuplicateStationError, match="'A'"):
        network_from_strings(HEADER + "A,a,1,2,L,O,3\nA,b,1,2,L,O,3\n", "from_id,to_id\n")


@pytest.mark.parametrize("row", ["A,a,1,2,L,O", "A,a,north,2,L,O,3", "A,a,1,2,L,O,lots", "A,a,95,2,L,O,1"])
def test_malformed_rows_report_line(row):
    with pytest.raises(ParseError) as exc:
        network_from_strings(HEADER + "Z,z,0,0,L,O,0\n" + row + "\n", "from_id,to_id\n")
    assert exc.value.line == 3


def test_duplicate_and_reversed_edges_collapse():
    net = network_from_strings(TOY_STATIONS, "from_id,to_id\nA,B\nB,A\nA,B\nC,B\n")
    assert net.adjacency == {(0, 1), (1, 2)}


def test_bad_header():
    with pytest.raises(ParseError):
        network_from_strings("id,lat\nA,1\n", "from_id,to_id\n")


def test_connectivity_examples(toy_net):
    np.testing.assert_array_equal(connectivity_matrix(toy_net), [[0, 1, 0], [1, 0, 1], [0, 1, 0]])
    empty = NetworkModel(toy_net.stations, frozenset())
    assert not connectivity_matrix(empty).any()
    tri = NetworkModel(toy_net.stations, frozenset({(0, 1), (1, 2), (0, 2)}))
    np.testing.assert_array_equal(connectivity_matrix(tri), 1 - np.eye(3))


def test_haversine_golden():
    assert abs(float(haversine_km(35.6812, 139.7671, 35.6896, 139.7006)) - TOKYO_SHINJUKU_KM) < 1e-6
    assert abs(ref_haversine(35.6812, 139.7671, 35.6896, 139.7006) - TOKYO_SHINJUKU_KM) < 1e-12


def test_haversine_zero_and_antipodal():
    assert float(haversine_km(35.0, 139.0, 35.0, 139.0)) == 0.0
    assert abs(float(haversine_km(10.0, 20.0, -10.0, -160.0)) - math.pi * EARTH_RADIUS_KM) < 1e-6


coord = st.tuples(st.floats(-90, 90), st.floats(-180, 180))


@settings(max_examples=300, deadline=None)
@given(coord, coord, coord)
def test_haversine_triangle_inequality(a, b, c):
    ab = float(haversine_km(*a, *b))
    bc = float(haversine_km(*b, *c))
    ac = float(haversine_km(*a, *c))
    assert ac <= ab + bc + 1e-9


@settings(max_examples=100, deadline=None)
@given(coord, coord)
def test_haversine_matches_reference(a, b):
    assert abs(float(haversine_km(*a, *b)) - ref_haversine(*a, *b)) < 1e-6


def test_matrices_symmetric_zero_diagonal():
    net = grid_network(n_lines=6, stations_per_line=5, seed=3)
    for m in (connectivity_matrix(net), distance_matrix(net)):
        np.testing.assert_array_equal(m, m.T)
        assert not np.diag(m).any()


def test_distance_matrix_entries_match_reference(toy_net):
    d = distance_matrix(toy_net)
    s = toy_net.stations
    for i in range(3):
        for j in range(3):
            assert abs(d[i, j] - ref_haversine(s[i].lat, s[i].lon, s[j].lat, s[j].lon)) < 1e-9


def test_round_trip():
    net = grid_network(n_lines=4, stations_per_line=6, seed=11)
    sbuf, ebuf = io.StringIO(), io.StringIO()
    write_network(net, sbuf, ebuf)
    again = load_network(io.StringIO(sbuf.getvalue()), io.StringIO(ebuf.getvalue()))
    assert again == net


def test_round_trip_files(tmp_path, toy_net):
    write_network(toy_net, tmp_path / "s.csv", tmp_path / "e.csv")
    assert load_network(tmp_path / "s.csv", tmp_path / "e.csv") == toy_net


def test_station_range_checks():
    with pytest.raises(ValueError):
        Station("x", "x", 91.0, 0.0, "L", "O", 0)
    with pytest.raises(ValueError):
        Station("x", "x", 0.0, 0.0, "L", "O", -1)
