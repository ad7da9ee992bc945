import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from photon_walks import CoincidenceCounts, ValidationError, quantum_correlation
from photon_walks import io, render
from photon_walks.correlations import CorrelationMatrix


def test_gamma_csv_round_trip_exact(tmp_path, device_u):
    cm = quantum_correlation(device_u, (9, 11))
    path = tmp_path / "g.csv"
    io.write_gamma_csv(path, cm)
    back = io.read_gamma_csv(path)
    assert np.array_equal(back.gamma, cm.gamma)
    assert back.input_pair == (9, 11)
    assert back.indistinguishable is True
    assert back.source == cm.source


def test_absent_pairs_written_as_minus_one(tmp_path):
    g = np.array([[0.2, np.nan], [np.nan, 0.8]])
    cm = CorrelationMatrix(g, source="measured")
    text = io.gamma_csv(cm)
    assert "0.2,-1" in text
    io.write_gamma_csv(tmp_path / "a.csv", cm)
    back = io.read_gamma_csv(tmp_path / "a.csv")
    assert np.isnan(back.gamma[0, 1]) and back.gamma[1, 1] == 0.8
    assert back.indistinguishable is None


def test_non_square_rejected(tmp_path):
    (tmp_path / "x.csv").write_text("1,2\n3\n")
    with pytest.raises(ValidationError):
        io.read_gamma_csv(tmp_path / "x.csv")
    (tmp_path / "y.csv").write_text("1,a\n3,4\n")
    with pytest.raises(ValidationError):
        io.read_gamma_csv(tmp_path / "y.csv")


@settings(max_examples=50, deadline=None)
@given(st.lists(st.floats(0, 1e6, allow_nan=False), min_size=1, max_size=30))
def test_vector_round_trip(tmp_path_factory, values):
    path = tmp_path_factory.mktemp("v") / "v.csv"
    path.write_text(io.vector_csv(values, {"k": 1}))
    assert np.array_equal(io.read_vector_csv(path), np.asarray(values))


def test_json_nan_is_null():
    text = io.to_json({"b": np.array([1.0, np.nan]), "a": np.int64(3), "c": np.bool_(True)})
    data = json.loads(text)
    assert data == {"a": 3, "b": [1.0, None], "c": True}
    assert text.index('"a"') < text.index('"b"')


def test_counts_round_trip_with_sidecar(tmp_path):
    raw = np.array([[4, 10, -1], [0, 6, 3], [-1, 0, 2]])
    counts = CoincidenceCounts.from_raw(raw, singles=[100, 120, 90],
                                        efficiency=[0.9, 0.8, 1.0], integration_s=60)
    io.write_counts(tmp_path / "c.csv", counts, tmp_path / "c.json")
    back = io.read_counts(tmp_path / "c.csv", tmp_path / "c.json")
    assert np.array_equal(back.counts, counts.counts)
    assert np.array_equal(back.singles, counts.singles)
    assert np.array_equal(back.efficiency, counts.efficiency)
    assert back.integration_s == 60
    assert not back.present[0, 2]


def test_counts_need_integers(tmp_path):
    (tmp_path / "c.csv").write_text("1.5,2\n2,1\n")
    with pytest.raises(ValidationError):
        io.read_counts(tmp_path / "c.csv")


def test_bad_sidecar(tmp_path):
    (tmp_path / "c.csv").write_text("1,2\n0,1\n")
    (tmp_path / "s.json").write_text("{not json")
    with pytest.raises(ValidationError):
        io.read_counts(tmp_path / "c.csv", tmp_path / "s.json")


def test_colormap_endpoints():
    lut = render.colormap()
    assert lut.shape == (256, 3)
    assert tuple(lut[0]) == tuple(render.COLOR_STOPS[0].astype(int))
    assert tuple(lut[-1]) == tuple(render.COLOR_STOPS[-1].astype(int))


def test_rgb_nan_grey_and_scaling():
    rgb = render.to_rgb(np.array([[0.0, 1.0], [np.nan, 0.5]]))
    assert tuple(rgb[1, 0]) == render.NOT_APPLICABLE
    assert tuple(rgb[0, 1]) == tuple(render.colormap()[-1])
    assert tuple(rgb[0, 0]) == tuple(render.colormap()[0])


def test_violation_rgb_white_for_non_violating():
    s = np.array([[np.nan, 2.0], [2.0, np.nan]])
    rgb = render.violation_rgb(s, np.array([[False, True], [False, False]]))
    assert tuple(rgb[1, 0]) == render.NO_VIOLATION
    assert tuple(rgb[0, 0]) == render.NOT_APPLICABLE
    assert tuple(rgb[0, 1]) == tuple(render.colormap()[-1])


def test_ppm_structure_and_determinism(tmp_path, device_u):
    g = quantum_correlation(device_u, (10, 11)).gamma
    a = render.ppm_bytes(render.to_rgb(g))
    assert a == render.ppm_bytes(render.to_rgb(g.copy()))
    assert a.startswith(b"P6\n21 21\n255\n")
    assert len(a) == len(b"P6\n21 21\n255\n") + 21 * 21 * 3
    render.write_ppm(tmp_path / "g.ppm", render.to_rgb(g))
    assert np.array_equal(render.read_ppm(tmp_path / "g.ppm"), render.to_rgb(g))
