import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from vanya.data import (
    AnnualSeries,
    Normalization,
    generate_synthetic,
    load_csv,
    normalize,
    series_to_csv,
    write_csv,
    write_trajectory_csv,
)
from vanya.errors import InvalidInputError, ParseError, ValidationError
from vanya.losses import EPS_Y
from vanya.lv import DEFAULT_INITIAL, DEFAULT_PARAMS, LVParams, integrate_rk4


def write(tmp_path, text, name="data.csv"):
    p = tmp_path / name
    p.write_text(text, encoding="utf-8")
    return p


class TestLoadCsv:
    def test_two_rows(self, tmp_path):
        s = load_csv(write(tmp_path, "year,value\n1990,10.5\n1991,11\n"))
        assert len(s) == 2
        np.testing.assert_array_equal(s.years, [1990, 1991])
        np.testing.assert_array_equal(s.values, [10.5, 11.0])

    def test_year_gap_names_line_3(self, tmp_path):
        with pytest.raises(ParseError) as err:
            load_csv(write(tmp_path, "year,value\n1990,1\n1992,2\n"))
        assert err.value.line == 3
        assert "line 3" in str(err.value)

    def test_negative_value(self, tmp_path):
        with pytest.raises(ParseError, match="positive") as err:
            load_csv(write(tmp_path, "year,value\n1990,1\n1991,-5\n"))
        assert err.value.line == 3

    @pytest.mark.parametrize(
        "text, line",
        [
            ("1990,1\n1991,2\n", 1),
            ("year,value\n1990,abc\n", 2),
            ("year,value\n1990,1\nx,2\n", 3),
            ("year,value\n1990,0\n", 2),
            ("year,value\n1990,nan\n", 2),
            ("year,value\n1990,1,3\n", 2),
            ("year,value\n", 2),
        ],
    )
    def test_rejects(self, tmp_path, text, line):
        with pytest.raises(ParseError) as err:
            load_csv(write(tmp_path, text))
        assert err.value.line == line

    def test_parse_error_is_validation_error(self):
        assert issubclass(ParseError, ValidationError)

    def test_round_trip_exact(self, tmp_path, synth):
        path = tmp_path / "s.csv"
        write_csv(synth, path)
        back = load_csv(path)
        np.testing.assert_array_equal(back.years, synth.years)
        np.testing.assert_array_equal(back.values, synth.values)
        assert path.read_bytes() == series_to_csv(synth).encode()
        assert b"\r" not in path.read_bytes()

    @settings(max_examples=30)
    @given(st.lists(st.floats(1e-6, 1e9, allow_nan=False), min_size=1, max_size=30))
    def test_round_trip_property(self, tmp_path_factory, values):
        s = AnnualSeries.from_values(values, start_year=2000)
        path = tmp_path_factory.mktemp("rt") / "s.csv"
        write_csv(s, path)
        np.testing.assert_array_equal(load_csv(path).values, s.values)


class TestAnnualSeries:
    def test_invariants(self):
        with pytest.raises(InvalidInputError):
            AnnualSeries(np.array([1990, 1992]), np.array([1.0, 2.0]))
        with pytest.raises(InvalidInputError):
            AnnualSeries(np.array([1990, 1991]), np.array([1.0, 0.0]))
        with pytest.raises(InvalidInputError):
            AnnualSeries(np.array([1990]), np.array([1.0, 2.0]))

    def test_fingerprint(self, synth):
        fp = synth.fingerprint()
        assert fp["length"] == 37 and fp["first_year"] == 1986 and fp["last_year"] == 2022
        assert len(fp["sha256"]) == 64


class TestNormalization:
    def test_hand_example(self):
        z, norm = normalize([3.0, 4.0, 5.0])
        np.testing.assert_allclose(z, [0.5, 1.0, 1.5], rtol=1e-15)
        assert norm.scale > 0

    def test_round_trip(self, synth):
        z, norm = normalize(synth)
        np.testing.assert_allclose(norm.invert(z), synth.values, rtol=1e-12)
        assert z.min() == pytest.approx(0.5) and z.max() == pytest.approx(1.5)
        assert z.min() >= 0.5 - 1e-12 > EPS_Y

    def test_constant_rejected(self):
        with pytest.raises(InvalidInputError, match="zero range"):
            normalize([2.0, 2.0, 2.0])

    def test_dict_round_trip(self):
        norm = Normalization.fit([1.0, 7.0, 3.0])
        assert Normalization.from_dict(norm.to_dict()) == norm


class TestSynthetic:
    def test_default(self, synth):
        assert len(synth) == 37
        assert np.all(synth.values > 0)
        assert 1e5 <= synth.values.max() <= 1e6

    def test_noise_free_deterministic(self):
        a = generate_synthetic(noise_std=0.0, seed=1)
        b = generate_synthetic(noise_std=0.0, seed=2)
        np.testing.assert_array_equal(a.values, b.values)

    def test_seeded_noise(self):
        np.testing.assert_array_equal(generate_synthetic(seed=4).values, generate_synthetic(seed=4).values)
        assert not np.array_equal(generate_synthetic(seed=4).values, generate_synthetic(seed=5).values)

    def test_equals_orbit_without_drift_or_noise(self):
        s = generate_synthetic(noise_std=0.0, drift=0.0, scale=1.0, offset=0.0, n_years=12)
        traj = integrate_rk4(DEFAULT_PARAMS, DEFAULT_INITIAL, 0.01, 1100)
        np.testing.assert_array_equal(s.values, traj.x[::100])

    def test_non_positive_rejected(self):
        with pytest.raises(ValidationError):
            generate_synthetic(offset=0.0, drift=5.0)

    def test_too_short(self):
        with pytest.raises(InvalidInputError):
            generate_synthetic(n_years=4)

    def test_other_params(self):
        s = generate_synthetic(LVParams(1.0, 0.5, 0.5, 0.2), n_years=20)
        assert len(s) == 20


def test_trajectory_csv_precision(tmp_path):
    traj = integrate_rk4(DEFAULT_PARAMS, DEFAULT_INITIAL, 0.1, 20)
    path = tmp_path / "t.csv"
    write_trajectory_csv(traj, path)
    lines = path.read_text().splitlines()
    assert lines[0] == "t,x,y" and len(lines) == 22
    data = np.array([[float(c) for c in ln.split(",")] for ln in lines[1:]])
    np.testing.assert_array_equal(data[:, 1:], traj.states)
    np.testing.assert_array_equal(data[:, 0], traj.t)
