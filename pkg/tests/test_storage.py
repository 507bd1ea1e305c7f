"""Tests for instance and price persistence."""

import json

import numpy as np
import pytest

from pricing_dynamics.exceptions import InstanceParseError, InstanceValidationError
from pricing_dynamics.market import (
    InstanceDocument,
    generate_synthetic,
    load_instance,
    load_prices,
    save_instance,
    save_prices,
)


class TestInstanceRoundTrip:
    """save followed by load reproduces the instance exactly."""

    def test_reference_round_trip(self, reference_instance, tmp_path):
        path = save_instance(reference_instance, tmp_path / "instance.json")
        assert load_instance(path) == reference_instance

    @pytest.mark.parametrize("seed", range(10))
    def test_random_round_trip(self, seed, tmp_path):
        instance, _ = generate_synthetic(seed, seed % 3, 1 + seed % 4, 6, 1 + seed % 3, 0.1 * seed)
        assert load_instance(save_instance(instance, tmp_path / f"{seed}.json")) == instance

    def test_zero_consumers_round_trip(self, supplier_only_instance, tmp_path):
        loaded = load_instance(save_instance(supplier_only_instance, tmp_path / "s.json"))
        assert loaded.D == 0
        assert loaded == supplier_only_instance

    def test_same_seed_same_bytes(self, tmp_path):
        a = save_instance(generate_synthetic(17, 5, 10, 20, 5, 1e-4)[0], tmp_path / "a.json")
        b = save_instance(generate_synthetic(17, 5, 10, 20, 5, 1e-4)[0], tmp_path / "b.json")
        assert a.read_bytes() == b.read_bytes()

    def test_groups_are_one_based_on_disk(self, toy_instance, tmp_path):
        path = save_instance(toy_instance, tmp_path / "toy.json")
        data = json.loads(path.read_text())
        assert data["groups"] == [[1, 2], [3]]
        assert data["m"] == 2


class TestInstanceErrors:
    """Malformed files give parse errors, broken instances validation errors."""

    def _document(self, toy_instance):
        return InstanceDocument.from_instance(toy_instance).model_dump()

    def test_empty_file(self, tmp_path):
        path = tmp_path / "empty.json"
        path.write_text("")
        with pytest.raises(InstanceParseError) as info:
            load_instance(path)
        assert info.value.line == 1

    def test_missing_file(self, tmp_path):
        with pytest.raises(InstanceParseError):
            load_instance(tmp_path / "absent.json")

    def test_bad_json_reports_line(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text('{\n  "n": 2,\n  "m": \n}\n')
        with pytest.raises(InstanceParseError) as info:
            load_instance(path)
        assert info.value.line == 4

    def test_missing_field(self, toy_instance, tmp_path):
        data = self._document(toy_instance)
        del data["mu"]
        path = tmp_path / "missing.json"
        path.write_text(json.dumps(data))
        with pytest.raises(InstanceParseError) as info:
            load_instance(path)
        assert info.value.field == "mu"

    def test_unknown_field(self, toy_instance, tmp_path):
        data = self._document(toy_instance)
        data["capacity"] = 3
        path = tmp_path / "extra.json"
        path.write_text(json.dumps(data))
        with pytest.raises(InstanceParseError):
            load_instance(path)

    def test_group_count_mismatch(self, toy_instance, tmp_path):
        data = self._document(toy_instance)
        data["m"] = 3
        path = tmp_path / "m.json"
        path.write_text(json.dumps(data))
        with pytest.raises(InstanceParseError) as info:
            load_instance(path)
        assert info.value.field == "m"

    @pytest.mark.parametrize("index", [0, 4])
    def test_group_index_out_of_range(self, toy_instance, tmp_path, index):
        data = self._document(toy_instance)
        data["groups"][1] = [index]
        path = tmp_path / "groups.json"
        path.write_text(json.dumps(data))
        with pytest.raises(InstanceParseError) as info:
            load_instance(path)
        assert info.value.field == "groups.1.0"
        assert f"alternative {index} out of range 1..3" in str(info.value)

    def test_negative_utility(self, toy_instance, tmp_path):
        data = self._document(toy_instance)
        data["A"][0][0] = -1.0
        path = tmp_path / "negative.json"
        path.write_text(json.dumps(data))
        with pytest.raises(InstanceValidationError) as info:
            load_instance(path)
        assert any(v.code == "utility_positive" for v in info.value.violations)


class TestPrices:
    def test_price_round_trip(self, reference_market, tmp_path):
        _, p0 = reference_market
        path = save_prices(p0, tmp_path / "p0.csv")
        assert path.read_text().splitlines()[0] == "index,price"
        np.testing.assert_array_equal(load_prices(path), p0)

    def test_bad_price_row(self, tmp_path):
        path = tmp_path / "p.csv"
        path.write_text("index,price\n1,0.5\n2,abc\n")
        with pytest.raises(InstanceParseError) as info:
            load_prices(path)
        assert info.value.line == 3
        assert info.value.field == "price"
