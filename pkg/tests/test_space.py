"""Tests for search-space definitions, validation, and normalization."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from catbox import (
    CategoricalVar,
    ContinuousVar,
    MixedPoint,
    NormalizedPoint,
    SearchSpace,
    SpaceError,
    denormalize,
    encode_categorical_for_benchmark,
    normalize,
    validate_point,
)
from util import make_space


def two_var_space():
    return SearchSpace(
        categoricals=(CategoricalVar("m", ("A", "B")),),
        continuous=(ContinuousVar("x", 0.0, 1.0),),
    )


class TestConstruction:
    def test_strict_bounds(self):
        with pytest.raises(SpaceError):
            ContinuousVar("x", 1.0, 1.0)
        with pytest.raises(SpaceError):
            ContinuousVar("x", 2.0, 1.0)

    def test_levels_unique_and_at_least_two(self):
        with pytest.raises(SpaceError):
            CategoricalVar("m", ("A", "A"))
        with pytest.raises(SpaceError):
            CategoricalVar("m", ("A",))

    def test_names_unique_across_space(self):
        with pytest.raises(SpaceError):
            SearchSpace(
                categoricals=(CategoricalVar("x", ("A", "B")),),
                continuous=(ContinuousVar("x", 0.0, 1.0),),
            )

    def test_empty_space_rejected(self):
        with pytest.raises(SpaceError):
            SearchSpace()


class TestValidatePoint:
    def test_in_bounds_ok(self):
        assert validate_point(two_var_space(), MixedPoint(cat=(0,), con=(0.5,))) is None

    def test_cat_index_out_of_range(self):
        msg = validate_point(two_var_space(), MixedPoint(cat=(2,), con=(0.5,)))
        assert msg is not None and "cat[0]" in msg

    def test_bound_breach(self):
        msg = validate_point(two_var_space(), MixedPoint(cat=(1,), con=(1.5,)))
        assert msg is not None and "con[0]" in msg and "above" in msg

    def test_below_lower(self):
        msg = validate_point(two_var_space(), MixedPoint(cat=(1,), con=(-0.5,)))
        assert msg is not None and "below" in msg

    def test_length_mismatch(self):
        assert validate_point(two_var_space(), MixedPoint(cat=(), con=(0.5,))) is not None


class TestNormalize:
    def test_midpoint(self):
        space = SearchSpace(continuous=(ContinuousVar("x", -5.0, 5.0),))
        assert normalize(space, MixedPoint(con=(0.0,))).con01 == (0.5,)

    def test_lower_edge(self):
        space = SearchSpace(continuous=(ContinuousVar("x", -5.0, 5.0),))
        assert normalize(space, MixedPoint(con=(-5.0,))).con01 == (0.0,)

    def test_denormalize_affine(self):
        space = SearchSpace(continuous=(ContinuousVar("x", 2.0, 4.0),))
        assert denormalize(space, NormalizedPoint(con01=(0.25,))).con == (2.5,)

    def test_round_trip_many_random_spaces(self):
        rng = np.random.default_rng(123)
        for _ in range(20):
            space = make_space(rng)
            for _ in range(50):
                p = space.sample(rng)
                back = denormalize(space, normalize(space, p))
                assert back.cat == p.cat
                for a, b in zip(back.con, p.con):
                    assert abs(a - b) <= 1e-12 * max(1.0, abs(b))

    @settings(max_examples=60, deadline=None)
    @given(st.integers(min_value=0, max_value=10_000))
    def test_round_trip_property(self, seed):
        rng = np.random.default_rng(seed)
        space = make_space(rng)
        p = space.sample(rng)
        back = denormalize(space, normalize(space, p))
        assert back.cat == p.cat
        for a, b in zip(back.con, p.con):
            assert abs(a - b) <= 1e-12 * max(1.0, abs(b))


class TestBenchmarkEncoding:
    def test_middle_level_maps_to_center(self):
        space = SearchSpace(categoricals=(CategoricalVar("m", ("a", "b", "c")),))
        out = encode_categorical_for_benchmark(space, MixedPoint(cat=(1,)), -32.768, 32.768)
        assert out == [0.0]

    def test_two_level_endpoints(self):
        space = SearchSpace(categoricals=(CategoricalVar("m", ("a", "b")),))
        assert encode_categorical_for_benchmark(space, MixedPoint(cat=(0,)), 0.0, 1.0) == [0.0]
        assert encode_categorical_for_benchmark(space, MixedPoint(cat=(1,)), 0.0, 1.0) == [1.0]

    def test_five_level_grid(self):
        space = SearchSpace(categoricals=(CategoricalVar("m", tuple("abcde")),))
        assert encode_categorical_for_benchmark(space, MixedPoint(cat=(3,)), -10.0, 10.0) == [5.0]

    def test_injective_per_variable(self):
        rng = np.random.default_rng(5)
        for _ in range(10):
            space = make_space(rng, n_cat=2, n_con=0)
            for var_i, var in enumerate(space.categoricals):
                values = []
                for level in range(len(var.levels)):
                    cat = [0] * space.n_cat
                    cat[var_i] = level
                    values.append(encode_categorical_for_benchmark(space, MixedPoint(cat=tuple(cat)), -1, 1)[var_i])
                assert len(set(values)) == len(values)


class TestSampler:
    def test_sampler_points_always_validate(self):
        rng = np.random.default_rng(77)
        for _ in range(10):
            space = make_space(rng)
            for _ in range(100):
                assert validate_point(space, space.sample(rng)) is None


class TestJson:
    def test_schema_field_names(self):
        doc = two_var_space().to_json()
        assert set(doc) == {"categoricals", "continuous"}
        assert set(doc["categoricals"][0]) == {"name", "levels"}
        assert set(doc["continuous"][0]) == {"name", "lower", "upper"}

    def test_round_trip(self):
        space = two_var_space()
        assert SearchSpace.from_json(space.to_json()) == space

    def test_malformed_rejected(self):
        with pytest.raises(SpaceError):
            SearchSpace.from_json({"categoricals": [{"name": "m"}], "continuous": []})
        with pytest.raises(SpaceError):
            SearchSpace.from_json({"categoricals": [], "continuous": [{"name": "x", "lower": 2, "upper": 1}]})
