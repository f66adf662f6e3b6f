from __future__ import annotations

from hypothesis import given, settings
from hypothesis import strategies as st
import numpy as np

from bijux_speckle.utilities.rng import MASK64, SplitMix64, mix64

SEEDS = st.integers(min_value=0, max_value=MASK64)


def test_first_output_for_seed_zero() -> None:
    assert int(SplitMix64(0).next_u64(1)[0]) == 0xE220A8397B1DCDAF


def test_array_path_matches_scalar_finalizer() -> None:
    stream = SplitMix64(12345)
    words = stream.next_u64(4)
    expected = [mix64(12345 + (i + 1) * 0x9E3779B97F4A7C15) for i in range(4)]
    assert [int(word) for word in words] == expected


@settings(database=None, max_examples=50)
@given(seed=SEEDS, split=st.integers(min_value=0, max_value=64))
def test_draws_depend_only_on_seed_and_index(seed: int, split: int) -> None:
    whole = SplitMix64(seed).next_u64(64)
    stream = SplitMix64(seed)
    parts = np.concatenate([stream.next_u64(split), stream.next_u64(64 - split)])
    assert np.array_equal(whole, parts)


@settings(database=None, max_examples=30)
@given(seed=SEEDS)
def test_uniform_lies_in_unit_interval(seed: int) -> None:
    values = SplitMix64(seed).uniform(256)
    assert values.min() >= 0.0
    assert values.max() < 1.0


@settings(database=None, max_examples=30)
@given(seed=SEEDS, count=st.integers(min_value=1, max_value=300))
def test_permutation_is_a_permutation(seed: int, count: int) -> None:
    perm = SplitMix64(seed).permutation(count)
    assert sorted(perm.tolist()) == list(range(count))


def test_spawned_streams_are_independent() -> None:
    root = SplitMix64(7)
    kernels = root.spawn("kernels").next_u64(8)
    noise = root.spawn("noise").next_u64(8)
    assert not np.array_equal(kernels, noise)
    assert np.array_equal(kernels, SplitMix64(7).spawn("kernels").next_u64(8))
    assert root.counter == 0


def test_spawn_key_order_matters() -> None:
    assert SplitMix64(1).spawn("a", 2).seed != SplitMix64(1).spawn(2, "a").seed


def test_integers_respect_bound() -> None:
    values = SplitMix64(3).integers(1000, 7)
    assert values.min() >= 0
    assert values.max() <= 6


def test_bits_are_lsb_first() -> None:
    word = int(SplitMix64(9).next_u64(1)[0])
    bits = SplitMix64(9).bits(64)
    assert [int(b) for b in bits] == [(word >> k) & 1 for k in range(64)]


def test_normal_moments_are_plausible() -> None:
    draws = SplitMix64(11).normal(20000)
    assert abs(float(draws.mean())) < 0.05
    assert abs(float(draws.std()) - 1.0) < 0.05
