from math import comb

import numpy as np
import pytest

from rmpolar import (BudgetExceeded, CodeSpec, brute_force_min_distance,
                     build_code_spec, encode, kron_row_weight, min_row_weight)


def exhaustive_distance(spec) -> int:
    rows = encode(spec, np.eye(spec.K, dtype=np.uint8)).astype(np.int64)
    best = spec.N + 1
    for msg in range(1, 1 << spec.K):
        picks = [(msg >> j) & 1 for j in range(spec.K)]
        word = np.zeros(spec.N, dtype=np.int64)
        for j, p in enumerate(picks):
            if p:
                word ^= rows[j]
        best = min(best, int(word.sum()))
    return best


@pytest.mark.parametrize("m,r", [(3, 1), (4, 1), (4, 2), (5, 1)])
def test_reed_muller_codes_have_distance_two_to_the_m_minus_r(m, r):
    K = sum(comb(m, i) for i in range(r + 1))
    spec = build_code_spec(m, K, "rm")
    report = brute_force_min_distance(spec)
    assert report.exact == 2 ** (m - r)
    assert report.upper_bound == report.exact  # rows achieve it here


def test_full_rate_code_has_distance_one():
    spec = build_code_spec(3, 8, "polar")
    report = brute_force_min_distance(spec)
    assert report.exact == 1
    assert report.witness.sum() == 1


def test_half_rate_sixteen_bit_code():
    spec = build_code_spec(4, 8, "polar")
    report = brute_force_min_distance(spec)
    assert report.exact == 4
    assert min_row_weight(spec) == 4


def test_witness_re_encodes_to_the_reported_distance():
    rng = np.random.default_rng(1)
    for _ in range(20):
        n = int(rng.integers(2, 6))
        K = int(rng.integers(1, min(1 << n, 14) + 1))
        idx = np.sort(rng.choice(1 << n, size=K, replace=False)).astype(np.int64)
        spec = CodeSpec(n=n, K=K, info_set=idx, construction="polar")
        report = brute_force_min_distance(spec)
        assert report.witness.shape == (K,)
        assert report.witness.any()
        assert int(encode(spec, report.witness).sum()) == report.exact


def test_exact_distance_matches_exhaustive_search():
    rng = np.random.default_rng(2)
    for _ in range(50):
        n = int(rng.integers(2, 6))
        K = int(rng.integers(1, min(1 << n, 11) + 1))
        idx = np.sort(rng.choice(1 << n, size=K, replace=False)).astype(np.int64)
        spec = CodeSpec(n=n, K=K, info_set=idx, construction="polar")
        report = brute_force_min_distance(spec)
        assert report.exact == exhaustive_distance(spec)
        assert report.exact <= report.upper_bound


def test_row_weight_bound():
    spec = build_code_spec(11, 1024, "rmpolar", w_min=32)
    assert min_row_weight(spec) == 32
    assert min_row_weight(spec) == min(
        kron_row_weight(int(i), 11) for i in spec.info_set)


def test_budget_is_enforced_inclusively():
    wide = build_code_spec(6, 32, "rm")
    with pytest.raises(BudgetExceeded):
        brute_force_min_distance(wide, budget=24)
    small = build_code_spec(4, 11, "rm")
    report = brute_force_min_distance(small, budget=11)  # K == budget is fine
    assert report.exact == 4
