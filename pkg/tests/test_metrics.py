"""Golden values and edge rules for the evaluation measures."""

import math

import numpy as np
import pytest

from hashbridge.errors import DuplicateElements, EmptyList, ZeroVariance
from hashbridge.metrics import ndcg, nfr, nmi, pearson


def test_nfr_identical_lists():
    assert nfr(["a", "b", "c", "d"], ["a", "b", "c", "d"]) == 1.0


def test_nfr_full_reversal():
    assert nfr(["a", "b"], ["b", "a"]) == 0.0


def test_nfr_single_swap_of_three():
    # overlap ranks: a:1,b:2,c:3 vs a:1,c:2,b:3 -> Fr=2, max=(4*2)/2=4
    assert nfr(["a", "b", "c"], ["a", "c", "b"]) == 0.5


def test_nfr_overlap_restriction():
    # only b,c shared; same relative order on both sides
    assert nfr(["a", "b", "c"], ["b", "c", "d"]) == 1.0


def test_nfr_symmetry():
    rng = np.random.default_rng(0)
    pool = [f"e{i}" for i in range(12)]
    for _ in range(20):
        a = list(rng.permutation(pool)[:8])
        b = list(rng.permutation(pool)[:8])
        assert nfr(a, b) == nfr(b, a)
        assert 0.0 <= nfr(a, b) <= 1.0


def test_nfr_tiny_overlap_returns_one():
    assert nfr(["a", "b"], ["c", "d"]) == 1.0
    assert nfr(["a", "x"], ["x", "y"]) == 1.0


def test_nfr_duplicates_rejected():
    with pytest.raises(DuplicateElements):
        nfr(["a", "a"], ["a", "b"])


def test_nfr_even_and_odd_normalizers():
    # reversal of 4: Fr = 3+1+1+3 = 8 = 4*4/2
    assert nfr(["a", "b", "c", "d"], ["d", "c", "b", "a"]) == 0.0
    # reversal of 5: Fr = 4+2+0+2+4 = 12 = (6*4)/2
    assert nfr(list("abcde"), list("edcba")) == 0.0


def test_nmi_identical():
    assert nmi([0, 0, 1, 1], [5, 5, 9, 9]) == pytest.approx(1.0)


def test_nmi_independent_two_by_two():
    # {1,2|3,4} vs {1,3|2,4}: every joint cell is 1/4 = product of marginals
    assert nmi([0, 0, 1, 1], [0, 1, 0, 1]) == pytest.approx(0.0)


def test_nmi_label_permutation_invariant():
    a = [0, 0, 1, 1, 2, 2]
    b = [1, 1, 0, 2, 2, 0]
    swapped = [{0: 7, 1: 3, 2: 5}[x] for x in b]
    assert nmi(a, b) == pytest.approx(nmi(a, swapped))


def test_nmi_symmetric():
    a = [0, 1, 1, 0, 2]
    b = [1, 1, 0, 0, 2]
    assert nmi(a, b) == pytest.approx(nmi(b, a))


def test_nmi_single_cluster_degenerate():
    assert nmi([0, 0, 0], [0, 1, 2]) == 0.0


def test_nmi_accepts_mappings():
    truth = {"x": 0, "y": 0, "z": 1}
    pred = {"z": 4, "x": 2, "y": 2}
    assert nmi(truth, pred) == pytest.approx(1.0)


def test_nmi_mapping_key_mismatch():
    with pytest.raises(ValueError):
        nmi({"x": 0}, {"y": 0})


def test_nmi_length_mismatch():
    with pytest.raises(ValueError):
        nmi([0, 1], [0, 1, 1])


def test_ndcg_perfect_order():
    assert ndcg([1.0, 1.0, 0.0]) == pytest.approx(1.0)


def test_ndcg_hand_value():
    # DCG = (2^0-1)/ln2 + (2^1-1)/ln3 = 1/ln3;  Z = 1/ln2
    got = ndcg([0.0, 1.0], k=2)
    assert got == pytest.approx(math.log(2) / math.log(3), abs=1e-9)


def test_ndcg_all_zero():
    assert ndcg([0.0, 0.0, 0.0]) == 0.0


def test_ndcg_k_prefix():
    # k=1 looks only at the first element
    assert ndcg([1.0, 0.0], k=1) == pytest.approx(1.0)
    assert ndcg([0.0, 1.0], k=1) == 0.0


def test_ndcg_explicit_ideal():
    got = ndcg([1.0, 1.0], k=2, ideal=[2.0, 1.0])
    dcg = 1 / math.log(2) + 1 / math.log(3)
    z = 3 / math.log(2) + 1 / math.log(3)
    assert got == pytest.approx(dcg / z)


def test_ndcg_validation():
    with pytest.raises(EmptyList):
        ndcg([])
    with pytest.raises(ValueError):
        ndcg([1.0, -0.5])
    with pytest.raises(ValueError):
        ndcg([1.0], k=2)


def test_ndcg_adjacent_demotion_never_helps():
    rng = np.random.default_rng(2)
    for _ in range(20):
        rel = list(rng.random(6))
        base = ndcg(rel)
        for i in range(5):
            if rel[i] > rel[i + 1]:
                swapped = rel.copy()
                swapped[i], swapped[i + 1] = swapped[i + 1], swapped[i]
                assert ndcg(swapped) <= base + 1e-12


def test_pearson_perfect_linear():
    x = [1.0, 2.0, 3.0, 4.0]
    assert pearson(x, [2 * v + 1 for v in x]) == pytest.approx(1.0)
    assert pearson(x, [-v for v in x]) == pytest.approx(-1.0)


def test_pearson_hand_value():
    assert pearson([1.0, 2.0, 3.0], [1.0, 3.0, 2.0]) == pytest.approx(0.5, abs=1e-9)


def test_pearson_affine_invariance():
    rng = np.random.default_rng(3)
    x = list(rng.random(10))
    y = list(rng.random(10))
    base = pearson(x, y)
    assert pearson([3 * v + 2 for v in x], y) == pytest.approx(base)


def test_pearson_validation():
    with pytest.raises(ZeroVariance):
        pearson([1.0, 1.0], [0.0, 1.0])
    with pytest.raises(ValueError):
        pearson([1.0], [2.0])
    with pytest.raises(ValueError):
        pearson([1.0, 2.0], [1.0, 2.0, 3.0])
