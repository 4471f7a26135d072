from __future__ import annotations

import random
from fractions import Fraction

import pytest

from limithodge.exactla import ExactMatrix, Subspace, apply_to_subspace, inverse, rank
from limithodge.sl2rep import build_model
from limithodge.exactla import induced_map_on_graded
from limithodge.weightfilt import (
    NonCommuting,
    NonPositiveCoefficient,
    NotNilpotent,
    WeightFiltration,
    cone_filtration,
    cone_independence_report,
    monodromy_weight_filtration,
    relative_weight_check,
)


def _jordan(dim: int) -> ExactMatrix:
    return ExactMatrix.from_function(dim, dim, lambda i, j: 1 if j == i + 1 else 0)


def _random_nilpotent(rng: random.Random, dim: int) -> ExactMatrix:
    """Strictly upper-triangular seed conjugated by a random integer unipotent."""
    seed = ExactMatrix.from_function(
        dim, dim, lambda i, j: rng.randrange(-2, 3) if j > i else 0)
    p = ExactMatrix.from_function(
        dim, dim,
        lambda i, j: 1 if i == j else (rng.randrange(-1, 2) if j > i else 0))
    return p @ seed @ inverse(p)


def _axioms_hold(N: ExactMatrix, W: WeightFiltration) -> bool:
    """Re-verify both defining axioms from scratch."""
    levels = W.filtration.graded_range()
    lo, hi = min(levels), max(levels)
    for l in range(lo, hi + 1):
        stepped = apply_to_subspace(N, W.step(l))
        if not W.step(l - 2).contains(stepped):
            return False
    center = W.center
    for l in range(0, hi - center + 1):
        dim_hi = W.filtration.graded_dim(center + l)
        dim_lo = W.filtration.graded_dim(center - l)
        if dim_hi != dim_lo:
            return False
        power = N.power(l) if l else ExactMatrix.identity(N.rows)
        block = induced_map_on_graded(power, W.filtration, center + l, shift=-2 * l)
        if block.cols != dim_hi or rank(block) != dim_hi:
            return False
    return True


# ----------------------------------------------------------------------
# construction on pinned inputs


def test_zero_nilpotent_concentrates_at_center():
    w = monodromy_weight_filtration(ExactMatrix.zeros(3, 3))
    assert w.step(-1) == Subspace.zero(3)
    assert w.step(0) == Subspace.full(3)


def test_jordan2_weight_filtration():
    w = monodromy_weight_filtration(_jordan(2))
    assert w.step(-1) == Subspace.from_columns(2, [[1, 0]])
    assert w.step(0) == w.step(-1)
    assert w.step(1) == Subspace.full(2)
    assert w.graded_dims() == {-1: 1, 1: 1}


def test_jordan3_graded_dims():
    w = monodromy_weight_filtration(_jordan(3))
    assert w.graded_dims() == {-2: 1, 0: 1, 2: 1}


def test_not_nilpotent_rejected():
    with pytest.raises(NotNilpotent):
        monodromy_weight_filtration(ExactMatrix.identity(2))


def test_axioms_on_randomized_nilpotents():
    rng = random.Random(23)
    for _ in range(30):
        dim = rng.randrange(1, 7)
        n = _random_nilpotent(rng, dim)
        w = monodromy_weight_filtration(n)
        assert _axioms_hold(n, w)


def test_center_shift_coherence():
    n = _jordan(3)
    w0 = monodromy_weight_filtration(n)
    w3 = monodromy_weight_filtration(n, center=3)
    for l in range(-4, 8):
        assert w3.step(l) == w0.step(l - 3)
    assert w0.recenter(3).filtration.steps == w3.filtration.steps


def test_uniqueness_via_reconstruction():
    """Rebuilding from the graded pieces returns the same chain bit-exactly."""
    rng = random.Random(5)
    for _ in range(10):
        n = _random_nilpotent(rng, rng.randrange(2, 6))
        w1 = monodromy_weight_filtration(n)
        w2 = monodromy_weight_filtration(n)
        assert w1 == w2
        assert w1.filtration.steps == w2.filtration.steps


# ----------------------------------------------------------------------
# cones


def test_cone_on_tensor_model_matches_known_graded_dims():
    model = build_model("S", 1, 1)
    n1, n2 = model.action.nminus
    w_a = cone_filtration([n1, n2], [1, 1])
    w_b = cone_filtration([n1, n2], [1, 2])
    assert w_a == w_b
    assert w_a.graded_dims() == {-2: 1, 0: 2, 2: 1}


def test_singleton_cone_is_plain_filtration():
    n = _jordan(2)
    assert cone_filtration([n], [1]) == monodromy_weight_filtration(n)


def test_cone_scaling_invariance():
    n = _jordan(2)
    w = cone_filtration([n, n], [1, 1])
    assert w == monodromy_weight_filtration(n)


def test_cone_rejects_noncommuting():
    a = _jordan(2)
    b = ExactMatrix.from_function(2, 2, lambda i, j: 1 if i == j + 1 else 0)
    with pytest.raises(NonCommuting):
        cone_filtration([a, b], [1, 1])


def test_cone_rejects_nonpositive_coefficients():
    n = _jordan(2)
    with pytest.raises(NonPositiveCoefficient):
        cone_filtration([n, n], [1, 0])
    with pytest.raises(NonPositiveCoefficient):
        cone_filtration([n, n], [Fraction(1, 2), -1])


def test_cone_independence_report_on_model_pair():
    model = build_model("S", 2, 1)
    n1, n2 = model.action.nminus
    rep = cone_independence_report([n1, n2], samples=6, seed=3)
    assert rep["independent"] is True
    assert rep["samples"][0] == ["1", "1"]
    assert len(rep["samples"]) == 7
    assert sum(rep["graded_dims"].values()) == model.dim


# ----------------------------------------------------------------------
# relative weight filtrations


def test_relative_weight_on_tensor_model():
    model = build_model("S", 1, 1)
    n1, n2 = model.action.nminus
    rep = relative_weight_check(n1, n2)
    assert rep["agree"] is True
    assert rep["details"]


def test_relative_weight_with_second_operator_zero():
    n1 = _jordan(2)
    rep = relative_weight_check(n1, ExactMatrix.zeros(2, 2))
    assert rep["agree"] is True


def test_relative_weight_with_first_operator_zero():
    n2 = _jordan(3)
    rep = relative_weight_check(ExactMatrix.zeros(3, 3), n2)
    assert rep["agree"] is True
