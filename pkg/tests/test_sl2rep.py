from __future__ import annotations

import random

import pytest

from limithodge.exactla import ExactMatrix, I, Scalar, Subspace, scalar
from limithodge.sl2rep import (
    NoSolution,
    NotHorizontal,
    Sl2PairAction,
    WrongKind,
    alpha_basis,
    build_model,
    complete_sl2_triple,
    direct_sum_models,
    isotypic_decomposition,
    transport_model,
    ytilde_from_bigrading,
)
from limithodge.weightfilt import monodromy_weight_filtration


def _pair(u, S: ExactMatrix, v) -> Scalar:
    return sum((a * b for a, b in zip(S.apply(v), u)), Scalar(0))


def _random_unipotent(rng: random.Random, dim: int) -> ExactMatrix:
    return ExactMatrix.from_function(
        dim, dim,
        lambda i, j: 1 if i == j else (rng.randrange(-1, 2) if j > i else 0))


# ----------------------------------------------------------------------
# model construction


def test_s1_model_matrices():
    model = build_model("S", 1)
    nm = model.action.nminus[0]
    assert nm.apply([0, 1]) == (scalar(1), scalar(0))
    assert nm.apply([1, 0]) == (scalar(0), scalar(0))
    assert model.action.y[0] == ExactMatrix.diagonal([-1, 1])


def test_s1_model_bigrading_and_polarization():
    model = build_model("S", 1)
    vminus = [1, -I]
    vplus = [1, I]
    assert model.bigrading[(1, 0)].contains_vector(vminus)
    assert model.bigrading[(0, 1)].contains_vector(vplus)
    assert _pair(vplus, model.polarization, vminus) == Scalar(0, 2)


def test_tate_model_is_inert():
    model = build_model("H", l=1)
    assert model.dim == 1
    assert model.weight == 2
    assert all(g.is_zero() for g in model.action.generators())
    assert model.polarization.entries[0][0] == scalar(1)
    assert set(model.bigrading) == {(1, 1)}


def test_s11_bigrading_dimensions():
    model = build_model("S", 1, 1)
    dims = {pq: sub.dim for pq, sub in model.bigrading.items()}
    assert dims == {(2, 0): 1, (1, 1): 2, (0, 2): 1}


def test_model_actions_are_real_and_bracketed():
    for model in (build_model("S", 2, 1), build_model("H", 1, 0, l=1),
                  build_model("E", 0, 1, p=2, q=0)):
        act = model.action
        assert act.is_real()
        for j in (0, 1):
            nm, y, np_ = act.nminus[j], act.y[j], act.nplus[j]
            assert y.commutator(np_) == np_.scale(2)
            assert y.commutator(nm) == nm.scale(-2)
            assert np_.commutator(nm) == y


def test_direct_sum_requires_equal_weights():
    with pytest.raises(ValueError):
        direct_sum_models([build_model("S", 1), build_model("S", 2)])


def test_hodge_and_limit_filtrations_of_s1():
    model = build_model("S", 1)
    f = model.hodge_filtration()
    assert f.step(1) == Subspace.from_columns(2, [[1, -I]])
    assert f.step(0) == Subspace.full(2)
    assert f.step(2) == Subspace.zero(2)
    limit = model.limit_filtration()
    assert limit.step(1) == Subspace.from_columns(2, [[0, 1]])


# ----------------------------------------------------------------------
# Y from a bigrading, triple completion


def test_ytilde_vanishes_on_pure_structure():
    model = build_model("S", 1)
    assert ytilde_from_bigrading(model.bigrading, 1).is_zero()


def test_ytilde_on_centered_splitting():
    split = {
        (-1, -1): Subspace.from_columns(3, [[1, 0, 0]]),
        (0, 0): Subspace.from_columns(3, [[0, 1, 0]]),
        (1, 1): Subspace.from_columns(3, [[0, 0, 1]]),
    }
    y = ytilde_from_bigrading(split, 0)
    assert y == ExactMatrix.diagonal([-2, 0, 2])


def test_ytilde_rejects_overlapping_pieces():
    overlap = {
        (0, 0): Subspace.from_columns(2, [[1, 0]]),
        (1, 1): Subspace.from_columns(2, [[1, 0]]),
    }
    with pytest.raises(ValueError):
        ytilde_from_bigrading(overlap, 0)


def test_complete_sl2_triple_on_s1():
    model = build_model("S", 1)
    nm, y = model.action.nminus[0], model.action.y[0]
    nplus = complete_sl2_triple(nm, y)
    assert nplus == model.action.nplus[0]
    assert nplus.apply([1, 0]) == (scalar(0), scalar(1))


def test_complete_sl2_triple_degenerate():
    z = ExactMatrix.zeros(2, 2)
    assert complete_sl2_triple(z, z).is_zero()


def test_complete_sl2_triple_rejects_bad_bracket():
    n = ExactMatrix([[0, 1], [0, 0]])
    with pytest.raises(NoSolution):
        complete_sl2_triple(n, ExactMatrix.identity(2))


# ----------------------------------------------------------------------
# isotypic decomposition


def test_single_tensor_model_is_irreducible():
    model = build_model("S", 1, 1)
    factors = isotypic_decomposition(model.bigrading, model.action, model.polarization)
    assert [f.params() for f in factors] == [("S", 1, 1, 0)]
    assert factors[0].dim == 4
    assert factors[0].weight == 2


def test_block_sum_splits_into_blocks():
    summands = [build_model("S", 2, 0), build_model("S", 0, 2),
                build_model("H", 0, 0, l=1)]
    model = direct_sum_models(summands)
    factors = isotypic_decomposition(model.bigrading, model.action, model.polarization)
    assert sorted(f.params() for f in factors) == [
        ("H", 0, 0, 1), ("S", 0, 2, 0), ("S", 2, 0, 0)]
    assert sum(f.dim for f in factors) == model.dim == 7


def test_etype_factor_detected():
    model = build_model("E", 1, 0, p=2, q=0)
    factors = isotypic_decomposition(model.bigrading, model.action, model.polarization)
    assert [f.params() for f in factors] == [("E", 1, 0, 2, 0)]
    assert factors[0].dim == 4
    assert factors[0].weight == 3


def test_factors_are_pairwise_orthogonal():
    model = direct_sum_models([build_model("S", 2, 0), build_model("S", 0, 2)])
    factors = isotypic_decomposition(model.bigrading, model.action, model.polarization)
    assert len(factors) == 2
    for u in factors[0].embedding.columns():
        for v in factors[1].embedding.columns():
            assert _pair(u, model.polarization, v) == Scalar(0)


def test_decomposition_survives_transport():
    rng = random.Random(31)
    base = direct_sum_models([build_model("S", 1, 1), build_model("H", 0, 0, l=1)])
    expected = sorted(
        f.params() for f in
        isotypic_decomposition(base.bigrading, base.action, base.polarization))
    for _ in range(3):
        moved = transport_model(base, _random_unipotent(rng, base.dim))
        factors = isotypic_decomposition(moved.bigrading, moved.action, moved.polarization)
        assert sorted(f.params() for f in factors) == expected
        assert sum(f.dim for f in factors) == moved.dim


def test_decomposition_rejects_nonhorizontal_bigrading():
    model = build_model("S", 1)
    fake = {
        (1, 0): Subspace.from_columns(2, [[1, 0]]),
        (0, 1): Subspace.from_columns(2, [[0, 1]]),
    }
    with pytest.raises(NotHorizontal):
        isotypic_decomposition(fake, model.action)


# ----------------------------------------------------------------------
# the alpha frame


def test_alpha_basis_of_s1():
    model = build_model("S", 1, 0)
    factor = isotypic_decomposition(model.bigrading, model.action)[0]
    alphas = alpha_basis(factor, model.action)
    assert set(alphas) == {(0, 0), (1, 0)}
    assert alphas[(1, 0)] == (scalar(1), -I)
    assert alphas[(0, 0)] == (-I, scalar(0))


def test_alpha_basis_of_point_model():
    model = build_model("S", 0, 0)
    factor = isotypic_decomposition(model.bigrading, model.action)[0]
    alphas = alpha_basis(factor, model.action)
    assert set(alphas) == {(0, 0)}
    assert any(alphas[(0, 0)])


def test_alpha_basis_weights_and_lowering_on_s11():
    model = build_model("S", 1, 1)
    factor = isotypic_decomposition(model.bigrading, model.action)[0]
    act = model.action
    alphas = alpha_basis(factor, act)
    assert set(alphas) == {(k, l) for k in (0, 1) for l in (0, 1)}
    n1, n2 = act.nminus
    assert alphas[(0, 0)] == n1.apply(n2.apply(alphas[(1, 1)]))
    w1 = monodromy_weight_filtration(n1)
    wt = monodromy_weight_filtration(n1 + n2)
    for (k, l), vec in alphas.items():
        assert w1.step(2 * k - 1).contains_vector(vec)
        assert not w1.step(2 * k - 2).contains_vector(vec)
        assert wt.step(2 * (k + l) - 2).contains_vector(vec)
        assert not wt.step(2 * (k + l) - 3).contains_vector(vec)
    for (k, l), vec in alphas.items():
        lowered = n1.apply(vec)
        if k == 0:
            assert not any(lowered)
        else:
            assert lowered == alphas[(k - 1, l)]


def test_alpha_basis_requires_symmetric_kind():
    model = build_model("H", 0, 0, l=1)
    factor = isotypic_decomposition(model.bigrading, model.action)[0]
    with pytest.raises(WrongKind):
        alpha_basis(factor, model.action)


def test_action_constructor_rejects_noncommuting_pairs():
    s1 = build_model("S", 1, 0).action
    s2 = build_model("S", 0, 1).action
    with pytest.raises(ValueError):
        Sl2PairAction(nminus=(s1.nminus[0], s1.nminus[0]),
                      y=(s1.y[0], s1.y[0]),
                      nplus=(s1.nplus[0], s1.nplus[0]))
    # sanity: the genuine tensor pair passes
    model = build_model("S", 1, 1)
    assert s1.dim == s2.dim == 2 and model.action.dim == 4
