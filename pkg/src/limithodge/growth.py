"""Symbolic Hodge-norm asymptotics near the corner of the bidisc.

Everything here is leading-order exponent bookkeeping: squared norms
are tracked as |t1|^(2 n1) |t2|^(2 n2) (-log|t1|)^a (-log|t2|)^b on one
of the two wedge regions, and all verdicts (boundedness of the Higgs
field, L2-adaptedness of a frame, ordering-change triangularity) are
decided exactly at that level.  No numeric norm is ever evaluated.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

from .exactla import (
    ExactMatrix,
    Scalar,
    Subspace,
    ZERO,
    intersect,
    rank,
    solve,
    subspace_sum,
)
from .weightfilt import WeightFiltration, commuting_check, monodromy_weight_filtration

D_EPS = "D_eps"
D_EPS_PRIME = "D_eps_prime"

Vector = tuple[Scalar, ...]
AlphaBasis = dict[tuple[int, int], Vector]

# Weight filtrations are recomputed for every section of a frame, always
# from the same couple of operators, and dominate the running time of
# class bookkeeping; matrices are immutable and hashable, so cache them.
_weight_filtration = lru_cache(maxsize=512)(monodromy_weight_filtration)


@dataclass(frozen=True)
class GrowthClass:
    """Leading growth class of a squared norm on a wedge region.

    ``t_orders = (n1, n2)`` and ``log_exps = (a, b)`` stand for
    |t1|^(2 n1) |t2|^(2 n2) (-log|t1|)^a (-log|t2|)^b.  The class of a
    product of sections is the sum of classes.  ``is_zero`` marks the
    sentinel class of the zero section.
    """

    t_orders: tuple[int, int]
    log_exps: tuple[int, int]
    region: str = D_EPS
    is_zero: bool = False

    def __post_init__(self):
        if self.region not in (D_EPS, D_EPS_PRIME):
            raise ValueError(f"unknown region {self.region!r}")
        if self.t_orders[0] < 0 or self.t_orders[1] < 0:
            raise ValueError("negative t-orders")

    @staticmethod
    def zero(region: str = D_EPS) -> "GrowthClass":
        return GrowthClass((0, 0), (0, 0), region, is_zero=True)

    def __add__(self, other: "GrowthClass") -> "GrowthClass":
        if self.region != other.region:
            raise ValueError("classes live on different regions")
        if self.is_zero or other.is_zero:
            return GrowthClass.zero(self.region)
        return GrowthClass(
            (self.t_orders[0] + other.t_orders[0], self.t_orders[1] + other.t_orders[1]),
            (self.log_exps[0] + other.log_exps[0], self.log_exps[1] + other.log_exps[1]),
            self.region)

    def to_json(self) -> dict:
        return {"t_orders": list(self.t_orders), "log_exps": list(self.log_exps),
                "region": self.region, "zero": self.is_zero}


@dataclass(frozen=True)
class MonodromizedSection:
    """A flat vector together with its centered weight memberships.

    ``weights = (l1, l2)`` are the minimal centered memberships in the
    weight filtration of the first operator and of the total one; both
    graded projections are then automatically nonzero.
    """

    flat_vector: Vector
    weights: tuple[int, int]
    label: tuple[int, int] | None = None


def minimal_weight(v: Sequence[Scalar], W: WeightFiltration) -> int:
    """Smallest centered index l with v in W_l (ValueError on zero input)."""
    if all(not x for x in v):
        raise ValueError("the zero vector has no minimal weight")
    levels = W.filtration.graded_range()
    lo, hi = levels[0], levels[-1]
    for l in range(lo, hi + 1):
        if W.step(l).contains_vector(v):
            return l
    raise ValueError("vector escapes the weight filtration")


def section_from_datum(v: Sequence[Scalar], N1: ExactMatrix, N2: ExactMatrix,
                       label: tuple[int, int] | None = None) -> MonodromizedSection:
    """Monodromized section of v for the ordering (N1, N2).

    The first weight is measured in W(N1), the second in W(N1 + N2),
    both centered at zero.
    """
    commuting_check([N1, N2])
    vv = tuple(v if isinstance(v, tuple) else tuple(v))
    l1 = minimal_weight(vv, _weight_filtration(N1))
    l2 = minimal_weight(vv, _weight_filtration(N1 + N2))
    return MonodromizedSection(vv, (l1, l2), label)


def check_section(s: MonodromizedSection, N1: ExactMatrix, N2: ExactMatrix) -> None:
    """Raise when the stored weights are not the minimal memberships."""
    fresh = section_from_datum(s.flat_vector, N1, N2, s.label)
    if fresh.weights != s.weights:
        raise ValueError(
            f"weights inconsistent with membership: stored {s.weights}, "
            f"actual {fresh.weights}")


def hodge_norm_class(s: MonodromizedSection, region: str = D_EPS) -> GrowthClass:
    """Squared Hodge-norm class of a monodromized section.

    On the first wedge the squared norm grows like
    (-log|t1|/-log|t2|)^l1 (-log|t2|)^l2.  On the swapped wedge the
    stored weights are read for the swapped ordering (first weight
    measured along t2), so the roles of the two directions exchange.
    """
    l1, l2 = s.weights
    if region == D_EPS:
        return GrowthClass((0, 0), (l1, l2 - l1), region)
    return GrowthClass((0, 0), (l2 - l1, l1), D_EPS_PRIME)


@dataclass(frozen=True)
class ThetaClass:
    """Growth class of (dt_i/t_i) (x) N_i s with the boundedness verdict."""

    form_class: GrowthClass
    source_class: GrowthClass
    bounded: bool | None
    zero: bool


def theta_apply_class(s: MonodromizedSection, i: int, N1: ExactMatrix,
                      N2: ExactMatrix, region: str = D_EPS) -> ThetaClass:
    """Class of one Higgs-field summand applied to a section.

    The form class is the metric class of dt_i/t_i — squared (-log|t_i|)^2
    — plus the section class of N_i s with its actual minimal weights.
    The verdict is bounded exactly when the form class reproduces the
    source class.  N_i s = 0 yields the zero sentinel, excluded from
    boundedness quantification.  Source and target weights are both
    recomputed for the region's ordering, so stale stored weights cannot
    skew the verdict.
    """
    if i not in (1, 2):
        raise ValueError("direction must be 1 or 2")
    first, second = (N1, N2) if region == D_EPS else (N2, N1)
    src = section_from_datum(s.flat_vector, first, second)
    source_class = hodge_norm_class(src, region)
    Ni = N1 if i == 1 else N2
    image = Ni.apply(s.flat_vector)
    if all(not x for x in image):
        return ThetaClass(GrowthClass.zero(region), source_class, None, True)
    target = section_from_datum(image, first, second)
    metric = GrowthClass((0, 0), (2, 0) if i == 1 else (0, 2), region)
    form = hodge_norm_class(target, region) + metric
    bounded = (form.t_orders == source_class.t_orders
               and form.log_exps == source_class.log_exps)
    return ThetaClass(form, source_class, bounded, False)


# ----------------------------------------------------------------------
# L2-adapted frames


def _hermitian_value(metric: ExactMatrix, u: Vector, v: Vector) -> Scalar:
    acc = ZERO
    mv = metric.apply(tuple(x.conj() for x in v))
    for a, b in zip(u, mv):
        acc = acc + a * b
    return acc


def l2_adapted_check(frame: Sequence[MonodromizedSection],
                     metric: ExactMatrix) -> bool:
    """Leading-order sufficient criterion for an L2-adapted frame.

    Sections of distinct growth classes decouple at leading order, so
    the normalized leading Gram matrix is block diagonal over classes;
    the criterion is exact invertibility of every block under the
    reference-fiber metric.  Raises when the frame does not span.
    """
    d = len(frame[0].flat_vector) if frame else 0
    span = Subspace.from_columns(d, [s.flat_vector for s in frame])
    if span.dim != d:
        raise ValueError("frame does not span the fiber")
    by_class: dict[tuple, list[MonodromizedSection]] = {}
    for s in frame:
        by_class.setdefault(s.weights, []).append(s)
    for group in by_class.values():
        n = len(group)
        gram = ExactMatrix.from_function(
            n, n, lambda a, b: _hermitian_value(
                metric, group[a].flat_vector, group[b].flat_vector))
        if rank(gram) != n:
            return False
    return True


# ----------------------------------------------------------------------
# ordering change


def ordered_alpha_basis(N1: ExactMatrix, N2: ExactMatrix) -> AlphaBasis:
    """Canonical doubly graded basis adapted to the ordering (N1, N2).

    Splits the intersection lattice of the two weight filtrations
    (W(N1), W(N2)) into bigraded pieces with deterministic
    pivot-canonical representatives.  The piece at W(N1)-level x and
    W(N2)-level z gets the key (k, l) = ((x - x_min)/2, (z - z_min)/2);
    the first key slot always indexes the first operator of the
    ordering.  Every vector of any such basis automatically lies in the
    span of the pieces at componentwise smaller or equal keys, which is
    what drives the ordering-change support property.  Raises when some
    bigraded piece has dimension above one (the pair is then too
    degenerate for a keyed basis).
    """
    commuting_check([N1, N2])
    W1 = _weight_filtration(N1).filtration
    W2 = _weight_filtration(N2).filtration
    raw: dict[tuple[int, int], Vector] = {}
    for x in W1.graded_range():
        for z in W2.graded_range():
            V = intersect(W1.step(x), W2.step(z))
            Vsub = subspace_sum(intersect(W1.step(x - 1), W2.step(z)),
                                intersect(W1.step(x), W2.step(z - 1)))
            g = V.dim - Vsub.dim
            if g == 0:
                continue
            if g > 1:
                raise ValueError(
                    f"double grading is not simple at levels ({x}, {z})")
            sub_pivots = set(Vsub.pivots())
            cols = [V.basis.column(j) for j, p in enumerate(V.pivots())
                    if p not in sub_pivots]
            raw[(x, z)] = cols[0]
    if not raw:
        raise ValueError("empty space")
    xmin = min(x for x, _ in raw)
    zmin = min(z for _, z in raw)
    keyed: AlphaBasis = {}
    for (x, z), vec in raw.items():
        if (x - xmin) % 2 or (z - zmin) % 2:
            raise ValueError("weight levels are not evenly spaced")
        key = ((x - xmin) // 2, (z - zmin) // 2)
        if key in keyed:
            raise ValueError(f"key collision at {key}")
        keyed[key] = vec
    return keyed


def transpose_keys(basis: AlphaBasis) -> AlphaBasis:
    """Swap the two key slots, e.g. to compare bases built from the two
    opposite orderings in shared (k, l) semantics."""
    return {(l, k): v for (k, l), v in basis.items()}


def ordering_change(basisA: AlphaBasis, basisB: AlphaBasis) -> dict:
    """Transition matrix of one keyed basis through another.

    Expresses each basisA vector in basisB and reports whether every
    coefficient sits at an index (k', l') with k' <= k and l' <= l.
    Raises when the two bases do not span the same space.
    """
    if not basisA or not basisB:
        raise ValueError("empty basis")
    d = len(next(iter(basisA.values())))
    spanA = Subspace.from_columns(d, list(basisA.values()))
    spanB = Subspace.from_columns(d, list(basisB.values()))
    if spanA != spanB or spanA.dim != len(basisA) or spanB.dim != len(basisB):
        raise ValueError("bases do not span the same space")
    keysB = sorted(basisB)
    M = ExactMatrix.from_columns([basisB[key] for key in keysB], ambient_dim=d)
    transition: dict[tuple[int, int], dict[tuple[int, int], Scalar]] = {}
    violations: list[tuple[tuple[int, int], tuple[int, int]]] = []
    for key in sorted(basisA):
        coeffs = solve(M, basisA[key])
        if coeffs is None:
            raise ValueError("bases do not span the same space")
        row = {}
        for keyB, c in zip(keysB, coeffs):
            if not c:
                continue
            row[keyB] = c
            if keyB[0] > key[0] or keyB[1] > key[1]:
                violations.append((key, keyB))
        transition[key] = row
    return {"transition": transition, "supported": not violations,
            "violations": violations}


# ----------------------------------------------------------------------
# graded exactness at class level


def _l2_verdict(cls: GrowthClass) -> bool:
    """Square integrability of a section class against the Poincare-like
    volume, direction by direction."""
    n1, n2 = cls.t_orders
    a, b = cls.log_exps
    return (n1 >= 1 or a <= 0) and (n2 >= 1 or b <= 0)


def graded_exactness_check(classes: dict[tuple[int, int], GrowthClass],
                           shape: tuple[int, int] | None = None) -> dict:
    """Class-level compatibility of a frame with the Hodge-bundle split.

    For each level p the classes of generators at level >= p must be the
    disjoint union of the classes at level >= p+1 and the level-p ones,
    and the multiset of integrability verdicts must likewise agree
    whether generators are read through the filtration or through its
    level split.  With a ``shape`` (m, n) the label grid is also checked
    for completeness.
    """
    from collections import Counter

    if shape is None and classes:
        shape = (max(k for k, _ in classes), max(l for _, l in classes))
    missing = []
    if shape is not None:
        m, n = shape
        missing = [(k, l) for k in range(m + 1) for l in range(n + 1)
                   if (k, l) not in classes]
    surjective = not missing
    levels = []
    all_split = True
    top = max((k + l for k, l in classes), default=-1)
    for p in range(0, top + 1):
        at_least = Counter(c.log_exps for (k, l), c in classes.items() if k + l >= p)
        above = Counter(c.log_exps for (k, l), c in classes.items() if k + l >= p + 1)
        exact = Counter(c.log_exps for (k, l), c in classes.items() if k + l == p)
        split = at_least == above + exact
        v_least = Counter(_l2_verdict(c) for (k, l), c in classes.items() if k + l >= p)
        v_split = Counter(_l2_verdict(c) for (k, l), c in classes.items() if k + l >= p + 1) \
            + Counter(_l2_verdict(c) for (k, l), c in classes.items() if k + l == p)
        verdicts = v_least == v_split
        levels.append({"p": p, "f_dim": sum(at_least.values()),
                       "e_dim": sum(exact.values()), "split": split,
                       "verdicts_match": verdicts})
        all_split = all_split and split and verdicts
    return {"surjective": surjective, "missing": missing, "levels": levels,
            "pass": surjective and all_split}
