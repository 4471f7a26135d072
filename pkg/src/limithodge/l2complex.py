"""Finite local models of the L² holomorphic Dolbeault complex at the corner.

The objects here live at the intersection of the two boundary divisors of
the bidisc: a commuting pair of nilpotent monodromy logarithms, the
square-integrability classifier for monodromized sections against the
Poincaré-type metric, and the resulting three-term complex

    K⁰ --(N₁, N₂)--> K¹_dt₁ ⊕ K¹_dt₂ --(N₂, -N₁)--> K²

whose exact Betti numbers are the local cohomology of the L² complex.
A polynomial truncation of the global sections over the bidisc serves as
an independent oracle, and a small double-complex engine handles the
Čech-style patching used in the comparison tests.

Square-integrability is decided per direction.  A generator carrying
t₁ⁿ¹t₂ⁿ²  with weight-filtration levels (l₁, l₂) — l₁ against W(N₁),
l₂ against the total filtration W(N₁+N₂) — is L² on the region D_ε iff

    (n₁ ≥ 1  or  l₁ ≤ -2·[1 ∈ J])  and  (n₂ ≥ 1  or  l₂-l₁ ≤ -2·[2 ∈ J])

where J records which dt_i/t_i factors the form carries.  On the mirror
region D′_ε the roles of the two directions swap.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache

from .exactla import (
    ExactMatrix,
    Filtration,
    Scalar,
    Subspace,
    apply_to_subspace,
    exp_nilpotent,
    intersect,
    subspace_sum,
)
from .growth import _weight_filtration, minimal_weight
from .sl2rep import Model, alpha_basis, isotypic_decomposition
from .weightfilt import commuting_check, nilpotency_check

LOCAL_SYSTEM = "local_system"
HODGE_BUNDLE = "hodge_bundle"


class IllFormedComplex(ValueError):
    """A differential fails to map its source space into its target."""


class AnticommutationFailure(ValueError):
    """Double-complex squares do not anticommute (or a square of a map is nonzero)."""


# ----------------------------------------------------------------------
# the monodromy datum


@dataclass(frozen=True)
class MonodromyDatum:
    """Local degeneration data: two commuting nilpotents plus optional extras.

    ``hodge`` and ``polarization`` are carried for consumers that need
    them (mixed-Hodge checks, metrics); ``model`` is the bigraded model
    the datum came from, when there is one — it supplies the σ/α frame
    for the Hodge-bundle flavour of the stalk complex.  Entries in
    Q(i) carry their rational structure implicitly.
    """

    weight: int
    n1: ExactMatrix
    n2: ExactMatrix
    hodge: Filtration | None = None
    polarization: ExactMatrix | None = None
    model: Model | None = None
    label: str = ""

    def __post_init__(self) -> None:
        if self.n1.rows != self.n1.cols or self.n2.rows != self.n2.cols:
            raise ValueError("monodromy logarithms must be square")
        if self.n1.rows != self.n2.rows:
            raise ValueError("monodromy logarithms must act on the same space")
        nilpotency_check(self.n1)
        nilpotency_check(self.n2)
        commuting_check([self.n1, self.n2])

    @property
    def dimension(self) -> int:
        return self.n1.rows

    @staticmethod
    def from_model(model: Model, label: str = "") -> "MonodromyDatum":
        n1, n2 = model.action.nminus
        return MonodromyDatum(
            weight=model.weight,
            n1=n1,
            n2=n2,
            hodge=model.hodge_filtration(),
            polarization=model.polarization,
            model=model,
            label=label,
        )


# ----------------------------------------------------------------------
# the classifier


@dataclass(frozen=True)
class L2Verdict:
    """Outcome of the direction-by-direction integrability test."""

    component: frozenset[int]
    t_orders: tuple[int, int]
    weights: tuple[int, int]
    is_l2_d_eps: bool
    is_l2_d_eps_prime: bool
    is_l2: bool

    @property
    def orderings_disagree(self) -> bool:
        """True when the two regional orderings give different answers.

        Such generators are exactly the ones whose global status is
        decided by the overlap of the two regions rather than by either
        chart alone.
        """
        return self.is_l2_d_eps != self.is_l2_d_eps_prime

    def to_json(self) -> dict:
        return {
            "component": sorted(self.component),
            "t_orders": list(self.t_orders),
            "weights": list(self.weights),
            "is_l2_d_eps": self.is_l2_d_eps,
            "is_l2_d_eps_prime": self.is_l2_d_eps_prime,
            "is_l2": self.is_l2,
        }


def _directional(component: frozenset[int], n1: int, n2: int, l1: int, l2: int) -> bool:
    """The D_ε test: first direction reads l₁, second the offset l₂-l₁."""
    first = n1 >= 1 or l1 <= (-2 if 1 in component else 0)
    second = n2 >= 1 or l2 - l1 <= (-2 if 2 in component else 0)
    return first and second


def _swap_component(component: frozenset[int]) -> frozenset[int]:
    return frozenset(3 - i for i in component)


def classify_l2(component, n1: int, n2: int, l1: int, l2: int) -> L2Verdict:
    """Decide square-integrability of t₁^{n₁}t₂^{n₂}·v on both regions.

    ``component`` is the subset of {1, 2} of dt_i/t_i factors carried by
    the form; ``(l1, l2)`` are the centered weight-filtration levels of v
    for the ordering of the region D_ε.  The D′_ε verdict applies the same
    test to the formally swapped input, and the global verdict is the
    conjunction.  Raises on negative t-orders.
    """
    J = frozenset(component)
    if not J <= {1, 2}:
        raise ValueError(f"component must be a subset of {{1, 2}}, got {sorted(J)}")
    if n1 < 0 or n2 < 0:
        raise ValueError(f"negative t-orders ({n1}, {n2})")
    d_eps = _directional(J, n1, n2, l1, l2)
    d_eps_prime = _directional(_swap_component(J), n2, n1, l2, l1)
    return L2Verdict(
        component=J,
        t_orders=(n1, n2),
        weights=(l1, l2),
        is_l2_d_eps=d_eps,
        is_l2_d_eps_prime=d_eps_prime,
        is_l2=d_eps and d_eps_prime,
    )


# ----------------------------------------------------------------------
# doubly graded pieces of (W(N1), W(N1+N2))

Piece = tuple[int, int, tuple[tuple[Scalar, ...], ...]]


@lru_cache(maxsize=256)
def _bilevel_pieces(n1: ExactMatrix, n2: ExactMatrix) -> tuple[Piece, ...]:
    """Canonical generators of the double grading by (W(N₁), W(N₁+N₂)).

    For each realized level pair (a, b) the generators span a complement of
    W¹_{a-1}∩W²_b + W¹_a∩W²_{b-1} inside W¹_a∩W²_b — the pivot-complement
    columns of the canonical corner bases, which works because nested
    canonical bases have nested pivot sets.  Multiplicities are allowed
    (unlike the keyed basis in the growth module).
    """
    W1 = _weight_filtration(n1).filtration
    Wt = _weight_filtration(n1 + n2).filtration
    levels1 = W1.graded_range()
    levels2 = Wt.graded_range()

    corners: dict[tuple[int, int], Subspace] = {}

    def corner(a: int, b: int) -> Subspace:
        if (a, b) not in corners:
            corners[(a, b)] = intersect(W1.step(a), Wt.step(b))
        return corners[(a, b)]

    pieces: list[Piece] = []
    for a in levels1:
        for b in levels2:
            big = corner(a, b)
            if big.dim == 0:
                continue
            below = subspace_sum(corner(a - 1, b), corner(a, b - 1))
            if big.dim == below.dim:
                continue
            sub_pivots = set(below.pivots())
            reps = tuple(
                big.basis.column(j)
                for j, p in enumerate(big.pivots())
                if p not in sub_pivots
            )
            pieces.append((a, b, reps))
    return tuple(pieces)


def _span_passing(
    dim: int,
    generators: list[tuple[tuple[Scalar, ...], int, int]],
    component: frozenset[int],
    waive1: bool = False,
    waive2: bool = False,
) -> Subspace:
    """Span of the generators whose levels pass the directional test."""
    c1 = -2 if 1 in component else 0
    c2 = -2 if 2 in component else 0
    cols = [
        v
        for v, l1, l2 in generators
        if (waive1 or l1 <= c1) and (waive2 or l2 - l1 <= c2)
    ]
    return Subspace.from_columns(dim, cols)


def _piece_generators(datum: MonodromyDatum) -> list[tuple[tuple[Scalar, ...], int, int]]:
    return [
        (v, a, b)
        for a, b, reps in _bilevel_pieces(datum.n1, datum.n2)
        for v in reps
    ]


def _frame_generators(datum: MonodromyDatum) -> list[tuple[tuple[Scalar, ...], int, int]]:
    """Generators with levels read off the bigraded frame of the model.

    Plain S(m)⊗S(n) factors use the α-basis and the exponent translation
    l₁ = 2k-m, l₂ = 2(k+l)-(m+n); factors of other kinds contribute their
    embedding columns with directly measured levels (the twist does not
    move the weight filtrations, so measuring is exact).
    """
    model = datum.model
    if model is None:
        raise ValueError("hodge frame missing: the datum carries no bigraded model")
    W1 = _weight_filtration(datum.n1)
    Wt = _weight_filtration(datum.n1 + datum.n2)
    out: list[tuple[tuple[Scalar, ...], int, int]] = []
    for factor in isotypic_decomposition(model.bigrading, model.action, model.polarization):
        if factor.kind == "S":
            ab = alpha_basis(factor, model.action)
            for (k, l), vec in ab.items():
                out.append((vec, 2 * k - factor.m, 2 * (k + l) - (factor.m + factor.n)))
        else:
            for vec in factor.embedding.columns():
                out.append((vec, minimal_weight(vec, W1), minimal_weight(vec, Wt)))
    return out


# ----------------------------------------------------------------------
# the stalk complex


@dataclass(frozen=True)
class StalkComplex:
    """The three-term local model; d0: v ↦ (N₁v, N₂v), d1: (a,b) ↦ N₂a - N₁b."""

    k0: Subspace
    k1_dt1: Subspace
    k1_dt2: Subspace
    k2: Subspace
    n1: ExactMatrix
    n2: ExactMatrix
    mode: str = LOCAL_SYSTEM

    @property
    def dims(self) -> tuple[int, int, int]:
        return (self.k0.dim, self.k1_dt1.dim + self.k1_dt2.dim, self.k2.dim)

    def euler_characteristic(self) -> int:
        d0, d1, d2 = self.dims
        return d0 - d1 + d2


def _check_well_defined(
    m1: ExactMatrix,
    m2: ExactMatrix,
    s0: Subspace,
    s1a: Subspace,
    s1b: Subspace,
    s2: Subspace,
) -> None:
    failures = []
    if s0.dim and not s1a.contains(apply_to_subspace(m1, s0)):
        failures.append("first differential leaves the dt1 component")
    if s0.dim and not s1b.contains(apply_to_subspace(m2, s0)):
        failures.append("first differential leaves the dt2 component")
    if s1a.dim and not s2.contains(apply_to_subspace(m2, s1a)):
        failures.append("second differential leaves the top component (dt1 leg)")
    if s1b.dim and not s2.contains(apply_to_subspace(m1, s1b)):
        failures.append("second differential leaves the top component (dt2 leg)")
    if failures:
        raise IllFormedComplex("; ".join(failures))


def build_stalk_complex(datum: MonodromyDatum, mode: str = LOCAL_SYSTEM) -> StalkComplex:
    """Assemble the L² stalk complex from the flat (t-order (0,0)) generators.

    Each canonical generator is kept in K^J exactly when the classifier
    passes it for that form component.  ``local_system`` mode grades by
    the weight filtrations themselves; ``hodge_bundle`` mode insists on
    a model frame and uses the bigraded exponents instead.  The two
    modes produce the same subspaces on data where both apply.
    """
    if mode == LOCAL_SYSTEM:
        generators = _piece_generators(datum)
    elif mode == HODGE_BUNDLE:
        generators = _frame_generators(datum)
    else:
        raise ValueError(f"unknown stalk mode {mode!r}")
    dim = datum.dimension
    k0 = _span_passing(dim, generators, frozenset())
    k1_dt1 = _span_passing(dim, generators, frozenset({1}))
    k1_dt2 = _span_passing(dim, generators, frozenset({2}))
    k2 = _span_passing(dim, generators, frozenset({1, 2}))
    _check_well_defined(datum.n1, datum.n2, k0, k1_dt1, k1_dt2, k2)
    return StalkComplex(k0, k1_dt1, k1_dt2, k2, datum.n1, datum.n2, mode)


def _three_term_betti(
    m1: ExactMatrix,
    m2: ExactMatrix,
    s0: Subspace,
    s1a: Subspace,
    s1b: Subspace,
    s2: Subspace,
) -> tuple[int, int, int]:
    """Exact Betti numbers of s0 -> s1a⊕s1b -> s2 with maps (m1, m2), (m2, -m1)."""
    _check_well_defined(m1, m2, s0, s1a, s1b, s2)
    d0_cols = []
    for v in s0.basis_columns():
        a = s1a.coordinates(m1.apply(v))
        b = s1b.coordinates(m2.apply(v))
        d0_cols.append(a + b)
    d1_cols = []
    for v in s1a.basis_columns():
        d1_cols.append(s2.coordinates(m2.apply(v)))
    for v in s1b.basis_columns():
        w = m1.apply(v)
        d1_cols.append(s2.coordinates(tuple(-x for x in w)))
    dim1 = s1a.dim + s1b.dim
    r0 = Subspace.from_columns(dim1, d0_cols).dim
    r1 = Subspace.from_columns(s2.dim, d1_cols).dim if s2.dim else 0
    # d1∘d0 vanishes because the (possibly shifted) operators commute;
    # verify exactly rather than trusting the caller.
    for v in s0.basis_columns():
        w = m2.apply(m1.apply(v))
        u = m1.apply(m2.apply(v))
        if any(x != y for x, y in zip(w, u)):
            raise IllFormedComplex("composite differential is nonzero")
    h0 = s0.dim - r0
    h1 = dim1 - r0 - r1
    h2 = s2.dim - r1
    return (h0, h1, h2)


def hypercohomology(c: StalkComplex) -> tuple[int, int, int]:
    """Exact cohomology of the stalk complex."""
    return _three_term_betti(c.n1, c.n2, c.k0, c.k1_dt1, c.k1_dt2, c.k2)


# ----------------------------------------------------------------------
# polynomial truncation oracle


def truncated_global_model(datum: MonodromyDatum, degree: int) -> tuple[int, int, int]:
    """Cohomology of the polynomial sections Σ_{0≤i,j≤degree} t₁^i t₂^j · (generators).

    A generator is admitted at cell (i, j) when the classifier passes it
    with the directional conditions waived by the t-divisibility (n_i ≥ 1
    suppresses direction i).  Differentiating t₁^i t₂^j shifts the
    connection action on the cell to (N₁ + i, N₂ + j), which is what makes
    the higher cells exact and the totals stabilize in the degree.
    """
    if degree < 0:
        raise ValueError("truncation degree must be nonnegative")
    generators = _piece_generators(datum)
    dim = datum.dimension
    spaces: dict[tuple[bool, bool, frozenset[int]], Subspace] = {}

    def space(waive1: bool, waive2: bool, component: frozenset[int]) -> Subspace:
        key = (waive1, waive2, component)
        if key not in spaces:
            spaces[key] = _span_passing(dim, generators, component, waive1, waive2)
        return spaces[key]

    ident = ExactMatrix.identity(dim)
    total = [0, 0, 0]
    for i, j in itertools.product(range(degree + 1), repeat=2):
        m1 = datum.n1 + ident.scale(i)
        m2 = datum.n2 + ident.scale(j)
        w1, w2 = i >= 1, j >= 1
        cell = _three_term_betti(
            m1,
            m2,
            space(w1, w2, frozenset()),
            space(w1, w2, frozenset({1})),
            space(w1, w2, frozenset({2})),
            space(w1, w2, frozenset({1, 2})),
        )
        for r in range(3):
            total[r] += cell[r]
    return tuple(total)  # type: ignore[return-value]


# ----------------------------------------------------------------------
# comparison models


def koszul_cohomology(datum: MonodromyDatum) -> tuple[int, int, int]:
    """Cohomology of 0 → H → H² → H → 0 built from γ_i - 1, γ_i = exp(N_i).

    This computes the ordinary group cohomology of the restriction to the
    punctured bidisc, the natural companion of the L² answer.
    """
    dim = datum.dimension
    t1 = exp_nilpotent(datum.n1) - ExactMatrix.identity(dim)
    t2 = exp_nilpotent(datum.n2) - ExactMatrix.identity(dim)
    d0_cols = [tuple(t1.column(k)) + tuple(t2.column(k)) for k in range(dim)]
    d1_cols = [t2.column(k) for k in range(dim)]
    d1_cols += [tuple(-x for x in t1.column(k)) for k in range(dim)]
    r0 = Subspace.from_columns(2 * dim, d0_cols).dim
    r1 = Subspace.from_columns(dim, d1_cols).dim
    return (dim - r0, 2 * dim - r0 - r1, dim - r1)


def _ad_matrix(n: ExactMatrix) -> ExactMatrix:
    """Matrix of X ↦ NX - XN on End(H) in the row-major matrix-unit basis."""
    d = n.rows

    def entry(row: int, col: int) -> Scalar:
        i, j = divmod(row, d)
        a, b = divmod(col, d)
        value = Scalar(0)
        if j == b:
            value = value + n[i, a]
        if i == a:
            value = value - n[b, j]
        return value

    return ExactMatrix.from_function(d * d, d * d, entry)


def end_datum(datum: MonodromyDatum) -> MonodromyDatum:
    """The induced datum on End(H): weight 0, logarithms ad(N_i)."""
    return MonodromyDatum(
        weight=0,
        n1=_ad_matrix(datum.n1),
        n2=_ad_matrix(datum.n2),
        label=f"End({datum.label})" if datum.label else "End",
    )


def _flatten(m: ExactMatrix) -> tuple[Scalar, ...]:
    return tuple(m[i, j] for i in range(m.rows) for j in range(m.cols))


def theta_image_check(datum: MonodromyDatum) -> dict:
    """Verify that each N_i is itself an L² class of the End(H) complex.

    ad(N_i)(N_j) = 0 restates commutativity; the substantive check is
    that the End-valued class of N_i, viewed as the dt_i/t_i coefficient
    of the Higgs field, passes the classifier on both regions — with the
    levels measured in each region's own ordering.
    """
    ad1 = _ad_matrix(datum.n1)
    ad2 = _ad_matrix(datum.n2)
    report: dict = {
        "commutes": all(
            not any(ad.apply(_flatten(n)))
            for ad in (ad1, ad2)
            for n in (datum.n1, datum.n2)
        ),
        "entries": {},
    }
    total = ad1 + ad2
    for index, n in ((1, datum.n1), (2, datum.n2)):
        if n.is_zero():
            report["entries"][index] = {"zero": True}
            continue
        vec = _flatten(n)
        fil_first = _weight_filtration(ad1)
        fil_total = _weight_filtration(total)
        fil_second = _weight_filtration(ad2)
        l1 = minimal_weight(vec, fil_first)
        lt = minimal_weight(vec, fil_total)
        l1_swapped = minimal_weight(vec, fil_second)
        J = frozenset({index})
        d_eps = _directional(J, 0, 0, l1, lt)
        d_eps_prime = _directional(_swap_component(J), 0, 0, l1_swapped, lt)
        own = fil_first if index == 1 else fil_second
        report["entries"][index] = {
            "zero": False,
            "weights_d_eps": (l1, lt),
            "weights_d_eps_prime": (l1_swapped, lt),
            "is_l2_d_eps": d_eps,
            "is_l2_d_eps_prime": d_eps_prime,
            "is_l2": d_eps and d_eps_prime,
            "ad_graded_dims": own.graded_dims(),
        }
    entries = [e for e in report["entries"].values() if not e["zero"]]
    report["passes"] = report["commutes"] and all(e["is_l2"] for e in entries)
    return report


# ----------------------------------------------------------------------
# double complexes


@dataclass(frozen=True)
class DoubleComplex:
    """A finite grid of coordinate spaces with horizontal δ and vertical d.

    ``spaces`` maps (p, q) to a dimension; maps are stored on their source
    key and must land on the neighbouring key.  Absent keys mean zero
    spaces, absent maps mean zero maps.
    """

    spaces: dict
    horizontal: dict
    vertical: dict

    def dimension(self, key: tuple[int, int]) -> int:
        return self.spaces.get(key, 0)


def _dc_map(maps: dict, spaces: dict, key: tuple[int, int], target: tuple[int, int]):
    m = maps.get(key)
    if m is None:
        return None
    src = spaces.get(key, 0)
    tgt = spaces.get(target, 0)
    if m.cols != src or m.rows != tgt:
        raise ValueError(f"map at {key} has shape {m.rows}x{m.cols}, expected {tgt}x{src}")
    return m


def _compose_zero(first, second) -> bool:
    if first is None or second is None:
        return True
    return (second @ first).is_zero()


def total_cohomology(dc: DoubleComplex) -> tuple[int, ...]:
    """Betti numbers of the total complex T^n = ⊕_{p+q=n}."""
    keys = sorted(k for k, dim in dc.spaces.items() if dim > 0)
    if not keys:
        return ()
    hor: dict = {}
    ver: dict = {}
    for key in keys:
        p, q = key
        hor[key] = _dc_map(dc.horizontal, dc.spaces, key, (p + 1, q))
        ver[key] = _dc_map(dc.vertical, dc.spaces, key, (p, q + 1))
    for key in keys:
        p, q = key
        if not _compose_zero(hor.get(key), hor.get((p + 1, q))):
            raise AnticommutationFailure(f"horizontal square at {key} is nonzero")
        if not _compose_zero(ver.get(key), ver.get((p, q + 1))):
            raise AnticommutationFailure(f"vertical square at {key} is nonzero")
        # δd + dδ into (p+1, q+1)
        path1 = None
        if ver.get(key) is not None and hor.get((p, q + 1)) is not None:
            path1 = hor[(p, q + 1)] @ ver[key]
        path2 = None
        if hor.get(key) is not None and ver.get((p + 1, q)) is not None:
            path2 = ver[(p + 1, q)] @ hor[key]
        if path1 is not None and path2 is not None:
            if not (path1 + path2).is_zero():
                raise AnticommutationFailure(f"square at {key} does not anticommute")
        elif path1 is not None and not path1.is_zero():
            raise AnticommutationFailure(f"square at {key} does not anticommute")
        elif path2 is not None and not path2.is_zero():
            raise AnticommutationFailure(f"square at {key} does not anticommute")

    degrees = sorted({p + q for p, q in keys})
    lo, hi = degrees[0], degrees[-1]
    layout: dict[int, list[tuple[int, int]]] = {
        n: sorted(k for k in keys if sum(k) == n) for n in range(lo, hi + 1)
    }

    def offsets(n: int) -> tuple[dict, int]:
        off, pos = {}, 0
        for k in layout.get(n, []):
            off[k] = pos
            pos += dc.spaces[k]
        return off, pos

    ranks: dict[int, int] = {}
    dims: dict[int, int] = {}
    for n in range(lo, hi + 1):
        src_off, src_dim = offsets(n)
        tgt_off, tgt_dim = offsets(n + 1)
        dims[n] = src_dim
        cols = []
        for key in layout.get(n, []):
            p, q = key
            for c in range(dc.spaces[key]):
                col = [Scalar(0)] * tgt_dim
                basis_vec = [Scalar(0)] * dc.spaces[key]
                basis_vec[c] = Scalar(1)
                for m, tgt in ((hor.get(key), (p + 1, q)), (ver.get(key), (p, q + 1))):
                    if m is None or tgt not in tgt_off:
                        continue
                    w = m.apply(basis_vec)
                    base = tgt_off[tgt]
                    for r, x in enumerate(w):
                        col[base + r] = col[base + r] + x
                cols.append(tuple(col))
        ranks[n] = Subspace.from_columns(tgt_dim, cols).dim if tgt_dim else 0
    betti = []
    for n in range(lo, hi + 1):
        betti.append(dims[n] - ranks.get(n, 0) - ranks.get(n - 1, 0))
    return tuple(betti)


def _coordinate_matrices(c: StalkComplex) -> tuple[ExactMatrix, ExactMatrix, tuple[int, int, int]]:
    """d0 and d1 of the stalk complex in the canonical K-bases."""
    k0, k1, k2 = c.dims
    d0_cols = []
    for v in c.k0.basis_columns():
        a = c.k1_dt1.coordinates(c.n1.apply(v))
        b = c.k1_dt2.coordinates(c.n2.apply(v))
        d0_cols.append(a + b)
    d1_cols = []
    for v in c.k1_dt1.basis_columns():
        d1_cols.append(c.k2.coordinates(c.n2.apply(v)))
    for v in c.k1_dt2.basis_columns():
        w = c.n1.apply(v)
        d1_cols.append(c.k2.coordinates(tuple(-x for x in w)))
    d0 = ExactMatrix.from_columns(d0_cols, ambient_dim=k1)
    d1 = ExactMatrix.from_columns(d1_cols, ambient_dim=k2)
    return d0, d1, (k0, k1, k2)


def two_chart_cover(c: StalkComplex) -> DoubleComplex:
    """Čech-style double complex of a toy two-chart cover of the stalk model.

    Both charts see the whole model and the overlap map is restriction
    difference (a, b) ↦ a - b; the vertical differential acquires a sign
    on the overlap column so that the squares anticommute.
    """
    d0, d1, (k0, k1, k2) = _coordinate_matrices(c)
    qdims = {0: k0, 1: k1, 2: k2}
    qmaps = {0: d0, 1: d1}
    spaces: dict = {}
    horizontal: dict = {}
    vertical: dict = {}
    for q, dim in qdims.items():
        if dim:
            spaces[(0, q)] = 2 * dim
            spaces[(1, q)] = dim

    def block_diag(m: ExactMatrix) -> ExactMatrix:
        def entry(r, ccol):
            if r < m.rows and ccol < m.cols:
                return m[r, ccol]
            if r >= m.rows and ccol >= m.cols:
                return m[r - m.rows, ccol - m.cols]
            return 0

        return ExactMatrix.from_function(2 * m.rows, 2 * m.cols, entry)

    for q in (0, 1):
        m = qmaps[q]
        if m.rows and m.cols:
            vertical[(0, q)] = block_diag(m)
            vertical[(1, q)] = -m
    for q, dim in qdims.items():
        if dim:
            horizontal[(0, q)] = ExactMatrix.from_function(
                dim, 2 * dim, lambda r, ccol: 1 if ccol == r else (-1 if ccol == r + dim else 0)
            )
    return DoubleComplex(spaces=spaces, horizontal=horizontal, vertical=vertical)


# ----------------------------------------------------------------------
# the shared test corpus


def standard_corpus(include_end: bool = True) -> list[MonodromyDatum]:
    """The documented exercise set: split models plus their End data."""
    from .sl2rep import build_model

    data = [
        MonodromyDatum.from_model(build_model("S", 0, 0), label="trivial"),
        MonodromyDatum.from_model(build_model("S", 1, 0), label="jordan2-t1"),
        MonodromyDatum.from_model(build_model("S", 0, 1), label="jordan2-t2"),
        MonodromyDatum.from_model(build_model("S", 1, 1), label="s11"),
        MonodromyDatum.from_model(build_model("S", 2, 1), label="s21"),
    ]
    if include_end:
        data.append(end_datum(data[1]))
        data.append(end_datum(data[3]))
    return data
