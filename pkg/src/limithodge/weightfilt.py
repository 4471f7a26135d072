"""Monodromy weight filtrations of nilpotent endomorphisms.

Centered construction plus shifts, cones of commuting nilpotents, and
relative weight filtrations on graded quotients.  The construction is
self-certifying: both defining axioms (the shift axiom N(W_l) <= W_{l-2}
and the graded-isomorphism axiom for N^l) are re-verified exactly before
any filtration is returned.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .exactla import (
    ExactMatrix,
    Filtration,
    Subspace,
    induced_map_on_graded,
    intersect,
    kernel,
    image,
    rank,
    restrict_to_subspace,
    subspace_sum,
)


class NotNilpotent(ValueError):
    """The matrix does not power to zero within the ambient dimension."""


class NonCommuting(ValueError):
    """A family of matrices expected to commute does not."""


class NonPositiveCoefficient(ValueError):
    """Cone coefficients must be strictly positive."""


class AxiomFailure(RuntimeError):
    """A constructed filtration failed its own defining axioms."""


@dataclass(frozen=True)
class WeightFiltration:
    """An increasing monodromy weight filtration, possibly recentered.

    ``filtration.step(l)`` is the weight-l step in the stored indexing;
    ``center`` is 0 for W(N) and k for the shifted W(N)[-k], whose step
    at index l equals the centered filtration's step at l - k.
    """

    filtration: Filtration
    nilpotent: ExactMatrix
    center: int

    def step(self, l: int) -> Subspace:
        return self.filtration.step(l)

    def graded_dims(self) -> dict[int, int]:
        return {l: self.filtration.graded_dim(l) for l in self.filtration.graded_range()}

    def recenter(self, center: int) -> "WeightFiltration":
        """The same filtration re-indexed so the symmetry center moves."""
        return WeightFiltration(self.filtration.shift(center - self.center),
                                self.nilpotent, center)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, WeightFiltration):
            return NotImplemented
        return self.center == other.center and self.filtration == other.filtration


def nilpotency_check(N: ExactMatrix) -> None:
    if N.rows != N.cols:
        raise ValueError("nilpotent endomorphism must be square")
    if not N.power(N.rows).is_zero():
        raise NotNilpotent(f"matrix of size {N.rows} does not power to zero")


def monodromy_weight_filtration(N: ExactMatrix, center: int = 0) -> WeightFiltration:
    """The unique increasing filtration with N W_l <= W_{l-2} and
    N^l : Gr_{l+center} ~ Gr_{-l+center}.

    Built from the closed formula
    W_k = sum_{j >= max(0,-k)} ker(N^{k+j+1}) ∩ im(N^j)
    (centered indexing) and re-verified against both axioms before
    returning; AxiomFailure is raised if verification fails, so a
    returned filtration is always certified.
    """
    nilpotency_check(N)
    d = N.rows
    powers = [ExactMatrix.identity(d)]
    while not powers[-1].is_zero():
        powers.append(powers[-1] @ N)
    nilindex = len(powers) - 1  # smallest e with N^e = 0

    def power(e: int) -> ExactMatrix:
        return powers[min(e, nilindex)]

    kernels = {e: kernel(power(e)) for e in range(nilindex + 1)}
    images = {e: image(power(e)) for e in range(nilindex + 1)}

    steps: list[tuple[int, Subspace]] = []
    prev: Subspace | None = None
    for k in range(-nilindex, nilindex + 1):
        acc = Subspace.zero(d)
        for j in range(max(0, -k), nilindex):
            e = min(k + j + 1, nilindex)
            if e <= 0:
                continue
            term = intersect(kernels[e], images[j])
            if term.dim:
                acc = subspace_sum(acc, term)
        if prev is None or acc != prev:
            steps.append((k, acc))
            prev = acc
        if acc.dim == d:
            break
    filt = Filtration(d, Filtration.INCREASING, steps)
    _verify_weight_axioms(N, filt, center=0)
    w = WeightFiltration(filt, N, 0)
    return w if center == 0 else w.recenter(center)


def _verify_weight_axioms(N: ExactMatrix, filt: Filtration, center: int) -> None:
    d = N.rows
    lo = min(filt.indices()) - 1
    hi = max(filt.indices()) + 1
    for l in range(lo, hi + 1):
        step = filt.step(l)
        target = filt.step(l - 2)
        for v in step.basis_columns():
            if not target.contains_vector(N.apply(v)):
                raise AxiomFailure(f"N does not map W_{l} into W_{l-2}")
    for l in range(1, hi - center + 1):
        src, tgt = center + l, center - l
        g_src, g_tgt = filt.graded_dim(src), filt.graded_dim(tgt)
        if g_src != g_tgt:
            raise AxiomFailure(f"graded dims differ at +-{l} about the center")
        if g_src == 0:
            continue
        m = induced_map_on_graded(N.power(l), filt, src, shift=tgt - src)
        if rank(m) != g_src:
            raise AxiomFailure(f"N^{l} is not an isomorphism Gr_{src} -> Gr_{tgt}")


def commuting_check(Ns: Sequence[ExactMatrix]) -> None:
    for i in range(len(Ns)):
        for j in range(i + 1, len(Ns)):
            if not Ns[i].commutator(Ns[j]).is_zero():
                raise NonCommuting(f"matrices {i} and {j} do not commute")


def cone_filtration(Ns: Sequence[ExactMatrix], lambdas: Sequence[Fraction | int],
                    center: int = 0) -> WeightFiltration:
    """Weight filtration of a positive combination of commuting nilpotents."""
    if len(Ns) != len(lambdas) or not Ns:
        raise ValueError("need matching nonempty matrix and coefficient lists")
    commuting_check(Ns)
    lams = [Fraction(l) for l in lambdas]
    if any(l <= 0 for l in lams):
        raise NonPositiveCoefficient(f"coefficients must be positive, got {lams}")
    total = ExactMatrix.zeros(Ns[0].rows, Ns[0].cols)
    for N, lam in zip(Ns, lams):
        total = total + N.scale(lam)
    return monodromy_weight_filtration(total, center=center)


def cone_independence_report(Ns: Sequence[ExactMatrix], samples: int = 10,
                             seed: int = 0) -> dict:
    """Compare cone filtrations across random positive coefficients.

    This is a sampled check, not a proof: independence is guaranteed for
    monodromy data of a polarized variation but can fail for arbitrary
    commuting nilpotents, so the result is reported rather than assumed.
    """
    import random

    rng = random.Random(seed)
    base = cone_filtration(Ns, [1] * len(Ns))
    tried: list[list[str]] = [["1"] * len(Ns)]
    independent = True
    for _ in range(samples):
        lams = [Fraction(rng.randint(1, 12), rng.randint(1, 12)) for _ in Ns]
        tried.append([str(l) for l in lams])
        if cone_filtration(Ns, lams) != base:
            independent = False
            break
    return {
        "independent": independent,
        "samples": tried,
        "graded_dims": {str(l): dval for l, dval in base.graded_dims().items()},
    }


def induced_nilpotent_on_graded(N: ExactMatrix, W: WeightFiltration, k: int) -> ExactMatrix:
    """Matrix on Gr_k of a commuting endomorphism that preserves each step."""
    return induced_map_on_graded(N, W.filtration, k, shift=0)


def induced_filtration_on_graded(V: Filtration, W: WeightFiltration, k: int) -> Filtration:
    """The filtration induced by V on the graded quotient Gr_k of W.

    Step l is the image of V_l ∩ W_k in Gr_k = W_k / W_{k-1}, expressed
    in the deterministic quotient basis of the graded piece.
    """
    g = W.filtration.graded_dim(k)
    step_k = W.step(k)
    steps: list[tuple[int, Subspace]] = []
    prev: Subspace | None = None
    for l in V.indices():
        meet = intersect(V.step(l), step_k)
        gens = [W.filtration.graded_coordinates(k, v) for v in meet.basis_columns()]
        sub = Subspace.from_columns(g, gens)
        if prev is None or sub != prev:
            steps.append((l, sub))
            prev = sub
    return Filtration(g, Filtration.INCREASING, steps)


def relative_weight_check(N1: ExactMatrix, N2: ExactMatrix,
                          W: WeightFiltration | None = None) -> dict:
    """Check that the cone filtration induces, on each Gr_k of W(N1), the
    weight filtration of the induced N2 recentered at k.

    Returns a step-by-step report; ``agree`` is the conjunction.
    """
    commuting_check([N1, N2])
    if W is None:
        W = cone_filtration([N1, N2], [1, 1])
    W1 = monodromy_weight_filtration(N1)
    details = []
    agree = True
    for k in W1.filtration.graded_range():
        induced = induced_filtration_on_graded(W.filtration, W1, k)
        n2_gr = induced_nilpotent_on_graded(N2, W1, k)
        expected = monodromy_weight_filtration(n2_gr, center=k)
        los = min(induced.indices() + expected.filtration.indices()) - 1
        his = max(induced.indices() + expected.filtration.indices()) + 1
        for l in range(los, his + 1):
            a, b = induced.step(l), expected.step(l)
            same = a == b
            agree = agree and same
            if a.dim or b.dim or not same:
                details.append({"k": k, "l": l, "induced_dim": a.dim,
                                "weight_dim": b.dim, "equal": same})
    return {"agree": agree, "details": details}
