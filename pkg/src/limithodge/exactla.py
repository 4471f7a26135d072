"""Exact linear algebra over the Gaussian rationals.

Matrices, subspaces with canonical reduced-echelon bases, and
integer-indexed filtrations.  Every operation in this module is exact:
scalars are ``a + b*i`` with ``fractions.Fraction`` components, and no
rounding ever occurs.  Subspace equality is decidable because bases are
kept in a canonical form (reduced column echelon, pivots on the first
nonzero coordinate of each basis vector).
"""

from __future__ import annotations

from fractions import Fraction
from typing import Callable, Iterable, Sequence, Union

RatLike = Union[int, str, Fraction]
ScalarLike = Union["Scalar", int, str, Fraction]


def _rat(x: RatLike) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, str)):
        return Fraction(x)
    raise TypeError(f"not a rational value: {x!r}")


class Scalar:
    """A Gaussian rational ``re + im*i`` with exact arithmetic."""

    __slots__ = ("re", "im")

    def __init__(self, re: RatLike = 0, im: RatLike = 0):
        self.re = _rat(re)
        self.im = _rat(im)

    # -- arithmetic -------------------------------------------------
    def __add__(self, other: ScalarLike) -> "Scalar":
        o = scalar(other)
        return Scalar(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __sub__(self, other: ScalarLike) -> "Scalar":
        o = scalar(other)
        return Scalar(self.re - o.re, self.im - o.im)

    def __rsub__(self, other: ScalarLike) -> "Scalar":
        return scalar(other) - self

    def __mul__(self, other: ScalarLike) -> "Scalar":
        o = scalar(other)
        return Scalar(self.re * o.re - self.im * o.im,
                      self.re * o.im + self.im * o.re)

    __rmul__ = __mul__

    def inv(self) -> "Scalar":
        n = self.re * self.re + self.im * self.im
        if n == 0:
            raise ZeroDivisionError("inverse of zero scalar")
        return Scalar(self.re / n, -self.im / n)

    def __truediv__(self, other: ScalarLike) -> "Scalar":
        return self * scalar(other).inv()

    def __rtruediv__(self, other: ScalarLike) -> "Scalar":
        return scalar(other) * self.inv()

    def __neg__(self) -> "Scalar":
        return Scalar(-self.re, -self.im)

    def conj(self) -> "Scalar":
        return Scalar(self.re, -self.im)

    # -- predicates / hashing ---------------------------------------
    def __bool__(self) -> bool:
        return bool(self.re) or bool(self.im)

    def __eq__(self, other: object) -> bool:
        if isinstance(other, (int, str, Fraction)):
            other = Scalar(other)
        if not isinstance(other, Scalar):
            return NotImplemented
        return self.re == other.re and self.im == other.im

    def __hash__(self) -> int:
        return hash((self.re, self.im))

    def is_rational(self) -> bool:
        return self.im == 0

    def __repr__(self) -> str:
        if not self.im:
            return f"{self.re}"
        if not self.re:
            return f"{self.im}*i"
        return f"({self.re}{'+' if self.im > 0 else '-'}{abs(self.im)}*i)"


def scalar(x: ScalarLike) -> Scalar:
    """Coerce an int, string, Fraction, or Scalar to a Scalar."""
    if isinstance(x, Scalar):
        return x
    return Scalar(x)


ZERO = Scalar(0)
ONE = Scalar(1)
I = Scalar(0, 1)


class ExactMatrix:
    """A dense matrix of :class:`Scalar` entries, row-major, immutable."""

    __slots__ = ("rows", "cols", "entries")

    def __init__(self, entries: Iterable[Iterable[ScalarLike]], cols: int | None = None):
        grid = tuple(tuple(scalar(e) for e in row) for row in entries)
        self.rows = len(grid)
        if grid:
            self.cols = len(grid[0])
            if any(len(r) != self.cols for r in grid):
                raise ValueError("ragged matrix")
        else:
            self.cols = 0 if cols is None else cols
        if cols is not None and self.cols != cols:
            raise ValueError("column count mismatch")
        self.entries = grid

    # -- constructors ----------------------------------------------
    @staticmethod
    def zeros(rows: int, cols: int) -> "ExactMatrix":
        return ExactMatrix([[ZERO] * cols for _ in range(rows)], cols=cols)

    @staticmethod
    def identity(n: int) -> "ExactMatrix":
        return ExactMatrix([[ONE if i == j else ZERO for j in range(n)] for i in range(n)])

    @staticmethod
    def diagonal(values: Sequence[ScalarLike]) -> "ExactMatrix":
        n = len(values)
        return ExactMatrix([[scalar(values[i]) if i == j else ZERO for j in range(n)]
                            for i in range(n)])

    @staticmethod
    def from_columns(columns: Sequence[Sequence[ScalarLike]], ambient_dim: int | None = None) -> "ExactMatrix":
        cols = [list(c) for c in columns]
        if not cols:
            if ambient_dim is None:
                raise ValueError("ambient_dim required for an empty column list")
            return ExactMatrix([[] for _ in range(ambient_dim)], cols=0)
        n = len(cols[0])
        return ExactMatrix([[cols[j][i] for j in range(len(cols))] for i in range(n)])

    @staticmethod
    def from_function(rows: int, cols: int, f: Callable[[int, int], ScalarLike]) -> "ExactMatrix":
        return ExactMatrix([[f(i, j) for j in range(cols)] for i in range(rows)], cols=cols)

    # -- access ------------------------------------------------------
    def __getitem__(self, ij: tuple[int, int]) -> Scalar:
        return self.entries[ij[0]][ij[1]]

    def column(self, j: int) -> tuple[Scalar, ...]:
        return tuple(self.entries[i][j] for i in range(self.rows))

    def columns(self) -> list[tuple[Scalar, ...]]:
        return [self.column(j) for j in range(self.cols)]

    def row(self, i: int) -> tuple[Scalar, ...]:
        return self.entries[i]

    # -- algebra -----------------------------------------------------
    def __add__(self, other: "ExactMatrix") -> "ExactMatrix":
        self._same_shape(other)
        return ExactMatrix([[a + b for a, b in zip(r1, r2)]
                            for r1, r2 in zip(self.entries, other.entries)], cols=self.cols)

    def __sub__(self, other: "ExactMatrix") -> "ExactMatrix":
        self._same_shape(other)
        return ExactMatrix([[a - b for a, b in zip(r1, r2)]
                            for r1, r2 in zip(self.entries, other.entries)], cols=self.cols)

    def __neg__(self) -> "ExactMatrix":
        return ExactMatrix([[-a for a in r] for r in self.entries], cols=self.cols)

    def scale(self, c: ScalarLike) -> "ExactMatrix":
        c = scalar(c)
        return ExactMatrix([[c * a for a in r] for r in self.entries], cols=self.cols)

    def __matmul__(self, other: "ExactMatrix") -> "ExactMatrix":
        if self.cols != other.rows:
            raise ValueError(f"shape mismatch {self.rows}x{self.cols} @ {other.rows}x{other.cols}")
        ocols = other.cols
        out = []
        for i in range(self.rows):
            srow = self.entries[i]
            orow = []
            for j in range(ocols):
                acc = ZERO
                for k in range(self.cols):
                    a = srow[k]
                    if a:
                        acc = acc + a * other.entries[k][j]
                orow.append(acc)
            out.append(orow)
        return ExactMatrix(out, cols=ocols)

    def apply(self, v: Sequence[ScalarLike]) -> tuple[Scalar, ...]:
        """Matrix-vector product as a tuple."""
        if len(v) != self.cols:
            raise ValueError("vector length mismatch")
        vv = [scalar(x) for x in v]
        out = []
        for i in range(self.rows):
            acc = ZERO
            row = self.entries[i]
            for k in range(self.cols):
                if row[k] and vv[k]:
                    acc = acc + row[k] * vv[k]
            out.append(acc)
        return tuple(out)

    def power(self, k: int) -> "ExactMatrix":
        if self.rows != self.cols:
            raise ValueError("power of a non-square matrix")
        if k < 0:
            raise ValueError("negative power")
        result = ExactMatrix.identity(self.rows)
        for _ in range(k):
            result = result @ self
        return result

    def transpose(self) -> "ExactMatrix":
        return ExactMatrix([[self.entries[i][j] for i in range(self.rows)]
                            for j in range(self.cols)], cols=self.rows)

    def conjugate(self) -> "ExactMatrix":
        return ExactMatrix([[a.conj() for a in r] for r in self.entries], cols=self.cols)

    def hstack(self, other: "ExactMatrix") -> "ExactMatrix":
        if self.rows != other.rows:
            raise ValueError("row count mismatch in hstack")
        return ExactMatrix([r1 + r2 for r1, r2 in zip(self.entries, other.entries)],
                           cols=self.cols + other.cols)

    def commutator(self, other: "ExactMatrix") -> "ExactMatrix":
        return self @ other - other @ self

    def is_zero(self) -> bool:
        return all(not a for r in self.entries for a in r)

    def trace(self) -> Scalar:
        acc = ZERO
        for i in range(min(self.rows, self.cols)):
            acc = acc + self.entries[i][i]
        return acc

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ExactMatrix):
            return NotImplemented
        return (self.rows, self.cols) == (other.rows, other.cols) and self.entries == other.entries

    def __hash__(self) -> int:
        return hash((self.rows, self.cols, self.entries))

    def _same_shape(self, other: "ExactMatrix") -> None:
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise ValueError("shape mismatch")

    def __repr__(self) -> str:
        body = "; ".join(" ".join(repr(a) for a in r) for r in self.entries)
        return f"ExactMatrix[{self.rows}x{self.cols}: {body}]"


def _row_reduce(rows: list[list[Scalar]]) -> tuple[list[list[Scalar]], list[int]]:
    """Reduced row echelon form.  Returns (nonzero rows, pivot columns)."""
    m = [list(r) for r in rows]
    nrows = len(m)
    ncols = len(m[0]) if m else 0
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        pr = None
        for i in range(r, nrows):
            if m[i][c]:
                pr = i
                break
        if pr is None:
            continue
        m[r], m[pr] = m[pr], m[r]
        inv = m[r][c].inv()
        m[r] = [e * inv for e in m[r]]
        for i in range(nrows):
            if i != r and m[i][c]:
                f = m[i][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == nrows:
            break
    return m[:r], pivots


class Subspace:
    """A subspace of ``Scalar^n`` with a canonical reduced-echelon basis.

    The basis matrix has the subspace's dimension many columns; each
    column's first nonzero coordinate (its pivot) is 1, pivots are
    strictly increasing across columns, and every other basis column
    vanishes at each pivot coordinate.  Two subspaces are equal iff
    their canonical bases are equal entrywise, which makes filtration
    comparisons decidable.
    """

    __slots__ = ("ambient_dim", "basis", "_pivots")

    def __init__(self, ambient_dim: int, basis: ExactMatrix, _pivots: tuple[int, ...] | None = None):
        if basis.rows != ambient_dim:
            raise ValueError("basis ambient dimension mismatch")
        self.ambient_dim = ambient_dim
        self.basis = basis
        if _pivots is None:
            _pivots = tuple(self._leading_index(basis.column(j)) for j in range(basis.cols))
        self._pivots = _pivots

    @staticmethod
    def _leading_index(col: Sequence[Scalar]) -> int:
        for i, a in enumerate(col):
            if a:
                return i
        raise ValueError("zero column in a canonical basis")

    # -- constructors ----------------------------------------------
    @staticmethod
    def from_columns(ambient_dim: int, columns: Iterable[Sequence[ScalarLike]]) -> "Subspace":
        gen_rows = [[scalar(x) for x in col] for col in columns]
        for row in gen_rows:
            if len(row) != ambient_dim:
                raise ValueError("generator length mismatch")
        red, pivots = _row_reduce(gen_rows)
        basis = ExactMatrix.from_columns([row for row in red], ambient_dim=ambient_dim)
        return Subspace(ambient_dim, basis, tuple(pivots))

    @staticmethod
    def zero(ambient_dim: int) -> "Subspace":
        return Subspace(ambient_dim, ExactMatrix.from_columns([], ambient_dim=ambient_dim), ())

    @staticmethod
    def full(ambient_dim: int) -> "Subspace":
        return Subspace(ambient_dim, ExactMatrix.identity(ambient_dim),
                        tuple(range(ambient_dim)))

    # -- structure ----------------------------------------------------
    @property
    def dim(self) -> int:
        return self.basis.cols

    def pivots(self) -> tuple[int, ...]:
        return self._pivots

    def basis_columns(self) -> list[tuple[Scalar, ...]]:
        return self.basis.columns()

    def reduce_mod(self, v: Sequence[ScalarLike]) -> tuple[Scalar, ...]:
        """Subtract the canonical projection onto this subspace.

        Exploits that a canonical basis vector is 1 at its own pivot
        and 0 at every other pivot, so the residual has zeros at all
        pivot coordinates.  For v in the subspace the residual is 0.
        """
        w = [scalar(x) for x in v]
        if len(w) != self.ambient_dim:
            raise ValueError("vector length mismatch")
        for j, p in enumerate(self._pivots):
            c = w[p]
            if c:
                col = self.basis.column(j)
                w = [a - c * b for a, b in zip(w, col)]
        return tuple(w)

    def contains_vector(self, v: Sequence[ScalarLike]) -> bool:
        return all(not a for a in self.reduce_mod(v))

    def contains(self, other: "Subspace") -> bool:
        if other.ambient_dim != self.ambient_dim:
            raise ValueError("ambient dimension mismatch")
        return all(self.contains_vector(c) for c in other.basis_columns())

    def coordinates(self, v: Sequence[ScalarLike]) -> tuple[Scalar, ...]:
        """Coordinates of v in the canonical basis (v must lie in the subspace)."""
        w = [scalar(x) for x in v]
        coords = tuple(w[p] for p in self._pivots)
        if not all(not a for a in self.reduce_mod(w)):
            raise ValueError("vector not in subspace")
        return coords

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Subspace):
            return NotImplemented
        return self.ambient_dim == other.ambient_dim and self.basis == other.basis

    def __hash__(self) -> int:
        return hash((self.ambient_dim, self.basis))

    def __repr__(self) -> str:
        return f"Subspace(dim {self.dim} of {self.ambient_dim})"


# ----------------------------------------------------------------------
# subspace operations


def kernel(M: ExactMatrix) -> Subspace:
    """Exact null space of M, in canonical form."""
    red, pivots = _row_reduce([list(r) for r in M.entries])
    pivot_set = set(pivots)
    free = [c for c in range(M.cols) if c not in pivot_set]
    gens = []
    for f in free:
        v = [ZERO] * M.cols
        v[f] = ONE
        for r, p in enumerate(pivots):
            v[p] = -red[r][f]
        gens.append(v)
    return Subspace.from_columns(M.cols, gens)


def image(M: ExactMatrix) -> Subspace:
    """Exact column space of M, in canonical form."""
    return Subspace.from_columns(M.rows, M.columns())


def intersect(A: Subspace, B: Subspace) -> Subspace:
    if A.ambient_dim != B.ambient_dim:
        raise ValueError("ambient dimension mismatch")
    if A.dim == 0 or B.dim == 0:
        return Subspace.zero(A.ambient_dim)
    stacked = A.basis.hstack(-B.basis)
    ker = kernel(stacked)
    gens = []
    for col in ker.basis_columns():
        x = col[:A.dim]
        gens.append(A.basis.apply(x))
    return Subspace.from_columns(A.ambient_dim, gens)


def subspace_sum(A: Subspace, B: Subspace) -> Subspace:
    if A.ambient_dim != B.ambient_dim:
        raise ValueError("ambient dimension mismatch")
    return Subspace.from_columns(A.ambient_dim, A.basis_columns() + B.basis_columns())


def preimage(M: ExactMatrix, B: Subspace) -> Subspace:
    """The subspace {v : Mv in B}."""
    if M.rows != B.ambient_dim:
        raise ValueError("ambient dimension mismatch")
    if B.dim == 0:
        return kernel(M)
    stacked = M.hstack(-B.basis)
    ker = kernel(stacked)
    gens = [col[:M.cols] for col in ker.basis_columns()]
    return Subspace.from_columns(M.cols, gens)


def apply_to_subspace(M: ExactMatrix, V: Subspace) -> Subspace:
    """Image M(V) of a subspace under a matrix."""
    if M.cols != V.ambient_dim:
        raise ValueError("ambient dimension mismatch")
    return Subspace.from_columns(M.rows, [M.apply(c) for c in V.basis_columns()])


def restrict_to_subspace(M: ExactMatrix, V: Subspace) -> ExactMatrix:
    """Matrix of M restricted to an invariant subspace, in V's canonical basis.

    Raises ValueError if M does not map V into itself.
    """
    cols = []
    for c in V.basis_columns():
        cols.append(V.coordinates(M.apply(c)))
    return ExactMatrix.from_columns(cols, ambient_dim=V.dim)


def solve(A: ExactMatrix, b: Sequence[ScalarLike]) -> tuple[Scalar, ...] | None:
    """One exact solution x of Ax = b, or None if inconsistent."""
    bb = [scalar(x) for x in b]
    if len(bb) != A.rows:
        raise ValueError("rhs length mismatch")
    aug = [list(r) + [bb[i]] for i, r in enumerate(A.entries)]
    red, pivots = _row_reduce(aug)
    if A.cols in pivots:
        return None
    x = [ZERO] * A.cols
    for r, p in enumerate(pivots):
        x[p] = red[r][A.cols]
    return tuple(x)


def rank(M: ExactMatrix) -> int:
    _, pivots = _row_reduce([list(r) for r in M.entries])
    return len(pivots)


def determinant(M: ExactMatrix) -> Scalar:
    """Exact determinant via Gaussian elimination with row swaps."""
    if M.rows != M.cols:
        raise ValueError("determinant of a non-square matrix")
    rows = [list(r) for r in M.entries]
    n = M.rows
    det = ONE
    for c in range(n):
        pivot_row = next((r for r in range(c, n) if rows[r][c]), None)
        if pivot_row is None:
            return ZERO
        if pivot_row != c:
            rows[c], rows[pivot_row] = rows[pivot_row], rows[c]
            det = -det
        det = det * rows[c][c]
        inv = rows[c][c].inv()
        for r in range(c + 1, n):
            if not rows[r][c]:
                continue
            factor = rows[r][c] * inv
            rows[r] = [rows[r][j] - factor * rows[c][j] for j in range(n)]
    return det


def inverse(M: ExactMatrix) -> ExactMatrix:
    """Exact inverse of a square invertible matrix (ValueError if singular)."""
    if M.rows != M.cols:
        raise ValueError("inverse of a non-square matrix")
    n = M.rows
    aug = [list(r) + [ONE if i == j else ZERO for j in range(n)]
           for i, r in enumerate(M.entries)]
    red, pivots = _row_reduce(aug)
    if pivots != list(range(n)):
        raise ValueError("matrix is singular")
    return ExactMatrix([row[n:] for row in red], cols=n)


def exp_nilpotent(N: ExactMatrix, coeff: ScalarLike = 1) -> ExactMatrix:
    """exp(coeff * N) for nilpotent N — an exact polynomial sum."""
    if N.rows != N.cols:
        raise ValueError("non-square matrix")
    n = N.rows
    c = scalar(coeff)
    term = ExactMatrix.identity(n)
    total = term
    power = ONE
    fact = 1
    for k in range(1, n + 1):
        term = term @ N
        if term.is_zero():
            break
        power = power * c
        fact *= k
        total = total + term.scale(power * Scalar(Fraction(1, fact)))
    if not term.is_zero():
        raise ValueError("matrix is not nilpotent")
    return total


# ----------------------------------------------------------------------
# filtrations


class Filtration:
    """An integer-indexed chain of nested subspaces.

    ``direction`` is ``"increasing"`` (steps grow with the index, like a
    weight filtration) or ``"decreasing"`` (steps shrink, like a Hodge
    filtration).  Queries outside the stored index range saturate: an
    increasing filtration is zero below its lowest stored step and
    constant above its highest; a decreasing one is constant below its
    lowest stored index and zero above its highest.
    """

    INCREASING = "increasing"
    DECREASING = "decreasing"

    __slots__ = ("ambient_dim", "direction", "steps")

    def __init__(self, ambient_dim: int, direction: str,
                 steps: Sequence[tuple[int, Subspace]]):
        if direction not in (self.INCREASING, self.DECREASING):
            raise ValueError(f"bad direction {direction!r}")
        ordered = sorted(steps, key=lambda t: t[0])
        indices = [l for l, _ in ordered]
        if len(set(indices)) != len(indices):
            raise ValueError("duplicate filtration indices")
        for _, sub in ordered:
            if sub.ambient_dim != ambient_dim:
                raise ValueError("step ambient dimension mismatch")
        for (l1, s1), (l2, s2) in zip(ordered, ordered[1:]):
            lo, hi = (s1, s2) if direction == self.INCREASING else (s2, s1)
            if not hi.contains(lo):
                raise ValueError(f"filtration not nested between indices {l1} and {l2}")
        self.ambient_dim = ambient_dim
        self.direction = direction
        self.steps = tuple(ordered)

    @staticmethod
    def from_generators(ambient_dim: int, direction: str,
                        steps: Sequence[tuple[int, Iterable[Sequence[ScalarLike]]]]) -> "Filtration":
        return Filtration(ambient_dim, direction,
                          [(l, Subspace.from_columns(ambient_dim, gens)) for l, gens in steps])

    def indices(self) -> list[int]:
        return [l for l, _ in self.steps]

    def step(self, l: int) -> Subspace:
        """The subspace at index l, with saturation outside the stored range."""
        if self.direction == self.INCREASING:
            best = None
            for idx, sub in self.steps:
                if idx <= l:
                    best = sub
                else:
                    break
            return best if best is not None else Subspace.zero(self.ambient_dim)
        best = None
        for idx, sub in reversed(self.steps):
            if idx >= l:
                best = sub
            else:
                break
        return best if best is not None else Subspace.zero(self.ambient_dim)

    def _sub_step(self, l: int) -> Subspace:
        """The next-smaller step: index l-1 if increasing, l+1 if decreasing."""
        return self.step(l - 1) if self.direction == self.INCREASING else self.step(l + 1)

    def graded_dim(self, l: int) -> int:
        return self.step(l).dim - self._sub_step(l).dim

    def graded_range(self) -> list[int]:
        """Indices l with nonzero graded piece."""
        if not self.steps:
            return []
        indices = self.indices()
        lo, hi = indices[0], indices[-1]
        return [l for l in range(lo, hi + 1) if self.graded_dim(l) != 0]

    def graded_basis(self, l: int) -> list[tuple[Scalar, ...]]:
        """Deterministic quotient basis of Gr_l: the pivot-complement columns.

        Canonical basis columns of step(l) whose pivots are not pivots
        of the next-smaller step; their classes form a basis of the
        graded piece (nested canonical bases have nested pivot sets).
        """
        big = self.step(l)
        small = self._sub_step(l)
        small_pivots = set(small.pivots())
        return [big.basis.column(j) for j, p in enumerate(big.pivots())
                if p not in small_pivots]

    def graded_coordinates(self, l: int, v: Sequence[ScalarLike]) -> tuple[Scalar, ...]:
        """Coordinates of the class of v in the graded_basis(l) quotient basis."""
        big = self.step(l)
        if not big.contains_vector(v):
            raise ValueError("vector not in the filtration step")
        small = self._sub_step(l)
        resid = small.reduce_mod(v)
        small_pivots = set(small.pivots())
        comp_pivots = [p for p in big.pivots() if p not in small_pivots]
        return tuple(resid[p] for p in comp_pivots)

    def shift(self, offset: int) -> "Filtration":
        """Reindex: result.step(l) == self.step(l - offset)."""
        return Filtration(self.ambient_dim, self.direction,
                          [(l + offset, sub) for l, sub in self.steps])

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Filtration):
            return NotImplemented
        if (self.ambient_dim, self.direction) != (other.ambient_dim, other.direction):
            return False
        indices = sorted(set(self.indices()) | set(other.indices()))
        if not indices:
            return True
        lo, hi = indices[0] - 1, indices[-1] + 1
        return all(self.step(l) == other.step(l) for l in range(lo, hi + 1))

    def __repr__(self) -> str:
        parts = ", ".join(f"{l}:{sub.dim}" for l, sub in self.steps)
        return f"Filtration({self.direction}, dims {parts})"


def induced_map_on_graded(M: ExactMatrix, W: Filtration, l: int, shift: int = 0) -> ExactMatrix:
    """Matrix of the map Gr_l -> Gr_{l+shift} induced by M.

    Quotient bases are the deterministic pivot-complement bases of the
    filtration.  Raises ValueError if M fails to map step(l) into
    step(l+shift) (or the sub-steps correspondingly), i.e. if the
    induced map is not defined.
    """
    src, tgt = l, l + shift
    step_l = W.step(src)
    for v in step_l.basis_columns():
        if not W.step(tgt).contains_vector(M.apply(v)):
            raise ValueError(f"matrix does not map step {src} into step {tgt}")
    sub = W._sub_step(src)
    tgt_sub_index = tgt - 1 if W.direction == Filtration.INCREASING else tgt + 1
    for v in sub.basis_columns():
        if not W.step(tgt_sub_index).contains_vector(M.apply(v)):
            raise ValueError("matrix does not respect the sub-steps")
    src_basis = W.graded_basis(src)
    cols = [W.graded_coordinates(tgt, M.apply(v)) for v in src_basis]
    return ExactMatrix.from_columns(cols, ambient_dim=W.graded_dim(tgt))
