"""Exact linear algebra over the rationals.

Everything downstream (page computations, cohomology, obstruction solving)
reduces to the handful of operations in this module: reduced row echelon
form, kernels, preimages, subspace lattice operations, quotients and
induced maps on quotients.  All arithmetic uses ``fractions.Fraction``;
there is no floating point anywhere.

Subspaces are kept in canonical reduced row echelon form, so two equal
subspaces are equal as Python objects.  Quotient bases are chosen by a
deterministic pivot-completion rule, which makes every matrix produced
downstream reproducible across runs.

The matrices coming from Cech complexes are very sparse, so the
elimination loops work through precomputed nonzero index lists rather
than dense row scans.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Sequence

Vector = tuple[Fraction, ...]

_ZERO = Fraction(0)
_ONE = Fraction(1)


def _frac(x) -> Fraction:
    return x if type(x) is Fraction else Fraction(x)


def vector(values: Iterable) -> Vector:
    return tuple(_frac(v) for v in values)


class RationalMatrix:
    """Dense matrix with Fraction entries, immutable after construction."""

    __slots__ = ("rows", "cols", "entries")

    def __init__(self, rows: int, cols: int, entries: Sequence[Sequence]):
        if len(entries) != rows:
            raise ValueError(f"expected {rows} rows, got {len(entries)}")
        normalized = []
        for row in entries:
            if len(row) != cols:
                raise ValueError(f"expected {cols} columns, got {len(row)}")
            normalized.append(tuple(_frac(v) for v in row))
        self.rows = rows
        self.cols = cols
        self.entries = tuple(normalized)

    def __setattr__(self, name, value):
        if hasattr(self, "entries") and name in self.__slots__:
            raise AttributeError("RationalMatrix is immutable")
        object.__setattr__(self, name, value)

    @classmethod
    def from_rows(cls, entries: Sequence[Sequence]) -> "RationalMatrix":
        rows = len(entries)
        cols = len(entries[0]) if rows else 0
        return cls(rows, cols, entries)

    @classmethod
    def identity(cls, n: int) -> "RationalMatrix":
        return cls(n, n, [[_ONE if i == j else _ZERO for j in range(n)] for i in range(n)])

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "RationalMatrix":
        zero_row = [_ZERO] * cols
        return cls(rows, cols, [zero_row for _ in range(rows)])

    @classmethod
    def from_columns(cls, cols: Sequence[Sequence], rows: int | None = None) -> "RationalMatrix":
        n = len(cols)
        m = len(cols[0]) if n else (rows if rows is not None else 0)
        return cls(m, n, [[cols[j][i] for j in range(n)] for i in range(m)])

    def row(self, i: int) -> Vector:
        return self.entries[i]

    def column(self, j: int) -> Vector:
        return tuple(self.entries[i][j] for i in range(self.rows))

    def columns(self) -> list[Vector]:
        return [self.column(j) for j in range(self.cols)]

    def transpose(self) -> "RationalMatrix":
        return RationalMatrix(self.cols, self.rows,
                              [[self.entries[i][j] for i in range(self.rows)]
                               for j in range(self.cols)])

    def apply(self, v: Sequence) -> Vector:
        """Matrix times column vector."""
        if len(v) != self.cols:
            raise ValueError(f"vector length {len(v)} != cols {self.cols}")
        support = [(j, vj) for j, vj in enumerate(v) if vj]
        if len(support) == 1 and support[0][1] == 1:
            return self.column(support[0][0])
        out = []
        for i in range(self.rows):
            row = self.entries[i]
            s = _ZERO
            for j, vj in support:
                if row[j]:
                    s += row[j] * vj
            out.append(s)
        return tuple(out)

    def __matmul__(self, other: "RationalMatrix") -> "RationalMatrix":
        if self.cols != other.rows:
            raise ValueError(f"shape mismatch {self.rows}x{self.cols} @ {other.rows}x{other.cols}")
        out = []
        for i in range(self.rows):
            row = self.entries[i]
            out_row = [_ZERO] * other.cols
            for k, rk in enumerate(row):
                if rk:
                    other_row = other.entries[k]
                    for j, okj in enumerate(other_row):
                        if okj:
                            out_row[j] += rk * okj
            out.append(out_row)
        return RationalMatrix(self.rows, other.cols, out)

    def __add__(self, other: "RationalMatrix") -> "RationalMatrix":
        self._same_shape(other)
        return RationalMatrix(self.rows, self.cols,
                              [[a + b for a, b in zip(r1, r2)]
                               for r1, r2 in zip(self.entries, other.entries)])

    def __sub__(self, other: "RationalMatrix") -> "RationalMatrix":
        self._same_shape(other)
        return RationalMatrix(self.rows, self.cols,
                              [[a - b for a, b in zip(r1, r2)]
                               for r1, r2 in zip(self.entries, other.entries)])

    def __neg__(self) -> "RationalMatrix":
        return RationalMatrix(self.rows, self.cols,
                              [[-a for a in r] for r in self.entries])

    def scale(self, c) -> "RationalMatrix":
        c = _frac(c)
        return RationalMatrix(self.rows, self.cols,
                              [[c * a for a in r] for r in self.entries])

    def _same_shape(self, other: "RationalMatrix"):
        if self.rows != other.rows or self.cols != other.cols:
            raise ValueError(f"shape mismatch {self.rows}x{self.cols} vs {other.rows}x{other.cols}")

    def is_zero(self) -> bool:
        return all(not v for row in self.entries for v in row)

    def __eq__(self, other) -> bool:
        if not isinstance(other, RationalMatrix):
            return NotImplemented
        return (self.rows, self.cols, self.entries) == (other.rows, other.cols, other.entries)

    def __hash__(self) -> int:
        return hash((self.rows, self.cols, self.entries))

    def __repr__(self) -> str:
        body = "; ".join(" ".join(str(v) for v in row) for row in self.entries)
        return f"RationalMatrix({self.rows}x{self.cols}: [{body}])"


def _eliminate(work: list[list[Fraction]], n_cols: int) -> list[int]:
    """In-place Gauss-Jordan; returns the pivot columns.

    Row updates run over the nonzero support of the pivot row only.
    """
    n_rows = len(work)
    pivots = []
    r = 0
    for c in range(n_cols):
        if r == n_rows:
            break
        pivot_row = None
        for i in range(r, n_rows):
            if work[i][c]:
                pivot_row = i
                break
        if pivot_row is None:
            continue
        work[r], work[pivot_row] = work[pivot_row], work[r]
        row_r = work[r]
        pv = row_r[c]
        if pv != 1:
            inv = _ONE / pv
            for j in range(c, n_cols):
                if row_r[j]:
                    row_r[j] *= inv
        support = [j for j in range(c, n_cols) if row_r[j]]
        for i in range(n_rows):
            if i == r:
                continue
            f = work[i][c]
            if f:
                row_i = work[i]
                for j in support:
                    row_i[j] -= f * row_r[j]
        pivots.append(c)
        r += 1
    return pivots


def rref(m: RationalMatrix) -> tuple[RationalMatrix, tuple[int, ...]]:
    """Canonical reduced row echelon form and the pivot columns.

    Idempotent: rref(rref(m)) == rref(m).
    """
    work = [list(row) for row in m.entries]
    pivots = _eliminate(work, m.cols)
    return RationalMatrix(m.rows, m.cols, work), tuple(pivots)


def rank(m: RationalMatrix) -> int:
    return len(rref(m)[1])


class Subspace:
    """A linear subspace of Q^n, stored as a canonical RREF basis.

    ``basis`` has one basis vector per row, pivot columns strictly
    increasing, pivots equal to 1 and alone in their column.  Equality of
    subspaces is therefore literal equality of the stored data.
    """

    __slots__ = ("ambient_dim", "basis", "pivots", "_support")

    def __init__(self, ambient_dim: int, basis: RationalMatrix,
                 pivots: tuple[int, ...] | None = None):
        if basis.cols != ambient_dim:
            raise ValueError(f"basis width {basis.cols} != ambient {ambient_dim}")
        self.ambient_dim = ambient_dim
        self.basis = basis
        if pivots is None:
            pivots = tuple(next(j for j, v in enumerate(row) if v)
                           for row in basis.entries)
        self.pivots = pivots
        self._support = None

    def __setattr__(self, name, value):
        if name != "_support" and hasattr(self, "pivots") and name in self.__slots__:
            raise AttributeError("Subspace is immutable")
        object.__setattr__(self, name, value)

    @classmethod
    def from_vectors(cls, ambient_dim: int, vectors: Iterable[Sequence]) -> "Subspace":
        rows = [list(vector(v)) for v in vectors]
        for v in rows:
            if len(v) != ambient_dim:
                raise ValueError(f"vector length {len(v)} != ambient {ambient_dim}")
        if not rows:
            return cls(ambient_dim, RationalMatrix.zeros(0, ambient_dim), ())
        pivots = _eliminate(rows, ambient_dim)
        kept = rows[: len(pivots)]
        return cls(ambient_dim, RationalMatrix(len(pivots), ambient_dim, kept),
                   tuple(pivots))

    @classmethod
    def zero(cls, ambient_dim: int) -> "Subspace":
        return cls(ambient_dim, RationalMatrix.zeros(0, ambient_dim), ())

    @classmethod
    def full(cls, ambient_dim: int) -> "Subspace":
        return cls(ambient_dim, RationalMatrix.identity(ambient_dim),
                   tuple(range(ambient_dim)))

    @property
    def dim(self) -> int:
        return self.basis.rows

    def is_zero(self) -> bool:
        return self.basis.rows == 0

    def is_full(self) -> bool:
        return self.basis.rows == self.ambient_dim

    def basis_vectors(self) -> list[Vector]:
        return list(self.basis.entries)

    def _row_support(self) -> list[list[tuple[int, Fraction]]]:
        if self._support is None:
            self._support = [[(j, v) for j, v in enumerate(row) if v]
                             for row in self.basis.entries]
        return self._support

    def reduce_vector(self, v: Sequence) -> Vector:
        """Subtract the projection onto this subspace along its pivots.

        Returns the zero vector exactly when v lies in the subspace.
        """
        if len(v) != self.ambient_dim:
            raise ValueError("ambient dimension mismatch")
        v = [_frac(x) for x in v]
        for p, support in zip(self.pivots, self._row_support()):
            f = v[p]
            if f:
                for j, val in support:
                    v[j] -= f * val
        return tuple(v)

    def contains_vector(self, v: Sequence) -> bool:
        return not any(self.reduce_vector(v))

    def contains(self, other: "Subspace") -> bool:
        if other.ambient_dim != self.ambient_dim:
            raise ValueError("ambient dimension mismatch")
        if other.dim > self.dim:
            return False
        if self.is_full():
            return True
        return all(self.contains_vector(row) for row in other.basis.entries)

    def annihilator(self) -> RationalMatrix:
        """Matrix K with this subspace equal to ker K (rows span the dual annihilator)."""
        return kernel(self.basis).basis if self.dim else RationalMatrix.identity(self.ambient_dim)

    def intersect(self, other: "Subspace") -> "Subspace":
        self._same_ambient(other)
        if self.dim == 0 or other.dim == 0:
            return Subspace.zero(self.ambient_dim)
        if self.is_full():
            return other
        if other.is_full():
            return self
        ka = self.annihilator()
        kb = other.annihilator()
        stacked = RationalMatrix(ka.rows + kb.rows, self.ambient_dim,
                                 list(ka.entries) + list(kb.entries))
        return kernel(stacked)

    def sum(self, other: "Subspace") -> "Subspace":
        self._same_ambient(other)
        if other.is_zero():
            return self
        if self.is_zero():
            return other
        return Subspace.from_vectors(self.ambient_dim,
                                     list(self.basis.entries) + list(other.basis.entries))

    def _same_ambient(self, other: "Subspace"):
        if self.ambient_dim != other.ambient_dim:
            raise ValueError(f"ambient mismatch {self.ambient_dim} vs {other.ambient_dim}")

    def __eq__(self, other) -> bool:
        if not isinstance(other, Subspace):
            return NotImplemented
        return self.ambient_dim == other.ambient_dim and self.basis == other.basis

    def __hash__(self) -> int:
        return hash((self.ambient_dim, self.basis))

    def __repr__(self) -> str:
        return f"Subspace(dim {self.dim} in Q^{self.ambient_dim})"


def kernel(m: RationalMatrix) -> Subspace:
    """The solution space {v | m v = 0}, canonical basis, dim = cols - rank."""
    reduced, pivots = rref(m)
    pivot_set = set(pivots)
    free_cols = [j for j in range(m.cols) if j not in pivot_set]
    vectors_ = []
    for fc in free_cols:
        v = [_ZERO] * m.cols
        v[fc] = _ONE
        for r, pc in enumerate(pivots):
            v[pc] = -reduced.entries[r][fc]
        vectors_.append(v)
    return Subspace.from_vectors(m.cols, vectors_)


def image(m: RationalMatrix) -> Subspace:
    """Column span of m as a subspace of Q^rows."""
    return Subspace.from_vectors(m.rows, m.columns())


def image_of_subspace(m: RationalMatrix, s: Subspace) -> Subspace:
    if s.ambient_dim != m.cols:
        raise ValueError("subspace does not live in the domain of m")
    return Subspace.from_vectors(m.rows, [m.apply(v) for v in s.basis.entries])


def preimage(m: RationalMatrix, w: Subspace) -> Subspace:
    """The subspace {v | m v in w}; always contains ker m."""
    if w.ambient_dim != m.rows:
        raise ValueError(f"target ambient {w.ambient_dim} != rows {m.rows}")
    if w.is_full():
        return Subspace.full(m.cols)
    n, k = m.cols, w.dim
    if k == 0:
        return kernel(m)
    # Solve m v = W^T c jointly in (v, c), then project onto v.
    aug_rows = []
    wt = w.basis  # k x rows; columns of W^T are the basis vectors
    for i in range(m.rows):
        aug_rows.append(list(m.entries[i]) + [-wt.entries[j][i] for j in range(k)])
    joint = kernel(RationalMatrix(m.rows, n + k, aug_rows))
    return Subspace.from_vectors(n, [v[:n] for v in joint.basis.entries])


class QuotientPresentation:
    """A basis of v/w by chosen representative vectors, with coordinates.

    Representatives are picked deterministically: walk the canonical basis
    of v and keep each vector that is independent from w plus the ones
    already kept.  ``project`` returns the coordinates of any x in v with
    respect to the representative classes; ``lift`` is a section of it.
    """

    __slots__ = ("space", "subspace", "representatives", "_solver")

    def __init__(self, space: Subspace, subspace: Subspace):
        if not space.contains(subspace):
            raise ValueError("subspace is not contained in the ambient space of the quotient")
        self.space = space
        self.subspace = subspace
        # one elimination pass: seed with the subspace rows, then sweep the
        # space rows, keeping those that enlarge the span
        n = space.ambient_dim
        state = [list(row) for row in subspace.basis.entries]
        state_pivots = list(subspace.pivots)
        reps = []
        for row in space.basis.entries:
            residual = list(row)
            # state rows in insertion order: each is already clear at all
            # earlier pivots, so one sweep reduces completely
            for p, srow in zip(state_pivots, state):
                f = residual[p]
                if f:
                    for j in range(p, n):
                        if srow[j]:
                            residual[j] -= f * srow[j]
            lead = next((j for j, v in enumerate(residual) if v), None)
            if lead is None:
                continue
            reps.append(row)
            inv = _ONE / residual[lead]
            state.append([v * inv if v else _ZERO for v in residual])
            state_pivots.append(lead)
        self.representatives = tuple(reps)
        assert len(reps) == space.dim - subspace.dim
        self._solver = None

    def __setattr__(self, name, value):
        if name != "_solver" and hasattr(self, "representatives") and name in self.__slots__:
            raise AttributeError("QuotientPresentation is immutable")
        object.__setattr__(self, name, value)

    @property
    def dim(self) -> int:
        return len(self.representatives)

    def _ensure_solver(self):
        if self._solver is not None:
            return
        # Columns: representatives then basis of w; full column rank by
        # construction.  Precompute the row-reduction transform once.
        n = self.space.ambient_dim
        cols = list(self.representatives) + list(self.subspace.basis.entries)
        k = len(cols)
        aug = [[cols[j][i] for j in range(k)] + [_ONE if t == i else _ZERO for t in range(n)]
               for i in range(n)]
        pivots = _eliminate(aug, k + n)
        # the stacked columns are independent, so they all become pivots
        assert list(pivots[:k]) == list(range(k))
        transform = [[row[k + j] for j in range(n)] for row in aug]
        support = [[(j, v) for j, v in enumerate(row) if v] for row in transform]
        self._solver = (support, k)

    def coordinates_mod(self, x: Sequence) -> Vector:
        """Coordinates of x in the full basis (representatives + w-basis)."""
        self._ensure_solver()
        support, k = self._solver
        n = self.space.ambient_dim
        if len(x) != n:
            raise ValueError("ambient dimension mismatch")
        x = [_frac(v) for v in x]
        x_nz = [(j, v) for j, v in enumerate(x) if v]
        coeffs = []
        for row in support:
            s = _ZERO
            if len(row) < len(x_nz):
                for j, tv in row:
                    if x[j]:
                        s += tv * x[j]
            else:
                lookup = dict(row)
                for j, xv in x_nz:
                    tv = lookup.get(j)
                    if tv is not None:
                        s += tv * xv
            coeffs.append(s)
        total = self.space.dim
        for r in range(total, n):
            if coeffs[r]:
                raise ValueError("vector does not lie in the quotient's ambient space")
        return tuple(coeffs[:total])

    def project(self, x: Sequence) -> Vector:
        """Coordinates of the class of x in the representative basis."""
        return self.coordinates_mod(x)[: self.dim]

    def lift(self, coords: Sequence) -> Vector:
        coords = vector(coords)
        if len(coords) != self.dim:
            raise ValueError("coordinate length mismatch")
        n = self.space.ambient_dim
        out = [_ZERO] * n
        for c, rep in zip(coords, self.representatives):
            if c:
                for j in range(n):
                    if rep[j]:
                        out[j] += c * rep[j]
        return tuple(out)

    def __repr__(self) -> str:
        return f"QuotientPresentation(dim {self.dim} = {self.space.dim} - {self.subspace.dim})"


def quotient(v: Subspace, w: Subspace) -> QuotientPresentation:
    """Present v/w; raises ValueError unless w is contained in v."""
    return QuotientPresentation(v, w)


def solve_linear(m: RationalMatrix, rhs: Sequence) -> Vector | None:
    """One solution of m v = rhs (free variables set to zero), or None."""
    rhs = vector(rhs)
    if len(rhs) != m.rows:
        raise ValueError("right hand side length does not match the matrix")
    aug = [list(m.entries[i]) + [rhs[i]] for i in range(m.rows)]
    pivots = _eliminate(aug, m.cols + 1)
    if pivots and pivots[-1] == m.cols:
        return None
    out = [_ZERO] * m.cols
    for r, c in enumerate(pivots):
        out[c] = aug[r][m.cols]
    return tuple(out)


def induced_map(f: RationalMatrix, src: QuotientPresentation,
                dst: QuotientPresentation) -> RationalMatrix:
    """Matrix of the map induced by f on quotient bases.

    Verifies f(src.space) <= dst.space and f(src.subspace) <= dst.subspace
    before projecting; raises ValueError if f does not preserve the pairs.
    """
    if f.cols != src.space.ambient_dim or f.rows != dst.space.ambient_dim:
        raise ValueError("matrix shape does not match the quotient ambients")
    if not dst.space.contains(image_of_subspace(f, src.space)):
        raise ValueError("map does not send source space into destination space")
    if not dst.subspace.contains(image_of_subspace(f, src.subspace)):
        raise ValueError("map does not send source subspace into destination subspace")
    cols = [dst.project(f.apply(rep)) for rep in src.representatives]
    return RationalMatrix.from_columns(cols, rows=dst.dim)
