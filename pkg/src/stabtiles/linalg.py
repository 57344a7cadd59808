"""Exact linear algebra over the rationals.

Everything downstream (Hom spaces, extensions, idempotent splitting, wall
membership) relies on these routines being exact, so no floating point is
used anywhere in this module.  Row reduction is fraction-free: rows are
rescaled to primitive integer vectors and eliminated by cross-multiplication,
which keeps coefficient growth tame at the problem sizes we care about.

All values are immutable; every function is safe for concurrent use.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd
from typing import Iterable, Sequence

Frac = Fraction

__all__ = [
    "Frac",
    "RatMatrix",
    "kernel_basis",
    "solve",
    "FiniteAlgebra",
]


def _as_frac(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


class RatMatrix:
    """Immutable dense matrix of exact rationals, row-major."""

    __slots__ = ("rows", "cols", "_e", "_hash")

    def __init__(self, rows: int, cols: int, entries: Sequence[Fraction]):
        if rows < 0 or cols < 0 or len(entries) != rows * cols:
            raise ValueError("entry count does not match shape")
        self.rows = rows
        self.cols = cols
        self._e = tuple(_as_frac(x) for x in entries)
        self._hash = None

    # -- construction --------------------------------------------------

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence]) -> "RatMatrix":
        r = len(rows)
        c = len(rows[0]) if r else 0
        flat = []
        for row in rows:
            if len(row) != c:
                raise ValueError("ragged rows")
            flat.extend(row)
        return cls(r, c, [_as_frac(x) for x in flat])

    @classmethod
    def zero(cls, rows: int, cols: int) -> "RatMatrix":
        return cls(rows, cols, [Fraction(0)] * (rows * cols))

    @classmethod
    def identity(cls, n: int) -> "RatMatrix":
        e = [Fraction(0)] * (n * n)
        for i in range(n):
            e[i * n + i] = Fraction(1)
        return cls(n, n, e)

    @classmethod
    def column(cls, entries: Sequence) -> "RatMatrix":
        return cls(len(entries), 1, [_as_frac(x) for x in entries])

    # -- access ---------------------------------------------------------

    def __getitem__(self, ij) -> Fraction:
        i, j = ij
        return self._e[i * self.cols + j]

    def row(self, i: int) -> tuple[Fraction, ...]:
        return self._e[i * self.cols : (i + 1) * self.cols]

    def col(self, j: int) -> tuple[Fraction, ...]:
        return tuple(self._e[i * self.cols + j] for i in range(self.rows))

    def entries(self) -> tuple[Fraction, ...]:
        return self._e

    def to_rows(self) -> list[list[Fraction]]:
        return [list(self.row(i)) for i in range(self.rows)]

    @property
    def is_zero(self) -> bool:
        return all(x == 0 for x in self._e)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, RatMatrix)
            and self.rows == other.rows
            and self.cols == other.cols
            and self._e == other._e
        )

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.rows, self.cols, self._e))
        return self._hash

    def __repr__(self):
        body = "; ".join(
            " ".join(str(x) for x in self.row(i)) for i in range(self.rows)
        )
        return f"RatMatrix({self.rows}x{self.cols}: {body})"

    # -- arithmetic -------------------------------------------------------

    def __add__(self, other: "RatMatrix") -> "RatMatrix":
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise ValueError("shape mismatch")
        return RatMatrix(
            self.rows, self.cols, [a + b for a, b in zip(self._e, other._e)]
        )

    def __sub__(self, other: "RatMatrix") -> "RatMatrix":
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise ValueError("shape mismatch")
        return RatMatrix(
            self.rows, self.cols, [a - b for a, b in zip(self._e, other._e)]
        )

    def __neg__(self) -> "RatMatrix":
        return RatMatrix(self.rows, self.cols, [-a for a in self._e])

    def scale(self, c) -> "RatMatrix":
        c = _as_frac(c)
        return RatMatrix(self.rows, self.cols, [c * a for a in self._e])

    def __matmul__(self, other: "RatMatrix") -> "RatMatrix":
        if self.cols != other.rows:
            raise ValueError("shape mismatch in product")
        n, k, m = self.rows, self.cols, other.cols
        a, b = self._e, other._e
        out = [Fraction(0)] * (n * m)
        for i in range(n):
            arow = a[i * k : (i + 1) * k]
            for t in range(k):
                av = arow[t]
                if av == 0:
                    continue
                brow = b[t * m : (t + 1) * m]
                base = i * m
                for j in range(m):
                    bv = brow[j]
                    if bv != 0:
                        out[base + j] += av * bv
        return RatMatrix(n, m, out)

    def transpose(self) -> "RatMatrix":
        return RatMatrix(
            self.cols,
            self.rows,
            [self._e[i * self.cols + j] for j in range(self.cols) for i in range(self.rows)],
        )

    def hstack(self, other: "RatMatrix") -> "RatMatrix":
        if self.rows != other.rows:
            raise ValueError("row mismatch")
        out = []
        for i in range(self.rows):
            out.extend(self.row(i))
            out.extend(other.row(i))
        return RatMatrix(self.rows, self.cols + other.cols, out)

    def vstack(self, other: "RatMatrix") -> "RatMatrix":
        if self.cols != other.cols:
            raise ValueError("column mismatch")
        return RatMatrix(
            self.rows + other.rows, self.cols, list(self._e) + list(other._e)
        )

    def submatrix(self, row_idx: Sequence[int], col_idx: Sequence[int]) -> "RatMatrix":
        out = [self._e[i * self.cols + j] for i in row_idx for j in col_idx]
        return RatMatrix(len(row_idx), len(col_idx), out)

    @classmethod
    def block(cls, grid: Sequence[Sequence["RatMatrix"]]) -> "RatMatrix":
        """Assemble a matrix from a rectangular grid of blocks."""
        rows = []
        for brow in grid:
            height = brow[0].rows
            for i in range(height):
                row: list[Fraction] = []
                for blk in brow:
                    if blk.rows != height:
                        raise ValueError("inconsistent block heights")
                    row.extend(blk.row(i))
                rows.append(row)
        if not rows:
            return cls.zero(0, 0)
        return cls.from_rows(rows)

    # -- elimination ------------------------------------------------------

    @staticmethod
    def _normalize_row(row: list[Fraction]) -> list[Fraction]:
        # Per-row normalization: clear denominators, divide by content.
        den = 1
        for x in row:
            if x != 0:
                den = den * x.denominator // gcd(den, x.denominator)
        ints = [int(x * den) for x in row]
        g = 0
        for v in ints:
            g = gcd(g, abs(v))
        if g > 1:
            ints = [v // g for v in ints]
        return [Fraction(v) for v in ints]

    def _echelon(self) -> tuple[list[list[Fraction]], list[int]]:
        """Reduced echelon rows (pivots scaled to 1) and pivot columns."""
        rows = [self._normalize_row(list(self.row(i))) for i in range(self.rows)]
        pivots: list[int] = []
        r = 0
        for c in range(self.cols):
            pivot = None
            for i in range(r, len(rows)):
                if rows[i][c] != 0:
                    pivot = i
                    break
            if pivot is None:
                continue
            rows[r], rows[pivot] = rows[pivot], rows[r]
            p = rows[r][c]
            for i in range(len(rows)):
                if i == r or rows[i][c] == 0:
                    continue
                q = rows[i][c]
                # Fraction-free cross-multiplication step.
                rows[i] = [p * a - q * b for a, b in zip(rows[i], rows[r])]
                rows[i] = self._normalize_row(rows[i])
            pivots.append(c)
            r += 1
            if r == len(rows):
                break
        # Scale pivot rows so back-substitution reads off directly.
        for k, c in enumerate(pivots):
            p = rows[k][c]
            if p != 1:
                rows[k] = [a / p for a in rows[k]]
        return rows, pivots

    def rref(self) -> tuple["RatMatrix", tuple[int, ...]]:
        rows, pivots = self._echelon()
        return RatMatrix.from_rows(rows) if rows else RatMatrix.zero(0, self.cols), tuple(pivots)

    def rank(self) -> int:
        return len(self._echelon()[1])

    def kernel_basis(self) -> list[tuple[Fraction, ...]]:
        """Basis of the right kernel, one column vector per free column."""
        rows, pivots = self._echelon()
        pivot_set = set(pivots)
        free = [j for j in range(self.cols) if j not in pivot_set]
        basis = []
        for f in free:
            v = [Fraction(0)] * self.cols
            v[f] = Fraction(1)
            for k, c in enumerate(pivots):
                v[c] = -rows[k][f]
            basis.append(tuple(v))
        return basis

    def solve(self, b: Sequence) -> tuple[Fraction, ...] | None:
        """One exact solution of self @ x = b, or None when inconsistent."""
        b = [_as_frac(x) for x in b]
        if len(b) != self.rows:
            raise UsageErrorFromLinalg("right-hand side length does not match rows")
        aug = RatMatrix(
            self.rows,
            self.cols + 1,
            [x for i in range(self.rows) for x in (*self.row(i), b[i])],
        )
        rows, pivots = aug._echelon()
        for k, c in enumerate(pivots):
            if c == self.cols:
                return None
        x = [Fraction(0)] * self.cols
        for k, c in enumerate(pivots):
            x[c] = rows[k][self.cols]
        return tuple(x)

    def solve_matrix(self, b: "RatMatrix") -> "RatMatrix | None":
        """Solve self @ X = b columnwise; None when any column fails."""
        cols = []
        for j in range(b.cols):
            x = self.solve(b.col(j))
            if x is None:
                return None
            cols.append(x)
        return RatMatrix(
            self.cols, b.cols, [cols[j][i] for i in range(self.cols) for j in range(b.cols)]
        )

    def inverse(self) -> "RatMatrix | None":
        if self.rows != self.cols:
            return None
        inv = self.solve_matrix(RatMatrix.identity(self.rows))
        return inv

    def det(self) -> Fraction:
        if self.rows != self.cols:
            raise ValueError("determinant of non-square matrix")
        n = self.rows
        rows = [list(self.row(i)) for i in range(n)]
        det = Fraction(1)
        for c in range(n):
            pivot = None
            for i in range(c, n):
                if rows[i][c] != 0:
                    pivot = i
                    break
            if pivot is None:
                return Fraction(0)
            if pivot != c:
                rows[c], rows[pivot] = rows[pivot], rows[c]
                det = -det
            p = rows[c][c]
            det *= p
            for i in range(c + 1, n):
                if rows[i][c] != 0:
                    f = rows[i][c] / p
                    rows[i] = [a - f * b for a, b in zip(rows[i], rows[c])]
        return det

    def column_space_basis(self) -> list[int]:
        """Indices of a maximal independent set of columns."""
        return list(self._echelon()[1])


class UsageErrorFromLinalg(ValueError):
    """Dimension mismatch in a linalg entry point (wrapped by callers)."""


def kernel_basis(m: RatMatrix) -> list[tuple[Fraction, ...]]:
    """Column vectors spanning ker(m); count equals cols - rank."""
    return m.kernel_basis()


def solve(m: RatMatrix, b: Sequence) -> tuple[Fraction, ...] | None:
    """Exact solution of m x = b, or None when none exists."""
    return m.solve(b)


def span_contains(span_rows: list[list[Fraction]], vector: Sequence[Fraction]) -> bool:
    """Membership of `vector` in the row span (both over the rationals)."""
    if not span_rows:
        return all(x == 0 for x in vector)
    m = RatMatrix.from_rows(span_rows).transpose()
    return m.solve(vector) is not None


class FiniteAlgebra:
    """A finite-dimensional unital algebra over the rationals, given by a
    multiplication table on a basis.

    Used for endomorphism algebras: the radical is computed as the radical of
    the trace form (valid in characteristic zero), and nontrivial idempotents
    are lifted from the semisimple quotient when one exists.
    """

    def __init__(self, dim: int, mul, unit: Sequence[Fraction]):
        """`mul(i, j)` returns the coordinate vector of b_i * b_j."""
        self.dim = dim
        self.unit = tuple(_as_frac(x) for x in unit)
        self._table = [[tuple(_as_frac(x) for x in mul(i, j)) for j in range(dim)] for i in range(dim)]

    def multiply(self, x: Sequence[Fraction], y: Sequence[Fraction]) -> tuple[Fraction, ...]:
        out = [Fraction(0)] * self.dim
        for i, xi in enumerate(x):
            if xi == 0:
                continue
            for j, yj in enumerate(y):
                if yj == 0:
                    continue
                c = xi * yj
                for k, t in enumerate(self._table[i][j]):
                    if t != 0:
                        out[k] += c * t
        return tuple(out)

    def left_mult_matrix(self, x: Sequence[Fraction]) -> RatMatrix:
        cols = [self.multiply(x, tuple(Fraction(1) if t == j else Fraction(0) for t in range(self.dim))) for j in range(self.dim)]
        return RatMatrix(
            self.dim, self.dim, [cols[j][i] for i in range(self.dim) for j in range(self.dim)]
        )

    def radical_basis(self) -> list[tuple[Fraction, ...]]:
        """Basis of the Jacobson radical via the trace-form kernel."""
        basis = [tuple(Fraction(1) if t == j else Fraction(0) for t in range(self.dim)) for j in range(self.dim)]
        lmats = [self.left_mult_matrix(b) for b in basis]
        gram = []
        for i in range(self.dim):
            row = []
            for j in range(self.dim):
                prod = lmats[i] @ lmats[j]
                row.append(sum(prod[(k, k)] for k in range(self.dim)))
            gram.append(row)
        return RatMatrix.from_rows(gram).kernel_basis()

    def minimal_polynomial(self, x: Sequence[Fraction]) -> list[Fraction]:
        """Coefficients c_0..c_d of the monic minimal polynomial of x."""
        powers = [self.unit]
        cur = self.unit
        for _ in range(self.dim + 1):
            cur = self.multiply(cur, x)
            powers.append(cur)
        # First linear dependency among 1, x, x^2, ...
        for d in range(1, self.dim + 2):
            m = RatMatrix(
                self.dim, d, [powers[j][i] for i in range(self.dim) for j in range(d)]
            )
            sol = m.solve([-c for c in powers[d]])
            if sol is not None:
                return [*sol, Fraction(1)]
        raise AssertionError("no minimal polynomial found below algebra dimension")
