"""Bound quiver algebras and their finite-dimensional representations.

A path is stored as ``(source_vertex, (arrow, arrow, ...))`` with the
first-traversed arrow first; the relation "vc = 0" on the two-cycle quiver is
therefore the single path ``[c, v]``.  The base field is the rationals: both
built-in examples have split endomorphism rings over Q, and exactness is what
makes isomorphism testing and idempotent splitting decidable.  Situations
where the field does matter raise :class:`NonSplitEndomorphismField` instead
of silently misclassifying.

All values are immutable once constructed; operations are pure.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from fractions import Fraction

from .errors import (
    NonAdmissible,
    NonSplitEndomorphismField,
    NotNilpotent,
    ResolutionTooLong,
    UsageError,
)
from .linalg import FiniteAlgebra, Frac, RatMatrix

DEFAULT_SEED = 7_2490
GRID = (-2, -1, 0, 1, 2)

Path = tuple[int, tuple[int, ...]]  # (source vertex, arrow indices)


@dataclass(frozen=True)
class Arrow:
    name: str
    source: int
    target: int


@dataclass(frozen=True)
class AtLeast:
    """Lower bound returned when a computation hits its depth limit."""

    bound: int


class BoundQuiverAlgebra:
    """A quiver with admissible relations, together with a basis of the
    quotient of its path space computed degree by degree up to ``nil_bound``.
    """

    def __init__(
        self,
        vertices: tuple[str, ...],
        arrows: tuple[Arrow, ...],
        relations: tuple[tuple[tuple[Fraction, tuple[int, ...]], ...], ...] = (),
        nil_bound: int = 8,
    ):
        self.vertices = tuple(vertices)
        self.arrows = tuple(arrows)
        self.relations = tuple(
            tuple((Frac(c), tuple(p)) for c, p in rel) for rel in relations
        )
        self.nil_bound = int(nil_bound)
        if self.nil_bound < 1:
            raise UsageError("nil_bound must be >= 1")
        self._check_admissible()
        self._build_basis()
        self._projective_cache: dict[int, tuple["Representation", list[Path]]] = {}

    # -- structure ----------------------------------------------------------

    @property
    def n_vertices(self) -> int:
        return len(self.vertices)

    def path_target(self, path: Path) -> int:
        v = path[0]
        for a in path[1]:
            if self.arrows[a].source != v:
                raise UsageError(f"path does not compose at arrow {self.arrows[a].name}")
            v = self.arrows[a].target
        return v

    def _check_admissible(self):
        names = [a.name for a in self.arrows]
        if len(set(names)) != len(names):
            raise NonAdmissible("duplicate arrow names")
        for rel in self.relations:
            if not rel:
                raise NonAdmissible("empty relation")
            sig = None
            for coeff, arrows in rel:
                if len(arrows) < 2:
                    raise NonAdmissible("relation contains a path of length < 2")
                src = self.arrows[arrows[0]].source
                tgt = self.path_target((src, arrows))
                if sig is None:
                    sig = (src, tgt)
                elif sig != (src, tgt):
                    raise NonAdmissible("relation mixes non-parallel paths")

    # -- basis of the quotient algebra ---------------------------------------

    def _build_basis(self):
        n = self.nil_bound
        by_source: dict[int, list[list[tuple[int, ...]]]] = {
            v: [[()]] for v in range(self.n_vertices)
        }
        out_arrows: dict[int, list[int]] = {v: [] for v in range(self.n_vertices)}
        for i, a in enumerate(self.arrows):
            out_arrows[a.source].append(i)
        # All paths of length <= nil_bound, generated degree by degree.
        for d in range(1, n + 1):
            for v in range(self.n_vertices):
                new: list[tuple[int, ...]] = []
                for p in by_source[v][d - 1]:
                    tail = self.path_target((v, p))
                    for a in out_arrows[tail]:
                        new.append(p + (a,))
                by_source[v].append(new)

        blocks: dict[tuple[int, int], list[Path]] = {}
        for v in range(self.n_vertices):
            for d in range(n + 1):
                for p in by_source[v][d]:
                    path = (v, p)
                    blocks.setdefault((v, self.path_target(path)), []).append(path)

        # Ideal span per block: sandwiches p * relation * q, truncated at the
        # nilpotency bound.
        ideal_rows: dict[tuple[int, int], list[list[Fraction]]] = {
            key: [] for key in blocks
        }
        index_in_block = {
            key: {path: i for i, path in enumerate(paths)} for key, paths in blocks.items()
        }
        for rel in self.relations:
            rel_src = self.arrows[rel[0][1][0]].source
            rel_tgt = self.path_target((rel_src, rel[0][1]))
            min_len = min(len(p) for _, p in rel)
            for v in range(self.n_vertices):
                for dl in range(n - min_len + 1):
                    for left in by_source[v][dl]:
                        if self.path_target((v, left)) != rel_src:
                            continue
                        for dr in range(n - min_len - dl + 1):
                            for right in by_source[rel_tgt][dr]:
                                key = (v, self.path_target((rel_tgt, right)))
                                vec = [Frac(0)] * len(blocks[key])
                                nonzero = False
                                for coeff, mid in rel:
                                    full = (v, left + mid + right)
                                    if len(full[1]) > n:
                                        continue  # beyond the bound: already ideal
                                    vec[index_in_block[key][full]] += coeff
                                    nonzero = True
                                if nonzero:
                                    ideal_rows[key].append(vec)

        # Per block: echelonize the ideal, check nilpotency, pick the basis
        # greedily among paths of length < nil_bound.
        self._block_paths = blocks
        self._block_basis: dict[tuple[int, int], list[Path]] = {}
        self._block_solver: dict[tuple[int, int], tuple[RatMatrix, list[int]]] = {}
        basis: list[Path] = []
        for key in sorted(blocks):
            paths = blocks[key]
            rows = ideal_rows[key]
            span = RatMatrix.from_rows(rows) if rows else RatMatrix.zero(0, len(paths))
            ech, pivots = span.rref()
            pivot_set = set(pivots)
            # Nilpotency: every path of full length must lie in the ideal.
            for i, path in enumerate(paths):
                if len(path[1]) == n:
                    unit = [Frac(0)] * len(paths)
                    unit[i] = Frac(1)
                    if not _in_row_span(ech, pivots, unit):
                        raise NotNilpotent(
                            f"path of length {n} survives the relation ideal: "
                            + self.path_name(path)
                        )
            chosen: list[int] = []
            work_rows = ech.to_rows() if ech.rows else []
            work_pivots = list(pivots)
            for i, path in enumerate(paths):
                if len(path[1]) >= n:
                    continue
                unit = [Frac(0)] * len(paths)
                unit[i] = Frac(1)
                reduced = _reduce_vector(work_rows, work_pivots, unit)
                if any(x != 0 for x in reduced):
                    chosen.append(i)
                    lead = next(j for j, x in enumerate(reduced) if x != 0)
                    work_rows.append([x / reduced[lead] for x in reduced])
                    work_pivots.append(lead)
            self._block_basis[key] = [paths[i] for i in chosen]
            basis.extend(paths[i] for i in chosen)
            # Solver for expressing arbitrary paths in the chosen basis:
            # columns are ideal generators followed by basis path units.
            cols: list[list[Fraction]] = [list(r) for r in rows]
            for i in chosen:
                unit = [Frac(0)] * len(paths)
                unit[i] = Frac(1)
                cols.append(unit)
            mat = (
                RatMatrix.from_rows(cols).transpose()
                if cols
                else RatMatrix.zero(len(paths), 0)
            )
            self._block_solver[key] = (mat, chosen)

        self.basis = tuple(basis)
        self.dimension = len(basis)

    def path_name(self, path: Path) -> str:
        if not path[1]:
            return f"e_{self.vertices[path[0]]}"
        return "*".join(self.arrows[a].name for a in path[1])

    def basis_paths(self, source: int, target: int) -> list[Path]:
        return list(self._block_basis.get((source, target), []))

    def path_coords(self, path: Path) -> dict[Path, Fraction]:
        """Coordinates of a path's class in the chosen quotient basis."""
        if len(path[1]) >= self.nil_bound:
            return {}
        key = (path[0], self.path_target(path))
        paths = self._block_paths[key]
        unit = [Frac(0)] * len(paths)
        unit[paths.index(path)] = Frac(1)
        mat, chosen = self._block_solver[key]
        sol = mat.solve(unit)
        if sol is None:
            raise AssertionError("path not expressible: ideal span incomplete")
        n_ideal = mat.cols - len(chosen)
        out = {}
        for k, i in enumerate(chosen):
            c = sol[n_ideal + k]
            if c != 0:
                out[paths[i]] = c
        return out

    # -- canonical modules ----------------------------------------------------

    def simple(self, vertex: int) -> "Representation":
        dims = tuple(1 if v == vertex else 0 for v in range(self.n_vertices))
        maps = []
        for a in self.arrows:
            maps.append(RatMatrix.zero(dims[a.target], dims[a.source]))
        return Representation(self, dims, tuple(maps))

    def projective(self, vertex: int) -> "Representation":
        return self.projective_with_paths(vertex)[0]

    def projective_with_paths(self, vertex: int) -> tuple["Representation", list[Path]]:
        """The projective at ``vertex`` together with its path basis, ordered
        vertex block by vertex block."""
        if vertex in self._projective_cache:
            return self._projective_cache[vertex]
        path_basis: list[Path] = []
        offsets: dict[int, int] = {}
        for w in range(self.n_vertices):
            offsets[w] = len(path_basis)
            path_basis.extend(self.basis_paths(vertex, w))
        dims = tuple(
            len(self.basis_paths(vertex, w)) for w in range(self.n_vertices)
        )
        position = {p: i for i, p in enumerate(path_basis)}
        maps = []
        for ai, a in enumerate(self.arrows):
            mat = [
                [Frac(0)] * dims[a.source] for _ in range(dims[a.target])
            ]
            for col, p in enumerate(self.basis_paths(vertex, a.source)):
                extended = (vertex, p[1] + (ai,))
                for q, coeff in self.path_coords(extended).items():
                    row = position[q] - offsets[a.target]
                    mat[row][col] = coeff
            maps.append(
                RatMatrix.from_rows(mat)
                if dims[a.target] and dims[a.source]
                else RatMatrix.zero(dims[a.target], dims[a.source])
            )
        rep = Representation(self, dims, tuple(maps))
        self._projective_cache[vertex] = (rep, path_basis)
        return rep, path_basis

    def cartan_matrix(self) -> RatMatrix:
        """Columns are the dimension vectors of the projectives."""
        cols = [self.projective(v).dims for v in range(self.n_vertices)]
        n = self.n_vertices
        return RatMatrix(n, n, [Frac(cols[j][i]) for i in range(n) for j in range(n)])


def _in_row_span(ech: RatMatrix, pivots, vector) -> bool:
    rows = ech.to_rows() if ech.rows else []
    red = _reduce_vector(rows, list(pivots), list(vector))
    return all(x == 0 for x in red)


def _reduce_vector(rows, pivots, vector):
    v = list(vector)
    for row, p in zip(rows, pivots):
        if v[p] != 0:
            c = v[p] / row[p]
            v = [a - c * b for a, b in zip(v, row)]
    return v


class Representation:
    """A finite-dimensional module: one space per vertex, one exact-rational
    matrix per arrow, with all relations checked at construction."""

    __slots__ = ("algebra", "dims", "maps", "_hash")

    def __init__(self, algebra: BoundQuiverAlgebra, dims, maps):
        self.algebra = algebra
        self.dims = tuple(int(d) for d in dims)
        self.maps = tuple(maps)
        self._hash = None
        if len(self.dims) != algebra.n_vertices or len(self.maps) != len(algebra.arrows):
            raise UsageError("dimension or map count does not match the quiver")
        if any(d < 0 for d in self.dims):
            raise UsageError("negative dimension")
        for a, m in zip(algebra.arrows, self.maps):
            if (m.rows, m.cols) != (self.dims[a.target], self.dims[a.source]):
                raise UsageError(f"map for arrow {a.name} has the wrong shape")
        for rel in algebra.relations:
            acc = None
            for coeff, arrows in rel:
                src = algebra.arrows[arrows[0]].source
                term = self.act((src, arrows)).scale(coeff)
                acc = term if acc is None else acc + term
            if acc is not None and not acc.is_zero:
                raise UsageError("a relation does not act by zero")

    @property
    def total_dim(self) -> int:
        return sum(self.dims)

    def act(self, path: Path) -> RatMatrix:
        """Matrix of the path action (first-traversed arrow applied first)."""
        v = path[0]
        m = RatMatrix.identity(self.dims[v])
        for a in path[1]:
            m = self.maps[a] @ m
            v = self.algebra.arrows[a].target
        return m

    def __eq__(self, other):
        return (
            isinstance(other, Representation)
            and self.algebra is other.algebra
            and self.dims == other.dims
            and self.maps == other.maps
        )

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((id(self.algebra), self.dims, self.maps))
        return self._hash

    def __repr__(self):
        return f"Representation(dims={self.dims})"


@dataclass(frozen=True)
class ModuleMap:
    """A family of linear maps commuting with all arrow actions."""

    source: Representation
    target: Representation
    blocks: tuple[RatMatrix, ...]

    def __matmul__(self, other: "ModuleMap") -> "ModuleMap":
        return ModuleMap(
            other.source,
            self.target,
            tuple(a @ b for a, b in zip(self.blocks, other.blocks)),
        )

    def __add__(self, other: "ModuleMap") -> "ModuleMap":
        return ModuleMap(
            self.source, self.target, tuple(a + b for a, b in zip(self.blocks, other.blocks))
        )

    def __sub__(self, other: "ModuleMap") -> "ModuleMap":
        return ModuleMap(
            self.source, self.target, tuple(a - b for a, b in zip(self.blocks, other.blocks))
        )

    def scale(self, c) -> "ModuleMap":
        return ModuleMap(self.source, self.target, tuple(b.scale(c) for b in self.blocks))

    @property
    def is_zero(self) -> bool:
        return all(b.is_zero for b in self.blocks)

    def flatten(self) -> tuple[Fraction, ...]:
        out: list[Fraction] = []
        for b in self.blocks:
            out.extend(b.entries())
        return tuple(out)

    @classmethod
    def zero(cls, source: Representation, target: Representation) -> "ModuleMap":
        return cls(
            source,
            target,
            tuple(
                RatMatrix.zero(td, sd) for td, sd in zip(target.dims, source.dims)
            ),
        )

    @classmethod
    def identity(cls, rep: Representation) -> "ModuleMap":
        return cls(rep, rep, tuple(RatMatrix.identity(d) for d in rep.dims))

    def check(self) -> None:
        for a, arr in enumerate(self.source.algebra.arrows):
            left = self.blocks[arr.target] @ self.source.maps[a]
            right = self.target.maps[a] @ self.blocks[arr.source]
            if left != right:
                raise UsageError(f"map does not intertwine arrow {arr.name}")


def hom_modules(m: Representation, n: Representation) -> list[ModuleMap]:
    """Basis of the space of module maps m -> n."""
    if m.algebra is not n.algebra:
        raise UsageError("representations live over different algebras")
    alg = m.algebra
    offsets = []
    total = 0
    for v in range(alg.n_vertices):
        offsets.append(total)
        total += n.dims[v] * m.dims[v]
    rows: list[list[Fraction]] = []
    for a, arr in enumerate(alg.arrows):
        s, t = arr.source, arr.target
        ma, na = m.maps[a], n.maps[a]
        # (f_t @ m_a - n_a @ f_s)[p, q] = 0
        for p in range(n.dims[t]):
            for q in range(m.dims[s]):
                row = [Frac(0)] * total
                for r in range(m.dims[t]):
                    row[offsets[t] + p * m.dims[t] + r] += ma[(r, q)]
                for r in range(n.dims[s]):
                    row[offsets[s] + r * m.dims[s] + q] -= na[(p, r)]
                if any(x != 0 for x in row):
                    rows.append(row)
    mat = RatMatrix.from_rows(rows) if rows else RatMatrix.zero(0, total)
    basis = []
    for vec in mat.kernel_basis():
        blocks = []
        for v in range(alg.n_vertices):
            o = offsets[v]
            blocks.append(
                RatMatrix(n.dims[v], m.dims[v], vec[o : o + n.dims[v] * m.dims[v]])
            )
        basis.append(ModuleMap(m, n, tuple(blocks)))
    return basis


def hom_dim_modules(m: Representation, n: Representation) -> int:
    return len(hom_modules(m, n))


def kernel_of(f: ModuleMap) -> tuple[Representation, ModuleMap]:
    """The kernel subrepresentation and its embedding."""
    alg = f.source.algebra
    embeds = []
    dims = []
    for v in range(alg.n_vertices):
        vecs = f.blocks[v].kernel_basis()
        dims.append(len(vecs))
        embeds.append(
            RatMatrix(
                f.source.dims[v],
                len(vecs),
                [vecs[j][i] for i in range(f.source.dims[v]) for j in range(len(vecs))],
            )
        )
    maps = []
    for a, arr in enumerate(alg.arrows):
        image = f.source.maps[a] @ embeds[arr.source]
        sol = embeds[arr.target].solve_matrix(image)
        if sol is None:
            raise AssertionError("kernel not arrow-stable")
        maps.append(sol)
    rep = Representation(alg, tuple(dims), tuple(maps))
    return rep, ModuleMap(rep, f.source, tuple(embeds))


def image_of(f: ModuleMap) -> tuple[Representation, ModuleMap]:
    """The image subrepresentation of the target and its embedding."""
    alg = f.source.algebra
    embeds = []
    dims = []
    for v in range(alg.n_vertices):
        pivots = f.blocks[v].column_space_basis()
        dims.append(len(pivots))
        cols = [f.blocks[v].col(j) for j in pivots]
        embeds.append(
            RatMatrix(
                f.target.dims[v],
                len(pivots),
                [cols[j][i] for i in range(f.target.dims[v]) for j in range(len(pivots))],
            )
        )
    maps = []
    for a, arr in enumerate(alg.arrows):
        image = f.target.maps[a] @ embeds[arr.source]
        sol = embeds[arr.target].solve_matrix(image)
        if sol is None:
            raise AssertionError("image not arrow-stable")
        maps.append(sol)
    rep = Representation(alg, tuple(dims), tuple(maps))
    return rep, ModuleMap(rep, f.target, tuple(embeds))


def direct_sum_reps(reps: list[Representation]) -> Representation:
    alg = reps[0].algebra
    dims = tuple(sum(r.dims[v] for r in reps) for v in range(alg.n_vertices))
    maps = []
    for a, arr in enumerate(alg.arrows):
        rows = dims[arr.target]
        cols = dims[arr.source]
        entries = [[Frac(0)] * cols for _ in range(rows)]
        ro = co = 0
        for r in reps:
            blk = r.maps[a]
            for i in range(blk.rows):
                for j in range(blk.cols):
                    entries[ro + i][co + j] = blk[(i, j)]
            ro += r.dims[arr.target]
            co += r.dims[arr.source]
        maps.append(
            RatMatrix.from_rows(entries) if rows else RatMatrix.zero(rows, cols)
        )
    return Representation(alg, dims, tuple(maps))


def radical_embedding(m: Representation) -> list[RatMatrix]:
    """Per-vertex basis matrices of rad(m) = sum of arrow images."""
    alg = m.algebra
    out = []
    for v in range(alg.n_vertices):
        incoming = [m.maps[a] for a, arr in enumerate(alg.arrows) if arr.target == v]
        if not incoming or m.dims[v] == 0:
            out.append(RatMatrix.zero(m.dims[v], 0))
            continue
        stacked = incoming[0]
        for extra in incoming[1:]:
            stacked = stacked.hstack(extra)
        pivots = stacked.column_space_basis()
        cols = [stacked.col(j) for j in pivots]
        out.append(
            RatMatrix(
                m.dims[v],
                len(pivots),
                [cols[j][i] for i in range(m.dims[v]) for j in range(len(pivots))],
            )
        )
    return out


def projective_cover(m: Representation) -> tuple[Representation, list[int], ModuleMap]:
    """Projective cover P -> m.

    Returns the cover, its summand list (vertex indices, with multiplicity),
    and the covering map, which is surjective with superfluous kernel.
    """
    alg = m.algebra
    rad = radical_embedding(m)
    summands: list[int] = []
    generators: list[tuple[int, tuple[Fraction, ...]]] = []
    for v in range(alg.n_vertices):
        # Columns of rad[v] span the radical; extend to a basis by unit vectors.
        cols = [tuple(rad[v].col(j)) for j in range(rad[v].cols)]
        rows = [list(c) for c in cols]
        pivots: list[int] = []
        work: list[list[Fraction]] = []
        for c in rows:
            red = _reduce_vector(work, pivots, c)
            lead = next((j for j, x in enumerate(red) if x != 0), None)
            if lead is not None:
                work.append([x / red[lead] for x in red])
                pivots.append(lead)
        for j in range(m.dims[v]):
            unit = [Frac(0)] * m.dims[v]
            unit[j] = Frac(1)
            red = _reduce_vector(work, pivots, unit)
            lead = next((k for k, x in enumerate(red) if x != 0), None)
            if lead is not None:
                work.append([x / red[lead] for x in red])
                pivots.append(lead)
                summands.append(v)
                generators.append((v, tuple(unit)))
    if not summands:
        zero = Representation(
            alg,
            tuple(0 for _ in range(alg.n_vertices)),
            tuple(RatMatrix.zero(0, 0) for _ in alg.arrows),
        )
        return zero, [], ModuleMap.zero(zero, m)
    cover = direct_sum_reps([alg.projective(v) for v in summands])
    # Column blocks of the cover map: each summand sends its path basis
    # element p to (action of p) applied to the chosen generator.
    blocks = [
        [[Frac(0)] * cover.dims[w] for _ in range(m.dims[w])]
        for w in range(alg.n_vertices)
    ]
    offset = {w: 0 for w in range(alg.n_vertices)}
    for (v, gen) in generators:
        _, paths = alg.projective_with_paths(v)
        for p in paths:
            w = alg.path_target(p)
            vec = m.act(p) @ RatMatrix.column(gen)
            col = offset[w]
            for i in range(m.dims[w]):
                blocks[w][i][col] = vec[(i, 0)]
            offset[w] += 1
    mats = tuple(
        RatMatrix.from_rows(blocks[w])
        if m.dims[w]
        else RatMatrix.zero(m.dims[w], cover.dims[w])
        for w in range(alg.n_vertices)
    )
    cm = ModuleMap(cover, m, mats)
    for v in range(alg.n_vertices):
        if m.dims[v] and cm.blocks[v].rank() != m.dims[v]:
            raise AssertionError("projective cover is not surjective")
    return cover, summands, cm


def global_dimension(alg: BoundQuiverAlgebra, bound: int = 8) -> int | AtLeast:
    """Length of the longest minimal projective resolution of a simple."""
    if bound < 1:
        raise UsageError("bound must be >= 1")
    best = 0
    for v in range(alg.n_vertices):
        m = alg.simple(v)
        depth = 0
        while m.total_dim > 0:
            _, _, cm = projective_cover(m)
            m, _ = kernel_of(cm)
            if m.total_dim == 0:
                break
            depth += 1
            if depth > bound:
                return AtLeast(bound)
        best = max(best, depth)
    return best


# -- Krull-Schmidt ------------------------------------------------------------


def _end_algebra(basis: list[ModuleMap]) -> tuple[FiniteAlgebra, RatMatrix]:
    flat = [b.flatten() for b in basis]
    mat = RatMatrix(
        len(flat[0]), len(flat), [flat[j][i] for i in range(len(flat[0])) for j in range(len(flat))]
    )
    coords_cache: dict[tuple, tuple] = {}

    def coords(f: ModuleMap):
        key = f.flatten()
        if key not in coords_cache:
            sol = mat.solve(key)
            if sol is None:
                raise AssertionError("endomorphism outside its own span")
            coords_cache[key] = sol
        return coords_cache[key]

    ident = coords(ModuleMap.identity(basis[0].source))
    table = {}
    for i, bi in enumerate(basis):
        for j, bj in enumerate(basis):
            table[(i, j)] = coords(bi @ bj)
    return FiniteAlgebra(len(basis), lambda i, j: table[(i, j)], ident), mat


def _combine(basis: list[ModuleMap], coeffs) -> ModuleMap:
    out = None
    for c, b in zip(coeffs, basis):
        if c == 0:
            continue
        t = b.scale(c)
        out = t if out is None else out + t
    return out if out is not None else basis[0].scale(0)


def _fitting_candidates(basis: list[ModuleMap], seed: int):
    for b in basis:
        yield b
    for i in range(len(basis)):
        for j in range(i + 1, len(basis)):
            yield basis[i] + basis[j]
            yield basis[i] - basis[j]
    rng = random.Random(seed)
    for _ in range(16):
        yield _combine(basis, [rng.randint(-3, 3) for _ in basis])
    head = basis[: min(3, len(basis))]
    for coeffs in itertools.product(GRID, repeat=len(head)):
        if any(coeffs):
            yield _combine(head, coeffs)


def _fitting_split(m: Representation, x: ModuleMap):
    """Split m = ker(x^N) + im(x^N) when x is neither nilpotent nor invertible."""
    power = x
    for _ in range(max(1, m.total_dim).bit_length() + 1):
        power = power @ power
    k_rep, _ = kernel_of(power)
    if k_rep.total_dim == 0 or k_rep.total_dim == m.total_dim:
        return None
    i_rep, _ = image_of(power)
    if k_rep.total_dim + i_rep.total_dim != m.total_dim:
        return None
    return [k_rep, i_rep]


def _factor_minpoly(coeffs: list[Fraction]):
    """Distinct monic irreducible factors of a rational polynomial."""
    import sympy

    x = sympy.symbols("x")
    poly = sympy.Poly(list(reversed([sympy.Rational(c.numerator, c.denominator) for c in coeffs])), x, domain="QQ")
    _, factors = poly.factor_list()
    out = []
    for f, _mult in factors:
        fc = [Frac(int(c.numerator), int(c.denominator)) for c in reversed(f.all_coeffs())]
        lead = fc[-1]
        out.append([c / lead for c in fc])
    return out


def _poly_eval_in_algebra(alg: FiniteAlgebra, coeffs, z):
    acc = tuple(Frac(0) for _ in range(alg.dim))
    power = alg.unit
    for c in coeffs:
        if c != 0:
            acc = tuple(a + c * p for a, p in zip(acc, power))
        power = alg.multiply(power, z)
    return acc


def _poly_mul(a, b):
    out = [Frac(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] += x * y
    return out


def _poly_divmod(a, b):
    a = list(a)
    q = [Frac(0)] * max(1, len(a) - len(b) + 1)
    while len(a) >= len(b) and any(x != 0 for x in a):
        if a[-1] == 0:
            a.pop()
            continue
        shift = len(a) - len(b)
        c = a[-1] / b[-1]
        q[shift] += c
        for i, x in enumerate(b):
            a[shift + i] -= c * x
        a.pop()
    while len(a) > 1 and a[-1] == 0:
        a.pop()
    return q, a


def _poly_gcdex(a, b):
    """(g, u, v) with u*a + v*b = g, all rational polynomials."""
    r0, r1 = list(a), list(b)
    s0, s1 = [Frac(1)], [Frac(0)]
    t0, t1 = [Frac(0)], [Frac(1)]
    while any(x != 0 for x in r1):
        q, r = _poly_divmod(r0, r1)
        r0, r1 = r1, r
        s0, s1 = s1, _poly_sub(s0, _poly_mul(q, s1))
        t0, t1 = t1, _poly_sub(t0, _poly_mul(q, t1))
    lead = r0[-1]
    return [c / lead for c in r0], [c / lead for c in s0], [c / lead for c in t0]


def _poly_sub(a, b):
    n = max(len(a), len(b))
    a = a + [Frac(0)] * (n - len(a))
    b = b + [Frac(0)] * (n - len(b))
    return [x - y for x, y in zip(a, b)]


def _semisimple_idempotent(alg: FiniteAlgebra, rad_vectors, seed: int):
    """A nontrivial idempotent of alg/rad, or None when it is a division
    algebra (in which case callers raise NonSplitEndomorphismField)."""
    n = alg.dim
    rad_rows = [list(v) for v in rad_vectors]
    pivots: list[int] = []
    work: list[list[Fraction]] = []
    for r in rad_rows:
        red = _reduce_vector(work, pivots, r)
        lead = next((j for j, x in enumerate(red) if x != 0), None)
        if lead is not None:
            work.append([x / red[lead] for x in red])
            pivots.append(lead)

    def mod_rad(vec):
        return tuple(_reduce_vector(work, pivots, list(vec)))

    candidates = []
    units = [tuple(Frac(1) if t == j else Frac(0) for t in range(n)) for j in range(n)]
    candidates.extend(units)
    for i in range(n):
        for j in range(i + 1, n):
            candidates.append(tuple(a + b for a, b in zip(units[i], units[j])))
            candidates.append(alg.multiply(units[i], units[j]))
    rng = random.Random(seed)
    for _ in range(24):
        candidates.append(tuple(Frac(rng.randint(-3, 3)) for _ in range(n)))
    for z in candidates:
        if all(x == 0 for x in mod_rad(z)):
            continue
        mu = alg.minimal_polynomial(z)
        factors = _factor_minpoly(mu)
        if len(factors) < 2:
            continue
        f1 = factors[0]
        rest = [Frac(1)]
        for f in factors[1:]:
            rest = _poly_mul(rest, f)
        g, u, v = _poly_gcdex(f1, rest)
        if len(g) != 1:
            continue  # shared factor: not coprime, try another element
        e = _poly_eval_in_algebra(alg, _poly_mul(v, rest), z)
        if all(x == 0 for x in mod_rad(e)):
            continue
        one_minus = tuple(a - b for a, b in zip(alg.unit, e))
        if all(x == 0 for x in mod_rad(one_minus)):
            continue
        # Newton lift to an exact idempotent modulo the nilpotent radical.
        for _ in range(12):
            e2 = alg.multiply(e, e)
            if e2 == e:
                break
            e3 = alg.multiply(e2, e)
            e = tuple(3 * a - 2 * b for a, b in zip(e2, e3))
        return e
    return None


def decompose(m: Representation, *, seed: int = DEFAULT_SEED) -> list[Representation]:
    """Indecomposable summands of m (Krull-Schmidt at desk scale)."""
    if m.total_dim == 0:
        return []
    end = hom_modules(m, m)
    if len(end) == 1:
        return [m]
    for x in _fitting_candidates(end, seed):
        parts = _fitting_split(m, x)
        if parts:
            return decompose(parts[0], seed=seed) + decompose(parts[1], seed=seed)
    alg, _ = _end_algebra(end)
    rad = alg.radical_basis()
    if len(end) - len(rad) == 1:
        return [m]
    e = _semisimple_idempotent(alg, rad, seed)
    if e is None:
        raise NonSplitEndomorphismField(
            "endomorphism algebra modulo its radical is a division algebra "
            "strictly larger than the rationals"
        )
    parts = _fitting_split(m, _combine(end, e))
    if parts is None:
        raise AssertionError("lifted idempotent failed to split the module")
    return decompose(parts[0], seed=seed) + decompose(parts[1], seed=seed)


def _indec_isomorphic(a: Representation, b: Representation) -> bool:
    if a.dims != b.dims:
        return False
    fwd = hom_modules(a, b)
    bwd = hom_modules(b, a)
    if not fwd or not bwd:
        return a.total_dim == 0 and b.total_dim == 0
    end = hom_modules(a, a)
    alg, mat = _end_algebra(end)
    rad = alg.radical_basis()
    rad_rows = [list(v) for v in rad]
    for f in fwd:
        for g in bwd:
            comp = g @ f
            sol = mat.solve(comp.flatten())
            if sol is None:
                raise AssertionError("composite endomorphism outside End")
            from .linalg import span_contains

            if not span_contains(rad_rows, list(sol)):
                return True  # g∘f is a unit in the local ring End(a)
    return False


def is_isomorphic(m: Representation, n: Representation, *, seed: int = DEFAULT_SEED) -> bool:
    """Decides module isomorphism via Krull-Schmidt matching."""
    if m.algebra is not n.algebra:
        return False
    if m.dims != n.dims:
        return False
    parts_m = decompose(m, seed=seed)
    parts_n = list(decompose(n, seed=seed))
    if len(parts_m) != len(parts_n):
        return False
    for p in parts_m:
        hit = None
        for i, q in enumerate(parts_n):
            if _indec_isomorphic(p, q):
                hit = i
                break
        if hit is None:
            return False
        parts_n.pop(hit)
    return True
