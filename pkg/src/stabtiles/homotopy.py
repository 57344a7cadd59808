"""The triangulated category of bounded complexes of projectives.

Objects are cochain complexes of finitely generated projective modules with
differentials of degree +1; morphisms are chain maps modulo homotopy.  For an
algebra of finite global dimension this homotopy category is the bounded
derived category, which covers both built-in examples, so the context refuses
algebras whose global dimension exceeds a configurable bound.

Every minimized complex is stored once in an append-only intern store keyed
by a coarse canonical form (degreewise summands plus class); objects are then
referred to by their integer identifiers.  The store uses check-and-insert
semantics, so concurrent exploration at worst duplicates work, never state.
"""

from __future__ import annotations

import itertools
import random
from fractions import Fraction

from .errors import NonSplitEndomorphismField, ResolutionTooLong, UsageError
from .linalg import FiniteAlgebra, Frac, RatMatrix
from .quiver import (
    DEFAULT_SEED,
    GRID,
    AtLeast,
    BoundQuiverAlgebra,
    ModuleMap,
    Representation,
    direct_sum_reps,
    global_dimension,
    kernel_of,
    projective_cover,
    _reduce_vector,
)


class ProjComplex:
    """A bounded complex of projectives.

    ``terms[i]`` is the tuple of projective summands (vertex indices) in
    degree ``lo + i``; ``diffs[i]`` maps degree ``lo+i`` to ``lo+i+1``.
    """

    __slots__ = ("cat", "lo", "terms", "diffs")

    def __init__(self, cat: "HomotopyCategory", lo: int, terms, diffs, *, check: bool = True):
        self.cat = cat
        self.lo = lo
        self.terms = tuple(tuple(t) for t in terms)
        self.diffs = tuple(diffs)
        if self.terms and (self.terms[0] == () or self.terms[-1] == ()):
            raise UsageError("complex not trimmed")
        if len(self.diffs) != max(0, len(self.terms) - 1):
            raise UsageError("differential count mismatch")
        if check:
            for i, d in enumerate(self.diffs):
                if d.source.dims != cat.term_rep(self.terms[i]).dims:
                    raise UsageError("differential source mismatch")
            for i in range(len(self.diffs) - 1):
                if not (self.diffs[i + 1] @ self.diffs[i]).is_zero:
                    raise UsageError("consecutive differentials do not compose to zero")

    @property
    def hi(self) -> int:
        return self.lo + len(self.terms) - 1

    @property
    def is_zero(self) -> bool:
        return not self.terms

    def term(self, d: int) -> tuple[int, ...]:
        i = d - self.lo
        if 0 <= i < len(self.terms):
            return self.terms[i]
        return ()

    def term_rep(self, d: int) -> Representation:
        return self.cat.term_rep(self.term(d))

    def diff(self, d: int) -> ModuleMap:
        i = d - self.lo
        if 0 <= i < len(self.diffs):
            return self.diffs[i]
        return ModuleMap.zero(self.term_rep(d), self.term_rep(d + 1))

    @property
    def total_dim(self) -> int:
        return sum(self.term_rep(d).total_dim for d in range(self.lo, self.hi + 1))

    def __repr__(self):
        body = ", ".join(f"{self.lo + i}:{t}" for i, t in enumerate(self.terms))
        return f"ProjComplex({body})"


class ChainMap:
    """A degreewise module map commuting with the differentials."""

    __slots__ = ("source", "target", "comps")

    def __init__(self, source: ProjComplex, target: ProjComplex, comps: dict[int, ModuleMap], *, check: bool = True):
        self.source = source
        self.target = target
        self.comps = {d: m for d, m in comps.items() if not m.is_zero}
        if check:
            lo = min(source.lo, target.lo) - 1
            hi = max(source.hi, target.hi) + 1
            for d in range(lo, hi):
                left = self.comp(d + 1) @ source.diff(d)
                right = target.diff(d) @ self.comp(d)
                if not (left - right).is_zero:
                    raise UsageError(f"not a chain map at degree {d}")

    def comp(self, d: int) -> ModuleMap:
        m = self.comps.get(d)
        if m is not None:
            return m
        return ModuleMap.zero(self.source.term_rep(d), self.target.term_rep(d))

    def shift(self, n: int) -> "ChainMap":
        src = self.source.cat.shift(self.source, n)
        tgt = self.target.cat.shift(self.target, n)
        return ChainMap(src, tgt, {d - n: m for d, m in self.comps.items()}, check=False)

    @property
    def is_zero(self) -> bool:
        return not self.comps

    def __add__(self, other: "ChainMap") -> "ChainMap":
        comps = dict(self.comps)
        for d, m in other.comps.items():
            comps[d] = comps[d] + m if d in comps else m
        return ChainMap(self.source, self.target, comps, check=False)

    def __sub__(self, other: "ChainMap") -> "ChainMap":
        return self + other.scale(-1)

    def scale(self, c) -> "ChainMap":
        return ChainMap(
            self.source, self.target, {d: m.scale(c) for d, m in self.comps.items()}, check=False
        )

    def compose(self, inner: "ChainMap") -> "ChainMap":
        """self after inner (inner applied first)."""
        comps = {}
        for d in range(inner.source.lo, inner.source.hi + 1):
            m = self.comp(d) @ inner.comp(d)
            if not m.is_zero:
                comps[d] = m
        return ChainMap(inner.source, self.target, comps, check=False)


class HomotopyCategory:
    """Context object owning the intern store and all homotopy-level caches."""

    def __init__(
        self,
        algebra: BoundQuiverAlgebra,
        *,
        gldim_bound: int = 8,
        tilt_bound: int = 64,
        length_bound: int = 8,
        seed: int = DEFAULT_SEED,
    ):
        self.algebra = algebra
        self.gldim_bound = gldim_bound
        self.tilt_bound = tilt_bound
        self.length_bound = length_bound
        self.seed = seed
        g = global_dimension(algebra, gldim_bound)
        if isinstance(g, AtLeast):
            raise ResolutionTooLong(
                f"global dimension exceeds the configured bound {gldim_bound}"
            )
        self.gldim = g
        self._term_cache: dict[tuple[int, ...], Representation] = {}
        self._store: list[ProjComplex] = []
        self._buckets: dict[tuple, list[int]] = {}
        self._hom_dim_cache: dict[tuple[int, int, int], int] = {}
        self._hom_basis_cache: dict[tuple[int, int, int], list[ChainMap]] = {}
        self._resolve_cache: dict[Representation, int] = {}
        self._shift_cache: dict[tuple[int, int], int] = {}
        self._name_hints: dict[int, str] = {}

    # -- term modules -------------------------------------------------------

    def term_rep(self, term: tuple[int, ...]) -> Representation:
        term = tuple(term)
        rep = self._term_cache.get(term)
        if rep is None:
            if term:
                rep = direct_sum_reps([self.algebra.projective(v) for v in term])
            else:
                rep = Representation(
                    self.algebra,
                    tuple(0 for _ in range(self.algebra.n_vertices)),
                    tuple(
                        RatMatrix.zero(0, 0) for _ in self.algebra.arrows
                    ),
                )
            self._term_cache[term] = rep
        return rep

    def summand_ranges(self, term: tuple[int, ...], vertex: int) -> list[tuple[int, int]]:
        """Per summand: (offset, width) inside the vertex block of the term."""
        out = []
        off = 0
        for v in term:
            w = self.algebra.projective(v).dims[vertex]
            out.append((off, w))
            off += w
        return out

    def generator_index(self, vertex: int) -> int:
        """Index of the trivial path inside P(vertex)'s basis at its own vertex."""
        paths = self.algebra.basis_paths(vertex, vertex)
        return paths.index((vertex, ()))

    # -- basic constructors ---------------------------------------------------

    def zero_complex(self) -> ProjComplex:
        return ProjComplex(self, 0, (), ())

    def build(self, lo: int, terms, diffs, *, check: bool = True) -> ProjComplex:
        """Trim empty boundary degrees and construct."""
        terms = [tuple(t) for t in terms]
        diffs = list(diffs)
        while terms and not terms[0]:
            terms.pop(0)
            if diffs:
                diffs.pop(0)
            lo += 1
        while terms and not terms[-1]:
            terms.pop()
            if diffs:
                diffs.pop()
        if not terms:
            return self.zero_complex()
        return ProjComplex(self, lo, terms, diffs, check=check)

    def one_term(self, summands: tuple[int, ...], degree: int = 0) -> ProjComplex:
        return self.build(degree, [tuple(summands)], [])

    def resolve(self, m: Representation) -> ProjComplex:
        """Minimal projective resolution, placed in degrees [-length, 0]."""
        if m.total_dim == 0:
            return self.zero_complex()
        layers: list[tuple[list[int], ModuleMap | None]] = []
        cover, summands, cm = projective_cover(m)
        layers.append((summands, None))
        prev_cover = cover
        current, embed = kernel_of(cm)
        while current.total_dim > 0:
            if len(layers) > self.gldim_bound:
                raise ResolutionTooLong("resolution exceeds the global-dimension bound")
            cover, summands, cm = projective_cover(current)
            connecting = embed @ cm  # P_{k+1} -> P_k
            layers.append((summands, connecting))
            prev_cover = cover
            current, embed = kernel_of(cm)
        depth = len(layers) - 1
        terms = [tuple(layers[depth - i][0]) for i in range(depth + 1)]
        diffs = []
        for i in range(depth):
            connecting = layers[depth - i][1]
            assert connecting is not None
            diffs.append(connecting)
        return self.build(-depth, terms, diffs)

    # -- triangulated structure -------------------------------------------------

    def shift(self, x: ProjComplex, n: int) -> ProjComplex:
        if n == 0 or x.is_zero:
            return x
        sign = 1 if n % 2 == 0 else -1
        diffs = [d.scale(sign) for d in x.diffs]
        return ProjComplex(self, x.lo - n, x.terms, diffs, check=False)

    def direct_sum(self, xs: list[ProjComplex]) -> ProjComplex:
        xs = [x for x in xs if not x.is_zero]
        if not xs:
            return self.zero_complex()
        lo = min(x.lo for x in xs)
        hi = max(x.hi for x in xs)
        terms = []
        for d in range(lo, hi + 1):
            t: list[int] = []
            for x in xs:
                t.extend(x.term(d))
            terms.append(tuple(t))
        diffs = []
        for d in range(lo, hi):
            source = self.term_rep(terms[d - lo])
            target = self.term_rep(terms[d + 1 - lo])
            blocks = []
            for v in range(self.algebra.n_vertices):
                grid = []
                for xr in xs:
                    row = []
                    for xc in xs:
                        if xr is xc:
                            row.append(xr.diff(d).blocks[v])
                        else:
                            row.append(
                                RatMatrix.zero(
                                    xr.term_rep(d + 1).dims[v], xc.term_rep(d).dims[v]
                                )
                            )
                    grid.append(row)
                blocks.append(RatMatrix.block(grid))
            diffs.append(ModuleMap(source, target, tuple(blocks)))
        return self.build(lo, terms, diffs, check=False)

    def cone(self, f: ChainMap) -> ProjComplex:
        """Standard cone: C_d = X_{d+1} + Y_d with the twisted differential."""
        x, y = f.source, f.target
        if x.is_zero:
            return y
        lo = min(x.lo - 1, y.lo)
        hi = max(x.hi - 1, y.hi)
        terms = []
        for d in range(lo, hi + 1):
            terms.append(tuple(x.term(d + 1)) + tuple(y.term(d)))
        diffs = []
        for d in range(lo, hi):
            src = self.term_rep(terms[d - lo])
            tgt = self.term_rep(terms[d + 1 - lo])
            blocks = []
            for v in range(self.algebra.n_vertices):
                x_top = x.term_rep(d + 2).dims[v]
                x_bot = x.term_rep(d + 1).dims[v]
                y_top = y.term_rep(d + 1).dims[v]
                y_bot = y.term_rep(d).dims[v]
                grid = [
                    [x.diff(d + 1).blocks[v].scale(-1), RatMatrix.zero(x_top, y_bot)],
                    [f.comp(d + 1).blocks[v], y.diff(d).blocks[v]],
                ]
                blocks.append(RatMatrix.block(grid))
            diffs.append(ModuleMap(src, tgt, tuple(blocks)))
        return self.build(lo, terms, diffs, check=False)

    # -- chain map spaces ---------------------------------------------------------

    def _map_layout(self, x: ProjComplex, y: ProjComplex, offset: int):
        """Variable layout for families of module maps X_d -> Y_{d+offset}."""
        slots = []  # (degree, vertex, rows, cols, var offset)
        total = 0
        for d in range(x.lo, x.hi + 1):
            xr = x.term_rep(d)
            yr = y.term_rep(d + offset)
            if xr.total_dim == 0 or yr.total_dim == 0:
                continue
            for v in range(self.algebra.n_vertices):
                r, c = yr.dims[v], xr.dims[v]
                if r and c:
                    slots.append((d, v, r, c, total))
                    total += r * c
        return slots, total

    def _family_from_vec(self, x, y, offset, slots, vec) -> dict[int, ModuleMap]:
        by_degree: dict[int, list[RatMatrix | None]] = {}
        for d in range(x.lo, x.hi + 1):
            xr = x.term_rep(d)
            yr = y.term_rep(d + offset)
            by_degree[d] = [
                RatMatrix.zero(yr.dims[v], xr.dims[v])
                for v in range(self.algebra.n_vertices)
            ]
        for (d, v, r, c, off) in slots:
            by_degree[d][v] = RatMatrix(r, c, vec[off : off + r * c])
        out = {}
        for d, blocks in by_degree.items():
            m = ModuleMap(x.term_rep(d), y.term_rep(d + offset), tuple(blocks))
            if not m.is_zero:
                out[d] = m
        return out

    def _flatten_family(self, x, y, offset, slots, family: dict[int, ModuleMap]):
        vec = [Frac(0)] * (slots[-1][4] + slots[-1][2] * slots[-1][3] if slots else 0)
        for (d, v, r, c, off) in slots:
            m = family.get(d)
            if m is None:
                continue
            ent = m.blocks[v].entries()
            for i, val in enumerate(ent):
                vec[off + i] = val
        return vec

    def _module_map_rows(self, x, y, offset, slots, total):
        """Rows forcing each f_d to be a module map."""
        rows = []
        slot_at = {}
        for s in slots:
            slot_at[(s[0], s[1])] = s
        for d in range(x.lo, x.hi + 1):
            xr = x.term_rep(d)
            yr = y.term_rep(d + offset)
            if xr.total_dim == 0 or yr.total_dim == 0:
                continue
            for a, arr in enumerate(self.algebra.arrows):
                s, t = arr.source, arr.target
                ma, na = xr.maps[a], yr.maps[a]
                st = slot_at.get((d, t))
                ss = slot_at.get((d, s))
                for p in range(yr.dims[t]):
                    for q in range(xr.dims[s]):
                        row = [Frac(0)] * total
                        hit = False
                        if st is not None:
                            for r in range(xr.dims[t]):
                                coeff = ma[(r, q)]
                                if coeff != 0:
                                    row[st[4] + p * xr.dims[t] + r] += coeff
                                    hit = True
                        if ss is not None:
                            for r in range(yr.dims[s]):
                                coeff = na[(p, r)]
                                if coeff != 0:
                                    row[ss[4] + r * xr.dims[s] + q] -= coeff
                                    hit = True
                        if hit:
                            rows.append(row)
        return rows

    def _chain_rows(self, x, y, offset, slots, total):
        """Rows forcing commutation with the differentials.

        f_{d+1} dX_d = dY_{d+offset} f_d, expressed per vertex entry.
        """
        rows = []
        slot_at = {(s[0], s[1]): s for s in slots}
        for d in range(x.lo - 1, x.hi + 1):
            xr = x.term_rep(d)
            xr1 = x.term_rep(d + 1)
            yr = y.term_rep(d + offset)
            yr1 = y.term_rep(d + 1 + offset)
            dx = x.diff(d)
            dy = y.diff(d + offset)
            for v in range(self.algebra.n_vertices):
                rcount = yr1.dims[v]
                ccount = xr.dims[v]
                if rcount == 0 or ccount == 0:
                    continue
                s_next = slot_at.get((d + 1, v))
                s_cur = slot_at.get((d, v))
                for p in range(rcount):
                    for q in range(ccount):
                        row = [Frac(0)] * total
                        hit = False
                        if s_next is not None:
                            for r in range(xr1.dims[v]):
                                coeff = dx.blocks[v][(r, q)]
                                if coeff != 0:
                                    row[s_next[4] + p * xr1.dims[v] + r] += coeff
                                    hit = True
                        if s_cur is not None:
                            for r in range(yr.dims[v]):
                                coeff = dy.blocks[v][(p, r)]
                                if coeff != 0:
                                    row[s_cur[4] + r * ccount + q] -= coeff
                                    hit = True
                        if hit:
                            rows.append(row)
        return rows

    def chain_maps(self, x: ProjComplex, y: ProjComplex) -> list[ChainMap]:
        """Basis of degree-0 chain maps x -> y (not modulo homotopy)."""
        slots, total = self._map_layout(x, y, 0)
        if total == 0:
            return []
        rows = self._module_map_rows(x, y, 0, slots, total)
        rows += self._chain_rows(x, y, 0, slots, total)
        mat = RatMatrix.from_rows(rows) if rows else RatMatrix.zero(0, total)
        out = []
        for vec in mat.kernel_basis():
            fam = self._family_from_vec(x, y, 0, slots, list(vec))
            out.append(ChainMap(x, y, fam, check=False))
        return out

    def homotopy_span(self, x: ProjComplex, y: ProjComplex):
        """Flat coordinate vectors (in chain-map layout) spanning the
        null-homotopic maps x -> y."""
        slots, total = self._map_layout(x, y, 0)
        hslots, htotal = self._map_layout(x, y, -1)
        if total == 0 or htotal == 0:
            return [], slots, total
        hrows = self._module_map_rows(x, y, -1, hslots, htotal)
        hmat = RatMatrix.from_rows(hrows) if hrows else RatMatrix.zero(0, htotal)
        out = []
        for vec in hmat.kernel_basis():
            fam = self._family_from_vec(x, y, -1, hslots, list(vec))
            value: dict[int, ModuleMap] = {}
            for d in range(x.lo, x.hi + 1):
                h_d = fam.get(d)
                h_d1 = fam.get(d + 1)
                acc = ModuleMap.zero(x.term_rep(d), y.term_rep(d))
                if h_d is not None:
                    acc = acc + (y.diff(d - 1) @ h_d)
                if h_d1 is not None:
                    acc = acc + (h_d1 @ x.diff(d))
                if not acc.is_zero:
                    value[d] = acc
            if value:
                out.append(self._flatten_family(x, y, 0, slots, value))
        return out, slots, total

    def flatten_chain_map(self, f: ChainMap):
        slots, total = self._map_layout(f.source, f.target, 0)
        return self._flatten_family(f.source, f.target, 0, slots, f.comps)

    def hom_pair(self, x: ProjComplex, y: ProjComplex, k: int):
        """(basis of Hom^k classes, homotopy echelon) with classes realised
        as chain maps x -> y[k]."""
        yk = self.shift(y, k)
        z = self.chain_maps(x, yk)
        hspan, slots, total = self.homotopy_span(x, yk)
        # Echelonize the homotopy span once; reduce candidates against it.
        rows: list[list[Fraction]] = []
        pivots: list[int] = []
        for h in hspan:
            red = _reduce_vector(rows, pivots, h)
            lead = next((j for j, v in enumerate(red) if v != 0), None)
            if lead is not None:
                rows.append([v / red[lead] for v in red])
                pivots.append(lead)
        basis = []
        for f in z:
            vec = self._flatten_family(x, yk, 0, slots, f.comps)
            red = _reduce_vector(rows, pivots, vec)
            lead = next((j for j, v in enumerate(red) if v != 0), None)
            if lead is not None:
                rows.append([v / red[lead] for v in red])
                pivots.append(lead)
                basis.append(f)
        return basis, (rows, pivots, slots, total)

    def hom_dim(self, x: ProjComplex, y: ProjComplex, k: int) -> int:
        # Cheap reject: no degree overlap means no chain maps at all.
        if x.is_zero or y.is_zero:
            return 0
        if y.hi - k < x.lo or y.lo - k > x.hi:
            return 0
        return len(self.hom_pair(x, y, k)[0])

    def hom_basis(self, x: ProjComplex, y: ProjComplex, k: int) -> list[ChainMap]:
        if x.is_zero or y.is_zero:
            return []
        if y.hi - k < x.lo or y.lo - k > x.hi:
            return []
        return self.hom_pair(x, y, k)[0]

    def identity_chain_map(self, x: ProjComplex) -> ChainMap:
        return ChainMap(
            x,
            x,
            {d: ModuleMap.identity(x.term_rep(d)) for d in range(x.lo, x.hi + 1)},
            check=False,
        )

    def is_null_homotopic(self, f: ChainMap) -> bool:
        hspan, slots, total = self.homotopy_span(f.source, f.target)
        vec = self._flatten_family(f.source, f.target, 0, slots, f.comps)
        rows: list[list[Fraction]] = []
        pivots: list[int] = []
        for h in hspan:
            red = _reduce_vector(rows, pivots, h)
            lead = next((j for j, v in enumerate(red) if v != 0), None)
            if lead is not None:
                rows.append([v / red[lead] for v in red])
                pivots.append(lead)
        red = _reduce_vector(rows, pivots, vec)
        return all(v == 0 for v in red)

    def class_coordinates(self, f: ChainMap, basis: list[ChainMap]) -> tuple[Fraction, ...]:
        """Coordinates of [f] in the given Hom-class basis."""
        x, y = f.source, f.target
        hspan, slots, total = self.homotopy_span(x, y)
        cols = [self._flatten_family(x, y, 0, slots, b.comps) for b in basis] + list(hspan)
        target = self._flatten_family(x, y, 0, slots, f.comps)
        if not cols:
            if all(v == 0 for v in target):
                return ()
            raise UsageError("class outside the span")
        mat = RatMatrix(
            total, len(cols), [cols[j][i] for i in range(total) for j in range(len(cols))]
        )
        sol = mat.solve(target)
        if sol is None:
            raise UsageError("class outside the span")
        return tuple(sol[: len(basis)])

    # -- minimal models ------------------------------------------------------------

    def minimize(self, x: ProjComplex) -> ProjComplex:
        """Homotopy-equivalent complex whose differentials land in the radical."""
        while True:
            cancel = self._find_invertible_component(x)
            if cancel is None:
                return x
            x = self._cancel(x, *cancel)

    def _find_invertible_component(self, x: ProjComplex):
        for d in range(x.lo, x.hi):
            src = x.term(d)
            tgt = x.term(d + 1)
            dmap = x.diff(d)
            for i, vi in enumerate(src):
                for j, vj in enumerate(tgt):
                    if vi != vj:
                        continue
                    v = vi
                    gi = self.generator_index(v)
                    (soff, _) = self.summand_ranges(src, v)[i]
                    (toff, _) = self.summand_ranges(tgt, v)[j]
                    if dmap.blocks[v][(toff + gi, soff + gi)] != 0:
                        return (d, i, j)
        return None

    def _restrict_map(self, m: ModuleMap, src_term, src_keep, tgt_term, tgt_keep) -> ModuleMap:
        blocks = []
        for v in range(self.algebra.n_vertices):
            src_ranges = self.summand_ranges(src_term, v)
            tgt_ranges = self.summand_ranges(tgt_term, v)
            cols: list[int] = []
            for i in src_keep:
                off, w = src_ranges[i]
                cols.extend(range(off, off + w))
            rowsel: list[int] = []
            for j in tgt_keep:
                off, w = tgt_ranges[j]
                rowsel.extend(range(off, off + w))
            blocks.append(m.blocks[v].submatrix(rowsel, cols))
        src_rep = self.term_rep(tuple(src_term[i] for i in src_keep))
        tgt_rep = self.term_rep(tuple(tgt_term[j] for j in tgt_keep))
        return ModuleMap(src_rep, tgt_rep, tuple(blocks))

    def _cancel(self, x: ProjComplex, d: int, i: int, j: int) -> ProjComplex:
        src = x.term(d)
        tgt = x.term(d + 1)
        keep_src = [t for t in range(len(src)) if t != i]
        keep_tgt = [t for t in range(len(tgt)) if t != j]
        dmap = x.diff(d)
        a = self._restrict_map(dmap, src, keep_src, tgt, keep_tgt)
        b = self._restrict_map(dmap, src, [i], tgt, keep_tgt)
        c = self._restrict_map(dmap, src, keep_src, tgt, [j])
        phi = self._restrict_map(dmap, src, [i], tgt, [j])
        phi_inv_blocks = []
        for blk in phi.blocks:
            inv = blk.inverse()
            if inv is None:
                raise AssertionError("component marked invertible is singular")
            phi_inv_blocks.append(inv)
        phi_inv = ModuleMap(phi.target, phi.source, tuple(phi_inv_blocks))
        new_d = a - (b @ phi_inv @ c)

        new_terms = []
        new_diffs: list[ModuleMap] = []
        for deg in range(x.lo, x.hi + 1):
            if deg == d:
                new_terms.append(tuple(src[t] for t in keep_src))
            elif deg == d + 1:
                new_terms.append(tuple(tgt[t] for t in keep_tgt))
            else:
                new_terms.append(x.term(deg))
        for deg in range(x.lo, x.hi):
            if deg == d - 1:
                full = list(range(len(x.term(deg))))
                new_diffs.append(self._restrict_map(x.diff(deg), x.term(deg), full, src, keep_src))
            elif deg == d:
                new_diffs.append(new_d)
            elif deg == d + 1:
                full = list(range(len(x.term(deg + 1))))
                new_diffs.append(self._restrict_map(x.diff(deg), tgt, keep_tgt, x.term(deg + 1), full))
            else:
                new_diffs.append(x.diff(deg))
        return self.build(x.lo, new_terms, new_diffs, check=False)

    # -- classes -------------------------------------------------------------------

    def k_class(self, x: ProjComplex) -> tuple[int, ...]:
        """Class in the simple basis of the standard reference heart."""
        n = self.algebra.n_vertices
        out = [0] * n
        for d in range(x.lo, x.hi + 1):
            sign = 1 if d % 2 == 0 else -1
            rep = x.term_rep(d)
            for v in range(n):
                out[v] += sign * rep.dims[v]
        return tuple(out)

    # -- intern store -----------------------------------------------------------------

    def intern(self, x: ProjComplex) -> int:
        xm = self.minimize(x)
        key = (xm.lo, tuple(tuple(sorted(t)) for t in xm.terms), self.k_class(xm))
        bucket = self._buckets.setdefault(key, [])
        for i in bucket:
            if self.iso_complex(self._store[i], xm):
                return i
        self._store.append(xm)
        idx = len(self._store) - 1
        bucket.append(idx)
        return idx

    def obj(self, idx: int) -> ProjComplex:
        return self._store[idx]

    def intern_shift(self, idx: int, n: int) -> int:
        if n == 0:
            return idx
        key = (idx, n)
        if key not in self._shift_cache:
            self._shift_cache[key] = self.intern(self.shift(self.obj(idx), n))
        return self._shift_cache[key]

    def hom_dim_ids(self, ix: int, iy: int, k: int) -> int:
        key = (ix, iy, k)
        if key not in self._hom_dim_cache:
            self._hom_dim_cache[key] = self.hom_dim(self.obj(ix), self.obj(iy), k)
        return self._hom_dim_cache[key]

    def hom_basis_ids(self, ix: int, iy: int, k: int) -> list[ChainMap]:
        key = (ix, iy, k)
        if key not in self._hom_basis_cache:
            self._hom_basis_cache[key] = self.hom_basis(self.obj(ix), self.obj(iy), k)
        return self._hom_basis_cache[key]

    def resolve_id(self, m: Representation) -> int:
        if m not in self._resolve_cache:
            self._resolve_cache[m] = self.intern(self.resolve(m))
        return self._resolve_cache[m]

    def name_hint(self, idx: int, name: str) -> None:
        self._name_hints.setdefault(idx, name)

    def label(self, idx: int) -> str:
        hint = self._name_hints.get(idx)
        if hint:
            return hint
        cls = self.k_class(self.obj(idx))
        return f"X{idx}{cls}"

    # -- isomorphism and decomposition ---------------------------------------------

    def iso_complex(self, x: ProjComplex, y: ProjComplex) -> bool:
        """Isomorphism test for minimal complexes: compare degreewise summand
        multisets, then search the chain-map space for a degreewise-invertible
        map (seeded random samples, then an exhaustive small grid)."""
        x = self.minimize(x)
        y = self.minimize(y)
        if x.is_zero and y.is_zero:
            return True
        if x.lo != y.lo or len(x.terms) != len(y.terms):
            return False
        if tuple(tuple(sorted(t)) for t in x.terms) != tuple(tuple(sorted(t)) for t in y.terms):
            return False
        maps = self.chain_maps(x, y)
        if not maps:
            return False

        def invertible(f: ChainMap) -> bool:
            for d in range(x.lo, x.hi + 1):
                m = f.comp(d)
                for blk in m.blocks:
                    if blk.rows != blk.cols:
                        return False
                    if blk.rows and blk.det() == 0:
                        return False
            return True

        rng = random.Random(self.seed)
        for _ in range(16):
            coeffs = [Frac(rng.randint(-9, 9)) for _ in maps]
            f = _combine_chain(maps, coeffs)
            if invertible(f):
                return True
        if len(maps) <= 6:
            for coeffs in itertools.product(GRID, repeat=len(maps)):
                if any(coeffs) and invertible(_combine_chain(maps, coeffs)):
                    return True
        else:
            for _ in range(2000):
                coeffs = [Frac(rng.randint(-5, 5)) for _ in maps]
                if any(coeffs) and invertible(_combine_chain(maps, coeffs)):
                    return True
        return False

    def decompose_complex(self, x: ProjComplex) -> list[ProjComplex]:
        """Indecomposable summands in the homotopy category, via minimal
        models and Fitting splittings of chain endomorphisms."""
        x = self.minimize(x)
        if x.is_zero:
            return []
        endos = self.chain_maps(x, x)
        if len(endos) == 1:
            return [x]
        for cand in self._chain_fitting_candidates(endos):
            parts = self._chain_fitting_split(x, cand)
            if parts:
                return self.decompose_complex(parts[0]) + self.decompose_complex(parts[1])
        # No chain-level split found: certify locality modulo homotopy.
        basis, (hrows, hpivots, slots, total) = self.hom_pair(x, x, 0)
        if len(basis) == 1:
            return [x]
        alg, to_coords = self._end_algebra_mod_homotopy(x, basis, hrows, hpivots, slots, total)
        rad = alg.radical_basis()
        if len(basis) - len(rad) == 1:
            return [x]
        from .quiver import _semisimple_idempotent

        e = _semisimple_idempotent(alg, rad, self.seed)
        if e is None:
            raise NonSplitEndomorphismField(
                "complex endomorphism algebra modulo its radical is a division "
                "algebra strictly larger than the rationals"
            )
        lifted = _combine_chain(basis, e)
        for _ in range(12):
            parts = self._chain_fitting_split(x, lifted)
            if parts:
                return self.decompose_complex(parts[0]) + self.decompose_complex(parts[1])
            sq = lifted.compose(lifted)
            cube = sq.compose(lifted)
            lifted = _combine_chain([sq, cube], [Frac(3), Frac(-2)])
        raise AssertionError("lifted idempotent failed to split the complex")

    def _chain_fitting_candidates(self, endos: list[ChainMap]):
        for e in endos:
            yield e
        for i in range(len(endos)):
            for j in range(i + 1, len(endos)):
                yield endos[i] + endos[j]
                yield endos[i] - endos[j]
        rng = random.Random(self.seed)
        for _ in range(16):
            yield _combine_chain(endos, [Frac(rng.randint(-3, 3)) for _ in endos])
        head = endos[: min(3, len(endos))]
        for coeffs in itertools.product(GRID, repeat=len(head)):
            if any(coeffs):
                yield _combine_chain(head, coeffs)

    def _chain_fitting_split(self, x: ProjComplex, f: ChainMap):
        total = x.total_dim
        power = f
        for _ in range(max(1, total).bit_length() + 1):
            power = power.compose(power)
        kernel_data = []
        kdim = 0
        for d in range(x.lo, x.hi + 1):
            rep = x.term_rep(d)
            kr, kemb = kernel_of(power.comp(d))
            kernel_data.append((d, kr, kemb))
            kdim += kr.total_dim
        if kdim == 0 or kdim == total:
            return None
        from .quiver import image_of

        image_data = []
        for d in range(x.lo, x.hi + 1):
            ir, iemb = image_of(power.comp(d))
            image_data.append((d, ir, iemb))
        if kdim + sum(ir.total_dim for _, ir, _ in image_data) != total:
            return None
        k_complex = self._subcomplex(x, kernel_data)
        i_complex = self._subcomplex(x, image_data)
        return [k_complex, i_complex]

    def _subcomplex(self, x: ProjComplex, data):
        """Re-projectivize a degreewise direct summand as a ProjComplex."""
        by_degree = {d: (rep, emb) for d, rep, emb in data}
        covers = {}
        terms = {}
        for d, (rep, emb) in by_degree.items():
            cover, summands, cm = projective_cover(rep)
            if cover.total_dim != rep.total_dim:
                raise AssertionError("summand of a projective is not projective")
            covers[d] = (cover, cm)
            terms[d] = tuple(summands)
        term_list = []
        diff_list = []
        degs = sorted(by_degree)
        lo, hi = degs[0], degs[-1]
        for d in range(lo, hi + 1):
            term_list.append(terms.get(d, ()))
        for d in range(lo, hi):
            rep_s, emb_s = by_degree[d]
            rep_t, emb_t = by_degree[d + 1]
            cover_s, cm_s = covers[d]
            cover_t, cm_t = covers[d + 1]
            # induced differential on the summand, in its own coordinates
            img = x.diff(d) @ emb_s
            induced_blocks = []
            for v in range(self.algebra.n_vertices):
                sol = emb_t.blocks[v].solve_matrix(img.blocks[v])
                if sol is None:
                    raise AssertionError("differential does not preserve the summand")
                induced_blocks.append(sol)
            induced = ModuleMap(rep_s, rep_t, tuple(induced_blocks))
            inv_blocks = []
            for v in range(self.algebra.n_vertices):
                inv = cm_t.blocks[v].inverse()
                if inv is None:
                    raise AssertionError("cover of a projective is not invertible")
                inv_blocks.append(inv)
            cm_t_inv = ModuleMap(rep_t, cover_t, tuple(inv_blocks))
            diff_list.append(cm_t_inv @ induced @ cm_s)
        # the map rep_s -> cover coordinates must use the cover map composed
        return self.build(lo, term_list, diff_list, check=True)

    def _end_algebra_mod_homotopy(self, x, basis, hrows, hpivots, slots, total):
        """FiniteAlgebra structure on End(x) modulo null-homotopic maps."""
        flat_basis = [self._flatten_family(x, x, 0, slots, b.comps) for b in basis]
        cols = flat_basis + [list(r) for r in hrows]
        mat = RatMatrix(
            total, len(cols), [cols[j][i] for i in range(total) for j in range(len(cols))]
        )

        def coords(f: ChainMap):
            vec = self._flatten_family(x, x, 0, slots, f.comps)
            sol = mat.solve(vec)
            if sol is None:
                raise AssertionError("endomorphism outside its own span")
            return tuple(sol[: len(basis)])

        ident = ChainMap(
            x,
            x,
            {d: ModuleMap.identity(x.term_rep(d)) for d in range(x.lo, x.hi + 1)},
            check=False,
        )
        unit = coords(ident)
        table = {}
        for i, bi in enumerate(basis):
            for j, bj in enumerate(basis):
                table[(i, j)] = coords(bi.compose(bj))
        return FiniteAlgebra(len(basis), lambda i, j: table[(i, j)], unit), coords


def _combine_chain(maps: list[ChainMap], coeffs) -> ChainMap:
    out = None
    for c, m in zip(coeffs, maps):
        if c == 0:
            continue
        t = m.scale(c)
        out = t if out is None else out + t
    if out is None:
        return maps[0].scale(0)
    return out
