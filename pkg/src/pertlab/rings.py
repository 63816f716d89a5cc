"""Truncated models of local rings.

A local ring R = k[[x_1..x_n]]/I_0 is modeled by its truncation
R_bar = F_p[x_1..x_n]/(I_0 + m^D), a finite-dimensional F_p-algebra.  The
ambient coordinate space V is spanned by the monomials of total degree < D
in ascending graded-lex order; the defining ideal contributes an echelon
subspace B of V, and ring elements are stored as normal forms modulo B.

Because columns are sorted by ascending degree and echelon pivots sit on the
leftmost nonzero entry, the pivot of every basis row is its lowest-order
term.  Two consequences are used throughout:

* the order of an element (largest N with e in m^N) is just the minimal
  degree appearing in its normal form;
* the rank of any ideal subspace restricted to degrees < w is a pivot count,
  which makes order-filtration profiles free to evaluate.
"""

from __future__ import annotations

from typing import Callable, Iterable, Sequence

import numpy as np

from . import linalg
from .certify import TWO_LEVEL, UNCERTIFIED, CertifiedValue
from .errors import RingConstructionError, RingMismatchError, TruncationError
from .polynomials import TruncPoly, monomials_below, parse_poly


def is_prime(p: int) -> bool:
    if p < 2:
        return False
    d = 2
    while d * d <= p:
        if p % d == 0:
            return False
        d += 1
    return True


def default_truncation(t_j: int, n_max: int) -> int:
    """Truncation order making every ideal I + J^(n+1), n <= n_max, carry a
    Nakayama certificate when m^t_j is contained in J."""
    return max(t_j * (n_max + 1) + 2, 8)


class Subspace:
    """A linear subspace of the ambient coordinate space, in canonical RREF.

    Membership testing is reduction to zero; equality of subspaces is plain
    array equality because the RREF is canonical for the fixed column order.
    Instances are immutable.
    """

    __slots__ = ("ring", "rows", "pivots", "_rows_f8")

    def __init__(self, ring: "RingDescriptor", rows: np.ndarray, pivots: np.ndarray):
        self.ring = ring
        self.rows = rows
        self.pivots = pivots
        self._rows_f8: np.ndarray | None = None

    @property
    def rank(self) -> int:
        return self.rows.shape[0]

    def rows_f8(self) -> np.ndarray:
        if self._rows_f8 is None:
            self._rows_f8 = self.rows.astype(np.float64)
        return self._rows_f8

    def nonpivots(self) -> np.ndarray:
        return np.setdiff1d(np.arange(self.ring.M), self.pivots)

    def reduce(self, vectors: np.ndarray) -> np.ndarray:
        """Normal form of each row of ``vectors`` against this subspace."""
        return linalg.reduce_rows(np.atleast_2d(vectors), self.rows, self.pivots,
                                  self.ring.p, self.rows_f8())

    def contains_vector(self, vec: np.ndarray) -> bool:
        return not self.reduce(vec).any()

    def contains(self, other: "Subspace") -> bool:
        if other.rank == 0:
            return True
        if other.rank > self.rank:
            return False
        return not self.reduce(other.rows).any()

    def sum_rows(self, extra: np.ndarray) -> "Subspace":
        rows, pivots = linalg.merge(self.rows, self.pivots,
                                    np.atleast_2d(extra), self.ring.p)
        return Subspace(self.ring, rows, pivots)

    def sum(self, other: "Subspace") -> "Subspace":
        self._check_ring(other)
        if self.rank >= other.rank:
            return self.sum_rows(other.rows)
        return other.sum_rows(self.rows)

    def intersect(self, other: "Subspace") -> "Subspace":
        self._check_ring(other)
        rows, pivots = linalg.intersect_rowspaces(
            self.rows, self.pivots, other.rows, other.pivots, self.ring.p)
        return Subspace(self.ring, rows, pivots)

    def prefix_rank(self, cut: int) -> int:
        """Rank of the subspace projected to the first ``cut`` coordinates.

        In echelon form the rows with pivot >= cut vanish on those
        coordinates, so this is a pivot count.
        """
        return int(np.searchsorted(self.pivots, cut))

    def order_intersection_dim(self, w: int) -> int:
        """Dimension of the part of the subspace supported in orders >= w."""
        return self.rank - self.prefix_rank(self.ring.cut(w))

    def _check_ring(self, other: "Subspace") -> None:
        if other.ring is not self.ring:
            raise RingMismatchError("subspaces live over different rings")

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Subspace):
            return NotImplemented
        return self.ring is other.ring and np.array_equal(self.rows, other.rows)

    def __hash__(self) -> int:
        return hash((id(self.ring), self.rows.tobytes()))

    def __repr__(self) -> str:
        return f"Subspace(rank={self.rank}, dim_V={self.ring.M})"


class Element:
    """A ring element: a normal-form coordinate vector plus the defining
    polynomial it came from.

    The polynomial is kept so the element can be re-interpreted exactly in a
    rebuild of the ring at a higher truncation order.  That lift is faithful
    for elements defined by polynomials of degree < D, which covers all
    inputs (generators, perturbations, and their sums); it is documented as
    lossy for products, whose defining polynomials are themselves truncated.
    """

    __slots__ = ("ring", "vec", "poly")

    def __init__(self, ring: "RingDescriptor", vec: np.ndarray, poly: TruncPoly):
        self.ring = ring
        if vec.flags.writeable:
            vec.flags.writeable = False
        self.vec = vec
        self.poly = poly

    def is_zero(self) -> bool:
        return not self.vec.any()

    def order(self) -> int:
        """Largest N with this element in m^N; D if the element is zero."""
        support = np.nonzero(self.vec)[0]
        if support.size == 0:
            return self.ring.D
        return int(self.ring.deg_of_col[support[0]])

    def is_unit(self) -> bool:
        return self.vec[0] != 0

    def _check_ring(self, other: "Element") -> None:
        if other.ring is not self.ring:
            raise RingMismatchError("elements live over different rings")

    def __add__(self, other: "Element") -> "Element":
        self._check_ring(other)
        return Element(self.ring, self.ring._normal_form(self.vec + other.vec),
                       self.poly + other.poly)

    def __neg__(self) -> "Element":
        return Element(self.ring, (-self.vec) % self.ring.p, -self.poly)

    def __sub__(self, other: "Element") -> "Element":
        return self + (-other)

    def __mul__(self, other: "Element") -> "Element":
        self._check_ring(other)
        ring = self.ring
        a, b = self.vec, other.vec
        if np.count_nonzero(a) > np.count_nonzero(b):
            a, b = b, a
        acc = np.zeros(ring.M, dtype=np.int64)
        for col in np.nonzero(a)[0]:
            acc += int(a[col]) * ring.scatter_by_monomial(int(col), b)
        return Element(ring, ring._normal_form(acc), self.poly * other.poly)

    def scale(self, c: int) -> "Element":
        return Element(self.ring, (c * self.vec) % self.ring.p, self.poly.scale(c))

    def __pow__(self, n: int) -> "Element":
        result = self.ring.one()
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Element):
            return NotImplemented
        return self.ring is other.ring and np.array_equal(self.vec, other.vec)

    def __hash__(self) -> int:
        return hash((id(self.ring), self.vec.tobytes()))

    def to_poly(self) -> TruncPoly:
        """The normal form as a sparse polynomial."""
        ring = self.ring
        terms = {ring.monomials[c]: int(self.vec[c]) for c in np.nonzero(self.vec)[0]}
        return TruncPoly(ring.p, ring.vars, ring.D, terms)

    def serialize(self) -> str:
        return self.to_poly().serialize()

    def __repr__(self) -> str:
        return f"Element({self.serialize()!r})"


class RingDescriptor:
    """The truncated model F_p[x_1..x_n]/(I_0 + m^D).

    Immutable after construction; all derived structures (monomial
    multiplication table, echelon base subspace) are built eagerly.
    """

    def __init__(self, p: int, vars: Sequence[str], base_gens: Sequence[TruncPoly],
                 D: int):
        self.p = p
        self.vars = tuple(vars)
        self.D = D
        self.base_gen_polys = tuple(base_gens)

        self.monomials = monomials_below(len(self.vars), D)
        self.M = len(self.monomials)
        self.col_index = {e: i for i, e in enumerate(self.monomials)}
        self.deg_of_col = np.array([sum(e) for e in self.monomials], dtype=np.int64)
        # cuts[w] = number of columns of degree < w, for w = 0..D (clamped above).
        self._cuts = np.searchsorted(self.deg_of_col, np.arange(D + 1))
        self.mul_table = self._build_mul_table()

        base_rows = []
        for g in base_gens:
            vec = self.vector_of_poly(g)
            base_rows.extend(self._multiples_rows(vec))
        stacked = (np.vstack(base_rows) if base_rows
                   else np.zeros((0, self.M), dtype=np.int64))
        rows, pivots = linalg.rref(stacked, p)
        self.base_subspace = Subspace(self, rows, pivots)
        if pivots.size and pivots[0] == 0:
            raise RingConstructionError("the defining ideal contains a unit; "
                                        "the model would be the zero ring")
        self.dim = self.M - rows.shape[0]
        self.std_cols = self.base_subspace.nonpivots()

    # -- construction helpers ------------------------------------------------

    def _build_mul_table(self) -> np.ndarray:
        exps = np.array(self.monomials, dtype=np.int64)
        radix = self.D + 1
        weights = radix ** np.arange(exps.shape[1], dtype=np.int64)
        keys = exps @ weights
        lookup = np.full(int(keys.max()) * 2 + 2, -1, dtype=np.int64)
        lookup[keys] = np.arange(self.M)
        sum_keys = keys[:, None] + keys[None, :]
        sum_degs = self.deg_of_col[:, None] + self.deg_of_col[None, :]
        table = np.where(sum_degs < self.D,
                         lookup[np.minimum(sum_keys, lookup.size - 1)], -1)
        table = table.astype(np.int64)
        table.flags.writeable = False
        return table

    def cut(self, w: int) -> int:
        """Number of coordinates of degree < w (clamped to [0, D])."""
        if w <= 0:
            return 0
        if w >= self.D:
            return self.M
        return int(self._cuts[w])

    # -- vectors and normal forms ---------------------------------------------

    def vector_of_poly(self, poly: TruncPoly) -> np.ndarray:
        vec = np.zeros(self.M, dtype=np.int64)
        for exps, c in poly.terms.items():
            vec[self.col_index[exps]] = c
        return vec

    def _normal_form(self, vec: np.ndarray) -> np.ndarray:
        out = self.base_subspace.reduce(vec)[0]
        out.flags.writeable = False
        return out

    def element(self, source: "str | TruncPoly | Element") -> Element:
        if isinstance(source, Element):
            if source.ring is self:
                return source
            return self.element(source.poly)  # lift via the defining polynomial
        if isinstance(source, str):
            source = parse_poly(source, self)
        if (source.p, source.vars) != (self.p, self.vars):
            raise RingMismatchError("polynomial context does not match the ring")
        if source.trunc != self.D:
            source = TruncPoly(self.p, self.vars, self.D, source.terms)
        vec = self._normal_form(self.vector_of_poly(source))
        return Element(self, vec, source)

    def zero(self) -> Element:
        return self.element(TruncPoly.zero(self.p, self.vars, self.D))

    def one(self) -> Element:
        return self.element(TruncPoly.constant(1, self.p, self.vars, self.D))

    def variable(self, i: int) -> Element:
        return self.element(TruncPoly.variable(self.vars[i], self.p, self.vars, self.D))

    # -- fast scatter products -------------------------------------------------

    def scatter_by_monomial(self, col: int, vec: np.ndarray) -> np.ndarray:
        """Raw product (no normal form) of a coordinate vector with the
        basis monomial at ``col``; degree-overflow terms drop."""
        out = np.zeros(self.M + 1, dtype=np.int64)
        colmap = self.mul_table[col]
        targets = np.where(colmap >= 0, colmap, self.M)
        out[targets] = vec
        out[self.M] = 0
        return out[:self.M] % self.p

    def rows_times_variable(self, rows: np.ndarray, var_idx: int) -> np.ndarray:
        """Multiply each row by the variable x_{var_idx} (raw scatter)."""
        col = self.col_index[tuple(1 if j == var_idx else 0
                                   for j in range(len(self.vars)))]
        colmap = self.mul_table[col]
        targets = np.where(colmap >= 0, colmap, self.M)
        out = np.zeros((rows.shape[0], self.M + 1), dtype=np.int64)
        out[:, targets] = rows
        out[:, self.M] = 0
        return out[:, :self.M]

    def _multiples_rows(self, vec: np.ndarray) -> list[np.ndarray]:
        """Rows spanning {vec * mu : mu monomial, product degree < D}."""
        support = np.nonzero(vec)[0]
        if support.size == 0:
            return []
        order = int(self.deg_of_col[support[0]])
        num_mu = self.cut(self.D - order)
        coeffs = vec[support]
        idx = self.mul_table[:num_mu][:, support]
        rows = np.zeros((num_mu, self.M + 1), dtype=np.int64)
        cols = np.where(idx >= 0, idx, self.M)
        rows[np.arange(num_mu)[:, None], cols] = coeffs
        return [rows[:, :self.M] % self.p]

    # -- ideals as subspaces ----------------------------------------------------

    def ideal_subspace(self, gens: Iterable[Element]) -> Subspace:
        """Echelon basis of (generated ideal + defining ideal) inside V."""
        rows = [self.base_subspace.rows]
        for g in gens:
            if g.ring is not self:
                raise RingMismatchError("generator from a different ring")
            rows.extend(self._multiples_rows(g.vec))
        stacked = np.vstack(rows) if rows else np.zeros((0, self.M), dtype=np.int64)
        r, piv = linalg.rref(stacked, self.p)
        return Subspace(self, r, piv)

    def power_span(self, w: int) -> Subspace:
        """Subspace of m^w: every coordinate of degree >= w, plus the base."""
        cut = self.cut(w)
        eye = np.eye(self.M, dtype=np.int64)[cut:]
        return self.base_subspace.sum_rows(eye) if cut < self.M else self.base_subspace

    def rebuild(self, new_D: int) -> "RingDescriptor":
        """The same ring data at a different truncation order."""
        gens = [TruncPoly(self.p, self.vars, new_D, g.terms)
                for g in self.base_gen_polys]
        return RingDescriptor(self.p, self.vars, gens, new_D)

    def spec_tuple(self) -> tuple:
        """Hashable identity of the underlying data, ignoring D."""
        return (self.p, self.vars,
                tuple(sorted(g.serialize() for g in self.base_gen_polys)))

    def __repr__(self) -> str:
        gens = ", ".join(g.serialize() for g in self.base_gen_polys) or "0"
        return (f"RingDescriptor(F_{self.p}[{', '.join(self.vars)}] / "
                f"({gens}) + m^{self.D}, dim={self.dim})")


def build_ring(p: int, vars: Sequence[str], base_gens: Sequence[str | TruncPoly],
               D: int) -> RingDescriptor:
    """Validate inputs and construct the truncated model."""
    if not is_prime(p):
        raise RingConstructionError(f"{p} is not prime")
    if D < 2:
        raise RingConstructionError("truncation order must be at least 2")
    if len(set(vars)) != len(tuple(vars)):
        raise RingConstructionError("duplicate variable names")
    probe = type("_Ctx", (), {"p": p, "vars": tuple(vars), "D": D})()
    polys = []
    for g in base_gens:
        poly = parse_poly(g, probe) if isinstance(g, str) else g
        if poly.constant_term():
            raise RingConstructionError(
                f"generator {poly.serialize()!r} has nonzero constant term")
        polys.append(poly)
    return RingDescriptor(p, tuple(vars), polys, D)


def subspace_of_ideal(ring: RingDescriptor, gens: Sequence[Element]) -> Subspace:
    return ring.ideal_subspace(gens)


def nakayama_contains_power(ring: RingDescriptor, subspace: Subspace,
                            t: int) -> bool:
    """Sound certificate that m^t lies inside the ideal carried by ``subspace``.

    Checks m^t within (subspace + m^(t+1)) at the working truncation; by
    Nakayama this implies containment in the untruncated ring.  A False only
    says the certificate failed at this level.
    """
    if t + 1 > ring.D:
        raise TruncationError(f"certificate needs t+1 <= D, got t={t}, D={ring.D}")
    lo, hi = ring.cut(t), ring.cut(t + 1)
    if lo == hi:
        return True
    cut = hi
    keep = subspace.prefix_rank(cut)
    low_rows = subspace.rows[:keep, :cut]
    low_piv = subspace.pivots[:keep]
    block = np.zeros((hi - lo, cut), dtype=np.int64)
    block[np.arange(hi - lo), np.arange(lo, hi)] = 1
    reduced = linalg.reduce_rows(block, low_rows, low_piv, ring.p)
    return not reduced.any()


def two_level_value(compute: Callable[[RingDescriptor], int], ring: RingDescriptor,
                    delta: int) -> CertifiedValue:
    """Run a pure invariant at truncations D and D + delta and certify on
    agreement; disagreement is surfaced, never silently dropped."""
    levels = (ring.D, ring.D + delta)
    value_lo = compute(ring)
    if delta == 0:
        return CertifiedValue(value_lo, TWO_LEVEL, levels,
                              note="degenerate delta=0; weak certificate")
    value_hi = compute(ring.rebuild(ring.D + delta))
    if value_lo == value_hi:
        return CertifiedValue(value_lo, TWO_LEVEL, levels)
    return CertifiedValue(value_lo, UNCERTIFIED, levels,
                          note=f"levels {levels[0]}/{levels[1]} gave "
                               f"{value_lo}/{value_hi}")
