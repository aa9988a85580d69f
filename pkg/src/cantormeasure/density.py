"""Extremal interval densities and the exact Hausdorff / packing measures.

The density of an interval J is d(J) = lambda(J) / |J|^alpha.  The inverse
of the maximal density over all subintervals of [0,1] is the Hausdorff
measure of the attractor; the inverse of the minimal density over intervals
centered in the attractor is the packing measure.  Both extrema reduce to
finite searches over field intervals of an explicitly computable generation,
with three regimes for the maximum:

* separated lakes: the search generation k is the first with
  2 * beta_max(k) <= (gamma_min * min(D0, D1)) ** (1/(1-alpha));
* touching islands with multiplicatively dependent edge ratios: same shape
  of threshold with the lake length replaced by
  eta * beta_min(k0+1) * rho_1^{n_1};
* touching islands with independent edge ratios: the finite search is
  augmented by the closed-form two-sided value
  (Dbar0^{1/(1-alpha)} + Dbar1^{1/(1-alpha)})^{1-alpha}.

Deep generations are never materialized: the finite-type structure gives a
virtual island tree (each island expands into scaled child descriptors), and
the search runs branch-and-bound over pairs of tree atoms with the sound
upper bound lambda(hull) / gap^alpha.
"""

from __future__ import annotations

import heapq
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Optional

import gmpy2

from .generation import GenerationFrame, build_frames, frame_stats
from .ifs import MODE_RELAXED_B, IFSSpec
from .measure import MeasureModel, attach_measures
from .numerics import (
    CertifiedReal,
    PrecisionExhausted,
    cr_min,
    cr_pow,
    escalation_ladder,
    pow_certified,
    working_precision,
)
from .overlap import ChildDescriptor, TypeTable, ensure_types

CASE_SEPARATED = "separated-lakes"
CASE_TOUCHING_ARITHMETIC = "touching-arithmetic"
CASE_TOUCHING_NON_ARITHMETIC = "touching-non-arithmetic"
CASE_DEGENERATE = "degenerate-interval"

DEFAULT_SEARCH_ISLAND_CAP = 10**9


class DensityError(RuntimeError):
    pass


class AssumptionAViolated(DensityError):
    def __init__(self, island):
        super().__init__(
            "a constitutive interval of an island contains another; "
            "edge anchors are undefined"
        )
        self.island = island


class InfeasibleThreshold(DensityError):
    """The certified search generation is out of computational reach."""

    def __init__(self, k: int, islands: int, cap: int):
        super().__init__(
            f"search generation {k} needs about {islands} islands "
            f"(cap {cap}); refusing the search"
        )
        self.k = k
        self.islands = islands
        self.cap = cap


class BudgetExhausted(DensityError):
    def __init__(self, best):
        super().__init__("search budget exhausted; best-found value is NOT certified")
        self.best = best


# ---------------------------------------------------------------------------
# virtual island tree


@dataclass(frozen=True)
class VIsland:
    """An island known only through the finite-type structure."""

    left: Fraction
    length: Fraction
    type_id: int
    generation: int

    @property
    def right(self) -> Fraction:
        return self.left + self.length


class IslandTree:
    """Lazy self-similar island tree over a measure model.

    Children of an island are its type's child descriptors scaled into it;
    the validated classification makes this exactly the true island
    hierarchy, so generation-k geometry is navigable without ever holding
    generation k in memory.
    """

    def __init__(self, model: MeasureModel):
        self.model = model
        self.table = model.table
        self._child_descs = [info.children for info in self.table.types]

    def root(self) -> VIsland:
        return VIsland(Fraction(0), Fraction(1), 1, 0)

    def children(self, isl: VIsland) -> list[VIsland]:
        descs = self._child_descs[isl.type_id - 1]
        return [
            VIsland(
                isl.left + d.rel_left * isl.length,
                d.rel_length * isl.length,
                d.type_id,
                isl.generation + 1,
            )
            for d in descs
        ]

    def islands_at(self, gen: int, within: Optional[VIsland] = None) -> Iterable[VIsland]:
        stack = [within if within is not None else self.root()]
        while stack:
            isl = stack.pop()
            if isl.generation == gen:
                yield isl
            else:
                stack.extend(reversed(self.children(isl)))

    def measure(self, isl: VIsland) -> CertifiedReal:
        return self.model.measure_of(isl.length, isl.type_id)

    def field_measure(self, u: Fraction, v: Fraction, gen: int) -> CertifiedReal:
        """lambda([u, v]) for u, v island boundary points of generation <= gen.

        Sums the measures of maximal islands inside the window, descending
        only along the two boundary chains (O(gen * max children) work).
        """
        if u > v:
            raise ValueError("u > v")
        total = CertifiedReal.exact_int(0)

        def rec(isl: VIsland):
            nonlocal total
            if isl.right <= u or isl.left >= v:
                return
            if u <= isl.left and isl.right <= v:
                total = total + self.measure(isl)
                return
            if isl.generation == gen:
                raise ValueError("endpoints are not field points of this generation")
            for child in self.children(isl):
                rec(child)

        rec(self.root())
        return total

    def leftmost_chain_length(self, start_type: int, start_len: Fraction, depth: int) -> Fraction:
        t, L = start_type, start_len
        for _ in range(depth):
            d = self._child_descs[t - 1][0]
            t, L = d.type_id, d.rel_length * L
        return L

    def rightmost_chain_length(self, start_type: int, start_len: Fraction, depth: int) -> Fraction:
        t, L = start_type, start_len
        for _ in range(depth):
            d = self._child_descs[t - 1][-1]
            t, L = d.type_id, d.rel_length * L
        return L


# ---------------------------------------------------------------------------
# per-generation statistics from type recurrences (no enumeration)


def length_extrema_by_generation(table: TypeTable, gen: int) -> tuple[Fraction, Fraction]:
    """(beta_min, beta_max) at a generation, by dynamic programming on types."""
    lo: dict[int, Fraction] = {1: Fraction(1)}
    hi: dict[int, Fraction] = {1: Fraction(1)}
    for _ in range(gen):
        nlo: dict[int, Fraction] = {}
        nhi: dict[int, Fraction] = {}
        for t, L in lo.items():
            for d in table.type_of(t).children:
                val = L * d.rel_length
                if d.type_id not in nlo or val < nlo[d.type_id]:
                    nlo[d.type_id] = val
        for t, L in hi.items():
            for d in table.type_of(t).children:
                val = L * d.rel_length
                if d.type_id not in nhi or val > nhi[d.type_id]:
                    nhi[d.type_id] = val
        lo, hi = nlo, nhi
    return min(lo.values()), max(hi.values())


def island_count_at(table: TypeTable, gen: int) -> int:
    counts = {1: 1}
    for _ in range(gen):
        nxt: dict[int, int] = {}
        for t, c in counts.items():
            for d in table.type_of(t).children:
                nxt[d.type_id] = nxt.get(d.type_id, 0) + c
        counts = nxt
    return sum(counts.values())


# ---------------------------------------------------------------------------
# deterministic extremum tracking with precision escalation on ties


@dataclass
class Candidate:
    value: CertifiedReal
    key: tuple
    witness: "DensityWitness"
    refine: Optional[Callable[[], CertifiedReal]] = None


class ExtremumTracker:
    """Keeps the running min or max with a deterministic lexicographic
    tie-break; overlapping enclosures are re-evaluated at escalated
    precision before being declared ties."""

    def __init__(self, sense: str):
        assert sense in ("min", "max")
        self.sense = sense
        self.best: Optional[Candidate] = None

    def _beats(self, a: CertifiedReal, b: CertifiedReal) -> bool:
        return a.certainly_gt(b) if self.sense == "max" else a.certainly_lt(b)

    def consider(self, cand: Candidate) -> None:
        if self.best is None:
            self.best = cand
            return
        if self._beats(cand.value, self.best.value):
            self.best = cand
            return
        if self._beats(self.best.value, cand.value):
            return
        # overlapping: escalate both if possible, else tie-break on key
        if cand.refine is not None and self.best.refine is not None:
            for bits in escalation_ladder():
                with working_precision(bits):
                    cv = cand.refine()
                    bv = self.best.refine()
                if self._beats(cv, bv):
                    self.best = Candidate(cv, cand.key, cand.witness, cand.refine)
                    return
                if self._beats(bv, cv):
                    self.best = Candidate(bv, self.best.key, self.best.witness, self.best.refine)
                    return
        if cand.key < self.best.key:
            hull = cand.value.hull(self.best.value)
            self.best = Candidate(hull, cand.key, cand.witness, cand.refine)
        else:
            self.best = Candidate(
                self.best.value.hull(cand.value),
                self.best.key,
                self.best.witness,
                self.best.refine,
            )


# ---------------------------------------------------------------------------
# witnesses


@dataclass(frozen=True)
class DensityWitness:
    """Interval with rational endpoints whose density is reconstructible as
    (sum over pieces of |piece|^alpha * a_type) / (right-left)^alpha."""

    left: Fraction
    right: Fraction
    pieces: tuple[tuple[int, Fraction], ...]  # (type_id, island length)
    kind: str = "interval"

    def reconstruct(self, model: MeasureModel) -> CertifiedReal:
        total = CertifiedReal.exact_int(0)
        for type_id, length in self.pieces:
            total = total + model.measure_of(length, type_id)
        return total / pow_certified(self.right - self.left, model.alpha)


def witness_pieces(tree: IslandTree, u: Fraction, v: Fraction, gen: int):
    pieces = []

    def rec(isl: VIsland):
        if isl.right <= u or isl.left >= v:
            return
        if u <= isl.left and isl.right <= v:
            pieces.append((isl.type_id, isl.length))
            return
        if isl.generation == gen:
            raise ValueError("not field points")
        for child in tree.children(isl):
            rec(child)

    rec(tree.root())
    return tuple(pieces)


# ---------------------------------------------------------------------------
# boundary (prefix / suffix) density extrema


def _interval_density(tree: IslandTree, u: Fraction, v: Fraction, gen: int) -> CertifiedReal:
    return tree.field_measure(u, v, gen) / pow_certified(v - u, tree.model.alpha)


def prefix_generation(table: TypeTable, rho: Fraction, side: str) -> int:
    """Smallest generation whose edge island is no longer than ``rho``."""
    tree_walk = {"left": 0, "right": -1}[side]
    t, L = 1, Fraction(1)
    gen = 0
    while L > rho:
        d = table.type_of(t).children[tree_walk]
        t, L = d.type_id, d.rel_length * L
        gen += 1
        if gen > 100_000:
            raise DensityError("edge island length does not drop below the map ratio")
    return max(gen, 1)


def boundary_extremum(
    model: MeasureModel,
    tree: IslandTree,
    gen: int,
    side: str,
    sense: str,
    within: Optional[VIsland] = None,
) -> tuple[CertifiedReal, DensityWitness]:
    """Extremal density of prefixes [c, x] (side="left") or suffixes [y, d]
    (side="right") over field points of the given generation, optionally
    relative to one island of the tree.

    Branch-and-bound over atoms: for a prefix and an atom A, every candidate
    x in A satisfies lambda([c, x]) >= lambda([c, A.left]) and
    x - c <= A.right - c, which bounds the density from below (min sense);
    the max sense mirrors this.  Atoms split into their children until the
    target generation, where the candidates are the atom endpoints.
    """
    base = within if within is not None else tree.root()
    c = base.left if side == "left" else base.right
    tracker = ExtremumTracker(sense)
    counter = 0
    heap: list = []

    def atom_bound(atom: VIsland) -> Optional[CertifiedReal]:
        # candidates in the atom have measure between that of the short span
        # and the long span, and length between the near and far distances
        if side == "left":
            short = (c, atom.left)
            long_ = (c, atom.right)
            near, far = atom.left - c, atom.right - c
        else:
            short = (atom.right, c)
            long_ = (atom.left, c)
            near, far = c - atom.right, c - atom.left
        if sense == "min":
            num = tree.field_measure(short[0], short[1], atom.generation)
            return num / pow_certified(far, model.alpha)
        if near == 0:
            return None  # unbounded above; must refine
        num = tree.field_measure(long_[0], long_[1], atom.generation)
        return num / pow_certified(near, model.alpha)

    def push(atom: VIsland):
        nonlocal counter
        bound = atom_bound(atom)
        if bound is None:
            key = gmpy2.mpfr("-inf") if sense == "min" else gmpy2.mpfr("inf")
        else:
            key = bound.lo if sense == "min" else bound.hi
        counter += 1
        heapq.heappush(heap, (key if sense == "min" else -key, atom.left, counter, atom, bound))

    def evaluate(x: Fraction):
        u, v = (c, x) if side == "left" else (x, c)
        if u >= v:
            return
        val = _interval_density(tree, u, v, gen)
        wit = DensityWitness(u, v, witness_pieces(tree, u, v, gen))
        tracker.consider(
            Candidate(val, (u, v), wit, refine=lambda: _interval_density(tree, u, v, gen))
        )

    for atom in tree.children(base) if base.generation < gen else [base]:
        push(atom)
    # the far edge of the base region is always a candidate
    evaluate(base.right if side == "left" else base.left)

    while heap:
        _, _, _, atom, bound = heapq.heappop(heap)
        if tracker.best is not None and bound is not None:
            if sense == "min" and bound.certainly_gt(tracker.best.value):
                continue
            if sense == "max" and bound.certainly_lt(tracker.best.value):
                continue
        if atom.generation == gen:
            evaluate(atom.left)
            evaluate(atom.right)
            continue
        for child in tree.children(atom):
            push(child)

    assert tracker.best is not None
    return tracker.best.value, tracker.best.witness


# ---------------------------------------------------------------------------
# edge anchors


@dataclass(frozen=True)
class TypeAnchors:
    type_id: int
    v0_rel_ratio: Fraction
    v1_rel_ratio: Fraction
    i0_len: int
    i1_len: int


@dataclass(frozen=True)
class EdgeAnchors:
    per_type: tuple[TypeAnchors, ...]
    eta1: Fraction
    eta2: Fraction

    @property
    def eta(self) -> Fraction:
        return self.eta1 * self.eta2


def edge_anchors(table: TypeTable) -> EdgeAnchors:
    """Edge anchor data per overlap type.

    For an island I the leftmost constitutive map v0 shares I's left
    endpoint; i0_len is the least number of repeats of the leftmost IFS map
    needed to tuck v0's copy strictly left of every other constitutive
    interval (0 for single-vertex islands).  Mirrored on the right.  eta1 is
    the worst relative size of an edge vertex, eta2 the worst contraction of
    the repeated-symbol word; their product scales the minimal clean
    attractor copy available at any island edge.
    """
    spec = table.spec
    rho1 = spec.maps[0].ratio
    rhom = spec.maps[-1].ratio
    per_type = []
    eta1 = Fraction(1)
    eta2 = Fraction(1)
    for info in table.types:
        rep = info.representative
        verts = rep.vertices
        lefts = sorted(v.offset for v in verts)
        rights = sorted(v.offset + v.ratio for v in verts)
        v0 = min(verts, key=lambda v: (v.offset, -v.ratio))
        v1 = max(verts, key=lambda v: (v.offset + v.ratio, v.ratio))
        if v0.offset != rep.left or v1.offset + v1.ratio != rep.right:
            raise DensityError("island edges not realized by constitutive intervals")
        for u in verts:
            for w in verts:
                if u is w:
                    continue
                if u.offset <= w.offset and u.offset + u.ratio >= w.offset + w.ratio:
                    raise AssumptionAViolated(rep)
        if len(verts) == 1:
            i0 = i1 = 0
        else:
            second_left = min(x for x in lefts if x > rep.left)
            i0 = 1
            while v0.offset + v0.ratio * rho1**i0 >= second_left:
                i0 += 1
                if i0 > 10_000:
                    raise DensityError("left anchor does not separate")
            second_right = max(x for x in rights if x < rep.right)
            i1 = 1
            while v1.offset + v1.ratio * (1 - rhom**i1) <= second_right:
                i1 += 1
                if i1 > 10_000:
                    raise DensityError("right anchor does not separate")
        per_type.append(
            TypeAnchors(
                type_id=info.type_id,
                v0_rel_ratio=v0.ratio / rep.length,
                v1_rel_ratio=v1.ratio / rep.length,
                i0_len=i0,
                i1_len=i1,
            )
        )
        eta1 = min(eta1, per_type[-1].v0_rel_ratio, per_type[-1].v1_rel_ratio)
        eta2 = min(eta2, rho1 ** per_type[-1].i0_len, rhom ** per_type[-1].i1_len)
    return EdgeAnchors(per_type=tuple(per_type), eta1=eta1, eta2=eta2)


# ---------------------------------------------------------------------------
# multiplicative dependence of the edge ratios


def commensurability(rho1: Fraction, rhom: Fraction) -> Optional[tuple[int, int]]:
    """Minimal positive (n1, nm) with rho1**n1 == rhom**nm, or None.

    Exact: factor both rationals into primes; a solution exists iff the
    exponent vectors are parallel.
    """

    def factor(n: int) -> dict[int, int]:
        out: dict[int, int] = {}
        d = 2
        while d * d <= n:
            while n % d == 0:
                out[d] = out.get(d, 0) + 1
                n //= d
            d += 1 if d == 2 else 2
        if n > 1:
            out[n] = out.get(n, 0) + 1
        return out

    def exponents(q: Fraction) -> dict[int, int]:
        pos = factor(q.numerator)
        for p, e in factor(q.denominator).items():
            pos[p] = pos.get(p, 0) - e
        return {p: e for p, e in pos.items() if e}

    if not (0 < rho1 < 1 and 0 < rhom < 1):
        raise ValueError("ratios must lie in (0, 1)")
    if rho1 == rhom:
        return (1, 1)
    e1 = exponents(rho1)
    em = exponents(rhom)
    if set(e1) != set(em):
        return None
    from math import gcd

    g1 = 0
    for e in e1.values():
        g1 = gcd(g1, abs(e))
    gm = 0
    for e in em.values():
        gm = gcd(gm, abs(e))
    # direction vectors must match exactly
    for p in e1:
        if e1[p] * gm != em[p] * g1:
            return None
    g = gcd(g1, gm)
    return (gm // g, g1 // g)


# ---------------------------------------------------------------------------
# distance-to-attractor oracle


def dist_to_attractor(
    model: MeasureModel,
    tree: IslandTree,
    x: Fraction,
    eps: Fraction,
) -> tuple[Fraction, Fraction]:
    """Exact rational enclosure [lo, hi] of dist(x, K) with hi - lo <= eps.

    The attractor is squeezed between island hulls (lower bound) and island
    endpoints, which belong to it (upper bound); descending into the at most
    two islands nearest to x tightens both sides geometrically.
    """
    if not (0 <= x <= 1):
        raise ValueError("x must lie in [0, 1]")
    eps = Fraction(eps)
    candidates = [tree.root()]
    upper = min(x, 1 - x)  # endpoints 0 and 1 are in the attractor
    while True:
        lower = None
        for isl in candidates:
            d = max(Fraction(0), isl.left - x, x - isl.right)
            if lower is None or d < lower:
                lower = d
            upper = min(upper, abs(x - isl.left), abs(x - isl.right))
        if lower is None:
            raise DensityError("distance oracle lost all candidates")
        if upper - lower <= eps:
            return lower, upper
        nxt = []
        for isl in candidates:
            hull_dist = max(Fraction(0), isl.left - x, x - isl.right)
            if hull_dist > upper:
                continue
            nxt.extend(tree.children(isl))
        candidates = [
            isl
            for isl in nxt
            if max(Fraction(0), isl.left - x, x - isl.right) <= upper
        ]


# ---------------------------------------------------------------------------
# branch-and-bound search for the maximal density over field intervals


@dataclass(frozen=True)
class SearchOutcome:
    value: CertifiedReal
    witness: DensityWitness
    certified: bool
    nodes: int
    leaves: int


CONSTRAINT_ALL = "all"
CONSTRAINT_CROSS = "cross-lake"


def search_field_max(
    model: MeasureModel,
    gen: int,
    *,
    constraint: str = CONSTRAINT_CROSS,
    cross_generation: Optional[int] = None,
    length_floor: Fraction = Fraction(0),
    budget_seconds: Optional[float] = None,
    tree: Optional[IslandTree] = None,
) -> SearchOutcome:
    """Certified maximum of d over field intervals of a generation.

    constraint="cross-lake": only intervals whose endpoints lie in distinct
    islands of ``cross_generation`` (they then contain a whole lake of that
    generation).  constraint="all": every field interval.  ``length_floor``
    additionally restricts to intervals at least that long - sound whenever
    the calling theorem's blow-up argument guarantees a maximizer of at
    least that length.

    Branch-and-bound over pairs of tree atoms (islands of intermediate
    generations).  A pair (A, B) bounds all candidates [u, v], u in A,
    v in B by lambda([A.left, B.right]) / max(gap(A, B), floor)^alpha; the
    bound is monotone under refinement, every leaf evaluation is exact, and
    processing order is deterministic, so the result is schedule independent
    with ties resolved toward the lexicographically smallest interval.
    """
    tree = tree or IslandTree(model)
    alpha = model.alpha
    tracker = ExtremumTracker("max")
    t0 = time.monotonic()
    counter = 0
    nodes = leaves = 0
    heap: list = []
    inf = gmpy2.mpfr("inf")

    def pair_bound(a: VIsland, b: VIsland) -> Optional[CertifiedReal]:
        gap = b.left - a.right
        if gap < length_floor:
            gap = length_floor
        if gap <= 0:
            return None
        num = tree.field_measure(a.left, b.right, max(a.generation, b.generation))
        return num / pow_certified(gap, alpha)

    def push_pair(a: VIsland, b: VIsland):
        nonlocal counter
        bound = pair_bound(a, b)
        key = inf if bound is None else bound.hi
        counter += 1
        heapq.heappush(
            heap, (-key, a.left, b.left, a.generation, b.generation, counter, a, b, bound)
        )

    def push_same(a: VIsland):
        nonlocal counter
        counter += 1
        heapq.heappush(
            heap,
            (-inf, a.left, a.left, a.generation, a.generation, counter, a, None, None),
        )

    def evaluate(u: Fraction, v: Fraction):
        nonlocal leaves
        if u >= v:
            return
        if v - u < length_floor:
            return
        leaves += 1
        val = _interval_density(tree, u, v, gen)
        wit = DensityWitness(u, v, witness_pieces(tree, u, v, gen))
        tracker.consider(
            Candidate(val, (u, v), wit, refine=lambda: _interval_density(tree, u, v, gen))
        )

    if constraint == CONSTRAINT_CROSS:
        if cross_generation is None:
            raise ValueError("cross-lake constraint needs cross_generation")
        tops = list(tree.islands_at(cross_generation))
        for i in range(len(tops)):
            for j in range(i + 1, len(tops)):
                push_pair(tops[i], tops[j])
        # islands of the crossing generation are intervals of the family's
        # closure; their densities seed the incumbent so pruning bites early
        for isl in tops:
            evaluate(isl.left, isl.right)
    elif constraint == CONSTRAINT_ALL:
        push_same(tree.root())
    else:
        raise ValueError(f"unknown constraint {constraint!r}")

    while heap:
        if budget_seconds is not None and time.monotonic() - t0 > budget_seconds:
            if tracker.best is None:
                raise BudgetExhausted(None)
            raise BudgetExhausted(
                SearchOutcome(tracker.best.value, tracker.best.witness, False, nodes, leaves)
            )
        neg_key, _, _, _, _, _, a, b, bound = heapq.heappop(heap)
        nodes += 1
        if (
            tracker.best is not None
            and bound is not None
            and bound.certainly_le(tracker.best.value)
        ):
            # the heap is ordered by upper bound, so no remaining node can
            # exceed the incumbent value
            break
        if b is None:
            # same-island node
            if a.generation == gen:
                evaluate(a.left, a.right)
                continue
            kids = tree.children(a)
            for i in range(len(kids)):
                push_same(kids[i])
                for j in range(i + 1, len(kids)):
                    push_pair(kids[i], kids[j])
            continue
        if a.generation == gen and b.generation == gen:
            evaluate(a.left, b.left)
            evaluate(a.left, b.right)
            evaluate(a.right, b.left)
            evaluate(a.right, b.right)
            continue
        # split the coarser side (ties: the longer one, then the left one)
        if (a.generation, -a.length, Fraction(0)) <= (b.generation, -b.length, Fraction(1)):
            for child in tree.children(a):
                push_pair(child, b)
        else:
            for child in tree.children(b):
                push_pair(a, child)

    assert tracker.best is not None
    return SearchOutcome(tracker.best.value, tracker.best.witness, True, nodes, leaves)


# ---------------------------------------------------------------------------
# threshold generations


def _rational_le_cr(q: Fraction, compute_rhs: Callable[[], CertifiedReal]) -> bool:
    """Certified decision of q <= rhs for an escalation-aware rhs closure."""
    for bits in escalation_ladder():
        with working_precision(bits):
            rhs = compute_rhs()
        if q <= rhs.as_fractions()[0]:
            return True
        if q > rhs.as_fractions()[1]:
            return False
    raise PrecisionExhausted("threshold comparison undecidable at precision cap")


def max_density_threshold(
    table: TypeTable,
    alpha: CertifiedReal,
    scale: Fraction,
    min_lower_boundary: CertifiedReal,
    k_min: int,
    k_cap: int = 100_000,
) -> int:
    """Smallest k >= k_min with 2 * beta_max(k) <= (scale * minD)^(1/(1-alpha)).

    ``scale`` is the case-dependent rational length floor (minimal lake, or
    eta * beta_min(k0+1) * rho_1^{n1}, or eta * min(beta_min, positive lake
    minimum)); minD is min(D0_lower, D1_lower).
    """
    if scale <= 0:
        raise DensityError("threshold scale must be positive")

    def rhs() -> CertifiedReal:
        base = min_lower_boundary * CertifiedReal.from_rational(scale)
        if not base.lo > 0:
            raise DensityError("threshold base not certainly positive")
        exponent = CertifiedReal.exact_int(1) / (CertifiedReal.exact_int(1) - alpha)
        return cr_pow(base, exponent)

    k = max(k_min, 1)
    while k <= k_cap:
        beta_max = length_extrema_by_generation(table, k)[1]
        if _rational_le_cr(2 * beta_max, rhs):
            return k
        k += 1
    raise DensityError(f"no threshold generation below {k_cap}")


def boundary_stabilization_threshold(
    table: TypeTable,
    alpha: CertifiedReal,
    rho: Fraction,
    opposite_min: CertifiedReal,
    k_cap: int = 100_000,
) -> int:
    """Smallest k with beta_max(k) <= (rho * opposite_min)^(1/(1-alpha));
    the prefix (suffix) maximum is attained on that generation's field."""

    def rhs() -> CertifiedReal:
        base = opposite_min * CertifiedReal.from_rational(rho)
        exponent = CertifiedReal.exact_int(1) / (CertifiedReal.exact_int(1) - alpha)
        return cr_pow(base, exponent)

    k = 1
    while k <= k_cap:
        beta_max = length_extrema_by_generation(table, k)[1]
        if _rational_le_cr(beta_max, rhs):
            return k
        k += 1
    raise DensityError(f"no boundary threshold below {k_cap}")


# ---------------------------------------------------------------------------
# boundary density bundle (standard and relaxed modes)


@dataclass
class BoundaryDensities:
    d0_lower: CertifiedReal
    d1_lower: CertifiedReal
    d0_witness: DensityWitness
    d1_witness: DensityWitness
    k_left: int
    k_right: int
    per_type_lower: Optional[dict] = None  # type_id -> (d0_i, d1_i), relaxed mode
    d0_upper: Optional[CertifiedReal] = None
    d1_upper: Optional[CertifiedReal] = None
    k1_upper: Optional[int] = None
    k2_upper: Optional[int] = None


def boundary_densities(model: MeasureModel, tree: IslandTree) -> BoundaryDensities:
    """Minimal prefix and suffix densities at their stabilization
    generations (the smallest generation whose edge island is shorter than
    the corresponding edge map ratio)."""
    spec = model.spec
    table = model.table
    k_left = prefix_generation(table, spec.maps[0].ratio, "left")
    k_right = prefix_generation(table, spec.maps[-1].ratio, "right")
    d0, w0 = boundary_extremum(model, tree, k_left, "left", "min")
    d1, w1 = boundary_extremum(model, tree, k_right, "right", "min")
    out = BoundaryDensities(
        d0_lower=d0, d1_lower=d1, d0_witness=w0, d1_witness=w1,
        k_left=k_left, k_right=k_right,
    )
    if spec.mode == MODE_RELAXED_B:
        per_type: dict[int, tuple[CertifiedReal, CertifiedReal]] = {}
        for info in table.types:
            rep = info.representative
            base = VIsland(rep.left, rep.length, info.type_id, rep.generation)
            # relative stabilization depth: edge descendant of the island
            # must drop below the edge ratio times the island length
            depth_l = 1
            while (
                tree.leftmost_chain_length(info.type_id, rep.length, depth_l)
                > spec.maps[0].ratio * rep.length
            ):
                depth_l += 1
            depth_r = 1
            while (
                tree.rightmost_chain_length(info.type_id, rep.length, depth_r)
                > spec.maps[-1].ratio * rep.length
            ):
                depth_r += 1
            d0_i, _ = boundary_extremum(
                model, tree, rep.generation + depth_l, "left", "min", within=base
            )
            d1_i, _ = boundary_extremum(
                model, tree, rep.generation + depth_r, "right", "min", within=base
            )
            per_type[info.type_id] = (d0_i, d1_i)
        out.per_type_lower = per_type
        # the relaxed construction only yields suffix witnesses, so the
        # suffix minimum must govern; take the worst suffix value over types
        # and require (certified failure aborts) D1 <= D0
        d1_all = cr_min([v[1] for v in per_type.values()])
        out.d1_lower = d1_all
        out.d0_lower = per_type[1][0]
        if out.d1_lower.certainly_gt(out.d0_lower):
            raise DensityError(
                "relaxed mode guard failed: suffix density minimum exceeds "
                "prefix density minimum"
            )
    return out


def boundary_upper(model, tree, bnd: BoundaryDensities) -> None:
    """Fill the maximal prefix/suffix densities (needed only in the
    non-arithmetic touching case)."""
    spec = model.spec
    table = model.table
    if bnd.d0_upper is not None:
        return
    k1 = boundary_stabilization_threshold(
        table, model.alpha, spec.maps[0].ratio, bnd.d1_lower
    )
    k2 = boundary_stabilization_threshold(
        table, model.alpha, spec.maps[-1].ratio, bnd.d0_lower
    )
    bnd.k1_upper, bnd.k2_upper = k1, k2
    bnd.d0_upper, _ = boundary_extremum(model, tree, k1, "left", "max")
    bnd.d1_upper, _ = boundary_extremum(model, tree, k2, "right", "max")


# ---------------------------------------------------------------------------
# d_max and d_min


@dataclass
class ExtremalDensity:
    value: CertifiedReal
    witness: DensityWitness
    case: str
    thresholds: dict
    certified: bool
    measure: CertifiedReal  # 1 / value


def _invert(value: CertifiedReal) -> CertifiedReal:
    return CertifiedReal.exact_int(1) / value


def compute_dmax(
    model: MeasureModel,
    *,
    tree: Optional[IslandTree] = None,
    boundaries: Optional[BoundaryDensities] = None,
    anchors: Optional[EdgeAnchors] = None,
    search_island_cap: int = DEFAULT_SEARCH_ISLAND_CAP,
    max_generation: Optional[int] = None,
    budget_seconds: Optional[float] = None,
) -> ExtremalDensity:
    """Maximal interval density and the Hausdorff measure 1/d_max."""
    if model.degenerate:
        one = CertifiedReal.exact_int(1)
        wit = DensityWitness(Fraction(0), Fraction(1), ((1, Fraction(1)),))
        return ExtremalDensity(one, wit, CASE_DEGENERATE, {}, True, one)

    spec = model.spec
    table = model.table
    tree = tree or IslandTree(model)
    k0 = table.k0
    frame = build_frames(spec, k0 + 1, _cache=table.frames)[k0 + 1]
    ensure_types(table, k0 + 1)
    stats = frame_stats(frame)
    bnd = boundaries or boundary_densities(model, tree)
    min_boundary = cr_min([bnd.d0_lower, bnd.d1_lower])
    thresholds: dict = {"k0": k0, "k_left": bnd.k_left, "k_right": bnd.k_right}

    combined: Optional[CertifiedReal] = None
    if stats.gamma_min is None:
        raise DensityError("single island at generation k0+1; nothing to search")
    if stats.gamma_min > 0:
        case = CASE_SEPARATED
        scale = stats.gamma_min
        floor = stats.gamma_min
        k = max_density_threshold(table, model.alpha, scale, min_boundary, k0 + 1)
    else:
        anchors = anchors or edge_anchors(table)
        eta = anchors.eta
        dep = commensurability(spec.maps[0].ratio, spec.maps[-1].ratio)
        if dep is not None:
            case = CASE_TOUCHING_ARITHMETIC
            n1, nm = dep
            thresholds["n1"], thresholds["nm"] = n1, nm
            scale = eta * stats.beta_min * spec.maps[0].ratio ** n1
            floor = scale
            k = max_density_threshold(table, model.alpha, scale, min_boundary, k0 + 1)
        else:
            case = CASE_TOUCHING_NON_ARITHMETIC
            if stats.gamma_min_pos is not None:
                scale = eta * min(stats.beta_min, stats.gamma_min_pos)
            else:
                scale = eta * stats.beta_min
            floor = scale
            k = max_density_threshold(table, model.alpha, scale, min_boundary, k0 + 1)
            boundary_upper(model, tree, bnd)
            thresholds["k1"], thresholds["k2"] = bnd.k1_upper, bnd.k2_upper
            exponent = CertifiedReal.exact_int(1) / (CertifiedReal.exact_int(1) - model.alpha)
            back = CertifiedReal.exact_int(1) - model.alpha
            combined = cr_pow(
                cr_pow(bnd.d0_upper, exponent) + cr_pow(bnd.d1_upper, exponent), back
            )
    thresholds["k"] = k
    thresholds["eta"] = str(anchors.eta) if anchors is not None else None

    count = island_count_at(table, k)
    if max_generation is not None and k > max_generation:
        raise InfeasibleThreshold(k, count, search_island_cap)
    if count > search_island_cap:
        raise InfeasibleThreshold(k, count, search_island_cap)

    outcome = search_field_max(
        model,
        k,
        constraint=CONSTRAINT_CROSS,
        cross_generation=k0 + 1,
        length_floor=floor,
        budget_seconds=budget_seconds,
        tree=tree,
    )
    value, witness = outcome.value, outcome.witness
    if combined is not None and combined.certainly_gt(value):
        value = combined
        witness = DensityWitness(
            Fraction(0), Fraction(1), (), kind="two-sided-combined"
        )
    elif combined is not None and not combined.certainly_lt(value):
        value = value.hull(combined)
    return ExtremalDensity(
        value=value,
        witness=witness,
        case=case,
        thresholds=thresholds,
        certified=outcome.certified,
        measure=_invert(value),
    )


@dataclass
class CenteredPair:
    i1: int
    i2: int
    numerator: CertifiedReal
    gap: Fraction
    dist: tuple[Fraction, Fraction]
    value: CertifiedReal


def centered_pair_minimum(
    model: MeasureModel,
    tree: IslandTree,
    dist_tol: Fraction,
) -> tuple[Optional[CertifiedReal], Optional[DensityWitness], list[CenteredPair]]:
    """Minimum over island pairs (i1 < i2) of generation k0+1 of the density
    of the widest interval centered in the attractor that contains islands
    i1+1..i2 and no part of islands i1, i2+1.

    The interval length is gap - 2*dist(midpoint, K) with
    gap = a_{i2+1} - b_{i1}; the distance oracle is tightened until the
    denominator's power has negligible relative width.
    """
    table = model.table
    k0 = table.k0
    frame = build_frames(model.spec, k0 + 1, _cache=table.frames)[k0 + 1]
    ensure_types(table, k0 + 1)
    attach_measures(model, frame)
    islands = frame.islands
    l = len(islands)
    if l < 3:
        return None, None, []
    tracker = ExtremumTracker("min")
    pairs: list[CenteredPair] = []
    for i1 in range(l - 2):
        for i2 in range(i1 + 1, l - 1):
            num = frame.prefix_measures[islands[i2].right] - frame.prefix_measures[
                islands[i1].right
            ]
            gap = islands[i2 + 1].left - islands[i1].right
            mid = (islands[i2 + 1].left + islands[i1].right) / 2
            eps = max(gap, Fraction(1)) * Fraction(dist_tol)

            def denom_power(eps_val: Fraction):
                dlo, dhi = dist_to_attractor(model, tree, mid, eps_val)
                den_lo = gap - 2 * dhi
                den_hi = gap - 2 * dlo
                return (dlo, dhi), den_lo, den_hi

            dist_pair, den_lo, den_hi = denom_power(eps)
            attempts = 0
            while den_lo <= 0 and attempts < 6:
                eps /= 10**6
                dist_pair, den_lo, den_hi = denom_power(eps)
                attempts += 1
            if den_lo <= 0:
                raise DensityError(
                    "centered-pair denominator not certainly positive at the "
                    "distance oracle's limit"
                )
            den = cr_pow(CertifiedReal.from_pair(den_lo, den_hi), model.alpha)
            value = num / den
            pairs.append(CenteredPair(i1 + 1, i2 + 1, num, gap, dist_pair, value))
            witness = DensityWitness(
                islands[i1].right,
                islands[i2 + 1].left,
                tuple(
                    (islands[j].type_id, islands[j].length)
                    for j in range(i1 + 1, i2 + 1)
                ),
                kind="centered-pair",
            )
            tracker.consider(Candidate(value, (islands[i1].right, islands[i2 + 1].left), witness))
    if tracker.best is None:
        return None, None, pairs
    return tracker.best.value, tracker.best.witness, pairs


def compute_dmin(
    model: MeasureModel,
    *,
    tree: Optional[IslandTree] = None,
    boundaries: Optional[BoundaryDensities] = None,
) -> ExtremalDensity:
    """Minimal centered density and the packing measure 1/d_min."""
    if model.degenerate:
        one = CertifiedReal.exact_int(1)
        wit = DensityWitness(Fraction(0), Fraction(1), ((1, Fraction(1)),))
        return ExtremalDensity(one, wit, CASE_DEGENERATE, {}, True, one)
    spec = model.spec
    tree = tree or IslandTree(model)
    bnd = boundaries or boundary_densities(model, tree)
    half_pow = pow_certified(Fraction(1, 2), model.alpha)
    candidates: list[tuple[CertifiedReal, DensityWitness]] = []
    if spec.mode == MODE_RELAXED_B:
        # only the suffix construction is available without the left half of
        # the edge identity, so the prefix candidate is dropped
        candidates.append(
            (
                half_pow * bnd.d1_lower,
                DensityWitness(
                    bnd.d1_witness.left,
                    bnd.d1_witness.right,
                    bnd.d1_witness.pieces,
                    kind="suffix-reflected",
                ),
            )
        )
    else:
        candidates.append(
            (
                half_pow * bnd.d0_lower,
                DensityWitness(
                    bnd.d0_witness.left,
                    bnd.d0_witness.right,
                    bnd.d0_witness.pieces,
                    kind="prefix-reflected",
                ),
            )
        )
        candidates.append(
            (
                half_pow * bnd.d1_lower,
                DensityWitness(
                    bnd.d1_witness.left,
                    bnd.d1_witness.right,
                    bnd.d1_witness.pieces,
                    kind="suffix-reflected",
                ),
            )
        )
    d_pairs, pair_witness, _ = centered_pair_minimum(
        model, tree, Fraction(spec.dist_tol)
    )
    if d_pairs is not None:
        candidates.append((d_pairs, pair_witness))
    tracker = ExtremumTracker("min")
    for idx, (val, wit) in enumerate(candidates):
        tracker.consider(Candidate(val, (idx, wit.left, wit.right), wit))
    best = tracker.best
    thresholds = {"k0": model.table.k0, "k_left": bnd.k_left, "k_right": bnd.k_right}
    return ExtremalDensity(
        value=best.value,
        witness=best.witness,
        case="centered-minimum",
        thresholds=thresholds,
        certified=True,
        measure=_invert(best.value),
    )
