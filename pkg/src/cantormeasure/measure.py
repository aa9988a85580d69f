"""Dimension, Perron vector and the normalized measure on islands.

The dimension is the unique s with spectral radius r(A_s) = 1, where A_s is
the weighted incidence matrix.  r(A_s) is strictly decreasing in s, so the
dimension is found by bisection; each spectral radius is enclosed with
Collatz-Wielandt bounds (min and max of (Bv)_i / v_i bracket r(B) for any
positive v) applied to B = A_s + I, whose primitivity makes the bounds
converge even for periodic incidence patterns.

The measure of an island of type i is lambda(I) = |I|^alpha * a_i with the
1-eigenvector a normalized so a_1 = 1; everything downstream consumes
islands only through this function and interval queries backed by per-frame
prefix sums.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from .generation import GenerationFrame, Island
from .ifs import IFSSpec
import gmpy2

from .numerics import (
    CertifiedReal,
    ConvergenceError,
    PrecisionExhausted,
    cr_sum,
    escalation_ladder,
    get_precision,
    pow_certified,
    solve_monotone_root,
    working_precision,
)
from .overlap import IncidenceTemplate, TypeTable

DIMENSION_BISECTION_FLOOR = Fraction(1, 10**13)


class MeasureError(RuntimeError):
    pass


class NotIrreducibleError(MeasureError):
    pass


def _rational_det(matrix: list[list[Fraction]]) -> Fraction:
    """Exact determinant by fraction-free-ish Gaussian elimination."""
    n = len(matrix)
    m = [row[:] for row in matrix]
    det = Fraction(1)
    for col in range(n):
        pivot = None
        for r in range(col, n):
            if m[r][col] != 0:
                pivot = r
                break
        if pivot is None:
            return Fraction(0)
        if pivot != col:
            m[col], m[pivot] = m[pivot], m[col]
            det = -det
        det *= m[col][col]
        inv = m[col][col]
        for r in range(col + 1, n):
            if m[r][col] != 0:
                factor = m[r][col] / inv
                for c in range(col, n):
                    m[r][c] -= factor * m[col][c]
    return det


def template_matrix(template: IncidenceTemplate, s) -> list[list[CertifiedReal]]:
    """A_s with certified entries (s is a Fraction or CertifiedReal)."""
    zero = CertifiedReal.exact_int(0)
    rows = []
    for i in range(template.q):
        row = []
        for j in range(template.q):
            cell = template.entries[i][j]
            if not cell:
                row.append(zero)
            else:
                row.append(cr_sum(pow_certified(r, s) for r in cell))
        rows.append(row)
    return rows


def spectral_radius(
    matrix: list[list[CertifiedReal]],
    *,
    max_iterations: int = 400,
    decide_vs: Optional[Fraction] = None,
) -> CertifiedReal:
    """Certified enclosure of the spectral radius of a nonnegative matrix.

    Power iteration on B = A + I; successive Collatz-Wielandt brackets are
    intersected (each contains the true value, so the intersection does).
    With ``decide_vs`` set, iteration stops as soon as the bracket separates
    from that value.
    """
    q = len(matrix)
    one = CertifiedReal.exact_int(1)
    if q == 1:
        return matrix[0][0]
    v = [one for _ in range(q)]
    bracket: Optional[CertifiedReal] = None
    for _ in range(max_iterations):
        w = []
        for i in range(q):
            acc = v[i]
            row = matrix[i]
            for j in range(q):
                entry = row[j]
                if entry.hi != 0:
                    acc = acc + entry * v[j]
            w.append(acc)
        ratios = [w[i] / v[i] for i in range(q)]
        lo = min(r.lo for r in ratios)
        hi = max(r.hi for r in ratios)
        cur = CertifiedReal(lo, hi) - 1
        if bracket is None:
            bracket = cur
        else:
            new_lo = max(bracket.lo, cur.lo)
            new_hi = min(bracket.hi, cur.hi)
            if new_lo > new_hi:
                # can only happen through rounding noise; keep the older bracket
                new_lo, new_hi = bracket.lo, bracket.hi
            improved = new_lo > bracket.lo or new_hi < bracket.hi
            bracket = CertifiedReal(new_lo, new_hi)
            if not improved:
                break
        if decide_vs is not None and (
            bracket.certainly_lt(decide_vs) or bracket.certainly_gt(decide_vs)
        ):
            break
        # renormalize with a point scalar; dividing by an interval would
        # compound correlated widths geometrically
        scale = CertifiedReal(gmpy2.mpfr(1), gmpy2.mpfr(1)) / CertifiedReal(w[0].lo, w[0].lo)
        v = [w[i] * scale for i in range(q)]
    return bracket


def is_degenerate(template: IncidenceTemplate) -> bool:
    """True iff r(A_1) = 1, i.e. the attractor has dimension 1.

    Row sums of A_1 never exceed 1 (children are disjoint subintervals of
    their parent), so r(A_1) <= 1 with equality iff 1 is an eigenvalue;
    that makes the exact rational determinant test det(I - A_1) = 0 a
    complete decision procedure.
    """
    q = template.q
    a1 = [
        [sum(template.entries[i][j], Fraction(0)) for j in range(q)]
        for i in range(q)
    ]
    for i in range(q):
        a1[i][i] = a1[i][i] - 1
    return _rational_det(a1) == 0


def solve_dimension(template: IncidenceTemplate, tol) -> CertifiedReal:
    """Certified dimension: the unique root of r(A_s) = 1 on (0, 1).

    Raises :class:`MeasureError` for degenerate (dimension-1) templates;
    callers are expected to test :func:`is_degenerate` first.
    """
    from .overlap import check_irreducible

    if not check_irreducible(template):
        raise NotIrreducibleError("weighted incidence template is not irreducible")
    if is_degenerate(template):
        raise MeasureError("degenerate template: dimension is 1")
    tol = max(Fraction(tol), DIMENSION_BISECTION_FLOOR)

    def f(s: Fraction) -> CertifiedReal:
        return spectral_radius(template_matrix(template, s), decide_vs=Fraction(1)) - 1

    return solve_monotone_root(f, (Fraction(0), Fraction(1)), tol)


def _interval_gauss_solve(
    mat: list[list[CertifiedReal]], rhs: list[CertifiedReal]
) -> Optional[list[CertifiedReal]]:
    """Interval Gaussian elimination; the result encloses the solutions of
    every point system inside the interval data.  Returns None when a pivot
    interval straddles zero (retry at higher precision)."""
    n = len(mat)
    m = [row[:] + [rhs[i]] for i, row in enumerate(mat)]
    for col in range(n):
        pivot = None
        for r in range(col, n):
            if not (m[r][col].lo <= 0 <= m[r][col].hi):
                pivot = r
                break
        if pivot is None:
            return None
        m[col], m[pivot] = m[pivot], m[col]
        for r in range(col + 1, n):
            if m[r][col].lo == 0 and m[r][col].hi == 0:
                continue
            factor = m[r][col] / m[col][col]
            for c in range(col, n + 1):
                m[r][c] = m[r][c] - factor * m[col][c]
    x: list[Optional[CertifiedReal]] = [None] * n
    for r in range(n - 1, -1, -1):
        acc = m[r][n]
        for c in range(r + 1, n):
            acc = acc - m[r][c] * x[c]
        x[r] = acc / m[r][r]
    return x


def principal_vector(
    template: IncidenceTemplate,
    alpha: CertifiedReal,
    tol: Fraction = Fraction(1, 10**10),
) -> tuple[CertifiedReal, ...]:
    """1-eigenvector of A_alpha normalized so the root coordinate is 1.

    With a_1 pinned to 1 the remaining coordinates solve the linear system
    (I - A') x = c, where A' drops the first row and column and c is the
    first column; A' has spectral radius strictly below 1 for irreducible
    templates, so the system is nonsingular and interval Gaussian
    elimination returns a certified enclosure of the true eigenvector.
    The certified residual ||A a - a||_inf <= tol is verified afterwards.
    """
    q = template.q
    one = CertifiedReal.exact_int(1)
    if q == 1:
        return (one,)
    tol = Fraction(tol)

    for bits in escalation_ladder():
        with working_precision(bits):
            mat = template_matrix(template, alpha)
            sub = [
                [
                    (one if i == j else CertifiedReal.exact_int(0)) - mat[i][j]
                    for j in range(1, q)
                ]
                for i in range(1, q)
            ]
            rhs = [mat[i][0] for i in range(1, q)]
            tail = _interval_gauss_solve(sub, rhs)
            if tail is None:
                continue
            v = [one] + tail
            residual_ok = True
            for i in range(q):
                acc = -v[i]
                for j in range(q):
                    if mat[i][j].hi != 0:
                        acc = acc + mat[i][j] * v[j]
                if not (abs(acc.lo) <= tol and abs(acc.hi) <= tol):
                    residual_ok = False
                    break
            if residual_ok:
                if any(not (vi.lo > 0) for vi in v):
                    raise MeasureError("eigenvector coordinate not certainly positive")
                return tuple(v)
    raise PrecisionExhausted(
        f"eigenvector residual above {float(tol)} at the precision cap"
    )


@dataclass
class MeasureModel:
    spec: IFSSpec
    table: TypeTable
    template: IncidenceTemplate
    alpha: CertifiedReal
    perron: tuple[CertifiedReal, ...]
    degenerate: bool = False
    _pow_cache: dict = field(default_factory=dict)

    @property
    def q(self) -> int:
        return self.template.q

    @property
    def k0(self) -> int:
        return self.table.k0

    def length_power(self, length: Fraction) -> CertifiedReal:
        """|I|^alpha with per-precision caching (lengths repeat massively)."""
        key = (length, get_precision())
        cached = self._pow_cache.get(key)
        if cached is None:
            cached = pow_certified(length, self.alpha)
            self._pow_cache[key] = cached
        return cached

    def measure_of(self, length: Fraction, type_id: int) -> CertifiedReal:
        return self.length_power(length) * self.perron[type_id - 1]

    def island_measure(self, island: Island) -> CertifiedReal:
        if island.type_id is None:
            raise MeasureError("island has no type assigned")
        return self.measure_of(island.length, island.type_id)


def build_measure_model(spec: IFSSpec, table: TypeTable, template=None) -> MeasureModel:
    from .overlap import incidence_template

    if template is None:
        template = incidence_template(table)
    if is_degenerate(template):
        one = CertifiedReal.exact_int(1)
        return MeasureModel(
            spec=spec,
            table=table,
            template=template,
            alpha=one,
            perron=tuple(one for _ in range(template.q)),
            degenerate=True,
        )
    alpha_tol = min(Fraction(spec.alpha_tol), Fraction(1, 10**13))
    alpha = solve_dimension(template, alpha_tol)
    perron = principal_vector(template, alpha)
    return MeasureModel(
        spec=spec,
        table=table,
        template=template,
        alpha=alpha,
        perron=perron,
    )


# ---------------------------------------------------------------------------
# frame-attached measures and field-interval queries


def attach_measures(model: MeasureModel, frame: GenerationFrame) -> None:
    """Fill the frame's island measures and endpoint prefix sums (idempotent)."""
    if frame.prefix_measures is not None:
        return
    if any(isl.type_id is None for isl in frame.islands):
        from .overlap import ensure_types

        if frame.k < len(model.table.frames) and model.table.frames[frame.k] is frame:
            ensure_types(model.table, frame.k)
        else:
            raise MeasureError("frame has untyped islands and is not in the table cache")
    measures = [model.island_measure(isl) for isl in frame.islands]
    prefix: dict[Fraction, CertifiedReal] = {}
    running = CertifiedReal.exact_int(0)
    prefix[Fraction(0)] = running
    for isl, mu in zip(frame.islands, measures):
        prefix.setdefault(isl.left, running)
        running = running + mu
        prefix[isl.right] = running
    frame.island_measures = measures
    frame.prefix_measures = prefix


def interval_measure(
    model: MeasureModel,
    frame: GenerationFrame,
    left: Fraction,
    right: Fraction,
) -> CertifiedReal:
    """Measure of a field interval [left, right] of the frame.

    Endpoints must be island boundary points (field points); the measure is
    the sum over islands fully inside, which the prefix sums answer in O(1).
    Lakes carry no measure.
    """
    attach_measures(model, frame)
    left = Fraction(left)
    right = Fraction(right)
    if left > right:
        raise ValueError("left endpoint exceeds right endpoint")
    prefix = frame.prefix_measures
    if left not in prefix or right not in prefix:
        raise ValueError("endpoints are not field points of this frame")
    return prefix[right] - prefix[left]
