"""Assumption checks and independent brute-force oracles.

Assumption A (no constitutive interval of an island contains another) is an
exact rational check over type representatives.  Assumption B asks that the
attractor's restriction to the leftmost (rightmost) first-level image is
exactly that map's copy of the attractor; finite computation can verify it
only up to a depth, so the verdict is three-valued: verified to depth,
violation found (with a certified witness point), or inconclusive.

The brute-force extremum scans every endpoint pair of a materialized frame.
A vectorized float prescan ranks all pairs, then every pair within a
conservative margin of the float extremum is re-evaluated in certified
interval arithmetic; there is no bound-based pruning, which keeps this an
independent check of the branch-and-bound search.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

import numpy as np

from .density import DensityWitness, IslandTree
from .generation import GenerationFrame, build_frames
from .ifs import IFSSpec
from .measure import MeasureModel, attach_measures
from .numerics import CertifiedReal, pow_certified
from .overlap import TypeTable, ensure_types

BRUTE_FORCE_ENDPOINT_CAP = 5_000
_PRESCAN_MARGIN = 1e-6

A_HOLDS = "holds"
A_VIOLATED = "violated"
B_VERIFIED = "verified-to-depth"
B_VIOLATION = "violation-found"
B_INCONCLUSIVE = "inconclusive"


@dataclass(frozen=True)
class AssumptionReport:
    a_status: str
    a_witness: Optional[tuple] = None          # (island interval, containing pair)
    b_status: str = B_INCONCLUSIVE
    b_depth: int = 0
    b_residual: Optional[Fraction] = None
    b_point: Optional[Fraction] = None

    @property
    def ok(self) -> bool:
        return self.a_status == A_HOLDS and self.b_status == B_VERIFIED


def check_assumption_a(table: TypeTable):
    """Exact containment check of constitutive intervals, per type."""
    for info in table.types:
        verts = info.representative.vertices
        for i, u in enumerate(verts):
            for j, w in enumerate(verts):
                if i == j:
                    continue
                if u.offset <= w.offset and u.offset + u.ratio >= w.offset + w.ratio:
                    rep = info.representative
                    return A_VIOLATED, (
                        (rep.left, rep.right),
                        ((u.offset, u.offset + u.ratio), (w.offset, w.offset + w.ratio)),
                    )
    return A_HOLDS, None


def _interval_list_subtract(pieces, covers) -> list[tuple[Fraction, Fraction]]:
    """Set difference of two sorted disjoint closed-interval lists (as
    lengths; zero-length leftovers are dropped)."""
    out = []
    ci = 0
    for a, b in pieces:
        cur = a
        while ci < len(covers) and covers[ci][1] <= cur:
            ci += 1
        j = ci
        while cur < b:
            if j >= len(covers) or covers[j][0] >= b:
                out.append((cur, b))
                cur = b
            else:
                ca, cb = covers[j]
                if ca > cur:
                    out.append((cur, ca))
                cur = max(cur, cb)
                j += 1
    return [(a, b) for a, b in out if b > a]


def _islands_in_window(tree, window, gen):
    lo, hi = window
    out = []

    def rec(isl):
        if isl.right <= lo or isl.left >= hi:
            return
        if isl.generation == gen:
            out.append(isl)
            return
        for child in tree.children(isl):
            rec(child)

    rec(tree.root())
    return out


def check_assumption_b(
    model: MeasureModel,
    depth: int = 8,
    *,
    tree: Optional[IslandTree] = None,
) -> tuple[str, int, Optional[Fraction], Optional[Fraction]]:
    """Three-valued check of the edge identity S_edge([0,1]) ∩ K = S_edge(K).

    At each generation k the cover of K inside the edge window is compared
    with the image of the previous generation's cover: the uncovered length
    (residual) must shrink to zero.  A generation-k island lying wholly in
    the window but meeting no image interval certifies a violation, because
    its endpoint belongs to K but not to the edge map's copy.

    Returns (status, depth_reached, final_residual, violation_point).
    """
    tree = tree or IslandTree(model)
    spec = model.spec
    depth_reached = 0
    final_residual = Fraction(0)
    for side in ("left", "right"):
        edge = spec.maps[0] if side == "left" else spec.maps[-1]
        window = edge.image()
        residuals: list[Fraction] = []
        # k = 1 is vacuous (the image of the root covers the whole window)
        for k in range(2, max(depth, 2) + 1):
            cur = _islands_in_window(tree, window, k)
            prev = _islands_in_window(tree, (Fraction(0), Fraction(1)), k - 1)
            covers = sorted((edge(i.left), edge(i.right)) for i in prev)
            # violation scan: island fully inside the window, disjoint from
            # every image interval
            for isl in cur:
                if isl.left < window[0] or isl.right > window[1]:
                    continue
                hit = any(not (cb <= isl.left or ca >= isl.right) for ca, cb in covers)
                if not hit:
                    point = isl.left if side == "left" else isl.right
                    return B_VIOLATION, k, None, point
            clipped = [
                (max(isl.left, window[0]), min(isl.right, window[1])) for isl in cur
            ]
            clipped = [(a, b) for a, b in clipped if b > a]
            leftover = _interval_list_subtract(clipped, covers)
            residuals.append(sum((b - a for a, b in leftover), Fraction(0)))
            if residuals[-1] == 0:
                break
        depth_reached = max(depth_reached, len(residuals))
        final_residual = max(final_residual, residuals[-1])
        if residuals[-1] != 0:
            decreasing = all(
                residuals[i + 1] < residuals[i] for i in range(len(residuals) - 1)
            )
            if not decreasing:
                return B_INCONCLUSIVE, len(residuals), residuals[-1], None
    return B_VERIFIED, depth_reached, final_residual, None


def assumption_report(model: MeasureModel, depth: int = 8) -> AssumptionReport:
    a_status, a_witness = check_assumption_a(model.table)
    b_status, b_depth, b_residual, b_point = check_assumption_b(model, depth)
    return AssumptionReport(
        a_status=a_status,
        a_witness=a_witness,
        b_status=b_status,
        b_depth=b_depth,
        b_residual=b_residual,
        b_point=b_point,
    )


# ---------------------------------------------------------------------------
# brute-force density extrema over a materialized frame


def _frame_arrays(model: MeasureModel, frame: GenerationFrame):
    attach_measures(model, frame)
    endpoints = frame.endpoints
    prefix = frame.prefix_measures
    pts = np.array([float(x) for x in endpoints], dtype=np.float64)
    mass = np.array(
        [float(prefix[x].midpoint()) for x in endpoints], dtype=np.float64
    )
    return endpoints, pts, mass


def brute_force_extremum(
    model: MeasureModel,
    frame: GenerationFrame,
    sense: str = "max",
    *,
    dist_tol: Optional[float] = None,
    endpoint_cap: int = BRUTE_FORCE_ENDPOINT_CAP,
) -> tuple[CertifiedReal, DensityWitness]:
    """O(E^2) density extremum over all field intervals of a frame.

    sense="min" restricts to intervals whose center lies within ``dist_tol``
    of the attractor (checked against a generation fine enough that island
    diameters are below the tolerance).
    """
    if sense not in ("min", "max"):
        raise ValueError("sense must be 'min' or 'max'")
    endpoints, pts, mass = _frame_arrays(model, frame)
    E = len(endpoints)
    if E > endpoint_cap:
        raise ValueError(f"frame has {E} endpoints; cap is {endpoint_cap}")
    alpha_f = float(model.alpha.midpoint())

    allowed_centers = None
    if sense == "min":
        tol = Fraction(dist_tol if dist_tol is not None else model.spec.dist_tol)
        table = model.table
        g = frame.k
        from .density import length_extrema_by_generation

        while length_extrema_by_generation(table, g)[1] > tol and g < frame.k + 60:
            g += 1
        tree = IslandTree(model)
        fine = sorted(
            (isl.left - tol, isl.right + tol) for isl in tree.islands_at(g)
        )
        starts = np.array([float(a) for a, _ in fine])
        ends = np.array([float(b) for _, b in fine])

        def center_ok(c: np.ndarray) -> np.ndarray:
            idx = np.searchsorted(starts, c, side="right") - 1
            idx = np.clip(idx, 0, len(fine) - 1)
            return (c >= starts[idx]) & (c <= ends[idx])

    best_val = -np.inf if sense == "max" else np.inf
    band: list[tuple[int, int]] = []
    # strip-wise O(E^2) scan
    for i in range(E - 1):
        js = np.arange(i + 1, E)
        lengths = pts[js] - pts[i]
        lam = mass[js] - mass[i]
        with np.errstate(divide="ignore", invalid="ignore"):
            dens = lam / np.power(lengths, alpha_f)
        if sense == "min":
            centers = (pts[js] + pts[i]) / 2.0
            ok = center_ok(centers)
            dens = np.where(ok, dens, np.inf)
        cand = np.nanmax(dens) if sense == "max" else np.nanmin(dens)
        if not np.isfinite(cand):
            continue
        if sense == "max":
            best_val = max(best_val, cand)
        else:
            best_val = min(best_val, cand)
        keep = (
            dens >= cand - _PRESCAN_MARGIN
            if sense == "max"
            else dens <= cand + _PRESCAN_MARGIN
        )
        for j in js[keep]:
            band.append((i, int(j)))
    # certified confirmation of everything within the margin of the float
    # extremum (the margin dwarfs accumulated float error by design)
    from .density import Candidate, ExtremumTracker

    tracker = ExtremumTracker(sense)
    prefix = frame.prefix_measures
    for i, j in band:
        lam_f = mass[j] - mass[i]
        len_f = pts[j] - pts[i]
        d_f = lam_f / len_f**alpha_f if len_f > 0 else np.nan
        if sense == "max" and d_f < best_val - _PRESCAN_MARGIN:
            continue
        if sense == "min" and d_f > best_val + _PRESCAN_MARGIN:
            continue
        u, v = endpoints[i], endpoints[j]
        value = (prefix[v] - prefix[u]) / pow_certified(v - u, model.alpha)
        wit = DensityWitness(u, v, ())
        tracker.consider(Candidate(value, (u, v), wit))
    assert tracker.best is not None
    return tracker.best.value, tracker.best.witness
