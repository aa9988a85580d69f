"""Generation frames: index sets, vertex maps, islands and lakes.

A generation-k frame is built from the index set M_k (all words of length k
under the sigma scheme, or the ratio-threshold cut under the lambda scheme).
Equal composed maps determine the same vertex, so vertices are deduplicated
by exact map equality.  Islands are the closures of connected components of
the union of the *open* interval interiors; two closed intervals that share
only an endpoint therefore belong to different islands, and the shared point
is recorded as a touching point (a lake of length zero).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Optional, Sequence

from .ifs import SCHEME_LAMBDA, SCHEME_SIGMA, AffineMap, IFSSpec, Word

DEFAULT_VERTEX_CAP = 10_000_000


class FrameTooLarge(RuntimeError):
    def __init__(self, k: int, count: int, cap: int):
        super().__init__(
            f"generation {k} too large: {count} vertices exceeds cap {cap}"
        )
        self.k = k
        self.count = count
        self.cap = cap


@dataclass(frozen=True)
class Island:
    left: Fraction
    right: Fraction
    vertices: tuple[AffineMap, ...]
    generation: int
    type_id: Optional[int] = None

    @property
    def length(self) -> Fraction:
        return self.right - self.left

    def with_type(self, type_id: int) -> "Island":
        return Island(self.left, self.right, self.vertices, self.generation, type_id)


@dataclass
class GenerationFrame:
    k: int
    spec: IFSSpec
    vertices: tuple[AffineMap, ...]
    islands: list[Island]
    lakes: list[tuple[Fraction, Fraction]]      # positive-length gaps only
    touch_points: list[Fraction]                # zero-length "lakes"
    # filled in by the measure module
    island_measures: Optional[list] = None
    prefix_measures: Optional[dict] = None

    @property
    def endpoints(self) -> list[Fraction]:
        pts: list[Fraction] = []
        for isl in self.islands:
            pts.append(isl.left)
            pts.append(isl.right)
        return sorted(set(pts))

    @property
    def island_count(self) -> int:
        return len(self.islands)


@dataclass(frozen=True)
class FrameStats:
    beta_first: Fraction
    beta_last: Fraction
    beta_min: Fraction
    beta_max: Fraction
    gamma_min: Optional[Fraction]       # 0 when touching islands exist; None if single island
    gamma_min_pos: Optional[Fraction]   # minimal positive lake length; None if no positive lake
    island_count: int


# ---------------------------------------------------------------------------
# index sets

def initial_index_set() -> set[Word]:
    return {()}


def advance_index_set(spec: IFSSpec, current: set[Word], k: int) -> set[Word]:
    """Advance M_k to M_{k+1}.

    Sigma scheme: append every symbol to every word.  Lambda scheme: extend
    each word with all continuations whose ratio first drops to at most
    rho_min^{k+1} (every word of a lambda index set has ratio strictly above
    the next threshold, so each extends by at least one symbol).
    """
    symbols = range(1, spec.m + 1)
    if spec.scheme == SCHEME_SIGMA:
        return {w + (j,) for w in current for j in symbols}
    if spec.scheme != SCHEME_LAMBDA:
        raise ValueError(f"unknown scheme {spec.scheme!r}")
    threshold = spec.rho_min ** (k + 1)
    ratios = [s.ratio for s in spec.maps]

    out: set[Word] = set()

    def extend(word: Word, ratio: Fraction):
        for j in symbols:
            r = ratio * ratios[j - 1]
            w = word + (j,)
            if r <= threshold:
                out.add(w)
            else:
                extend(w, r)

    for w in current:
        r = Fraction(1)
        for sym in w:
            r *= ratios[sym - 1]
        extend(w, r)
    return out


# ---------------------------------------------------------------------------
# frames


def _spatial_key(v: AffineMap):
    return (v.offset, v.offset + v.ratio)


def _vertices_next(spec: IFSSpec, vertices: Sequence[AffineMap], k: int) -> list[AffineMap]:
    """Vertex maps of generation k+1 from the deduplicated maps of generation k.

    Valid because a vertex's extension words depend only on its map (sigma:
    one symbol; lambda: the ratio threshold rule), so composing from the
    deduplicated set yields exactly the next generation's map set.
    """
    out: set[AffineMap] = set()
    if spec.scheme == SCHEME_SIGMA:
        for v in vertices:
            for s in spec.maps:
                out.add(v.compose(s))
        return sorted(out, key=_spatial_key)
    threshold = spec.rho_min ** (k + 1)

    def extend(v: AffineMap):
        for s in spec.maps:
            w = v.compose(s)
            if w.ratio <= threshold:
                out.add(w)
            else:
                extend(w)

    for v in vertices:
        extend(v)
    return sorted(out, key=_spatial_key)


def _sweep_islands(vertices: Sequence[AffineMap], k: int):
    """Merge vertex intervals into islands; report positive lakes and touch points.

    Vertices must be sorted.  Intervals merge only when their interiors
    overlap (next.left < current.right); equality produces separate islands
    with a recorded touching point.
    """
    islands: list[Island] = []
    lakes: list[tuple[Fraction, Fraction]] = []
    touch: list[Fraction] = []
    cur: list[AffineMap] = []
    cur_left = cur_right = None
    for v in vertices:
        left, right = v.image()
        if cur_right is None:
            cur = [v]
            cur_left, cur_right = left, right
            continue
        if left < cur_right:
            cur.append(v)
            if right > cur_right:
                cur_right = right
        else:
            islands.append(Island(cur_left, cur_right, tuple(cur), k))
            if left == cur_right:
                touch.append(left)
            else:
                lakes.append((cur_right, left))
            cur = [v]
            cur_left, cur_right = left, right
    if cur_right is not None:
        islands.append(Island(cur_left, cur_right, tuple(cur), k))
    return islands, lakes, touch


def build_frame(
    spec: IFSSpec,
    k: int,
    *,
    vertex_cap: int = DEFAULT_VERTEX_CAP,
    _cache: Optional[dict] = None,
) -> GenerationFrame:
    frames = build_frames(spec, k, vertex_cap=vertex_cap, _cache=_cache)
    return frames[k]


def build_frames(
    spec: IFSSpec,
    k_max: int,
    *,
    vertex_cap: int = DEFAULT_VERTEX_CAP,
    _cache: Optional[dict] = None,
) -> list[GenerationFrame]:
    """Build frames 0..k_max, reusing ``_cache`` (a list) across calls."""
    if k_max < 0:
        raise ValueError("generation must be >= 0")
    cache: list[GenerationFrame] = _cache if _cache is not None else []
    if not cache:
        root_vertices = (AffineMap.identity(),)
        islands, lakes, touch = _sweep_islands(root_vertices, 0)
        cache.append(GenerationFrame(0, spec, root_vertices, islands, lakes, touch))
    while len(cache) <= k_max:
        k_prev = len(cache) - 1
        vertices = _vertices_next(spec, cache[-1].vertices, k_prev)
        if len(vertices) > vertex_cap:
            raise FrameTooLarge(k_prev + 1, len(vertices), vertex_cap)
        islands, lakes, touch = _sweep_islands(vertices, k_prev + 1)
        cache.append(
            GenerationFrame(k_prev + 1, spec, tuple(vertices), islands, lakes, touch)
        )
    return cache


def frame_stats(frame: GenerationFrame) -> FrameStats:
    lengths = [isl.length for isl in frame.islands]
    gamma_pos = min((b - a for a, b in frame.lakes), default=None)
    if frame.island_count <= 1:
        gamma_min = None
    elif frame.touch_points:
        gamma_min = Fraction(0)
    else:
        gamma_min = gamma_pos
    return FrameStats(
        beta_first=lengths[0],
        beta_last=lengths[-1],
        beta_min=min(lengths),
        beta_max=max(lengths),
        gamma_min=gamma_min,
        gamma_min_pos=gamma_pos,
        island_count=frame.island_count,
    )


def total_length_identity(frame: GenerationFrame) -> Fraction:
    """Sum of island lengths plus positive lake lengths (1 when spanning [0,1])."""
    total = sum((isl.length for isl in frame.islands), Fraction(0))
    total += sum((b - a for a, b in frame.lakes), Fraction(0))
    return total


def parent_index(parent: GenerationFrame, child: GenerationFrame) -> list[int]:
    """For each island of ``child``, the index of its containing island in ``parent``.

    Every deeper island lies inside exactly one island of any earlier
    generation; raises if containment fails (which would mean a broken build).
    """
    result = []
    j = 0
    for isl in child.islands:
        while j < len(parent.islands) and parent.islands[j].right < isl.right:
            j += 1
        if j >= len(parent.islands) or not (
            parent.islands[j].left <= isl.left and isl.right <= parent.islands[j].right
        ):
            raise RuntimeError("island has no parent; frame construction broken")
        result.append(j)
    return result


def frame_to_json(frame: GenerationFrame) -> dict:
    from .numerics import format_rational

    return {
        "generation": frame.k,
        "islands": [
            {
                "left": format_rational(isl.left),
                "right": format_rational(isl.right),
                "type": isl.type_id,
                "vertices": [
                    {"rho": format_rational(v.ratio), "b": format_rational(v.offset)}
                    for v in isl.vertices
                ],
            }
            for isl in frame.islands
        ],
        "lakes": [
            {"left": format_rational(a), "right": format_rational(b)}
            for a, b in frame.lakes
        ],
        "touch_points": [format_rational(t) for t in frame.touch_points],
    }
