"""Overlap-type classification, the stabilization generation, and the
weighted incidence template.

Two islands are equivalent when an increasing affine change of variables
carries one onto the other matching (1) the constitutive maps and (2) the
entire descendant island structure.  Condition (1) is decided by an exact
normalized signature; condition (2) is enforced by partition refinement:
islands are first bucketed by signature and blocks are then repeatedly split
by the multiset of (relative position, relative length, class) of their
children until a fixed point.  Refinement only ever splits blocks, so it
terminates; a fixed point with no new class appearing near the budget edge
is reported as the finite-type structure.

Finite computation can confirm but never refute the finite-type property,
so the failure mode is "not confirmed within budget", never a disproof.

Under the lambda scheme the signature also carries each vertex's residual
scale (its ratio relative to the generation threshold), because the word
extension rule is not scale invariant: vertices with different residuals
spawn different child structures even when their normalized maps agree.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .generation import (
    DEFAULT_VERTEX_CAP,
    GenerationFrame,
    Island,
    build_frames,
    parent_index,
)
from .ifs import SCHEME_LAMBDA, IFSSpec

DEFAULT_MAX_GENERATIONS = 12


class ClassificationError(RuntimeError):
    pass


class GFTCNotConfirmed(RuntimeError):
    """No stable finite type structure within the generation budget."""

    def __init__(self, generations_examined: int, classes_seen: int):
        super().__init__(
            f"finite type structure not confirmed within {generations_examined} "
            f"generations ({classes_seen} classes and still growing)"
        )
        self.generations_examined = generations_examined
        self.classes_seen = classes_seen


@dataclass(frozen=True)
class ChildDescriptor:
    rel_left: Fraction
    rel_length: Fraction
    type_id: int


@dataclass(frozen=True)
class TypeInfo:
    type_id: int
    signature: tuple
    representative: Island
    first_generation: int
    children: tuple[ChildDescriptor, ...]

    @property
    def child_count(self) -> int:
        return len(self.children)


@dataclass
class TypeTable:
    spec: IFSSpec
    types: list[TypeInfo]
    k0: int
    generations_examined: int
    confirmed: bool
    frames: list[GenerationFrame]

    @property
    def q(self) -> int:
        return len(self.types)

    def type_of(self, type_id: int) -> TypeInfo:
        return self.types[type_id - 1]


@dataclass(frozen=True)
class IncidenceTemplate:
    """Entry (i, j) holds the multiset of length ratios of type-j children
    of a type-i island; the weighted incidence matrix at exponent s is the
    entrywise sum of ratio**s."""

    q: int
    entries: tuple[tuple[tuple[Fraction, ...], ...], ...]

    def child_counts(self) -> list[list[int]]:
        return [[len(cell) for cell in row] for row in self.entries]


def island_signature(spec: IFSSpec, island: Island) -> tuple:
    """Normalized constitutive-map signature, invariant under the affine
    renormalization of the island onto [0, 1]."""
    length = island.length
    pairs = []
    if spec.scheme == SCHEME_LAMBDA:
        threshold = spec.rho_min ** island.generation
        for v in island.vertices:
            pairs.append(
                ((v.offset - island.left) / length, v.ratio / length, v.ratio / threshold)
            )
    else:
        for v in island.vertices:
            pairs.append(((v.offset - island.left) / length, v.ratio / length))
    return tuple(sorted(pairs))


def _child_layout(frame_islands, parent: Island, child_ids, labels):
    out = []
    length = parent.length
    for cid in child_ids:
        child = frame_islands[cid[0]][cid[1]]
        out.append(
            (
                (child.left - parent.left) / length,
                child.length / length,
                labels[cid],
            )
        )
    return tuple(out)


def _classify_at_budget(spec: IFSSpec, frames: list[GenerationFrame]):
    """Stratified refinement over frames 0..G.

    Round-0 labels are signature classes and are meaningful for every
    generation; each further round refines by child layout and is meaningful
    one generation less deep (children labels of the previous round are
    consumed).  Stops at the first round that splits nothing inside its
    valid range; returns (labels, verified_depth, islands_by_gen, children)
    where labels are trustworthy for generations <= verified_depth.  Returns
    None when the budget is exhausted before the partition settles.
    """
    G = len(frames) - 1
    islands_by_gen = [fr.islands for fr in frames]
    ids = [(k, i) for k in range(G + 1) for i in range(len(islands_by_gen[k]))]

    children: dict[tuple[int, int], list[tuple[int, int]]] = {iid: [] for iid in ids}
    for k in range(1, G + 1):
        parents = parent_index(frames[k - 1], frames[k])
        for i, p in enumerate(parents):
            children[(k - 1, p)].append((k, i))

    sig_ids: dict[tuple, int] = {}
    labels: dict[tuple[int, int], int] = {}
    for iid in ids:
        sig = island_signature(spec, islands_by_gen[iid[0]][iid[1]])
        labels[iid] = sig_ids.setdefault(sig, len(sig_ids))

    depth = 0
    while True:
        cutoff = G - depth - 1
        if cutoff < 0:
            return None
        key_ids: dict[tuple, int] = {}
        new_labels: dict[tuple[int, int], int] = {}
        stable = True
        old_to_new: dict[int, int] = {}
        for iid in ids:
            k, i = iid
            if k > cutoff:
                continue
            layout = _child_layout(
                islands_by_gen, islands_by_gen[k][i], children[iid], labels
            )
            key = (labels[iid], layout)
            new = key_ids.setdefault(key, len(key_ids))
            new_labels[iid] = new
            prev = old_to_new.setdefault(labels[iid], new)
            if prev != new:
                stable = False
        if stable:
            return labels, cutoff, islands_by_gen, children
        labels = {**labels, **new_labels}
        depth += 1


def classify_types(
    spec: IFSSpec,
    max_generations: int = DEFAULT_MAX_GENERATIONS,
    *,
    vertex_cap: int = DEFAULT_VERTEX_CAP,
    frame_cache: Optional[list] = None,
) -> TypeTable:
    """Classify islands into overlap types and locate the stabilization
    generation k0.

    Deepens the examined generations until the refined partition is stable
    with margin (no class first appears in the last two generations), then
    assembles representatives and child descriptors.  Raises
    :class:`GFTCNotConfirmed` when the budget runs out first.
    """
    cache = frame_cache if frame_cache is not None else []
    last_class_count = 0
    G = min(3, max_generations)
    while True:
        frames = build_frames(spec, G, vertex_cap=vertex_cap, _cache=cache)[: G + 1]
        outcome = _classify_at_budget(spec, frames)
        if outcome is not None:
            labels, verified_depth, islands_by_gen, children = outcome
            in_range = {iid for iid in labels if iid[0] <= verified_depth}
            first_seen: dict[int, int] = {}
            for iid in sorted(in_range):
                lab = labels[iid]
                if lab not in first_seen:
                    first_seen[lab] = iid[0]
            k0 = max(first_seen.values())
            last_class_count = len(first_seen)
            # generation k0+1 must lie inside the verified range so "no new
            # type appears there" is actually evidenced
            if k0 + 1 <= verified_depth:
                break
        if G >= max_generations:
            raise GFTCNotConfirmed(G, last_class_count)
        G = min(G + 2, max_generations)

    # deterministic numbering: root class is type 1, then by first
    # appearance and spatial position of the earliest representative
    reps: dict[int, tuple[int, int]] = {}
    for iid in sorted(in_range):
        reps.setdefault(labels[iid], iid)
    order = sorted(
        reps.keys(),
        key=lambda lab: (first_seen[lab], islands_by_gen[reps[lab][0]][reps[lab][1]].left),
    )
    if first_seen[order[0]] != 0:
        raise ClassificationError("root island class missing")
    type_id_of = {lab: idx + 1 for idx, lab in enumerate(order)}

    # stamp type ids on the verified generations (deeper frames are stamped
    # on demand by ensure_types, which also cross-checks the geometry)
    for k in range(verified_depth + 1):
        frames[k].islands = [
            isl.with_type(type_id_of[labels[(k, i)]])
            for i, isl in enumerate(frames[k].islands)
        ]
    islands_by_gen = [fr.islands for fr in frames]

    types: list[TypeInfo] = []
    for lab in order:
        rep_id = reps[lab]
        rep = islands_by_gen[rep_id[0]][rep_id[1]]
        descs = []
        for cid in children[rep_id]:
            child = islands_by_gen[cid[0]][cid[1]]
            descs.append(
                ChildDescriptor(
                    rel_left=(child.left - rep.left) / rep.length,
                    rel_length=child.length / rep.length,
                    type_id=type_id_of[labels[cid]],
                )
            )
        descs.sort(key=lambda d: d.rel_left)
        types.append(
            TypeInfo(
                type_id=type_id_of[lab],
                signature=island_signature(spec, rep),
                representative=rep,
                first_generation=first_seen[lab],
                children=tuple(descs),
            )
        )

    table = TypeTable(
        spec=spec,
        types=types,
        k0=k0,
        generations_examined=len(frames) - 1,
        confirmed=True,
        frames=cache,
    )
    _verify_child_consistency(
        table, labels, islands_by_gen, children, type_id_of, verified_depth
    )
    return table


def _verify_child_consistency(
    table, labels, islands_by_gen, children, type_id_of, verified_depth
):
    """Every classified island's child layout must reproduce its type's
    descriptors under the affine renormalization (this exercises every
    representative of each class inside the verified range, not only the
    canonical one)."""
    for (k, i), lab in labels.items():
        if k >= verified_depth:
            continue
        info = table.type_of(type_id_of[lab])
        isl = islands_by_gen[k][i]
        layout = tuple(
            sorted(
                (
                    (islands_by_gen[ck][ci].left - isl.left) / isl.length,
                    (islands_by_gen[ck][ci].right - islands_by_gen[ck][ci].left)
                    / isl.length,
                    type_id_of[labels[(ck, ci)]],
                )
                for ck, ci in children[(k, i)]
            )
        )
        expected = tuple(
            sorted((d.rel_left, d.rel_length, d.type_id) for d in info.children)
        )
        if layout != expected:
            raise ClassificationError(
                f"island at generation {k} disagrees with its type's child structure"
            )


def ensure_types(table: TypeTable, k: int) -> None:
    """Stamp type ids on frames up to generation k by expanding each parent's
    child descriptors; where a frame is already typed this doubles as an
    exact reconstruction check of the finite-type structure."""
    frames = table.frames
    if k >= len(frames):
        raise ClassificationError(f"frames not built up to generation {k}")
    if frames[0].islands[0].type_id is None:
        frames[0].islands = [frames[0].islands[0].with_type(1)]
    for g in range(1, k + 1):
        frame = frames[g]
        prev = frames[g - 1]
        expected: dict[Fraction, tuple[Fraction, int]] = {}
        for isl in prev.islands:
            info = table.type_of(isl.type_id)
            for d in info.children:
                left = isl.left + d.rel_left * isl.length
                expected[left] = (left + d.rel_length * isl.length, d.type_id)
        if len(expected) != len(frame.islands):
            raise ClassificationError(
                f"generation {g}: {len(frame.islands)} islands but type structure "
                f"predicts {len(expected)}"
            )
        new_islands = []
        for isl in frame.islands:
            exp = expected.get(isl.left)
            if exp is None or exp[0] != isl.right:
                raise ClassificationError(
                    f"generation {g}: island geometry disagrees with type structure"
                )
            if isl.type_id is not None and isl.type_id != exp[1]:
                raise ClassificationError(
                    f"generation {g}: island type disagrees with type structure"
                )
            new_islands.append(isl.with_type(exp[1]))
        frame.islands = new_islands


def incidence_template(table: TypeTable) -> IncidenceTemplate:
    q = table.q
    rows = []
    for info in table.types:
        cells: list[list[Fraction]] = [[] for _ in range(q)]
        for d in info.children:
            cells[d.type_id - 1].append(d.rel_length)
        rows.append(tuple(tuple(sorted(cell)) for cell in cells))
    return IncidenceTemplate(q=q, entries=tuple(rows))


def check_irreducible(template: IncidenceTemplate) -> bool:
    """True iff the directed graph with an edge i -> j for every nonempty
    entry (i, j) is strongly connected.  The pattern does not depend on the
    exponent because all stored ratios are positive."""
    q = template.q
    fwd = [[j for j in range(q) if template.entries[i][j]] for i in range(q)]
    rev = [[i for i in range(q) if template.entries[i][j]] for j in range(q)]

    def reaches_all(adj):
        seen = {0}
        stack = [0]
        while stack:
            node = stack.pop()
            for nxt in adj[node]:
                if nxt not in seen:
                    seen.add(nxt)
                    stack.append(nxt)
        return len(seen) == q

    return reaches_all(fwd) and reaches_all(rev)
