"""Collapsible simplicial sets: horn-filling filtrations, the prefix order,
and recognition by backtracking search.

A collapsible set is replayed from a point; each step glues a standard
simplex along an injective horn.  The carrier's cells are created in replay
order (base vertex, then one face cell and one top cell per step), so prefix
stages share cell ids and two replays of equal step lists are identical.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Optional

from .core import (
    FiniteSimplicialSet,
    SimplexRef,
    SimplicialError,
    horn,
    standard_simplex,
)
from .homs import SimplicialMap, canonical_cell_order


@dataclass(frozen=True)
class Step:
    n: int
    l: int
    top_cell: int  # carrier cell ids
    face_cell: int


class CollapsibleSet:
    """A carrier plus an explicit filtration witnessing collapsibility."""

    def __init__(
        self,
        carrier: FiniteSimplicialSet,
        steps: list[Step],
        marked: Optional[list[int]] = None,
    ):
        self.carrier = carrier
        self.steps = steps
        self.marked = marked or []
        self._stages: list[FiniteSimplicialSet] = []

    @property
    def dim(self) -> int:
        return max((s.n for s in self.steps), default=0)

    def n_stages(self) -> int:
        return len(self.steps) + 1

    def stage_complex(self, t: int) -> FiniteSimplicialSet:
        """Prefix subcomplex after t steps; cell ids agree with the carrier."""
        if t == len(self.steps):
            return self.carrier
        while len(self._stages) <= t:
            s = len(self._stages)
            n_cells = 1 + 2 * s
            sub = FiniteSimplicialSet(self.carrier.level_bound)
            for cid in range(n_cells):
                sub.add_cell(
                    self.carrier.names[cid],
                    self.carrier.level_of[cid],
                    self.carrier.faces[cid],
                    self.carrier.provenance[cid],
                )
            self._stages.append(sub)
        return self._stages[t]

    def attach_map(self, t: int) -> SimplicialMap:
        """The attaching map horn(n_t, l_t) -> stage_complex(t) of step t."""
        step = self.steps[t]
        shape = horn(step.n, step.l)
        stage = self.stage_complex(t)
        mapping: dict[int, SimplexRef] = {}
        top = step.top_cell
        for cid in range(shape.n_cells()):
            vs = tuple(int(ch) for ch in shape.names[cid])
            ref = self.carrier.eval_map(top, vs)
            if ref.word:
                raise SimplicialError("attaching map hits a degenerate simplex")
            mapping[cid] = ref
        return SimplicialMap(shape, stage, mapping)

    def step_signature(self, t: int) -> tuple:
        step = self.steps[t]
        return (step.n, step.l, self.carrier.faces[step.top_cell])

    def signatures(self) -> list[tuple]:
        return [self.step_signature(t) for t in range(len(self.steps))]


def _missing_face_boundary(
    X: FiniteSimplicialSet, n: int, l: int, horn_face: dict[int, SimplexRef]
) -> list[SimplexRef]:
    """Faces of d_l(z) for a filler z whose other faces are ``horn_face``."""
    if n == 1:
        return []
    out = []
    for i in range(n):
        if i < l:
            out.append(X.face(horn_face[i], l - 1))
        else:
            out.append(X.face(horn_face[i + 1], l))
    return out


def build_collapsible(
    steps: list[tuple[int, int, dict[str, str]]],
    marked: Optional[list[str]] = None,
) -> CollapsibleSet:
    """Replay a filtration from the point.

    Each step is (n, l, attach) where attach maps nondegenerate cell names of
    horn(n, l) (vertex-subset strings like "01") to carrier cell names.  The
    attach of the very first edge steps may target the base vertex "p".
    """
    dim = max((n for n, _, _ in steps), default=0)
    carrier = FiniteSimplicialSet(dim)
    carrier.add_cell("p", 0)
    built_steps: list[Step] = []
    for t, (n, l, attach) in enumerate(steps):
        shape = horn(n, l)
        values: dict[int, SimplexRef] = {}
        for cid in range(shape.n_cells()):
            name = shape.names[cid]
            if name not in attach:
                raise SimplicialError(f"step {t}: no image for horn cell {name}")
            target = attach[name]
            tid = carrier.cell_id(target)
            if carrier.level_of[tid] != shape.level_of[cid]:
                raise SimplicialError(f"step {t}: level mismatch at {name}")
            values[cid] = SimplexRef(tid)
        if len({v.base for v in values.values()}) != len(values):
            raise SimplicialError(f"step {t}: attaching map not injective")
        att = SimplicialMap(shape, carrier, values)
        v = att.validate()
        if not v.ok:
            raise SimplicialError(f"step {t}: invalid attaching map: {v.details}")
        horn_face = {
            i: values[shape.cell_id("".join(str(x) for x in range(n + 1) if x != i))]
            for i in range(n + 1)
            if i != l
        }
        wfaces = _missing_face_boundary(carrier, n, l, horn_face)
        face_cell = carrier.add_cell(
            f"s{t}d", n - 1, tuple(wfaces) if n - 1 > 0 else ()
        )
        zfaces = tuple(
            SimplexRef(face_cell) if i == l else horn_face[i] for i in range(n + 1)
        )
        top_cell = carrier.add_cell(f"s{t}t", n, zfaces)
        built_steps.append(Step(n, l, top_cell, face_cell))
    marked_ids = [carrier.cell_id(m) for m in (marked or [])]
    return CollapsibleSet(carrier, built_steps, marked_ids)


def precedes(S: CollapsibleSet, T: CollapsibleSet) -> Optional[SimplicialMap]:
    """S < T when S's filtration is a prefix of T's; returns the inclusion."""
    if len(S.steps) > len(T.steps):
        return None
    if S.signatures() != T.signatures()[: len(S.steps)]:
        return None
    sub = T.stage_complex(len(S.steps))
    return SimplicialMap(
        S.carrier, sub, {c: SimplexRef(c) for c in range(S.carrier.n_cells())}
    )


def _candidate_moves(
    X: FiniteSimplicialSet, present: frozenset[int]
) -> list[tuple[int, int, int, int]]:
    """Valid horn-fill moves (n, l, top, face) from a partial subcomplex."""
    moves = []
    for top in range(X.n_cells()):
        n = X.level_of[top]
        if n == 0 or top in present:
            continue
        missing = []
        ok = True
        for i, ref in enumerate(X.faces[top]):
            if ref.word:
                ok = False  # attaching maps must be injective, hence nondegenerate
                break
            if ref.base not in present:
                missing.append(i)
        if not ok or len(missing) != 1:
            continue
        l = missing[0]
        face_ref = X.faces[top][l]
        # injectivity: all proper sub-simplices of top, except the l-face,
        # must be distinct nondegenerate cells
        seen: set[int] = set()
        inj = True
        import itertools as _it

        for size in range(1, n + 1):
            for vs in _it.combinations(range(n + 1), size):
                if vs == tuple(x for x in range(n + 1) if x != l):
                    continue
                sub = X.eval_map(top, vs)
                if sub.word or sub.base in seen:
                    inj = False
                    break
                seen.add(sub.base)
            if not inj:
                break
        if inj:
            moves.append((n, l, top, face_ref.base))
    moves.sort()
    return moves


def recognize_collapsible(
    X: FiniteSimplicialSet, max_states: int = 500_000
) -> Optional[tuple[CollapsibleSet, SimplicialMap]]:
    """Search for a filtration of X; first-found in lexicographic move order.

    Returns the collapsible set (carrier rebuilt in replay order) and an
    isomorphism onto X, or None when no filtration exists.
    """
    all_cells = frozenset(range(X.n_cells()))
    if not all_cells:
        return None
    n_steps, n_cells = divmod(X.n_cells() - 1, 2)
    if n_cells != 0:
        return None  # a filtration has 1 + 2k cells
    failed: set[frozenset[int]] = set()
    sequence: list[tuple[int, int, int, int]] = []

    def dfs(present: frozenset[int]) -> bool:
        if present == all_cells:
            return True
        if present in failed:
            return False
        if len(failed) > max_states:
            raise SimplicialError("recognition search exceeded state budget")
        for move in _candidate_moves(X, present):
            n, l, top, face = move
            sequence.append(move)
            if dfs(present | {top, face}):
                return True
            sequence.pop()
        failed.add(present)
        return False

    for v in sorted(X.levels[0]):
        if dfs(frozenset([v])):
            # rebuild the carrier in replay order
            order = [v] + [c for (_, _, top, face) in sequence for c in (face, top)]
            rank = {cid: i for i, cid in enumerate(order)}
            dim = max((n for n, _, _, _ in sequence), default=0)
            carrier = FiniteSimplicialSet(dim)
            for cid in order:
                faces = tuple(
                    SimplexRef(rank[r.base], r.word) for r in X.faces[cid]
                )
                carrier.add_cell(X.names[cid], X.level_of[cid], faces)
            steps = [
                Step(n, l, rank[top], rank[face]) for (n, l, top, face) in sequence
            ]
            iso = SimplicialMap(
                carrier, X, {rank[cid]: SimplexRef(cid) for cid in order}
            )
            return CollapsibleSet(carrier, steps), iso
        sequence.clear()
    return None


@lru_cache(maxsize=None)
def standard_simplex_filtration(m: int) -> CollapsibleSet:
    """The canonical filtration of Delta[m] (spine edges, then shelling)."""
    found = recognize_collapsible(standard_simplex(m))
    if found is None:
        raise SimplicialError(f"Delta[{m}] did not recognize as collapsible")
    return found[0]


@lru_cache(maxsize=None)
def horn_filtration(k: int, j: int) -> tuple[CollapsibleSet, SimplicialMap]:
    """Canonical filtration of the horn, with the iso onto horn(k, j)."""
    found = recognize_collapsible(horn(k, j))
    if found is None:
        raise SimplicialError(f"horn({k},{j}) did not recognize as collapsible")
    return found
