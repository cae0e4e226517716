"""The inductive horn-attachment tower X^0 -> X^1 -> ... and its bookkeeping.

Each step adjoins, for every horn in the attachment family J (the (2,1) horn
together with all horns of dimension >= 3, truncated at level_bound + 1) and
for every map of that horn into the current stage, one fresh filler cell and
one fresh cell for the missing face.  The pushout is indexed by all horns,
already-fillable ones included.  Cells above the level bound are discarded
after their level-bound shadow is recorded: a Delta[k] attachment only
touches nondegenerate cells at levels k and k-1.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from .core import (
    FiniteSimplicialSet,
    Provenance,
    SimplexRef,
    SimplicialError,
    horn,
)
from .homs import HomSet, SimplicialMap, enumerate_homs


class BudgetExceeded(SimplicialError):
    """The configured cell budget would be exceeded; never silently truncate."""

    def __init__(self, needed: int, budget: int, context: str):
        super().__init__(f"cell budget exceeded: need {needed} > {budget} ({context})")
        self.needed = needed
        self.budget = budget
        self.context = context


def attachment_family(level_bound: int) -> list[tuple[int, int]]:
    """J, truncated: (2,1) plus every (k,j) with 3 <= k <= level_bound + 1."""
    J: list[tuple[int, int]] = []
    if level_bound >= 1:
        J.append((2, 1))
    for k in range(3, level_bound + 2):
        J.extend((k, j) for j in range(k + 1))
    return J


@dataclass(frozen=True)
class Attachment:
    stage: int  # the stage this attachment creates
    k: int
    j: int
    horn_index: int
    horn_vector: tuple[int, ...]  # over the expanded view of stage-1
    face_cell: int
    filler_cell: Optional[int]  # None when k == level_bound + 1


def _face_subset_name(k: int, t: int) -> str:
    return "".join(str(v) for v in range(k + 1) if v != t)


def kan_step(
    X: FiniteSimplicialSet,
    stage: int,
    budget: int = 10**6,
) -> tuple[FiniteSimplicialSet, list[Attachment], dict[tuple[int, int], HomSet]]:
    """One pushout step over every J-horn of X; returns the next stage."""
    N = X.level_bound
    J = attachment_family(N)
    horn_homs: dict[tuple[int, int], HomSet] = {}
    total_new = 0
    for (k, j) in J:
        hs = enumerate_homs(horn(k, j), X)
        horn_homs[(k, j)] = hs
        total_new += len(hs) * (2 if k <= N else 1)
    if X.n_cells() + total_new > budget:
        raise BudgetExceeded(X.n_cells() + total_new, budget, f"stage {stage}")

    out = X.copy()
    ex = X.expanded()
    attachments: list[Attachment] = []
    for (k, j) in J:
        hs = horn_homs[(k, j)]
        shape = hs.shape
        face_pos = {
            t: hs.pos_of[shape.cell_id(_face_subset_name(k, t))]
            for t in range(k + 1)
            if t != j
        }
        for idx, vec in enumerate(hs.vectors):
            horn_face = {t: ex.levels[k - 1][vec[p]] for t, p in face_pos.items()}
            tag = f"s{stage}({k},{j})#{idx}"
            # faces of the fresh j-th face cell, from d_i d_j = d_{j-1} d_i (i<j)
            # and d_i d_j = d_j d_{i+1} (i >= j) applied to the would-be filler
            wfaces = []
            for i in range(k):
                if i < j:
                    wfaces.append(X.face(horn_face[i], j - 1))
                else:
                    wfaces.append(X.face(horn_face[i + 1], j))
            face_cell = out.add_cell(
                tag + "d",
                k - 1,
                tuple(wfaces) if k - 1 > 0 else (),
                Provenance("face", stage, k, j, idx),
            )
            filler_cell: Optional[int] = None
            if k <= N:
                zfaces = tuple(
                    SimplexRef(face_cell) if i == j else horn_face[i]
                    for i in range(k + 1)
                )
                filler_cell = out.add_cell(
                    tag + "z", k, zfaces, Provenance("filler", stage, k, j, idx)
                )
            attachments.append(
                Attachment(stage, k, j, idx, vec, face_cell, filler_cell)
            )
    return out, attachments, horn_homs


@dataclass
class KanTower:
    """Stages X^0 .. X^B with full attachment provenance."""

    base: FiniteSimplicialSet
    level_bound: int
    stages: list[FiniteSimplicialSet]
    attachments: list[list[Attachment]]  # attachments[s] creates stages[s], s >= 1
    _index: list[dict[tuple[int, int], dict[tuple[int, ...], Attachment]]] = field(
        default_factory=list, repr=False
    )

    @property
    def stage_bound(self) -> int:
        return len(self.stages) - 1

    def stage(self, beta: int) -> FiniteSimplicialSet:
        return self.stages[beta]

    def inclusion(self, lo: int, hi: int) -> SimplicialMap:
        """The (cell-identical) inclusion X^lo -> X^hi."""
        src, dst = self.stages[lo], self.stages[hi]
        return SimplicialMap(src, dst, {c: SimplexRef(c) for c in range(src.n_cells())})

    def attachment_index(
        self, stage: int
    ) -> dict[tuple[int, int], dict[tuple[int, ...], Attachment]]:
        while len(self._index) < len(self.stages):
            s = len(self._index)
            idx: dict[tuple[int, int], dict[tuple[int, ...], Attachment]] = {}
            if s >= 1:
                for a in self.attachments[s]:
                    idx.setdefault((a.k, a.j), {})[a.horn_vector] = a
            self._index.append(idx)
        return self._index[stage]

    def attachment_of_cell(self, cid: int) -> Optional[Attachment]:
        prov = self.stages[-1].provenance[cid]
        if prov.kind == "original":
            return None
        for a in self.attachments[prov.stage]:
            if (a.k, a.j, a.horn_index) == (prov.k, prov.j, prov.horn_index):
                return a
        raise SimplicialError(f"provenance of cell {cid} has no attachment record")

    def birth_stage(self, cid: int) -> int:
        return self.stages[-1].provenance[cid].stage


def kan_replace(
    X: FiniteSimplicialSet, stage_bound: int, level_bound: int, budget: int = 10**6
) -> KanTower:
    """Iterate kan_step, recording every attachment."""
    if stage_bound < 0 or level_bound < 0:
        raise SimplicialError("bounds must be nonnegative")
    base = X.copy(level_bound)
    stages = [base]
    attachments: list[list[Attachment]] = [[]]
    for s in range(1, stage_bound + 1):
        nxt, atts, _ = kan_step(stages[-1], s, budget)
        stages.append(nxt)
        attachments.append(atts)
    return KanTower(base, level_bound, stages, attachments)


def induced_tower_map(
    f: SimplicialMap, tower_x: "KanTower", tower_y: "KanTower"
) -> list[SimplicialMap]:
    """Functoriality: stage maps commuting with inclusions and attachments.

    ``f`` maps the bases; both towers must share bounds.
    """
    if tower_x.level_bound != tower_y.level_bound:
        raise SimplicialError("level bounds differ")
    if tower_x.stage_bound != tower_y.stage_bound:
        raise SimplicialError("stage bounds differ")
    maps: list[SimplicialMap] = [
        SimplicialMap(tower_x.stage(0), tower_y.stage(0), dict(f.mapping))
    ]
    for s in range(1, tower_x.stage_bound + 1):
        Xs, Ys = tower_x.stage(s), tower_y.stage(s)
        prev = maps[-1]
        prev_dom = tower_x.stage(s - 1)
        prev_cod = tower_y.stage(s - 1)
        ex_prev = prev_dom.expanded()
        ey_prev = prev_cod.expanded()
        mapping = dict(prev.mapping)
        index_y = tower_y.attachment_index(s)
        for a in tower_x.attachments[s]:
            sh = horn(a.k, a.j)
            order = sorted(range(sh.n_cells()), key=lambda c: (sh.level_of[c], c))
            pushed = []
            for p, cid in enumerate(order):
                lvl = sh.level_of[cid]
                ref = ex_prev.levels[lvl][a.horn_vector[p]]
                pushed.append(ey_prev.index[lvl][prev.eval_ref(ref)])
            b = index_y[(a.k, a.j)][tuple(pushed)]
            mapping[a.face_cell] = SimplexRef(b.face_cell)
            if a.filler_cell is not None:
                if b.filler_cell is None:
                    raise SimplicialError("tower truncation mismatch")
                mapping[a.filler_cell] = SimplexRef(b.filler_cell)
        maps.append(SimplicialMap(Xs, Ys, mapping))
    return maps
