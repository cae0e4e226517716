"""Exhaustive enumeration of simplicial maps and the Kan condition checks.

Maps S -> X are found by backtracking over the nondegenerate cells of S in a
closure-first order: every cell is assigned only after its boundary, so the
candidate set is a single hash lookup into X's simplices keyed by face
tuples.  Hom sets are stored compactly as integer vectors over the expanded
view of X, aligned with the canonical (level, creation) cell order of S.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional

from .core import (
    Expanded,
    FiniteSimplicialSet,
    SimplexRef,
    SimplicialError,
    word_to_map,
)
from .verdicts import Verdict


def apply_word(X: FiniteSimplicialSet, ref: SimplexRef, word: tuple[int, ...]) -> SimplexRef:
    """s_{w_0}(s_{w_1}(... (ref))) for a normal-form word."""
    for letter in reversed(word):
        ref = X.degeneracy(ref, letter)
    return ref


def canonical_cell_order(S: FiniteSimplicialSet) -> list[int]:
    return sorted(range(S.n_cells()), key=lambda c: (S.level_of[c], c))


def processing_order(S: FiniteSimplicialSet) -> list[int]:
    """Closure-first order: each cell follows the bases of all its faces."""
    order: list[int] = []
    seen: set[int] = set()

    def visit(cid: int) -> None:
        if cid in seen:
            return
        seen.add(cid)
        for ref in S.faces[cid]:
            visit(ref.base)
        order.append(cid)

    for cid in sorted(range(S.n_cells()), key=lambda c: (-S.level_of[c], c)):
        visit(cid)
    return order


@dataclass
class SimplicialMap:
    """Assignment of codomain simplices to nondegenerate domain cells."""

    domain: FiniteSimplicialSet
    codomain: FiniteSimplicialSet
    mapping: dict[int, SimplexRef]

    def eval_ref(self, ref: SimplexRef) -> SimplexRef:
        return apply_word(self.codomain, self.mapping[ref.base], ref.word)

    def compose(self, other: "SimplicialMap") -> "SimplicialMap":
        """self after other."""
        if other.codomain is not self.domain:
            raise SimplicialError("composition mismatch")
        return SimplicialMap(
            other.domain,
            self.codomain,
            {cid: self.eval_ref(ref) for cid, ref in other.mapping.items()},
        )

    def validate(self) -> Verdict:
        """Face commutation on every nondegenerate domain cell."""
        S, X = self.domain, self.codomain
        bad: list[str] = []
        for cid, ref in self.mapping.items():
            lvl = S.level_of[cid]
            try:
                X.check_ref(ref)
            except SimplicialError as exc:
                bad.append(f"{S.names[cid]}: {exc}")
                continue
            if X.ref_level(ref) != lvl:
                bad.append(f"{S.names[cid]}: level mismatch")
                continue
            for i in range(lvl + 1) if lvl else ():
                if self.eval_ref(S.faces[cid][i]) != X.face(ref, i):
                    bad.append(f"{S.names[cid]}: face {i} does not commute")
        missing = [S.names[c] for c in range(S.n_cells()) if c not in self.mapping]
        if missing:
            bad.append(f"unassigned cells: {missing}")
        return Verdict("simplicial-map", not bad, {"violations": bad})


def identity_map(X: FiniteSimplicialSet) -> SimplicialMap:
    return SimplicialMap(X, X, {c: SimplexRef(c) for c in range(X.n_cells())})


def constant_map(S: FiniteSimplicialSet, X: FiniteSimplicialSet, vertex: int) -> SimplicialMap:
    base = SimplexRef(vertex)
    return SimplicialMap(
        S,
        X,
        {
            c: X.iterated_degeneracy(base, S.level_of[c])
            for c in range(S.n_cells())
        },
    )


class HomSet:
    """hom(S, X), exhaustively enumerated, as sorted integer vectors.

    ``vectors[k][p]`` is the expanded-index (at the cell's level) assigned to
    the p-th cell of ``cell_order``.
    """

    def __init__(
        self,
        shape: FiniteSimplicialSet,
        target: FiniteSimplicialSet,
        cell_order: list[int],
        vectors: list[tuple[int, ...]],
    ):
        self.shape = shape
        self.target = target
        self.cell_order = cell_order
        self.pos_of = {cid: p for p, cid in enumerate(cell_order)}
        self.vectors = vectors
        self._vector_index: Optional[dict[tuple[int, ...], int]] = None

    def __len__(self) -> int:
        return len(self.vectors)

    def index_of(self, vector: tuple[int, ...]) -> int:
        if self._vector_index is None:
            self._vector_index = {v: i for i, v in enumerate(self.vectors)}
        return self._vector_index[vector]

    def contains(self, vector: tuple[int, ...]) -> bool:
        if self._vector_index is None:
            self._vector_index = {v: i for i, v in enumerate(self.vectors)}
        return vector in self._vector_index

    def as_map(self, k: int) -> SimplicialMap:
        ex = self.target.expanded()
        vec = self.vectors[k]
        mapping = {
            cid: ex.levels[self.shape.level_of[cid]][vec[p]]
            for p, cid in enumerate(self.cell_order)
        }
        return SimplicialMap(self.shape, self.target, mapping)

    def vector_of_map(self, f: SimplicialMap) -> tuple[int, ...]:
        ex = self.target.expanded()
        return tuple(
            ex.index[self.shape.level_of[cid]][f.mapping[cid]]
            for cid in self.cell_order
        )


def _face_key_index(ex: Expanded, n: int) -> dict[tuple[int, ...], list[int]]:
    idx: dict[tuple[int, ...], list[int]] = {}
    for i, key in enumerate(ex.faces_of(n)):
        idx.setdefault(key, []).append(i)
    return idx


def enumerate_homs(S: FiniteSimplicialSet, X: FiniteSimplicialSet) -> HomSet:
    """All simplicial maps S -> X; order-independent result, sorted vectors."""
    top = max((S.level_of[c] for c in range(S.n_cells())), default=-1)
    if top > X.level_bound:
        raise SimplicialError(
            f"shape has cells at level {top}, target bound is {X.level_bound}"
        )
    ex = X.expanded()
    order = processing_order(S)
    canon = canonical_cell_order(S)
    canon_pos = {cid: p for p, cid in enumerate(canon)}

    key_index: dict[int, dict[tuple[int, ...], list[int]]] = {}
    for n in {S.level_of[c] for c in order if S.level_of[c] > 0}:
        key_index[n] = _face_key_index(ex, n)

    # per-cell resolved face refs, to evaluate under a partial assignment
    word_cache: dict[tuple[int, int, tuple[int, ...]], int] = {}

    def resolved(ref: SimplexRef, assigned: dict[int, int]) -> int:
        lvl_b = S.level_of[ref.base]
        key = (ref.base, assigned[ref.base], ref.word)
        hit = word_cache.get(key)
        if hit is not None:
            return hit
        target_ref = apply_word(X, ex.levels[lvl_b][assigned[ref.base]], ref.word)
        out = ex.index[lvl_b + len(ref.word)][target_ref]
        word_cache[key] = out
        return out

    results: list[tuple[int, ...]] = []
    assigned: dict[int, int] = {}
    n_verts = len(ex.levels[0])

    def backtrack(pos: int) -> None:
        if pos == len(order):
            results.append(tuple(assigned[c] for c in canon))
            return
        cid = order[pos]
        lvl = S.level_of[cid]
        if lvl == 0:
            for v in range(n_verts):
                assigned[cid] = v
                backtrack(pos + 1)
            del assigned[cid]
            return
        key = tuple(resolved(ref, assigned) for ref in S.faces[cid])
        for cand in key_index[lvl].get(key, ()):
            assigned[cid] = cand
            backtrack(pos + 1)
        assigned.pop(cid, None)

    backtrack(0)
    results.sort()
    return HomSet(S, X, canon, results)


def restrict_vector(
    hom: HomSet, inclusion: SimplicialMap, sub_order: list[int], vector: tuple[int, ...]
) -> tuple[int, ...]:
    """Restrict a hom vector along a map (sub-shape -> hom.shape)."""
    X = hom.target
    ex = X.expanded()
    S = hom.shape
    out = []
    for cid in sub_order:
        ref = inclusion.mapping[cid]
        val = apply_word(X, ex.levels[S.level_of[ref.base]][vector[hom.pos_of[ref.base]]], ref.word)
        out.append(ex.index[inclusion.domain.level_of[cid]][val])
    return tuple(out)


def simplex_restriction(
    X: FiniteSimplicialSet, m: int, idx: int, shape: FiniteSimplicialSet
) -> tuple[int, ...]:
    """Restrict the idx-th m-simplex of X to a subcomplex of Delta[m].

    ``shape`` must be built by the subset constructors: its cell names encode
    vertex subsets of [m].
    """
    ex = X.expanded()
    r = ex.levels[m][idx]
    f = word_to_map(r.word, m)
    out = []
    for cid in canonical_cell_order(shape):
        vs = tuple(int(ch) for ch in shape.names[cid])
        val = X.eval_map(r.base, tuple(f[v] for v in vs))
        out.append(ex.index[len(vs) - 1][val])
    return tuple(out)


def horn_projection(
    X: FiniteSimplicialSet, m: int, j: int
) -> tuple[FiniteSimplicialSet, HomSet, list[tuple[int, ...]]]:
    """The restriction X_m -> hom(Lambda[m,j], X).

    Returns the horn shape, the full horn hom set, and per m-simplex of X the
    restricted vector (so image and fibers can be read off).
    """
    if m > X.level_bound:
        raise SimplicialError("horn projection above level bound")
    from .core import horn as horn_shape

    L = horn_shape(m, j)
    homs = enumerate_homs(L, X)
    ex = X.expanded()
    proj = [simplex_restriction(X, m, i, L) for i in range(ex.size(m))]
    return L, homs, proj


def check_kan(X: FiniteSimplicialSet, m: int, j: int, mode: str = "Kan") -> Verdict:
    """Set-level Kan conditions for the (m, j) horn.

    Modes: ``Kan`` surjective, ``Kan!`` bijective, ``Kan^l`` vacuous at set
    level (always true, recorded), ``Kan^l!`` injective.
    """
    if mode not in ("Kan", "Kan!", "Kan^l", "Kan^l!"):
        raise SimplicialError(f"unknown mode {mode}")
    label = f"{mode}({m},{j})"
    if mode == "Kan^l":
        return Verdict(
            label,
            True,
            {"note": "submersion condition has no set-level content; hom sets are finite"},
        )
    L, homs, proj = horn_projection(X, m, j)
    seen: dict[tuple[int, ...], int] = {}
    duplicate: Optional[tuple[int, int]] = None
    for i, v in enumerate(proj):
        if v in seen and duplicate is None:
            duplicate = (seen[v], i)
        seen.setdefault(v, i)
    missing = next((v for v in homs.vectors if v not in seen), None)
    surjective = missing is None
    injective = duplicate is None
    details: dict = {"horns": len(homs), "simplices": len(proj)}
    if missing is not None:
        details["unfilled_horn"] = _describe_horn(homs, missing)
    if duplicate is not None:
        ex = X.expanded()
        details["nonunique_fillers"] = [
            str(ex.levels[m][duplicate[0]]),
            str(ex.levels[m][duplicate[1]]),
        ]
    if mode == "Kan":
        return Verdict(label, surjective, details)
    if mode == "Kan!":
        return Verdict(label, surjective and injective, details)
    return Verdict(label, injective, details)


def _describe_horn(homs: HomSet, vector: tuple[int, ...]) -> dict[str, str]:
    ex = homs.target.expanded()
    S = homs.shape
    return {
        S.names[cid]: str(ex.levels[S.level_of[cid]][vector[p]])
        for p, cid in enumerate(homs.cell_order)
    }


@dataclass
class MatchingObject:
    """hom(dDelta[m], Z) x_{hom(dDelta[m], X)} hom(Delta[m], X), with the
    canonical map from Z_m."""

    m: int
    elements: list[tuple[tuple[int, ...], int]]  # (boundary vector over Z, X_m index)
    canonical: list[int]  # per Z_m simplex, index into elements

    def canonical_surjective(self) -> Optional[int]:
        hit = set(self.canonical)
        for i in range(len(self.elements)):
            if i not in hit:
                return i
        return None

    def canonical_injective(self) -> Optional[tuple[int, int]]:
        seen: dict[int, int] = {}
        for z, e in enumerate(self.canonical):
            if e in seen:
                return (seen[e], z)
            seen[e] = z
        return None


def matching_object(f: SimplicialMap, m: int) -> MatchingObject:
    """Matching object of f : Z -> X at level m (m = 0: X_0 with f_0)."""
    Z, X = f.domain, f.codomain
    if m > Z.level_bound or m > X.level_bound:
        raise SimplicialError("matching object above level bound")
    exZ, exX = Z.expanded(), X.expanded()
    if m == 0:
        elements = [((), i) for i in range(exX.size(0))]
        canonical = [exX.index[0][f.eval_ref(exZ.levels[0][z])] for z in range(exZ.size(0))]
        return MatchingObject(0, elements, canonical)

    from .core import boundary as boundary_shape

    B = boundary_shape(m)
    homZ = enumerate_homs(B, Z)
    # pushforward of each boundary along f, as a vector over X
    order = homZ.cell_order
    push: list[tuple[int, ...]] = []
    for vec in homZ.vectors:
        out = []
        for p, cid in enumerate(order):
            ref = exZ.levels[B.level_of[cid]][vec[p]]
            out.append(exX.index[B.level_of[cid]][f.eval_ref(ref)])
        push.append(tuple(out))

    x_by_boundary: dict[tuple[int, ...], list[int]] = {}
    for xi in range(exX.size(m)):
        x_by_boundary.setdefault(simplex_restriction(X, m, xi, B), []).append(xi)

    elements: list[tuple[tuple[int, ...], int]] = []
    elem_index: dict[tuple[tuple[int, ...], int], int] = {}
    for bi, bvec in enumerate(homZ.vectors):
        for xi in x_by_boundary.get(push[bi], ()):
            elem_index[(bvec, xi)] = len(elements)
            elements.append((bvec, xi))

    canonical = []
    for z in range(exZ.size(m)):
        bvec = simplex_restriction(Z, m, z, B)
        xi = exX.index[m][f.eval_ref(exZ.levels[m][z])]
        canonical.append(elem_index[(bvec, xi)])
    return MatchingObject(m, elements, canonical)
