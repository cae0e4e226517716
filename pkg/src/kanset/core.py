"""Finite, level-truncated simplicial sets.

A simplicial set is stored by its nondegenerate cells only.  Every simplex is
addressed by a :class:`SimplexRef`: a nondegenerate base cell together with a
degeneracy word in Eilenberg-Zilber normal form (strictly decreasing indices,
written outermost first).  Face and degeneracy operators are computed through
the monotone-map calculus, so the simplicial identities hold by construction
on degenerate simplices; ``validate`` checks the stored face tables.

Levels are truncated at an explicit ``level_bound``; operations refuse to
answer questions above the bound instead of silently coskeletizing.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable, Iterable, NamedTuple, Optional

Word = tuple[int, ...]


class SimplexRef(NamedTuple):
    """A simplex: degeneracy word applied to a nondegenerate base cell.

    ``word`` is strictly decreasing as written; the empty word means the
    simplex is nondegenerate.  The simplex lives ``len(word)`` levels above
    its base cell.
    """

    base: int
    word: Word = ()


# ---------------------------------------------------------------------------
# Monotone-map calculus.
#
# A simplex of level m with nondegenerate base b of level n corresponds to
# b composed with a monotone surjection [m] -> [n].  Words encode these
# surjections; faces precompose with a coface map and are resolved through
# the epi-mono factorization.
# ---------------------------------------------------------------------------


def word_to_map(word: Word, top_level: int) -> tuple[int, ...]:
    """Surjection [top_level] -> [top_level - len(word)] encoded by ``word``."""
    values = list(range(top_level + 1))
    for j in word:
        # apply sigma^j: collapse j and j+1
        values = [v if v <= j else v - 1 for v in values]
    return tuple(values)


def word_of_surjection(f: tuple[int, ...]) -> Word:
    """Normal-form word of a monotone surjection (strictly decreasing)."""
    letters = [i for i in range(len(f) - 1) if f[i] == f[i + 1]]
    letters.sort(reverse=True)
    return tuple(letters)


def is_valid_word(word: Word, base_level: int) -> bool:
    """Check strict decrease and index validity at each application level."""
    if list(word) != sorted(word, reverse=True):
        return False
    # innermost letter is applied to base_level, the next one level higher...
    for offset, letter in enumerate(reversed(word)):
        if not 0 <= letter <= base_level + offset:
            return False
    return True


def words_from_level(base_level: int, target_level: int) -> list[Word]:
    """All valid degeneracy words raising ``base_level`` to ``target_level``."""
    length = target_level - base_level
    if length < 0:
        return []
    if length == 0:
        return [()]
    out: list[Word] = []

    def rec(prefix: list[int], pos: int) -> None:
        # prefix holds letters w_0 > w_1 > ... chosen so far (outermost first)
        if pos == length:
            out.append(tuple(prefix))
            return
        # letter at position pos is applied at level base_level + (length-1-pos)
        hi = base_level + (length - 1 - pos)
        if prefix:
            hi = min(hi, prefix[-1] - 1)
        for letter in range(hi, -1, -1):
            prefix.append(letter)
            rec(prefix, pos + 1)
            prefix.pop()

    rec([], 0)
    out.sort()
    return out


# ---------------------------------------------------------------------------
# Simplicial set storage.
# ---------------------------------------------------------------------------


@dataclass(frozen=True, slots=True)
class Provenance:
    """Construction tag of a cell: original, or part of a horn attachment."""

    kind: str  # "original" | "filler" | "face"
    stage: int = 0
    k: int = -1
    j: int = -1
    horn_index: int = -1


ORIGINAL = Provenance("original")


class SimplicialError(ValueError):
    pass


class FiniteSimplicialSet:
    """A finite simplicial set truncated at ``level_bound``.

    Cells are interned integers in creation order; ``names`` gives stable
    printable identifiers for serialization and diffing.
    """

    __slots__ = (
        "level_bound",
        "names",
        "level_of",
        "levels",
        "faces",
        "provenance",
        "_name_index",
        "_expanded",
    )

    def __init__(self, level_bound: int):
        if level_bound < 0:
            raise SimplicialError("level_bound must be nonnegative")
        self.level_bound = level_bound
        self.names: list[str] = []
        self.level_of: list[int] = []
        self.levels: list[list[int]] = [[] for _ in range(level_bound + 1)]
        self.faces: list[tuple[SimplexRef, ...]] = []
        self.provenance: list[Provenance] = []
        self._name_index: dict[str, int] = {}
        self._expanded: Optional["Expanded"] = None

    # -- construction ------------------------------------------------------

    def add_cell(
        self,
        name: str,
        level: int,
        faces: tuple[SimplexRef, ...] = (),
        provenance: Provenance = ORIGINAL,
    ) -> int:
        if self._expanded is not None:
            raise SimplicialError("cannot mutate a set whose views are built")
        if level > self.level_bound:
            raise SimplicialError(f"cell {name!r} above level bound")
        if name in self._name_index:
            raise SimplicialError(f"duplicate cell name {name!r}")
        if level > 0 and len(faces) != level + 1:
            raise SimplicialError(f"cell {name!r} needs {level + 1} faces")
        cid = len(self.names)
        self.names.append(name)
        self.level_of.append(level)
        self.levels[level].append(cid)
        self.faces.append(tuple(faces) if level > 0 else ())
        self.provenance.append(provenance)
        self._name_index[name] = cid
        return cid

    def copy(self, level_bound: Optional[int] = None) -> "FiniteSimplicialSet":
        """Fresh copy, optionally re-truncated to a smaller bound."""
        bound = self.level_bound if level_bound is None else level_bound
        out = FiniteSimplicialSet(bound)
        for cid in range(len(self.names)):
            if self.level_of[cid] <= bound:
                out.add_cell(
                    self.names[cid],
                    self.level_of[cid],
                    self.faces[cid],
                    self.provenance[cid],
                )
        return out

    # -- basic queries -------------------------------------------------------

    def cell_id(self, name: str) -> int:
        return self._name_index[name]

    def n_cells(self) -> int:
        return len(self.names)

    def ref_level(self, ref: SimplexRef) -> int:
        return self.level_of[ref.base] + len(ref.word)

    def check_ref(self, ref: SimplexRef) -> None:
        if not 0 <= ref.base < len(self.names):
            raise SimplicialError(f"dangling base {ref.base}")
        if not is_valid_word(ref.word, self.level_of[ref.base]):
            raise SimplicialError(f"invalid word {ref.word} on {self.names[ref.base]}")

    def __repr__(self) -> str:
        sizes = ",".join(str(len(l)) for l in self.levels)
        return f"FiniteSimplicialSet(N={self.level_bound}, nondeg=[{sizes}])"

    # -- operator calculus ---------------------------------------------------

    def eval_map(self, base: int, f: tuple[int, ...]) -> SimplexRef:
        """Simplex ``base . f`` for a monotone f: [m] -> [level(base)]."""
        n = self.level_of[base]
        image = sorted(set(f))
        ref = SimplexRef(base, ())
        if len(image) < n + 1:
            missing = [v for v in range(n + 1) if v not in set(f)]
            for v in sorted(missing, reverse=True):
                ref = self.face(ref, v)
        # epi part, composed with the word already present on ref
        rank = {v: i for i, v in enumerate(image)}
        epi = tuple(rank[v] for v in f)
        inner = word_to_map(ref.word, self.level_of[ref.base] + len(ref.word))
        total = tuple(inner[t] for t in epi)
        return SimplexRef(ref.base, word_of_surjection(total))

    def face(self, ref: SimplexRef, i: int) -> SimplexRef:
        """d_i of a simplex."""
        lvl = self.ref_level(ref)
        if lvl == 0:
            raise SimplicialError("vertex has no faces")
        if not 0 <= i <= lvl:
            raise SimplicialError(f"face index {i} out of range at level {lvl}")
        if not ref.word:
            return self.faces[ref.base][i]
        f = word_to_map(ref.word, lvl)
        g = tuple(f[t if t < i else t + 1] for t in range(lvl))
        return self.eval_map(ref.base, g)

    def degeneracy(self, ref: SimplexRef, i: int) -> SimplexRef:
        """s_i of a simplex."""
        lvl = self.ref_level(ref)
        if not 0 <= i <= lvl:
            raise SimplicialError(f"degeneracy index {i} out of range")
        f = word_to_map(ref.word, lvl)
        g = tuple(f[t if t <= i else t - 1] for t in range(lvl + 2))
        return SimplexRef(ref.base, word_of_surjection(g))

    def iterated_degeneracy(self, ref: SimplexRef, target_level: int) -> SimplexRef:
        """The canonical constant-direction degeneracy up to ``target_level``."""
        out = ref
        while self.ref_level(out) < target_level:
            out = self.degeneracy(out, self.ref_level(out))
        return out

    # -- expanded view -------------------------------------------------------

    def expanded(self) -> "Expanded":
        if self._expanded is None:
            self._expanded = Expanded(self)
        return self._expanded


class _LazyLevels:
    """Per-level list built on first access."""

    __slots__ = ("_build", "_data")

    def __init__(self, build):
        self._build = build
        self._data: dict[int, object] = {}

    def __getitem__(self, n: int):
        hit = self._data.get(n)
        if hit is None:
            hit = self._build(n)
            self._data[n] = hit
        return hit


class Expanded:
    """All simplices of each level (degenerate included) with face tables.

    Order within a level is (base creation order, word), which is stable
    across runs; indices are the working currency of the hom engine.  Levels
    are materialized lazily: towers can hold millions of top-level cells and
    most operations only touch the low levels.
    """

    __slots__ = ("space", "levels", "index", "face_idx")

    def __init__(self, space: FiniteSimplicialSet):
        self.space = space
        self.levels = _LazyLevels(self._build_level)
        self.index = _LazyLevels(self._build_index)
        self.face_idx = _LazyLevels(self._build_faces)

    def _build_level(self, n: int) -> list[SimplexRef]:
        if not 0 <= n <= self.space.level_bound:
            raise SimplicialError(f"level {n} out of bounds")
        refs: list[SimplexRef] = []
        for l in range(n + 1):
            for cid in self.space.levels[l]:
                for w in words_from_level(l, n):
                    refs.append(SimplexRef(cid, w))
        refs.sort()
        return refs

    def _build_index(self, n: int) -> dict[SimplexRef, int]:
        return {r: i for i, r in enumerate(self.levels[n])}

    def _build_faces(self, n: int) -> list[tuple[int, ...]]:
        if n == 0:
            raise SimplicialError("vertices have no faces")
        prev = self.index[n - 1]
        space = self.space
        return [
            tuple(prev[space.face(r, i)] for i in range(n + 1))
            for r in self.levels[n]
        ]

    def faces_of(self, n: int) -> list[tuple[int, ...]]:
        return self.face_idx[n]

    def size(self, n: int) -> int:
        return len(self.levels[n])


# ---------------------------------------------------------------------------
# Standard shapes.
# ---------------------------------------------------------------------------


def _subset_name(vertices: tuple[int, ...]) -> str:
    return "".join(str(v) for v in vertices)


def _simplex_on_subsets(
    m: int, keep: Callable[[tuple[int, ...]], bool], level_bound: int
) -> FiniteSimplicialSet:
    """Subcomplex of Delta[m] spanned by the vertex subsets passing ``keep``."""
    X = FiniteSimplicialSet(level_bound)
    ids: dict[tuple[int, ...], int] = {}
    for size in range(1, m + 2):
        lvl = size - 1
        if lvl > level_bound:
            break
        for vs in itertools.combinations(range(m + 1), size):
            if not keep(vs):
                continue
            faces = tuple(
                SimplexRef(ids[vs[:i] + vs[i + 1 :]]) for i in range(size)
            ) if lvl > 0 else ()
            ids[vs] = X.add_cell(_subset_name(vs), lvl, faces)
    return X


def standard_simplex(m: int, level_bound: Optional[int] = None) -> FiniteSimplicialSet:
    """The simplicial m-simplex; nondegenerate n-cells are (n+1)-subsets of [m]."""
    if m < 0:
        raise SimplicialError("m must be nonnegative")
    N = m if level_bound is None else level_bound
    return _simplex_on_subsets(m, lambda vs: True, N)


def horn(m: int, j: int, level_bound: Optional[int] = None) -> FiniteSimplicialSet:
    """The horn: the m-simplex minus its top cell and its j-th face."""
    if m < 1 or not 0 <= j <= m:
        raise SimplicialError(f"invalid horn ({m},{j})")
    N = m if level_bound is None else level_bound
    full = tuple(range(m + 1))
    jface = full[:j] + full[j + 1 :]

    def keep(vs: tuple[int, ...]) -> bool:
        return vs != full and vs != jface

    return _simplex_on_subsets(m, keep, N)


def boundary(m: int, level_bound: Optional[int] = None) -> FiniteSimplicialSet:
    """The boundary of the m-simplex (m >= 1)."""
    if m < 1:
        raise SimplicialError("boundary needs m >= 1")
    N = m if level_bound is None else level_bound
    full = tuple(range(m + 1))
    return _simplex_on_subsets(m, lambda vs: vs != full, N)


def empty_set(level_bound: int = 0) -> FiniteSimplicialSet:
    return FiniteSimplicialSet(level_bound)


# ---------------------------------------------------------------------------
# Groupoids and nerves.
# ---------------------------------------------------------------------------


@dataclass
class FiniteGroupoid:
    """A finite groupoid given by explicit tables.

    Arrows are named; ``compose[(g, h)]`` is defined when source(g) ==
    target(h) and denotes "g after h" (arrows point from bigger simplex
    vertices to smaller ones in the nerve).
    """

    objects: list[str]
    arrows: list[str]
    source: dict[str, str]
    target: dict[str, str]
    compose: dict[tuple[str, str], str]
    identity: dict[str, str]
    inverse: dict[str, str]

    def __post_init__(self) -> None:
        for g in self.arrows:
            if self.source[g] not in self.objects or self.target[g] not in self.objects:
                raise SimplicialError(f"arrow {g} has undefined endpoints")
        for x in self.objects:
            e = self.identity[x]
            if self.source[e] != x or self.target[e] != x:
                raise SimplicialError(f"identity of {x} has wrong endpoints")
        for g in self.arrows:
            e_t, e_s = self.identity[self.target[g]], self.identity[self.source[g]]
            if self.compose[(e_t, g)] != g or self.compose[(g, e_s)] != g:
                raise SimplicialError(f"unit law fails at {g}")
            gi = self.inverse[g]
            if (
                self.compose[(g, gi)] != self.identity[self.target[g]]
                or self.compose[(gi, g)] != self.identity[self.source[g]]
            ):
                raise SimplicialError(f"inverse law fails at {g}")
        for g in self.arrows:
            for h in self.arrows:
                if self.source[g] != self.target[h]:
                    continue
                gh = self.compose[(g, h)]
                for k in self.arrows:
                    if self.source[h] != self.target[k]:
                        continue
                    if self.compose[(gh, k)] != self.compose[(g, self.compose[(h, k)])]:
                        raise SimplicialError("associativity fails")

    def composable_strings(self, n: int) -> Iterable[tuple[str, ...]]:
        """All strings (g_1, ..., g_n) with source(g_i) == target(g_{i+1})."""
        if n == 0:
            yield ()
            return
        for prefix in self.composable_strings(n - 1):
            anchor = self.source[prefix[-1]] if prefix else None
            for g in self.arrows:
                if anchor is None or self.target[g] == anchor:
                    yield prefix + (g,)


def group_groupoid(elements: list[str], mul: Callable[[str, str], str], inverse: Callable[[str], str], unit: str) -> FiniteGroupoid:
    """One-object groupoid of a finite group."""
    compose = {(g, h): mul(g, h) for g in elements for h in elements}
    return FiniteGroupoid(
        objects=["*"],
        arrows=list(elements),
        source={g: "*" for g in elements},
        target={g: "*" for g in elements},
        compose=compose,
        identity={"*": unit},
        inverse={g: inverse(g) for g in elements},
    )


def cyclic_group(n: int) -> FiniteGroupoid:
    els = [f"g{i}" for i in range(n)]
    return group_groupoid(
        els,
        lambda a, b: els[(els.index(a) + els.index(b)) % n],
        lambda a: els[(-els.index(a)) % n],
        els[0],
    )


def symmetric_group_3() -> FiniteGroupoid:
    perms = list(itertools.permutations((0, 1, 2)))
    names = {p: "s" + "".join(map(str, p)) for p in perms}
    els = [names[p] for p in perms]
    by_name = {names[p]: p for p in perms}

    def mul(a: str, b: str) -> str:
        pa, pb = by_name[a], by_name[b]
        return names[tuple(pa[pb[i]] for i in range(3))]

    def inv(a: str) -> str:
        pa = by_name[a]
        q = [0, 0, 0]
        for i, v in enumerate(pa):
            q[v] = i
        return names[tuple(q)]

    return group_groupoid(els, mul, inv, names[(0, 1, 2)])


def pair_groupoid(objects: list[str]) -> FiniteGroupoid:
    """The pair groupoid: exactly one arrow between any ordered pair."""
    arrows = [f"{a}<{b}" for a in objects for b in objects]
    return FiniteGroupoid(
        objects=list(objects),
        arrows=arrows,
        source={f"{a}<{b}": b for a in objects for b in objects},
        target={f"{a}<{b}": a for a in objects for b in objects},
        compose={
            (f"{a}<{b}", f"{b2}<{c}"): f"{a}<{c}"
            for a in objects
            for b in objects
            for b2 in objects
            for c in objects
            if b == b2
        },
        identity={a: f"{a}<{a}" for a in objects},
        inverse={f"{a}<{b}": f"{b}<{a}" for a in objects for b in objects},
    )


def trivial_group() -> FiniteGroupoid:
    return group_groupoid(["e"], lambda a, b: "e", lambda a: "e", "e")


def _string_normal_form(G: FiniteGroupoid, string: tuple[str, ...]) -> tuple[tuple[str, ...], Word]:
    """Strip identity arrows; returns (nondegenerate core, degeneracy word)."""
    ids = set(G.identity.values())
    core = list(string)
    letters: list[int] = []
    # strip rightmost identities first so letters come out strictly decreasing
    while True:
        pos = max((q for q in range(len(core)) if core[q] in ids), default=None)
        if pos is None:
            break
        letters.append(pos)  # core[pos] sits at arrow position pos+1 == s_pos
        core.pop(pos)
    return tuple(core), tuple(letters)


def nerve(G: FiniteGroupoid, level_bound: int) -> FiniteSimplicialSet:
    """Nerve of a groupoid: n-simplices are composable n-strings of arrows.

    A string (g_1, ..., g_n) has g_i : x_i -> x_{i-1}; arrows run from the
    bigger vertex to the smaller one.  d_0 drops g_1, d_n drops g_n, inner
    d_i composes g_i with g_{i+1}; s_i inserts an identity at vertex x_i.
    """
    X = FiniteSimplicialSet(level_bound)
    vertex_ids: dict[str, int] = {x: X.add_cell(x, 0) for x in G.objects}
    ids: dict[tuple[str, ...], int] = {}

    def ref_of(string: tuple[str, ...]) -> SimplexRef:
        core, word = _string_normal_form(G, string)
        if core:
            return SimplexRef(ids[core], word)
        # all arrows were identities of one object
        return SimplexRef(vertex_ids[G.target[string[0]]], word)

    identity_arrows = set(G.identity.values())
    for n in range(1, level_bound + 1):
        for string in G.composable_strings(n):
            if any(g in identity_arrows for g in string):
                continue  # degenerate, reachable via words
            faces = []
            for i in range(n + 1):
                if i == 0:
                    sub = string[1:]
                elif i == n:
                    sub = string[:-1]
                else:
                    sub = string[: i - 1] + (G.compose[(string[i - 1], string[i])],) + string[i + 1 :]
                if sub:
                    faces.append(ref_of(sub))
                elif i == 0:
                    faces.append(SimplexRef(vertex_ids[G.source[string[0]]]))
                else:
                    faces.append(SimplexRef(vertex_ids[G.target[string[0]]]))
            ids[string] = X.add_cell("|".join(string), n, tuple(faces))
    return X


def point() -> FiniteSimplicialSet:
    X = FiniteSimplicialSet(0)
    X.add_cell("pt", 0)
    return X


# ---------------------------------------------------------------------------
# Validation.
# ---------------------------------------------------------------------------


@dataclass
class Report:
    violations: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def add(self, msg: str) -> None:
        self.violations.append(msg)


def validate(X: FiniteSimplicialSet, deep: bool = False) -> Report:
    """Check stored structure: refs resolve, arities match, d_i d_j holds.

    With ``deep`` the face/degeneracy identities are also evaluated on every
    expanded simplex up to the level bound.
    """
    rep = Report()
    for cid in range(X.n_cells()):
        lvl = X.level_of[cid]
        name = X.names[cid]
        if lvl > 0 and len(X.faces[cid]) != lvl + 1:
            rep.add(f"{name}: expected {lvl + 1} faces, found {len(X.faces[cid])}")
            continue
        for i, ref in enumerate(X.faces[cid]):
            try:
                X.check_ref(ref)
            except SimplicialError as exc:
                rep.add(f"{name}: face {i}: {exc}")
                continue
            if X.ref_level(ref) != lvl - 1:
                rep.add(f"{name}: face {i} has level {X.ref_level(ref)}, want {lvl - 1}")
    if rep.violations:
        return rep
    for cid in range(X.n_cells()):
        lvl = X.level_of[cid]
        if lvl < 2:
            continue
        name = X.names[cid]
        cell = SimplexRef(cid)
        for j in range(lvl + 1):
            for i in range(j):
                lhs = X.face(X.face(cell, j), i)
                rhs = X.face(X.face(cell, i), j - 1)
                if lhs != rhs:
                    rep.add(f"{name}: d_{i} d_{j} != d_{j - 1} d_{i} ({lhs} vs {rhs})")
    if deep:
        ex = X.expanded()
        for n in range(X.level_bound + 1):
            for r in ex.levels[n]:
                for jj in range(n + 1):
                    if n + 1 <= X.level_bound:
                        s = X.degeneracy(r, jj)
                        for ii in range(n + 2):
                            got = X.face(s, ii)
                            if ii == jj or ii == jj + 1:
                                want = r
                            elif ii < jj:
                                want = X.degeneracy(X.face(r, ii), jj - 1) if n else None
                            else:
                                want = X.degeneracy(X.face(r, ii - 1), jj) if n else None
                            if want is not None and got != want:
                                rep.add(f"d_{ii} s_{jj} identity fails at {r}")
    return rep


# ---------------------------------------------------------------------------
# Involution search ("invertible" simplicial sets).
# ---------------------------------------------------------------------------


def is_invertible(X: FiniteSimplicialSet) -> Optional[dict[SimplexRef, SimplexRef]]:
    """Search for an involution i on X_1 with d_0 i = d_1, d_1 i = d_0, i s_0 = s_0.

    Returns the involution as a mapping on level-1 simplices, or None.  This
    operationalizes invertibility; the degenerate edges are forced to be
    fixed points.
    """
    if X.level_bound < 1:
        return {}
    ex = X.expanded()
    edges = ex.levels[1]
    faces = ex.faces_of(1)
    n = len(edges)
    cand: list[list[int]] = []
    for i in range(n):
        d0, d1 = faces[i]
        options = [k for k in range(n) if faces[k] == (d1, d0)]
        if edges[i].word:  # degenerate edge must be fixed
            options = [i] if (d0, d1) == (d1, d0) and i in options else []
        cand.append(options)

    assign: dict[int, int] = {}

    def search(i: int) -> bool:
        if i == n:
            return True
        if i in assign:
            return search(i + 1)
        for k in cand[i]:
            if k in assign and assign[k] != i:
                continue
            if k == i or (k not in assign and i in cand[k]):
                assign[i] = k
                assign[k] = i
                if search(i + 1):
                    return True
                del assign[i]
                if k != i:
                    del assign[k]
        return False

    if not all(cand):
        return None
    if not search(0):
        return None
    return {edges[i]: edges[k] for i, k in assign.items()}
