"""n-truncation by the homotopy-rel-boundary relation.

Levels below n are kept verbatim.  At level n, simplices are identified when
they share all faces and a homotopy witness exists: z one level up with
d_n z = x, d_{n+1} z = y and all lower faces degenerate.  Witnesses may be
searched in a larger ambient complex (a later tower stage), since homotopies
between artificial fillers live in later attachments.

Above level n the footnote relation alone does not make the quotient a
simplicial set (degeneracies of merged cells acquire distinct boundaries on
the nose), so levels k > n are identified by their boundaries taken in the
quotient, computed inductively.  This is the same-n-skeleton condition read
inside the quotient; it is forced by the requirement that the truncation be
a quotient simplicial set, and it is what makes the unique-filler conditions
above level n hold.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .core import (
    FiniteSimplicialSet,
    SimplexRef,
    SimplicialError,
    word_of_surjection,
    word_to_map,
)
from .homs import SimplicialMap, apply_word
from .verdicts import Verdict


def homotopic(
    X: FiniteSimplicialSet,
    x: SimplexRef,
    y: SimplexRef,
    ambient: Optional[FiniteSimplicialSet] = None,
) -> Optional[SimplexRef]:
    """Witness z with d_k z = x, d_{k+1} z = y, lower faces degenerate.

    ``ambient`` must contain X's cells under the same identifiers (a later
    tower stage); the witness is searched there.
    """
    W = ambient if ambient is not None else X
    k = X.ref_level(x)
    if X.ref_level(y) != k:
        return None
    if k + 1 > W.level_bound:
        raise SimplicialError("witness level above the ambient bound")
    if k and any(X.face(x, i) != X.face(y, i) for i in range(k + 1)):
        return None
    want = tuple(
        W.degeneracy(X.face(x, i), k - 1) for i in range(k)
    ) + (x, y)
    for z in _level_simplices(W, k + 1):
        if _faces_match(W, z, want):
            return z
    return None


def _level_simplices(W: FiniteSimplicialSet, m: int):
    """All m-simplices of W without materializing expanded tables."""
    from .core import words_from_level

    for cid in W.levels[m]:
        yield SimplexRef(cid)
    for l in range(m):
        for cid in W.levels[l]:
            for w in words_from_level(l, m):
                if w:
                    yield SimplexRef(cid, w)


def _faces_match(W: FiniteSimplicialSet, z: SimplexRef, want: tuple) -> bool:
    if not z.word:
        return W.faces[z.base] == want
    m = W.ref_level(z)
    return all(W.face(z, i) == want[i] for i in range(m + 1))


@dataclass
class TruncatedSet:
    source: FiniteSimplicialSet
    ambient: FiniteSimplicialSet
    n: int
    labels: list[list[int]]  # per level, class index per expanded simplex
    class_sizes: list[int]  # number of classes per level
    quotient: FiniteSimplicialSet
    quotient_map: SimplicialMap


class _UF:
    def __init__(self, n: int):
        self.p = list(range(n))

    def find(self, i: int) -> int:
        while self.p[i] != i:
            self.p[i] = self.p[self.p[i]]
            i = self.p[i]
        return i

    def union(self, a: int, b: int) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.p[max(ra, rb)] = min(ra, rb)


def truncate(
    X: FiniteSimplicialSet,
    n: int,
    ambient: Optional[FiniteSimplicialSet] = None,
) -> TruncatedSet:
    """Quotient of levels >= n by homotopy-with-same-n-skeleton."""
    if n < 1:
        raise SimplicialError("truncation needs n >= 1")
    W = ambient if ambient is not None else X
    if X.level_bound < n + 1 and W.level_bound < n + 1:
        raise SimplicialError("need level_bound >= n+1 to search witnesses")
    ex = X.expanded()
    exW = W.expanded()
    N = X.level_bound

    labels: list[list[int]] = []
    for k in range(min(n, N + 1)):
        labels.append(list(range(ex.size(k))))

    if n <= N:
        # level n: union-find over homotopy pairs
        uf = _UF(ex.size(n))
        by_faces: dict[tuple[int, ...], list[int]] = {}
        if n >= 1:
            for i, tup in enumerate(ex.faces_of(n)):
                by_faces.setdefault(tup, []).append(i)
        witness_index: dict[tuple[int, ...], int] = {}
        if n + 1 <= W.level_bound:
            for i, tup in enumerate(exW.faces_of(n + 1)):
                witness_index.setdefault(tup, i)
        for group in by_faces.values():
            for a in range(len(group)):
                for b in range(a + 1, len(group)):
                    x = ex.levels[n][group[a]]
                    y = ex.levels[n][group[b]]
                    want = tuple(
                        exW.index[n][W.degeneracy(X.face(x, i), n - 1)]
                        for i in range(n)
                    ) + (exW.index[n][x], exW.index[n][y])
                    if want in witness_index:
                        uf.union(group[a], group[b])
        raw = [uf.find(i) for i in range(ex.size(n))]
        remap: dict[int, int] = {}
        lab = []
        for r in raw:
            if r not in remap:
                remap[r] = len(remap)
            lab.append(remap[r])
        labels.append(lab)

        # levels above n: boundary taken in the quotient
        for k in range(n + 1, N + 1):
            seen: dict[tuple[int, ...], int] = {}
            lab = []
            prev = labels[k - 1]
            for tup in ex.faces_of(k):
                key = tuple(prev[f] for f in tup)
                if key not in seen:
                    seen[key] = len(seen)
                lab.append(seen[key])
            labels.append(lab)

    class_sizes = [max(l) + 1 if l else 0 for l in labels]
    quotient, qmap = _build_quotient(X, labels)
    return TruncatedSet(X, W, n, labels, class_sizes, quotient, qmap)


def _build_quotient(
    X: FiniteSimplicialSet, labels: list[list[int]]
) -> tuple[FiniteSimplicialSet, SimplicialMap]:
    ex = X.expanded()
    N = X.level_bound
    members: dict[tuple[int, int], list[int]] = {}
    for k in range(N + 1):
        for i, lab in enumerate(labels[k]):
            members.setdefault((k, lab), []).append(i)

    def is_degenerate(k: int, lab: int) -> bool:
        return any(ex.levels[k][i].word for i in members[(k, lab)])

    out = FiniteSimplicialSet(N)
    cell_of: dict[tuple[int, int], int] = {}
    resolve_memo: dict[tuple[int, int], SimplexRef] = {}

    def resolve(k: int, lab: int) -> SimplexRef:
        """EZ normal form of a class in the quotient."""
        key = (k, lab)
        hit = resolve_memo.get(key)
        if hit is not None:
            return hit
        if key in cell_of:
            out_ref = SimplexRef(cell_of[key])
        else:
            ref = next(ex.levels[k][i] for i in members[key] if ex.levels[k][i].word)
            blvl = X.level_of[ref.base]
            inner = resolve(blvl, labels[blvl][ex.index[blvl][SimplexRef(ref.base)]])
            sigma_inner = word_to_map(inner.word, blvl)
            sigma_outer = word_to_map(ref.word, k)
            total = tuple(sigma_inner[t] for t in sigma_outer)
            out_ref = SimplexRef(inner.base, word_of_surjection(total))
        resolve_memo[key] = out_ref
        return out_ref

    used_names: set[str] = set()
    for k in range(N + 1):
        for lab in range(max(labels[k]) + 1 if labels[k] else 0):
            if is_degenerate(k, lab):
                continue
            mem = members[(k, lab)]
            rep = ex.levels[k][mem[0]]
            name = X.names[rep.base] if len(mem) == 1 else f"[{X.names[rep.base]}]"
            if name in used_names:
                name = f"{name}~{lab}"
            used_names.add(name)
            faces = []
            if k > 0:
                ftup = ex.faces_of(k)[mem[0]]
                faces = [
                    resolve(k - 1, labels[k - 1][f]) for f in ftup
                ]
            cell_of[(k, lab)] = out.add_cell(name, k, tuple(faces))

    qmap = SimplicialMap(
        X,
        out,
        {
            c: resolve(X.level_of[c], labels[X.level_of[c]][ex.index[X.level_of[c]][SimplexRef(c)]])
            for c in range(X.n_cells())
        },
    )
    return out, qmap


def check_discrete_2groupoid(
    T: TruncatedSet | FiniteSimplicialSet, N: int
) -> Verdict:
    """Set-level 2-groupoid certificate: Kan(m,j) for m <= N, unique fillers
    above level 2."""
    from .homs import check_kan

    X = T.quotient if isinstance(T, TruncatedSet) else T
    if N > X.level_bound:
        raise SimplicialError("certificate level above the bound")
    checks: list[dict] = []
    ok = True
    for m in range(1, N + 1):
        for j in range(m + 1):
            v = check_kan(X, m, j, "Kan")
            checks.append(v.to_json())
            ok = ok and v.ok
            if m > 2:
                v2 = check_kan(X, m, j, "Kan!")
                checks.append(v2.to_json())
                ok = ok and v2.ok
    return Verdict("discrete-2-groupoid", ok, {"checks": checks})
