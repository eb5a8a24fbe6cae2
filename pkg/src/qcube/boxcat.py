"""Exact morphism calculus for the box category with connections and for the simplex category.

A morphism [1]^m -> [1]^n of the box category is kept in coordinate form:
each of the n output coordinates is the constant 0, the constant 1, or the
max over a nonempty set of input coordinates.  Composition, validity,
enumeration and normal forms are computed directly on this representation;
the generator-and-relation presentation is only used as a test oracle.

Box-category indices are 1-based (coordinates of [1]^n are 1..n), simplex
category vertices are 0-based.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations, combinations_with_replacement

CONST0 = 0
CONST1 = 1


class CompositionError(ValueError):
    """Raised when composing maps whose dimensions do not match."""


class RangeError(ValueError):
    """Raised when a generator index or sign is out of range."""


def max_of(*indices: int) -> frozenset:
    """The coordinate taking the max over the given 1-based input indices."""
    return frozenset(indices)


def is_max(coord) -> bool:
    return isinstance(coord, frozenset)


def coord_is_valid(coord, m: int) -> bool:
    if is_max(coord):
        return len(coord) > 0 and all(
            isinstance(i, int) and 1 <= i <= m for i in coord
        )
    return coord == CONST0 or coord == CONST1


def coord_sort_key(coord):
    # Const0 < Const1 < max-coordinates, supports compared as sorted tuples.
    if is_max(coord):
        return (2, tuple(sorted(coord)))
    return (int(coord), ())


def box_is_valid(m: int, coords) -> bool:
    """Whether raw coordinate data describes a morphism [1]^m -> [1]^len(coords).

    Total on raw data: every coordinate must be a valid constant or a
    nonempty max-set within range, and the supports of max-coordinates must
    be interleaved (each entirely below the next).
    """
    if m < 0:
        return False
    prev = None
    for c in coords:
        if not coord_is_valid(c, m):
            return False
        if is_max(c):
            if prev is not None and max(prev) >= min(c):
                return False
            prev = c
    return True


@dataclass(frozen=True)
class BoxMap:
    """A morphism [1]^dom -> [1]^cod of the box category with connections.

    ``coords[j-1]`` is the j-th output coordinate: CONST0, CONST1, or a
    frozenset A meaning max of the inputs indexed by A.
    """

    dom: int
    coords: tuple

    def __post_init__(self):
        if not box_is_valid(self.dom, self.coords):
            raise ValueError(
                f"invalid box map [1]^{self.dom} -> [1]^{len(self.coords)}: "
                f"{render_box(self.dom, self.coords)}"
            )

    @property
    def cod(self) -> int:
        return len(self.coords)

    def sort_key(self):
        return tuple(coord_sort_key(c) for c in self.coords)

    def __repr__(self):
        return f"BoxMap({self.dom}, {render_box(self.dom, self.coords)})"


def render_coord(coord) -> str:
    if is_max(coord):
        return "max{" + ",".join(str(i) for i in sorted(coord)) + "}"
    return str(coord)


def render_box(dom: int, coords) -> str:
    return "(" + ", ".join(render_coord(c) for c in coords) + ")"


def render(f: BoxMap) -> str:
    """Coordinate-form rendering, e.g. ``(1, max{1,2}, 0)``."""
    return render_box(f.dom, f.coords)


def parse_box(text: str, dom: int) -> BoxMap:
    """Parse a coordinate-form rendering back into a BoxMap."""
    s = text.strip()
    if not (s.startswith("(") and s.endswith(")")):
        raise ValueError(f"expected parenthesized coordinate form, got {text!r}")
    body = s[1:-1].strip()
    coords = []
    if body:
        depth = 0
        token = ""
        tokens = []
        for ch in body:
            if ch == "{":
                depth += 1
            elif ch == "}":
                depth -= 1
            if ch == "," and depth == 0:
                tokens.append(token)
                token = ""
            else:
                token += ch
        tokens.append(token)
        for tok in tokens:
            tok = tok.strip()
            if tok == "0":
                coords.append(CONST0)
            elif tok == "1":
                coords.append(CONST1)
            elif tok.startswith("max{") and tok.endswith("}"):
                items = tok[4:-1].split(",")
                coords.append(frozenset(int(i) for i in items))
            else:
                raise ValueError(f"bad coordinate {tok!r} in {text!r}")
    return BoxMap(dom, tuple(coords))


def identity(n: int) -> BoxMap:
    return BoxMap(n, tuple(frozenset({j}) for j in range(1, n + 1)))


def face(n: int, i: int, sign: int) -> BoxMap:
    """The face [1]^(n-1) -> [1]^n inserting the constant ``sign`` at slot i."""
    if not 1 <= i <= n:
        raise RangeError(f"face index {i} out of range for dimension {n}")
    if sign not in (0, 1):
        raise RangeError(f"face sign must be 0 or 1, got {sign!r}")
    coords = [frozenset({j}) for j in range(1, i)]
    coords.append(CONST1 if sign else CONST0)
    coords.extend(frozenset({j}) for j in range(i, n))
    return BoxMap(n - 1, tuple(coords))


def degeneracy(n: int, i: int) -> BoxMap:
    """The degeneracy [1]^n -> [1]^(n-1) dropping input coordinate i."""
    if not 1 <= i <= n:
        raise RangeError(f"degeneracy index {i} out of range for dimension {n}")
    coords = [frozenset({j}) for j in range(1, i)]
    coords.extend(frozenset({j}) for j in range(i + 1, n + 1))
    return BoxMap(n, tuple(coords))


def connection(n: int, i: int) -> BoxMap:
    """The connection [1]^n -> [1]^(n-1) merging inputs i, i+1 by max."""
    if not 1 <= i <= n - 1:
        raise RangeError(f"connection index {i} out of range for dimension {n}")
    coords = [frozenset({j}) for j in range(1, i)]
    coords.append(frozenset({i, i + 1}))
    coords.extend(frozenset({j}) for j in range(i + 2, n + 1))
    return BoxMap(n, tuple(coords))


def box_generator(kind: str, n: int, i: int, sign: int | None = None) -> BoxMap:
    if kind == "face":
        if sign is None:
            raise RangeError("face generator needs a sign")
        return face(n, i, sign)
    if sign is not None:
        raise RangeError(f"{kind} generator takes no sign")
    if kind == "degeneracy":
        return degeneracy(n, i)
    if kind == "connection":
        return connection(n, i)
    raise RangeError(f"unknown generator kind {kind!r}")


def compose(g: BoxMap, f: BoxMap) -> BoxMap:
    """The composite g o f (f applied first)."""
    if f.cod != g.dom:
        raise CompositionError(
            f"cannot compose [1]^{f.dom}->[1]^{f.cod} then [1]^{g.dom}->[1]^{g.cod}"
        )
    coords = []
    for c in g.coords:
        if not is_max(c):
            coords.append(c)
            continue
        parts = [f.coords[i - 1] for i in sorted(c)]
        if any(p == CONST1 for p in parts):
            coords.append(CONST1)
            continue
        support = frozenset().union(*(p for p in parts if is_max(p)))
        coords.append(frozenset(support) if support else CONST0)
    return BoxMap(f.dom, tuple(coords))


@lru_cache(maxsize=None)
def _subsets(lo: int, hi: int):
    # Nonempty subsets of {lo..hi} in lexicographic order of sorted tuples.
    items = range(lo, hi + 1)
    subs = []
    for r in range(1, hi - lo + 2):
        subs.extend(frozenset(c) for c in combinations(items, r))
    subs.sort(key=lambda s: tuple(sorted(s)))
    return tuple(subs)


@lru_cache(maxsize=None)
def enumerate_maps(m: int, n: int) -> tuple:
    """All morphisms [1]^m -> [1]^n, in lexicographic coordinate order."""
    out = []

    def go(prefix, low):
        if len(prefix) == n:
            out.append(BoxMap(m, tuple(prefix)))
            return
        go(prefix + [CONST0], low)
        go(prefix + [CONST1], low)
        if low <= m:
            for sub in _subsets(low, m):
                go(prefix + [sub], max(sub) + 1)

    go([], 1)
    out.sort(key=BoxMap.sort_key)
    return tuple(out)


@lru_cache(maxsize=None)
def hom_closure(max_obj: int):
    """Composition closure of the generators between dimensions <= max_obj.

    Independent oracle for ``enumerate_maps``: returns {(m, n): frozenset of
    BoxMap} built only from generators, identities, and ``compose``.
    """
    homs = {
        (a, b): set() for a in range(max_obj + 1) for b in range(max_obj + 1)
    }
    for a in range(max_obj + 1):
        homs[(a, a)].add(identity(a))
    for n in range(1, max_obj + 1):
        for i in range(1, n + 1):
            homs[(n - 1, n)].add(face(n, i, 0))
            homs[(n - 1, n)].add(face(n, i, 1))
            homs[(n, n - 1)].add(degeneracy(n, i))
        for i in range(1, n):
            homs[(n, n - 1)].add(connection(n, i))
    changed = True
    while changed:
        changed = False
        for (a, b), fs in list(homs.items()):
            for (b2, c), gs in list(homs.items()):
                if b2 != b:
                    continue
                target = homs[(a, c)]
                for f_ in list(fs):
                    for g_ in list(gs):
                        h = compose(g_, f_)
                        if h not in target:
                            target.add(h)
                            changed = True
    return {k: frozenset(v) for k, v in homs.items()}


@dataclass(frozen=True)
class NormalForm:
    """Unique factorization faces o connections o degeneracies.

    ``degeneracies`` are the unused domain coordinates i_1 > ... > i_r,
    applied largest-first; ``connections`` are indices j_1 < ... < j_s in
    the degeneracy-reduced numbering, applied largest-first; ``faces`` are
    pairs (k, sign) with k_1 > ... > k_t output positions, applied
    smallest-first.
    """

    dom: int
    cod: int
    faces: tuple
    connections: tuple
    degeneracies: tuple

    def __post_init__(self):
        r, s, t = len(self.degeneracies), len(self.connections), len(self.faces)
        if self.cod != self.dom - r - s + t:
            raise ValueError("normal form dimensions do not balance")
        if list(self.degeneracies) != sorted(self.degeneracies, reverse=True):
            raise ValueError("degeneracy indices must strictly decrease")
        if list(self.connections) != sorted(self.connections):
            raise ValueError("connection indices must strictly increase")
        ks = [k for k, _ in self.faces]
        if ks != sorted(ks, reverse=True) or len(set(ks)) != len(ks):
            raise ValueError("face indices must strictly decrease")
        if any(i < 1 or i > self.dom for i in self.degeneracies):
            raise ValueError("degeneracy index out of range")
        inner = self.dom - r
        if any(j < 1 or j > inner - 1 for j in self.connections):
            raise ValueError("connection index out of range")
        if any(k < 1 or k > self.cod for k, _ in self.faces):
            raise ValueError("face index out of range")
        if any(e not in (0, 1) for _, e in self.faces):
            raise ValueError("face sign out of range")


def normal_form(f: BoxMap) -> NormalForm:
    """Factor ``f`` into its unique faces/connections/degeneracies word.

    Degeneracies are the domain coordinates missing from every max-support;
    each max-support of size a contributes a-1 connections; each constant
    output coordinate contributes one face.
    """
    supports = [c for c in f.coords if is_max(c)]
    used = sorted(set().union(*supports)) if supports else []
    degs = tuple(sorted(set(range(1, f.dom + 1)) - set(used), reverse=True))
    pos = {orig: idx + 1 for idx, orig in enumerate(used)}
    conns = []
    for sup in supports:
        local = sorted(pos[i] for i in sup)
        conns.extend(local[:-1])
    faces_ = tuple(
        (j, int(c))
        for j, c in sorted(enumerate(f.coords, start=1), reverse=True)
        if not is_max(c)
    )
    nf = NormalForm(f.dom, f.cod, faces_, tuple(conns), degs)
    # Bookkeeping is self-verifying: the word must recompose to f.
    assert nf_evaluate(nf) == f, (f, nf)
    return nf


def nf_evaluate(nf: NormalForm) -> BoxMap:
    """Compose the generator word of a normal form back into a BoxMap."""
    cur = identity(nf.dom)
    for i in nf.degeneracies:
        cur = compose(degeneracy(cur.cod, i), cur)
    for j in reversed(nf.connections):
        cur = compose(connection(cur.cod, j), cur)
    for k, e in reversed(nf.faces):
        cur = compose(face(cur.cod + 1, k, e), cur)
    return cur


def enumerate_normal_forms(m: int, n: int):
    """All valid normal forms [1]^m -> [1]^n (oracle for bijectivity tests)."""
    out = []
    for r in range(m + 1):
        for degs in combinations(range(1, m + 1), r):
            inner = m - r
            conn_pool = range(1, inner)
            # s connections need inner >= 1; inner = 0 forces s = 0.
            for s in range(max(1, inner)):
                for conns in combinations(conn_pool, s):
                    p = inner - s  # number of max coordinates
                    t = n - p
                    if t < 0:
                        continue
                    for posns in combinations(range(1, n + 1), t):
                        for signs in _sign_tuples(t):
                            faces_ = tuple(
                                sorted(zip(posns, signs), reverse=True)
                            )
                            out.append(
                                NormalForm(
                                    m,
                                    n,
                                    faces_,
                                    tuple(conns),
                                    tuple(sorted(degs, reverse=True)),
                                )
                            )
    return out


def _sign_tuples(t: int):
    if t == 0:
        return [()]
    smaller = _sign_tuples(t - 1)
    return [s + (e,) for s in smaller for e in (0, 1)]


def render_word(nf: NormalForm) -> str:
    """Generator-word rendering, e.g. ``d3^0 d1^1 g1 s2``; identity is ``id``."""
    parts = [f"d{k}^{e}" for k, e in nf.faces]
    parts += [f"g{j}" for j in nf.connections]
    parts += [f"s{i}" for i in nf.degeneracies]
    return " ".join(parts) if parts else "id"


# --- simplex category -------------------------------------------------------


@dataclass(frozen=True)
class SimplexMap:
    """A monotone map [dom] -> [cod]; ``images[v]`` is the image of vertex v."""

    cod: int
    images: tuple

    def __post_init__(self):
        if len(self.images) < 1:
            raise ValueError("simplex map needs at least one vertex")
        if any(not 0 <= v <= self.cod for v in self.images):
            raise ValueError(f"images {self.images} exceed codomain [{self.cod}]")
        if any(a > b for a, b in zip(self.images, self.images[1:])):
            raise ValueError(f"images {self.images} are not monotone")

    @property
    def dom(self) -> int:
        return len(self.images) - 1

    def __call__(self, v: int) -> int:
        return self.images[v]

    def __repr__(self):
        return f"SimplexMap({self.cod}, {self.images})"


def render_simplex(a: SimplexMap) -> str:
    return "[" + ",".join(str(v) for v in a.images) + "]"


def simplex_identity(n: int) -> SimplexMap:
    return SimplexMap(n, tuple(range(n + 1)))


def simplex_compose(g: SimplexMap, f: SimplexMap) -> SimplexMap:
    """The composite g o f (f applied first)."""
    if f.cod != g.dom:
        raise CompositionError(
            f"cannot compose [{f.dom}]->[{f.cod}] then [{g.dom}]->[{g.cod}]"
        )
    return SimplexMap(g.cod, tuple(g.images[v] for v in f.images))


@lru_cache(maxsize=None)
def simplex_enumerate(m: int, n: int) -> tuple:
    """All monotone maps [m] -> [n] in lexicographic order."""
    return tuple(
        SimplexMap(n, images)
        for images in combinations_with_replacement(range(n + 1), m + 1)
    )


def coface(n: int, i: int) -> SimplexMap:
    """The injection [n-1] -> [n] missing vertex i."""
    if not 0 <= i <= n:
        raise RangeError(f"coface index {i} out of range for [{n}]")
    return SimplexMap(n, tuple(v for v in range(n + 1) if v != i))


def codegeneracy(n: int, i: int) -> SimplexMap:
    """The surjection [n+1] -> [n] hitting vertex i twice."""
    if not 0 <= i <= n:
        raise RangeError(f"codegeneracy index {i} out of range for [{n}]")
    return SimplexMap(n, tuple(v if v <= i else v - 1 for v in range(n + 2)))


def ez_split(a: SimplexMap) -> tuple:
    """The unique factorization a = delta o eta, eta surjective, delta injective."""
    values = sorted(set(a.images))
    rank = {v: r for r, v in enumerate(values)}
    eta = SimplexMap(len(values) - 1, tuple(rank[v] for v in a.images))
    delta = SimplexMap(a.cod, tuple(values))
    return eta, delta


def is_surjective(a: SimplexMap) -> bool:
    return set(a.images) == set(range(a.cod + 1))


def is_injective(a: SimplexMap) -> bool:
    return len(set(a.images)) == len(a.images)


def surjection_repeats(eta: SimplexMap) -> tuple:
    """Positions j with eta(j) = eta(j+1), ascending; eta = s_{j1} o ... applied largest-first."""
    if not is_surjective(eta):
        raise ValueError(f"{eta} is not surjective")
    return tuple(
        j for j in range(eta.dom) if eta.images[j] == eta.images[j + 1]
    )


def injection_missing(delta: SimplexMap) -> tuple:
    """Values not hit by an injection, ascending."""
    if not is_injective(delta):
        raise ValueError(f"{delta} is not injective")
    hit = set(delta.images)
    return tuple(v for v in range(delta.cod + 1) if v not in hit)
