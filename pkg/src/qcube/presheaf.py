"""Finite dimension-truncated presheaves on the box and simplex categories.

A presheaf is a table: cell identifiers per dimension 0..N plus one total
function per generating map of the site that stays within the truncation.
Everything downstream (quotients, functors, lifting) is computed on these
tables.  General operators act through the unique generator factorization
of the site morphism, so the generator tables are the whole structure.

Action keys are tuples:

    cubical     ('face', d, i, e)  X_d -> X_{d-1}   1 <= i <= d, e in {0,1}
                ('deg',  d, i)     X_{d-1} -> X_d   1 <= i <= d
                ('conn', d, i)     X_{d-1} -> X_d   1 <= i <= d-1
    simplicial  ('face', d, i)     X_d -> X_{d-1}   0 <= i <= d
                ('deg',  d, i)     X_{d-1} -> X_d   0 <= i <= d-1
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

from . import boxcat
from .boxcat import BoxMap, SimplexMap

CUBICAL = "cubical"
SIMPLICIAL = "simplicial"


class PresheafError(ValueError):
    pass


def action_keys(flavor: str, truncation: int):
    """All generator action keys for the given flavor and truncation."""
    keys = []
    for d in range(1, truncation + 1):
        if flavor == CUBICAL:
            for i in range(1, d + 1):
                keys.append(("face", d, i, 0))
                keys.append(("face", d, i, 1))
            for i in range(1, d + 1):
                keys.append(("deg", d, i))
            for i in range(1, d):
                keys.append(("conn", d, i))
        else:
            for i in range(d + 1):
                keys.append(("face", d, i))
            for i in range(d):
                keys.append(("deg", d, i))
    return tuple(keys)


def key_dims(key):
    """(source dim, target dim) of the cell-level action for a key."""
    d = key[1]
    if key[0] == "face":
        return d, d - 1
    return d - 1, d


def key_site_map(flavor: str, key):
    """The site morphism whose presheaf action the key stores."""
    if flavor == CUBICAL:
        if key[0] == "face":
            return boxcat.face(key[1], key[2], key[3])
        if key[0] == "deg":
            return boxcat.degeneracy(key[1], key[2])
        return boxcat.connection(key[1], key[2])
    if key[0] == "face":
        return boxcat.coface(key[1], key[2])
    return boxcat.codegeneracy(key[1] - 1, key[2])


@lru_cache(maxsize=None)
def action_path_box(u: BoxMap):
    """Generator keys realizing X(u), in cell-application order."""
    nf = boxcat.normal_form(u)
    path = []
    d = u.cod
    for k, e in nf.faces:
        path.append(("face", d, k, e))
        d -= 1
    for j in nf.connections:
        d += 1
        path.append(("conn", d, j))
    for i in reversed(nf.degeneracies):
        d += 1
        path.append(("deg", d, i))
    assert d == u.dom
    return tuple(path)


@lru_cache(maxsize=None)
def action_path_simplex(a: SimplexMap):
    """Generator keys realizing X(a), in cell-application order."""
    eta, delta = boxcat.ez_split(a)
    path = []
    d = a.cod
    for v in reversed(boxcat.injection_missing(delta)):
        path.append(("face", d, v))
        d -= 1
    for j in boxcat.surjection_repeats(eta):
        d += 1
        path.append(("deg", d, j))
    assert d == a.dom
    return tuple(path)


class Presheaf:
    """An N-truncated presheaf given by explicit cell sets and action tables.

    Immutable by convention: nothing mutates a presheaf after construction,
    so instances may be shared freely across threads.
    """

    def __init__(self, flavor, truncation, cells, actions):
        if flavor not in (CUBICAL, SIMPLICIAL):
            raise PresheafError(f"unknown flavor {flavor!r}")
        if truncation < 0:
            raise PresheafError("truncation must be >= 0")
        self.flavor = flavor
        self.truncation = truncation
        self.cells = {d: tuple(cells.get(d, ())) for d in range(truncation + 1)}
        extra_dims = set(cells) - set(self.cells)
        if extra_dims:
            raise PresheafError(f"cells given outside truncation: {sorted(extra_dims)}")
        self._cellsets = {d: frozenset(cs) for d, cs in self.cells.items()}
        for d, cs in self.cells.items():
            if len(self._cellsets[d]) != len(cs):
                raise PresheafError(f"duplicate cell identifiers in dimension {d}")
            if not all(isinstance(c, str) for c in cs):
                raise PresheafError(f"cell identifiers must be strings (dimension {d})")
        expected = action_keys(flavor, truncation)
        if set(actions) != set(expected):
            missing = set(expected) - set(actions)
            surplus = set(actions) - set(expected)
            raise PresheafError(
                f"wrong action keys: missing {sorted(missing)}, surplus {sorted(surplus)}"
            )
        self.actions = {k: dict(actions[k]) for k in expected}
        for key in expected:
            src, dst = key_dims(key)
            table = self.actions[key]
            if set(table) != self._cellsets[src]:
                raise PresheafError(f"action {key} is not total on dimension {src}")
            for c, v in table.items():
                if v not in self._cellsets[dst]:
                    raise PresheafError(
                        f"action {key} sends {c!r} to unknown cell {v!r}"
                    )
        self._reverse = None
        self._nondeg = {}

    # -- basic access ---------------------------------------------------

    def cells_at(self, d):
        return self.cells.get(d, ())

    def has_cell(self, d, cell):
        return 0 <= d <= self.truncation and cell in self._cellsets[d]

    def total_cells(self):
        return sum(len(cs) for cs in self.cells.values())

    def act_gen(self, key, cell):
        return self.actions[key][cell]

    def act_box(self, u: BoxMap, cell):
        """Apply X(u) to a cell of dimension u.cod; result has dimension u.dom."""
        for key in action_path_box(u):
            cell = self.actions[key][cell]
        return cell

    def act_simplex(self, a: SimplexMap, cell):
        for key in action_path_simplex(a):
            cell = self.actions[key][cell]
        return cell

    def act(self, site_map, cell):
        if isinstance(site_map, BoxMap):
            return self.act_box(site_map, cell)
        return self.act_simplex(site_map, cell)

    # -- degeneracy structure --------------------------------------------

    def is_degenerate(self, d, cell):
        """Whether the cell is the image of a degeneracy (or connection).

        Uses the section equations: c = X(s_i)(X(d_i)(c)) detects images of
        X(s_i) exactly, and likewise for connections via their 0-face.
        """
        if d == 0:
            return False
        if d > self.truncation:
            raise PresheafError(f"dimension {d} exceeds truncation")
        if self.flavor == CUBICAL:
            for i in range(1, d + 1):
                for e in (0, 1):
                    down = self.actions[("face", d, i, e)][cell]
                    if self.actions[("deg", d, i)][down] == cell:
                        return True
            for i in range(1, d):
                down = self.actions[("face", d, i, 0)][cell]
                if self.actions[("conn", d, i)][down] == cell:
                    return True
            return False
        for i in range(d):
            down = self.actions[("face", d, i)][cell]
            if self.actions[("deg", d, i)][down] == cell:
                return True
        return False

    def nondegenerate(self, d):
        if d not in self._nondeg:
            self._nondeg[d] = tuple(
                c for c in self.cells_at(d) if not self.is_degenerate(d, c)
            )
        return self._nondeg[d]

    def up_keys(self, d):
        """Keys of degeneracy-type actions landing in dimension d."""
        return [k for k in self.actions if key_dims(k)[1] == d and k[0] != "face"]

    def face_keys(self, d):
        return [k for k in self.actions if k[0] == "face" and k[1] == d]

    def reverse(self, key):
        """Preimage lists of an action table (cached)."""
        if self._reverse is None:
            self._reverse = {}
        if key not in self._reverse:
            rev = {}
            for b, v in self.actions[key].items():
                rev.setdefault(v, []).append(b)
            self._reverse[key] = rev
        return self._reverse[key]

    # -- equality ---------------------------------------------------------

    def __eq__(self, other):
        return (
            isinstance(other, Presheaf)
            and self.flavor == other.flavor
            and self.truncation == other.truncation
            and self.cells == other.cells
            and self.actions == other.actions
        )

    def __repr__(self):
        counts = ",".join(str(len(self.cells_at(d))) for d in range(self.truncation + 1))
        return f"Presheaf({self.flavor}, N={self.truncation}, cells=[{counts}])"


def build_presheaf(flavor, truncation, cells_by_dim, act) -> Presheaf:
    """Assemble a presheaf from ordered cell lists and an action callback.

    ``act(key, cell) -> cell`` must be defined for every generator key.
    """
    cells = {d: tuple(cells_by_dim.get(d, ())) for d in range(truncation + 1)}
    actions = {}
    for key in action_keys(flavor, truncation):
        src, _ = key_dims(key)
        actions[key] = {c: act(key, c) for c in cells[src]}
    return Presheaf(flavor, truncation, cells, actions)


@lru_cache(maxsize=None)
def representable(flavor, n, truncation) -> Presheaf:
    """The representable presheaf of the n-th site object, truncated.

    Cells in dimension m are the site morphisms m -> n; actions are
    precomposition.
    """
    if flavor == CUBICAL:
        maps = {d: boxcat.enumerate_maps(d, n) for d in range(truncation + 1)}
        by_id = {d: {boxcat.render(u): u for u in maps[d]} for d in maps}
        cells = {d: [boxcat.render(u) for u in maps[d]] for d in maps}

        def act(key, cell):
            d_src, _ = key_dims(key)
            u = by_id[d_src][cell]
            return boxcat.render(boxcat.compose(u, key_site_map(CUBICAL, key)))

        return build_presheaf(CUBICAL, truncation, cells, act)

    maps = {d: boxcat.simplex_enumerate(d, n) for d in range(truncation + 1)}
    by_id = {d: {boxcat.render_simplex(a): a for a in maps[d]} for d in maps}
    cells = {d: [boxcat.render_simplex(a) for a in maps[d]] for d in maps}

    def act(key, cell):
        d_src, _ = key_dims(key)
        a = by_id[d_src][cell]
        return boxcat.render_simplex(
            boxcat.simplex_compose(a, key_site_map(SIMPLICIAL, key))
        )

    return build_presheaf(SIMPLICIAL, truncation, cells, act)


def terminal(flavor, truncation) -> Presheaf:
    return representable(flavor, 0, truncation)


def empty_presheaf(flavor, truncation) -> Presheaf:
    return Presheaf(
        flavor,
        truncation,
        {d: () for d in range(truncation + 1)},
        {k: {} for k in action_keys(flavor, truncation)},
    )


# -- validation -----------------------------------------------------------


@dataclass(frozen=True)
class Violation:
    identity: str
    dim: int
    cell: str
    detail: str


def validate(X: Presheaf):
    """Check every site identity within truncation; return violations.

    For each composable pair of site generators the action of the composite
    (computed through its unique normal form) must agree with the two
    single-generator actions.  This covers every instantiation of the
    cubical or simplicial identity lists that stays inside the truncation.
    """
    violations = []
    flavor = X.flavor
    gens = [(k, key_site_map(flavor, k)) for k in action_keys(flavor, X.truncation)]
    for k1, s1 in gens:
        for k2, s2 in gens:
            if s2.dom != s1.cod:
                continue
            comp = (
                boxcat.compose(s2, s1)
                if isinstance(s1, BoxMap)
                else boxcat.simplex_compose(s2, s1)
            )
            top = comp.cod
            name = f"{_key_name(k2)}.{_key_name(k1)}"
            for cell in X.cells_at(top):
                via_pair = X.act_gen(k1, X.act_gen(k2, cell))
                via_comp = X.act(comp, cell)
                if via_pair != via_comp:
                    violations.append(
                        Violation(
                            name,
                            top,
                            cell,
                            f"two-step gives {via_pair!r}, normal form gives {via_comp!r}",
                        )
                    )
    return violations


def _key_name(key):
    if key[0] == "face" and len(key) == 4:
        return f"d{key[2]}^{key[3]}@{key[1]}"
    if key[0] == "face":
        return f"d{key[2]}@{key[1]}"
    if key[0] == "deg":
        return f"s{key[2]}@{key[1]}"
    return f"g{key[2]}@{key[1]}"


# -- maps -------------------------------------------------------------------


class PresheafMap:
    """A degreewise function commuting with every generator action."""

    def __init__(self, source: Presheaf, target: Presheaf, components, check=True):
        if source.flavor != target.flavor:
            raise PresheafError("source and target flavor differ")
        if source.truncation != target.truncation:
            raise PresheafError("source and target truncation differ")
        self.source = source
        self.target = target
        self.components = {
            d: dict(components.get(d, {})) for d in range(source.truncation + 1)
        }
        for d in range(source.truncation + 1):
            comp = self.components[d]
            if set(comp) != set(source.cells_at(d)):
                raise PresheafError(f"map components not total in dimension {d}")
            for c, v in comp.items():
                if not target.has_cell(d, v):
                    raise PresheafError(
                        f"map sends {c!r} to unknown cell {v!r} (dimension {d})"
                    )
        if check:
            self._check_natural()

    def _check_natural(self):
        for key in self.source.actions:
            src, dst = key_dims(key)
            stable = self.source.actions[key]
            ttable = self.target.actions[key]
            comp_src = self.components[src]
            comp_dst = self.components[dst]
            for b, v in stable.items():
                if comp_dst[v] != ttable[comp_src[b]]:
                    raise PresheafError(
                        f"not natural at {key}, cell {b!r}: "
                        f"{comp_dst[v]!r} != {ttable[comp_src[b]]!r}"
                    )

    def apply(self, d, cell):
        return self.components[d][cell]

    def __eq__(self, other):
        return (
            isinstance(other, PresheafMap)
            and self.source == other.source
            and self.target == other.target
            and self.components == other.components
        )

    def __repr__(self):
        return f"PresheafMap({self.source!r} -> {self.target!r})"


def identity_map(X: Presheaf) -> PresheafMap:
    return PresheafMap(
        X, X, {d: {c: c for c in X.cells_at(d)} for d in range(X.truncation + 1)},
        check=False,
    )


def compose_maps(g: PresheafMap, f: PresheafMap) -> PresheafMap:
    if f.target != g.source:
        raise PresheafError("maps are not composable")
    comps = {
        d: {c: g.components[d][v] for c, v in f.components[d].items()}
        for d in range(f.source.truncation + 1)
    }
    return PresheafMap(f.source, g.target, comps, check=False)


def is_mono(f: PresheafMap) -> bool:
    return all(
        len(set(comp.values())) == len(comp) for comp in f.components.values()
    )


def is_epi(f: PresheafMap) -> bool:
    return all(
        set(f.components[d].values()) == set(f.target.cells_at(d))
        for d in range(f.source.truncation + 1)
    )


def is_iso(f: PresheafMap) -> bool:
    return is_mono(f) and is_epi(f)


def inverse(f: PresheafMap) -> PresheafMap:
    if not is_iso(f):
        raise PresheafError("map is not an isomorphism")
    comps = {
        d: {v: c for c, v in f.components[d].items()}
        for d in range(f.source.truncation + 1)
    }
    return PresheafMap(f.target, f.source, comps, check=False)


# -- colimits and limits -----------------------------------------------------


class _UnionFind:
    def __init__(self):
        self.parent = {}

    def add(self, x):
        self.parent.setdefault(x, x)

    def find(self, x):
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, x, y):
        rx, ry = self.find(x), self.find(y)
        if rx != ry:
            self.parent[ry] = rx

    def classes(self):
        out = {}
        for x in self.parent:
            out.setdefault(self.find(x), []).append(x)
        return out


def pushout(f: PresheafMap, g: PresheafMap):
    """Degreewise pushout of B <-f- A -g-> C; returns (P, inB, inC)."""
    if f.source != g.source:
        raise PresheafError("pushout needs a shared source")
    A, B, C = f.source, f.target, g.target
    if B.flavor != C.flavor or B.truncation != C.truncation:
        raise PresheafError("pushout targets must share flavor and truncation")
    N = B.truncation
    order = {}
    ufs = {}
    for d in range(N + 1):
        uf = _UnionFind()
        for idx, x in enumerate(B.cells_at(d)):
            uf.add(("b", x))
            order[("b", x, d)] = (0, idx)
        for idx, x in enumerate(C.cells_at(d)):
            uf.add(("c", x))
            order[("c", x, d)] = (1, idx)
        for a in A.cells_at(d):
            uf.union(("b", f.components[d][a]), ("c", g.components[d][a]))
        ufs[d] = uf

    reps = {}
    cells_by_dim = {}
    class_id = {}
    for d in range(N + 1):
        classes = ufs[d].classes()
        named = []
        for members in classes.values():
            rep = min(members, key=lambda t: order[(t[0], t[1], d)])
            named.append((order[(rep[0], rep[1], d)], rep, members))
        named.sort()
        ids = []
        for _, rep, members in named:
            cid = f"{rep[0]}:{rep[1]}"
            ids.append(cid)
            reps[(d, cid)] = rep
            for member in members:
                class_id[(d, member)] = cid
        cells_by_dim[d] = ids

    def act(key, cid):
        src, dst = key_dims(key)
        tag, x = reps[(src, cid)]
        side = B if tag == "b" else C
        return class_id[(dst, (tag, side.actions[key][x]))]

    P = build_presheaf(B.flavor, N, cells_by_dim, act)
    inB = PresheafMap(
        B, P,
        {d: {x: class_id[(d, ("b", x))] for x in B.cells_at(d)} for d in range(N + 1)},
    )
    inC = PresheafMap(
        C, P,
        {d: {x: class_id[(d, ("c", x))] for x in C.cells_at(d)} for d in range(N + 1)},
    )
    return P, inB, inC


def coproduct(B: Presheaf, C: Presheaf):
    """Disjoint union, as the pushout under the empty presheaf."""
    E = empty_presheaf(B.flavor, B.truncation)
    zero_b = PresheafMap(E, B, {})
    zero_c = PresheafMap(E, C, {})
    return pushout(zero_b, zero_c)


def is_pushout_square(f, g, h, k) -> bool:
    """Whether D (with legs h: B->D, k: C->D) is the pushout of B <- A -> C."""
    if compose_maps(h, f) != compose_maps(k, g):
        raise PresheafError("square does not commute")
    P, inB, inC = pushout(f, g)
    N = P.truncation
    comps = {d: {} for d in range(N + 1)}
    for d in range(N + 1):
        for x in f.target.cells_at(d):
            comps[d][inB.components[d][x]] = h.components[d][x]
        for x in g.target.cells_at(d):
            cid = inC.components[d][x]
            val = k.components[d][x]
            if cid in comps[d] and comps[d][cid] != val:
                return False
            comps[d][cid] = val
    induced = PresheafMap(P, h.target, comps)
    return is_iso(induced)


def product(X: Presheaf, Y: Presheaf):
    """Cartesian product with projections; returns (P, pr1, pr2)."""
    if X.flavor != Y.flavor or X.truncation != Y.truncation:
        raise PresheafError("product factors must share flavor and truncation")
    N = X.truncation
    pair_id = {}
    cells = {}
    for d in range(N + 1):
        ids = []
        for x in X.cells_at(d):
            for y in Y.cells_at(d):
                cid = f"<{x}; {y}>"
                pair_id[(d, x, y)] = cid
                ids.append(cid)
        cells[d] = ids
    first = {}
    second = {}
    for (d, x, y), cid in pair_id.items():
        first[(d, cid)] = x
        second[(d, cid)] = y

    def act(key, cid):
        src, dst = key_dims(key)
        x, y = first[(src, cid)], second[(src, cid)]
        return pair_id[(dst, X.actions[key][x], Y.actions[key][y])]

    P = build_presheaf(X.flavor, N, cells, act)
    pr1 = PresheafMap(
        P, X, {d: {c: first[(d, c)] for c in P.cells_at(d)} for d in range(N + 1)},
        check=False,
    )
    pr2 = PresheafMap(
        P, Y, {d: {c: second[(d, c)] for c in P.cells_at(d)} for d in range(N + 1)},
        check=False,
    )
    return P, pr1, pr2


def pair_map(u: PresheafMap, v: PresheafMap, prod=None):
    """The map <u, v> into a product built by ``product``."""
    if u.source != v.source:
        raise PresheafError("pairing needs a shared source")
    if prod is None:
        prod = product(u.target, v.target)
    P, _, _ = prod
    N = u.source.truncation
    comps = {
        d: {
            c: f"<{u.components[d][c]}; {v.components[d][c]}>"
            for c in u.source.cells_at(d)
        }
        for d in range(N + 1)
    }
    return PresheafMap(u.source, P, comps)


def subobject(X: Presheaf, generators):
    """Smallest subpresheaf containing the given (dim, cell) generators.

    Returns (S, inclusion).  Closure runs under every action, faces
    downward and degeneracies upward, until stable.
    """
    selected = {d: set() for d in range(X.truncation + 1)}
    work = []
    for d, c in generators:
        if not X.has_cell(d, c):
            raise PresheafError(f"generator {c!r} is not a cell of dimension {d}")
        work.append((d, c))
    while work:
        d, c = work.pop()
        if c in selected[d]:
            continue
        selected[d].add(c)
        for key in X.actions:
            src, dst = key_dims(key)
            if src != d:
                continue
            v = X.actions[key][c]
            if v not in selected[dst]:
                work.append((dst, v))
    cells = {
        d: [c for c in X.cells_at(d) if c in selected[d]]
        for d in range(X.truncation + 1)
    }

    def act(key, cell):
        return X.actions[key][cell]

    S = build_presheaf(X.flavor, X.truncation, cells, act)
    incl = PresheafMap(
        S, X,
        {d: {c: c for c in S.cells_at(d)} for d in range(X.truncation + 1)},
        check=False,
    )
    return S, incl


def image(f: PresheafMap):
    """The image subobject of the target; returns (S, inclusion)."""
    gens = [
        (d, v)
        for d in range(f.source.truncation + 1)
        for v in f.components[d].values()
    ]
    return subobject(f.target, gens)


# -- hom sets ----------------------------------------------------------------


def iter_homs(X: Presheaf, Y: Presheaf, injective=False, bijective=False):
    """Yield every presheaf map X -> Y, in a deterministic order.

    Backtracking dimension by dimension: degenerate cells are forced by
    naturality with the degeneracy that produced them, the rest are pruned
    by face compatibility with already-assigned lower cells.
    """
    if X.flavor != Y.flavor or X.truncation != Y.truncation:
        raise PresheafError("hom set needs matching flavor and truncation")
    N = X.truncation
    if bijective and any(
        len(X.cells_at(d)) != len(Y.cells_at(d)) for d in range(N + 1)
    ):
        return
    flat = [(d, c) for d in range(N + 1) for c in X.cells_at(d)]
    asg = {d: {} for d in range(N + 1)}
    used = {d: set() for d in range(N + 1)}
    up = {d: X.up_keys(d) for d in range(N + 1)}
    down = {d: X.face_keys(d) for d in range(N + 1)}

    def candidates(d, c):
        forced = None
        for key in up[d]:
            for b in X.reverse(key).get(c, ()):
                val = Y.actions[key][asg[d - 1][b]]
                if forced is None:
                    forced = val
                elif forced != val:
                    return ()
        pool = (forced,) if forced is not None else Y.cells_at(d)
        out = []
        for y in pool:
            ok = True
            for key in down[d]:
                if Y.actions[key][y] != asg[d - 1][X.actions[key][c]]:
                    ok = False
                    break
            if ok:
                out.append(y)
        return out

    def place(idx):
        if idx == len(flat):
            yield PresheafMap(
                X, Y, {d: dict(asg[d]) for d in range(N + 1)}, check=False
            )
            return
        d, c = flat[idx]
        for y in candidates(d, c):
            if (injective or bijective) and y in used[d]:
                continue
            asg[d][c] = y
            used[d].add(y)
            yield from place(idx + 1)
            del asg[d][c]
            used[d].discard(y)

    yield from place(0)


def hom_set(X: Presheaf, Y: Presheaf) -> tuple:
    return tuple(iter_homs(X, Y))


def find_iso(X: Presheaf, Y: Presheaf):
    """An isomorphism X -> Y if one exists, else None."""
    for d in range(X.truncation + 1):
        if len(X.cells_at(d)) != len(Y.cells_at(d)):
            return None
        if len(X.nondegenerate(d)) != len(Y.nondegenerate(d)):
            return None
    for h in iter_homs(X, Y, bijective=True):
        return h
    return None
