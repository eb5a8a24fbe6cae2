"""The quotient cubes Q^n: canonical representatives, the quotient map,
the cosimplicial structure, and the descent test for maps out of Q^n.

Q^n identifies two m-cubes of the combinatorial n-cube when they agree up
to a coordinate where both are constant 1.  Every class has a unique
representative whose coordinates after the first constant 1 are all
constant 1; the quotient is computed entirely on those representatives.
"""

from __future__ import annotations

from functools import lru_cache

from . import boxcat, presheaf
from .boxcat import CONST1, BoxMap, SimplexMap
from .presheaf import CUBICAL, Presheaf, PresheafMap


def canonicalize(f: BoxMap) -> BoxMap:
    """The canonical representative of the class of f in Q^cod."""
    coords = list(f.coords)
    for j, c in enumerate(coords):
        if c == CONST1:
            for k in range(j + 1, len(coords)):
                coords[k] = CONST1
            break
    return BoxMap(f.dom, tuple(coords))


def related(f: BoxMap, g: BoxMap) -> bool:
    """Whether f and g are identified in the quotient."""
    return canonicalize(f) == canonicalize(g)


def generating_pairs(n: int, m: int):
    """The generating relation: pairs agreeing before a shared constant-1.

    Reflexive pairs are omitted.  Oracle for ``canonicalize``: its
    union-find closure must match canonical-form equality.
    """
    maps = boxcat.enumerate_maps(m, n)
    out = []
    for a in maps:
        for b in maps:
            if a.sort_key() >= b.sort_key():
                continue
            for j in range(n):
                if a.coords[j] == CONST1 and b.coords[j] == CONST1:
                    if a.coords[:j] == b.coords[:j]:
                        out.append((a, b))
                    break
    return out


@lru_cache(maxsize=None)
def q_cells(n: int, m: int) -> tuple:
    """Canonical representatives of the m-cells of Q^n, in enumeration order."""
    seen = set()
    out = []
    for f in boxcat.enumerate_maps(m, n):
        c = canonicalize(f)
        if c not in seen:
            seen.add(c)
            out.append(c)
    return tuple(out)


@lru_cache(maxsize=None)
def q_object(n: int, truncation: int) -> Presheaf:
    """The quotient cube Q^n as a truncated cubical presheaf.

    Cell identifiers are the coordinate renderings of the canonical
    representatives; a box generator acts by precomposition followed by
    canonicalization.
    """
    by_id = {}
    cells = {}
    for m in range(truncation + 1):
        reps = q_cells(n, m)
        cells[m] = [boxcat.render(u) for u in reps]
        by_id[m] = dict(zip(cells[m], reps))

    def act(key, cell):
        src, _ = presheaf.key_dims(key)
        u = by_id[src][cell]
        s = presheaf.key_site_map(CUBICAL, key)
        return boxcat.render(canonicalize(boxcat.compose(u, s)))

    return presheaf.build_presheaf(CUBICAL, truncation, cells, act)


@lru_cache(maxsize=None)
def pi_map(n: int, truncation: int) -> PresheafMap:
    """The quotient map from the representable n-cube onto Q^n."""
    box = presheaf.representable(CUBICAL, n, truncation)
    q = q_object(n, truncation)
    comps = {}
    for m in range(truncation + 1):
        comps[m] = {
            boxcat.render(u): boxcat.render(canonicalize(u))
            for u in boxcat.enumerate_maps(m, n)
        }
    return PresheafMap(box, q, comps)


# -- cosimplicial structure ---------------------------------------------------


def table_coface(n: int, j: int) -> BoxMap:
    """The box map [1]^(n-1) -> [1]^n inducing the j-th coface of Q^(n-1) -> Q^n."""
    if not 0 <= j <= n:
        raise boxcat.RangeError(f"coface index {j} out of range for Q^{n}")
    if j == 0:
        return boxcat.face(n, n, 1)
    return boxcat.face(n, n - j + 1, 0)


def table_codegeneracy(n: int, j: int) -> BoxMap:
    """The box map [1]^n -> [1]^(n-1) inducing the j-th codegeneracy Q^n -> Q^(n-1)."""
    if not 0 <= j <= n - 1:
        raise boxcat.RangeError(f"codegeneracy index {j} out of range for Q^{n}")
    if j == 0:
        return boxcat.degeneracy(n, n)
    return boxcat.connection(n, n - j)


def simplex_to_box(a: SimplexMap) -> BoxMap:
    """The canonical box map [1]^m -> [1]^n representing Q^a on the top class.

    Computed through the unique surjection-injection factorization of a,
    each factor replaced by its inducing box map.
    """
    eta, delta = boxcat.ez_split(a)
    cur = boxcat.identity(a.dom)
    level = a.dom
    # eta = s_{j_1} o ... o s_{j_k} with ascending repeat positions and the
    # largest applied first, so its inducing maps compose largest-first.
    for j in reversed(boxcat.surjection_repeats(eta)):
        cur = boxcat.compose(table_codegeneracy(level, j), cur)
        level -= 1
    for v in boxcat.injection_missing(delta):
        level += 1
        cur = boxcat.compose(table_coface(level, v), cur)
    return canonicalize(cur)


def cosimplicial_map(a: SimplexMap, truncation: int) -> PresheafMap:
    """The presheaf map Q^a : Q^dom -> Q^cod induced by a monotone map."""
    b = simplex_to_box(a)
    src = q_object(a.dom, truncation)
    dst = q_object(a.cod, truncation)
    comps = {}
    for m in range(truncation + 1):
        comps[m] = {
            boxcat.render(u): boxcat.render(canonicalize(boxcat.compose(b, u)))
            for u in q_cells(a.dom, m)
        }
    return PresheafMap(src, dst, comps)


# -- descent ------------------------------------------------------------------


def collapse_tail(n: int, i: int) -> BoxMap:
    """The idempotent [1]^(n-1) -> [1]^(n-1) setting the last n-i coordinates to 1."""
    coords = [frozenset({j}) for j in range(1, i)]
    coords.extend(CONST1 for _ in range(i - 1, n - 1))
    return BoxMap(n - 1, tuple(coords))


def descends(X: Presheaf, dim: int, cell: str) -> bool:
    """Whether an n-cell of a cubical presheaf defines a map Q^n -> X.

    For each interior positive face the restriction must be unchanged by
    collapsing its trailing coordinates to 1 (project off, then include
    back along positive faces).
    """
    if X.flavor != CUBICAL:
        raise presheaf.PresheafError("descent test applies to cubical presheaves")
    if dim > X.truncation:
        raise presheaf.PresheafError(
            f"descent test at dimension {dim} exceeds truncation {X.truncation}"
        )
    for i in range(1, dim):
        y = X.actions[("face", dim, i, 1)][cell]
        if X.act_box(collapse_tail(dim, i), y) != y:
            return False
    return True


def descending_cells(X: Presheaf, dim: int):
    return tuple(c for c in X.cells_at(dim) if descends(X, dim, c))


def sigma_descent_witness(n: int, i: int):
    """A generating-relation pair whose images under the i-th degeneracy split.

    Witnesses that interior degeneracies do not pass to the quotient;
    returns (f, g) with f ~ g but degeneracy(n, i) o f and ... o g not
    related, or None if no witness exists.
    """
    s = boxcat.degeneracy(n, i)
    for m in range(0, n + 1):
        for f, g in generating_pairs(n, m):
            if not related(boxcat.compose(s, f), boxcat.compose(s, g)):
                return f, g
    return None
