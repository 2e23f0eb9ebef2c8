"""Group families with normal forms, subgroups and homomorphisms.

Every group is finitely generated with an ordered list of generator names;
elements are :class:`Word` instances over those generators.  Infinite
families (free, free abelian, Heisenberg, products) carry an exact normal-form
oracle.  Finite groups are multiplication tables.  A bare presentation has no
normal form and must be enumerated into a table first.
"""
from __future__ import annotations

from collections import deque
from fractions import Fraction
from itertools import combinations
from math import gcd

import numpy as np

from .errors import CapExceeded, InvalidGroup, UnsupportedFamily
from .words import Word, commutator, parse_word


class Group:
    family = "abstract"
    names: tuple[str, ...] = ()

    @property
    def ngens(self) -> int:
        return len(self.names)

    def gen(self, i: int) -> Word:
        return Word.gen(i)

    def gens(self) -> list[Word]:
        return [Word.gen(i) for i in range(self.ngens)]

    def parse(self, text: str) -> Word:
        return parse_word(text, self.names)

    def fmt(self, w: Word) -> str:
        return w.format(self.names)

    has_normal_form = True
    is_finite = False

    def normal_form(self, w: Word) -> Word:
        raise UnsupportedFamily(f"{self.family} has no normal-form oracle")

    def equal(self, u: Word, v: Word) -> bool:
        return self.normal_form(u) == self.normal_form(v)

    def is_identity(self, w: Word) -> bool:
        return not self.normal_form(w)

    def commute(self, u: Word, v: Word) -> bool:
        return self.is_identity(commutator(u, v))

    def relators(self) -> list[Word]:
        raise UnsupportedFamily(f"{self.family} has no relator set")

    def describe(self) -> dict:
        return {"family": self.family, "generators": list(self.names)}


class FreeGroup(Group):
    family = "free"

    def __init__(self, k: int, names=None):
        self.names = tuple(names) if names else _default_names(k)
        if len(self.names) != k:
            raise InvalidGroup("generator count mismatch")

    def normal_form(self, w: Word) -> Word:
        return w

    def relators(self) -> list[Word]:
        return []


class FreeAbelianGroup(Group):
    family = "free_abelian"

    def __init__(self, k: int, names=None):
        self.names = tuple(names) if names else _default_names(k)
        if len(self.names) != k:
            raise InvalidGroup("generator count mismatch")

    def exponents(self, w: Word) -> tuple[int, ...]:
        v = [0] * self.ngens
        for g, e in w.letters:
            v[g] += e
        return tuple(v)

    def from_exponents(self, v) -> Word:
        return Word(tuple((i, int(e)) for i, e in enumerate(v) if e))

    def normal_form(self, w: Word) -> Word:
        return self.from_exponents(self.exponents(w))

    def relators(self) -> list[Word]:
        return [commutator(Word.gen(i), Word.gen(j)) for i, j in combinations(range(self.ngens), 2)]


class HeisenbergGroup(Group):
    """Integer Heisenberg group on generators x, y, z with z = [x, y] central.

    Elements are coordinates ``(a, b, c)`` of the unitriangular matrix
    ``[[1, a, c], [0, 1, b], [0, 0, 1]]``.
    """

    family = "heisenberg3"

    def __init__(self, names=("x", "y", "z")):
        self.names = tuple(names)

    @staticmethod
    def mul(p, q):
        return (p[0] + q[0], p[1] + q[1], p[2] + q[2] + p[0] * q[1])

    def coords(self, w: Word) -> tuple[int, int, int]:
        p = (0, 0, 0)
        for g, e in w.letters:
            step = [(e, 0, 0), (0, e, 0), (0, 0, e)][g]
            p = self.mul(p, step)
        return p

    def from_coords(self, p) -> Word:
        a, b, c = p
        return Word(((0, a), (1, b), (2, c - a * b)))

    def normal_form(self, w: Word) -> Word:
        return self.from_coords(self.coords(w))

    def relators(self) -> list[Word]:
        x, y, z = self.gens()
        return [commutator(x, y) * z.inverse(), commutator(x, z), commutator(y, z)]

    @staticmethod
    def matrix(p) -> np.ndarray:
        a, b, c = p
        return np.array([[1, a, c], [0, 1, b], [0, 0, 1]], dtype=np.int64)


class FiniteTableGroup(Group):
    """A finite group given by its multiplication table.

    ``table[i, j]`` is the index of ``elements[i] * elements[j]``.  Words are
    over ``generators`` (element indices).  The canonical relator set is the
    attached presentation when there is one, otherwise the relations read off
    a spanning tree of the Cayley graph.
    """

    family = "finite_table"
    is_finite = True

    def __init__(self, table, elements=None, generators=None, names=None, relators=None):
        table = np.asarray(table, dtype=np.int64)
        n = table.shape[0]
        if table.shape != (n, n) or n == 0:
            raise InvalidGroup("table must be square and nonempty")
        if table.min() < 0 or table.max() >= n:
            raise InvalidGroup("table entries out of range")
        self.table = table
        self.order = n
        self.elements = tuple(elements) if elements else tuple(f"g{i}" for i in range(n))
        ids = [e for e in range(n) if np.array_equal(table[e], np.arange(n)) and np.array_equal(table[:, e], np.arange(n))]
        if len(ids) != 1:
            raise InvalidGroup("table has no two-sided identity")
        self.identity = ids[0]
        for i in range(n):
            if sorted(table[i]) != list(range(n)) or sorted(table[:, i]) != list(range(n)):
                raise InvalidGroup("table is not a Latin square")
        self.inv = np.array([int(np.nonzero(table[i] == self.identity)[0][0]) for i in range(n)])
        if generators is None:
            generators = _greedy_generators(table, self.identity)
        self.generators = tuple(int(g) for g in generators)
        self.names = tuple(names) if names else tuple(self.elements[g] for g in self.generators)
        if len(set(self.names)) != len(self.names):
            self.names = tuple(f"s{i}" for i in range(len(self.generators)))
        # associativity on generators suffices once the table is generated
        for s in self.generators:
            if not np.array_equal(table[table, s], table[:, table[:, s]]):
                raise InvalidGroup("table is not associative")
        words = self._bfs_words()
        if len(words) != n:
            raise InvalidGroup("declared generators do not generate the table")
        self._words = words
        self._presentation = list(relators) if relators is not None else None

    def _bfs_words(self):
        words = {self.identity: Word()}
        q = deque([self.identity])
        while q:
            g = q.popleft()
            for i, s in enumerate(self.generators):
                for e, h in ((1, self.table[g, s]), (-1, self.table[g, self.inv[s]])):
                    h = int(h)
                    if h not in words:
                        words[h] = words[g] * Word.gen(i, e)
                        q.append(h)
        return words

    def elem(self, w: Word) -> int:
        g = self.identity
        for i, e in w.letters:
            s = self.generators[i] if e > 0 else self.inv[self.generators[i]]
            for _ in range(abs(e)):
                g = int(self.table[g, s])
        return g

    def word_of(self, g: int) -> Word:
        return self._words[int(g)]

    def mul(self, g: int, h: int) -> int:
        return int(self.table[g, h])

    def normal_form(self, w: Word) -> Word:
        return self._words[self.elem(w)]

    def relators(self) -> list[Word]:
        if self._presentation is not None:
            return list(self._presentation)
        rels, seen = [], set()
        for g in sorted(self._words, key=lambda k: (len(self._words[k]), self._words[k])):
            for i, s in enumerate(self.generators):
                r = self._words[g] * Word.gen(i) * self._words[int(self.table[g, s])].inverse()
                if r and r not in seen and r.inverse() not in seen:
                    seen.add(r)
                    rels.append(r)
        return rels

    @property
    def has_presentation(self) -> bool:
        return self._presentation is not None

    def is_abelian(self) -> bool:
        return np.array_equal(self.table, self.table.T)

    def describe(self) -> dict:
        return {"family": self.family, "generators": list(self.names), "order": self.order}


class ProductGroup(Group):
    """Direct product; generators of the second factor follow the first's."""

    family = "product"

    def __init__(self, left: Group, right: Group, names=None):
        self.left, self.right = left, right
        self.split = left.ngens
        if names is None:
            names = list(left.names) + list(right.names)
            if len(set(names)) != len(names):
                names = [f"{n}_1" for n in left.names] + [f"{n}_2" for n in right.names]
        self.names = tuple(names)
        self.is_finite = left.is_finite and right.is_finite
        self.has_normal_form = left.has_normal_form and right.has_normal_form

    def embed_left(self, w: Word) -> Word:
        return w

    def embed_right(self, w: Word) -> Word:
        return w.shift(self.split)

    def project(self, w: Word) -> tuple[Word, Word]:
        lw = Word(tuple((g, e) for g, e in w.letters if g < self.split))
        rw = Word(tuple((g - self.split, e) for g, e in w.letters if g >= self.split))
        return lw, rw

    def normal_form(self, w: Word) -> Word:
        lw, rw = self.project(w)
        return self.left.normal_form(lw) * self.right.normal_form(rw).shift(self.split)

    def relators(self) -> list[Word]:
        rels = list(self.left.relators()) + [r.shift(self.split) for r in self.right.relators()]
        for i in range(self.left.ngens):
            for j in range(self.right.ngens):
                rels.append(commutator(Word.gen(i), Word.gen(self.split + j)))
        return rels

    def describe(self) -> dict:
        return {"family": self.family, "generators": list(self.names),
                "factors": [self.left.describe(), self.right.describe()]}


class PresentedGroup(Group):
    family = "presentation"
    has_normal_form = False

    def __init__(self, names, relators):
        self.names = tuple(names)
        self._relators = [r if isinstance(r, Word) else parse_word(r, self.names) for r in relators]
        for r in self._relators:
            if any(g >= self.ngens for g in r.generators()):
                raise InvalidGroup("relator uses an undeclared generator")

    def relators(self) -> list[Word]:
        return list(self._relators)


def _default_names(k):
    base = "abcdfghjklmnpqrstuvw"
    if k <= len(base):
        return tuple(base[:k])
    return tuple(f"a{i}" for i in range(k))


def _greedy_generators(table, identity):
    n = table.shape[0]
    span = {identity}
    gens = []
    for g in range(n):
        if g in span:
            continue
        gens.append(g)
        span = _closure(table, gens, identity)
        if len(span) == n:
            break
    return gens


def _closure(table, gens, identity):
    seen = {identity}
    q = deque([identity])
    while q:
        g = q.popleft()
        for s in gens:
            h = int(table[g, s])
            if h not in seen:
                seen.add(h)
                q.append(h)
    return seen


# -- homomorphisms, subgroups -----------------------------------------------

class Homomorphism:
    """Group homomorphism given by the images of the source generators."""

    def __init__(self, source: Group, target: Group, images):
        self.source, self.target = source, target
        self.images = tuple(images)
        if len(self.images) != source.ngens:
            raise ValueError("one image per source generator required")

    def __call__(self, w: Word) -> Word:
        out = w.substitute(self.images)
        return self.target.normal_form(out) if self.target.has_normal_form else out

    def describe(self) -> dict:
        return {self.source.names[i]: self.target.fmt(self.images[i]) for i in range(self.source.ngens)}


class Subgroup:
    def __init__(self, ambient: Group, generators, label: str = ""):
        self.ambient = ambient
        gens = [g if isinstance(g, Word) else ambient.parse(g) for g in generators]
        if ambient.has_normal_form:
            gens = [ambient.normal_form(g) for g in gens]
        self.generators = tuple(g for g in gens if g)
        self.label = label
        self._abstract = None

    def is_trivial(self) -> bool:
        return not self.generators

    def describe(self) -> dict:
        return {"label": self.label, "generators": [self.ambient.fmt(g) for g in self.generators]}

    def as_group(self) -> tuple[Group, Homomorphism]:
        """An abstract group with one generator per subgroup generator.

        Supported: subgroups of finite tables, subgroups of free groups
        generated by a subset of the free generators, free abelian subgroups
        of torsion-free families (commuting, independent generators), and
        the whole group.
        """
        if self._abstract is None:
            self._abstract = _abstract_subgroup(self)
        return self._abstract


def _abstract_subgroup(H: Subgroup):
    G = H.ambient
    gens = list(H.generators)
    k = len(gens)
    names = [_sub_name(G, g, i) for i, g in enumerate(gens)]
    if len(set(names)) != len(names):
        names = [f"t{i}" for i in range(k)]
    if isinstance(G, FiniteTableGroup):
        elems = [G.elem(g) for g in gens]
        span = sorted(_closure(G.table, elems, G.identity)) if elems else [G.identity]
        pos = {g: i for i, g in enumerate(span)}
        sub = np.array([[pos[int(G.table[a, b])] for b in span] for a in span])
        A = FiniteTableGroup(sub, elements=[G.elements[g] for g in span],
                             generators=[pos[e] for e in elems], names=names)
        return A, Homomorphism(A, G, gens)
    if k == 0:
        A = FreeAbelianGroup(0)
        return A, Homomorphism(A, G, [])
    if G.has_normal_form and [G.normal_form(g) for g in gens] == [G.normal_form(w) for w in G.gens()]:
        return G, Homomorphism(G, G, G.gens())
    if isinstance(G, FreeGroup) and all(len(g) == 1 for g in gens) and len({next(iter(g.generators())) for g in gens}) == k:
        A = FreeGroup(k, names)
        return A, Homomorphism(A, G, gens)
    if _torsion_free(G) and all(G.commute(u, v) for u, v in combinations(gens, 2)):
        if _log_rank(G, gens) == k:
            A = FreeAbelianGroup(k, names)
            return A, Homomorphism(A, G, gens)
        raise UnsupportedFamily("abelian subgroup generators are not independent")
    if isinstance(G, ProductGroup):
        sides = [G.project(g) for g in gens]
        if all(not r for _, r in sides):
            A, h = Subgroup(G.left, [l for l, _ in sides]).as_group()
            return A, Homomorphism(A, G, [G.embed_left(w) for w in h.images])
        if all(not l for l, _ in sides):
            A, h = Subgroup(G.right, [r for _, r in sides]).as_group()
            return A, Homomorphism(A, G, [G.embed_right(w) for w in h.images])
    raise UnsupportedFamily(f"cannot present subgroup {H.describe()} of {G.family}")


def _sub_name(G, w, i):
    if len(w.letters) == 1 and abs(w.letters[0][1]) == 1:
        nm = G.names[w.letters[0][0]]
        return nm if w.letters[0][1] == 1 else f"{nm}_inv"
    return f"t{i}"


def _torsion_free(G) -> bool:
    if isinstance(G, (FreeGroup, FreeAbelianGroup, HeisenbergGroup)):
        return True
    if isinstance(G, ProductGroup):
        return _torsion_free(G.left) and _torsion_free(G.right)
    return False


def _log_coords(G, w) -> list[Fraction]:
    """Additive coordinates on abelian subgroups of torsion-free families."""
    if isinstance(G, FreeAbelianGroup):
        return [Fraction(e) for e in G.exponents(w)]
    if isinstance(G, HeisenbergGroup):
        a, b, c = G.coords(w)
        return [Fraction(a), Fraction(b), Fraction(c) - Fraction(a * b, 2)]
    if isinstance(G, FreeGroup):
        # commuting elements of a free group are powers of a common root
        return [Fraction(_free_root_exponent(w))]
    if isinstance(G, ProductGroup):
        l, r = G.project(w)
        return _log_coords(G.left, l) + _log_coords(G.right, r)
    raise UnsupportedFamily(G.family)


def _free_root_exponent(w: Word) -> int:
    """Signed power of the primitive root of a nontrivial free-group word."""
    flat = w.flat()
    if not flat:
        return 0
    # cyclically reduce, then find the primitive root
    i, j = 0, len(flat) - 1
    while i < j and flat[i][0] == flat[j][0] and flat[i][1] == -flat[j][1]:
        i, j = i + 1, j - 1
    core = flat[i : j + 1]
    n = len(core)
    for p in range(1, n + 1):
        if n % p == 0 and core == core[:p] * (n // p):
            root = tuple(core[:p])
            key = min(root, tuple((g, -e) for g, e in reversed(root)))
            sign = 1 if key == root else -1
            return sign * (n // p)
    return n


def _log_rank(G, gens) -> int:
    from .linalg import rank
    rows = [_log_coords(G, g) for g in gens]
    M = np.array(rows, dtype=object)
    return rank(M)


# -- coset enumeration -------------------------------------------------------

def _letters(w: Word) -> list[int]:
    return [2 * g + (0 if e > 0 else 1) for g, e in w.flat()]


def coset_table(ngens: int, relators, subgroup_gens, max_cosets: int) -> list[list[int]]:
    """Todd-Coxeter (HLT with coincidence processing).

    Returns the compacted right-coset table: ``table[c][2*i]`` is ``c . s_i``
    and ``table[c][2*i+1]`` is ``c . s_i^-1``; coset 0 is the subgroup.
    Raises CapExceeded when more than ``max_cosets`` cosets are defined.
    """
    ncols = 2 * ngens
    rels = [_letters(r) for r in relators if r]
    subs = [_letters(w) for w in subgroup_gens if w]
    table = [[-1] * ncols]
    parent = [0]

    def find(c):
        root = c
        while parent[root] != root:
            root = parent[root]
        while parent[c] != root:
            parent[c], c = root, parent[c]
        return root

    def new_coset():
        if len(table) >= max_cosets:
            raise CapExceeded(f"coset enumeration exceeded {max_cosets} cosets")
        table.append([-1] * ncols)
        parent.append(len(parent))
        return len(table) - 1

    def define(c, x):
        d = new_coset()
        table[c][x] = d
        table[d][x ^ 1] = c

    def coincidence(a, b):
        queue = []

        def merge(k, l):
            k, l = find(k), find(l)
            if k != l:
                k, l = min(k, l), max(k, l)
                parent[l] = k
                queue.append(l)

        merge(a, b)
        i = 0
        while i < len(queue):
            g = queue[i]
            i += 1
            for x in range(ncols):
                d = table[g][x]
                if d < 0:
                    continue
                if table[d][x ^ 1] == g:
                    table[d][x ^ 1] = -1
                mu, nu = find(g), find(d)
                if table[mu][x] >= 0:
                    merge(nu, table[mu][x])
                elif table[nu][x ^ 1] >= 0:
                    merge(mu, table[nu][x ^ 1])
                else:
                    table[mu][x] = nu
                    table[nu][x ^ 1] = mu

    def scan_and_fill(c, w):
        f = b = c
        i, j = 0, len(w) - 1
        while True:
            while i <= j and table[f][w[i]] >= 0:
                f = table[f][w[i]]
                i += 1
            if i > j:
                if f != b:
                    coincidence(f, b)
                return
            while j >= i and table[b][w[j] ^ 1] >= 0:
                b = table[b][w[j] ^ 1]
                j -= 1
            if j < i:
                coincidence(f, b)
                return
            if i == j:
                table[f][w[i]] = b
                table[b][w[i] ^ 1] = f
                return
            define(f, w[i])

    for w in subs:
        scan_and_fill(0, w)
    c = 0
    while c < len(table):
        if find(c) == c:
            for r in rels:
                if find(c) != c:
                    break
                scan_and_fill(c, r)
            if find(c) == c:
                for x in range(ncols):
                    if table[c][x] < 0:
                        define(c, x)
        c += 1
    live = [c for c in range(len(table)) if find(c) == c]
    # renumber in breadth-first order from coset 0 for a canonical table
    order, seen = [], {0}
    q = deque([0])
    while q:
        c = q.popleft()
        order.append(c)
        for x in range(ncols):
            d = find(table[c][x])
            if d not in seen:
                seen.add(d)
                q.append(d)
    assert len(order) == len(live)
    pos = {c: i for i, c in enumerate(order)}
    return [[pos[find(table[c][x])] for x in range(ncols)] for c in order]


def enumerate_finite(P: Group, cap: int = 5000) -> FiniteTableGroup:
    """Multiplication table of a finitely presented group of order <= cap."""
    if cap < 1:
        raise ValueError("cap must be positive")
    rels = P.relators()
    work = max(16 * cap, 2000)
    T = coset_table(P.ngens, rels, [], work)
    n = len(T)
    if n > cap:
        raise CapExceeded(f"group order {n} exceeds cap {cap}")
    perms = [np.array([T[c][2 * i] for c in range(n)]) for i in range(P.ngens)]
    invperms = [np.array([T[c][2 * i + 1] for c in range(n)]) for i in range(P.ngens)]
    # right-multiplication map of each element via a BFS spanning tree
    right = {0: np.arange(n)}
    words = {0: Word()}
    q = deque([0])
    while q:
        c = q.popleft()
        for i in range(P.ngens):
            for e, perm in ((1, perms[i]), (-1, invperms[i])):
                d = int(perm[c])
                if d not in right:
                    right[d] = perm[right[c]]
                    words[d] = words[c] * Word.gen(i, e)
                    q.append(d)
    table = np.zeros((n, n), dtype=np.int64)
    for j in range(n):
        table[:, j] = right[j]
    elements = [P.fmt(words[c]) for c in range(n)]
    gens = [int(perms[i][0]) for i in range(P.ngens)]
    return FiniteTableGroup(table, elements=elements, generators=gens, names=P.names, relators=rels)


# -- named finite groups -----------------------------------------------------

def cyclic_group(n: int, name: str = "a") -> FiniteTableGroup:
    table = np.add.outer(np.arange(n), np.arange(n)) % n
    return FiniteTableGroup(table, elements=[f"{name}^{i}" if i else "e" for i in range(n)],
                            generators=[1 % n], names=[name], relators=[Word.gen(0, n)])


def permutation_group(perms, names=None) -> FiniteTableGroup:
    """Table of the group generated by permutations (tuples of images)."""
    perms = [tuple(int(x) for x in p) for p in perms]
    deg = len(perms[0])
    ident = tuple(range(deg))
    elems = [ident]
    index = {ident: 0}
    q = deque([ident])
    while q:
        g = q.popleft()
        for p in perms:
            h = tuple(p[g[i]] for i in range(deg))  # apply g then p
            if h not in index:
                index[h] = len(elems)
                elems.append(h)
                q.append(h)
    # product g*h means "apply h then g" composed as functions; any fixed convention works
    table = np.array([[index[tuple(g[h[i]] for i in range(deg))] for h in elems] for g in elems])
    return FiniteTableGroup(table, generators=[index[p] for p in perms], names=names)


def direct_product_table(A: FiniteTableGroup, B: FiniteTableGroup) -> FiniteTableGroup:
    n, m = A.order, B.order
    table = np.zeros((n * m, n * m), dtype=np.int64)
    for a1 in range(n):
        for b1 in range(m):
            table[a1 * m + b1] = (A.table[a1][:, None] * m + B.table[b1][None, :]).reshape(-1)
    gens = [g * m + B.identity for g in A.generators] + [A.identity * m + g for g in B.generators]
    names = list(A.names) + list(B.names)
    if len(set(names)) != len(names):
        names = [f"{x}_1" for x in A.names] + [f"{x}_2" for x in B.names]
    return FiniteTableGroup(table, elements=[f"({a},{b})" for a in A.elements for b in B.elements],
                            generators=gens, names=names)


def as_finite_table(G: Group, cap: int = 5000) -> FiniteTableGroup:
    """The same group (same generators in order) as a multiplication table."""
    if isinstance(G, FiniteTableGroup):
        return G
    if isinstance(G, ProductGroup) and G.is_finite:
        A, B = as_finite_table(G.left, cap), as_finite_table(G.right, cap)
        T = direct_product_table(A, B)
        return FiniteTableGroup(T.table, elements=T.elements, generators=T.generators,
                                names=G.names, relators=G.relators())
    if isinstance(G, PresentedGroup):
        return enumerate_finite(G, cap)
    raise UnsupportedFamily(f"{G.family} is not finite")


# -- structural subgroups ----------------------------------------------------

def _elements_subgroup(G: FiniteTableGroup, elems, label) -> Subgroup:
    elems = set(int(e) for e in elems)
    gens = [G.word_of(g) for g in _greedy_generators_in(G, sorted(elems))]
    return Subgroup(G, gens, label)


def _greedy_generators_in(G: FiniteTableGroup, elems):
    target = set(elems)
    span = {G.identity}
    gens = []
    for g in sorted(elems, key=lambda e: (len(G.word_of(e)), G.word_of(e))):
        if g in span:
            continue
        gens.append(g)
        span = _closure(G.table, gens, G.identity)
        if span == target:
            break
    return gens


def subgroup_elements(G: FiniteTableGroup, H: Subgroup) -> list[int]:
    return sorted(_closure(G.table, [G.elem(w) for w in H.generators], G.identity))


def center(G: Group) -> Subgroup:
    if isinstance(G, FiniteTableGroup):
        T = G.table
        elems = [z for z in range(G.order) if all(T[z, s] == T[s, z] for s in G.generators)]
        return _elements_subgroup(G, elems, "Z(G)")
    if isinstance(G, FreeAbelianGroup):
        return Subgroup(G, G.gens(), "Z(G)")
    if isinstance(G, HeisenbergGroup):
        return Subgroup(G, [Word.gen(2)], "Z(G)")
    if isinstance(G, ProductGroup):
        zl, zr = center(G.left), center(G.right)
        gens = [G.embed_left(w) for w in zl.generators] + [G.embed_right(w) for w in zr.generators]
        return Subgroup(G, gens, "Z(G)")
    raise UnsupportedFamily(f"center not available for {G.family}")


def centralizer_contains(G: Group, C: Subgroup, N: Subgroup) -> bool:
    """True iff every generator of C commutes with every generator of N."""
    if isinstance(G, FiniteTableGroup):
        T = G.table
        return all(T[G.elem(c), G.elem(n)] == T[G.elem(n), G.elem(c)] for c in C.generators for n in N.generators)
    if not G.has_normal_form:
        raise UnsupportedFamily(f"{G.family} has no normal form")
    return all(G.commute(c, n) for c in C.generators for n in N.generators)


def commutator_subgroup_elements(G: FiniteTableGroup, A, B) -> list[int]:
    T, inv = G.table, G.inv
    comms = {int(T[T[inv[a], inv[b]], T[a, b]]) for a in A for b in B}
    return sorted(_closure(T, sorted(comms), G.identity))


def lower_central_series(G: Group) -> list[Subgroup]:
    """gamma_0 = G, gamma_{i+1} = [G, gamma_i], until the terms stabilize.

    For a finite non-nilpotent group the last term is nontrivial.
    """
    if isinstance(G, FreeAbelianGroup):
        return [Subgroup(G, G.gens(), "gamma_0"), Subgroup(G, [], "gamma_1")]
    if isinstance(G, HeisenbergGroup):
        return [Subgroup(G, G.gens(), "gamma_0"), Subgroup(G, [Word.gen(2)], "gamma_1"),
                Subgroup(G, [], "gamma_2")]
    if isinstance(G, FiniteTableGroup):
        allg = list(range(G.order))
        terms = [allg]
        while True:
            nxt = commutator_subgroup_elements(G, allg, terms[-1])
            if nxt == terms[-1]:
                break
            terms.append(nxt)
        out = [Subgroup(G, G.gens(), "gamma_0")]
        out += [_elements_subgroup(G, t, f"gamma_{i}") for i, t in enumerate(terms[1:], 1)]
        return out
    raise UnsupportedFamily(f"lower central series not available for {G.family}")


def is_nilpotent(G: Group) -> bool:
    return lower_central_series(G)[-1].is_trivial()


def abelianization_map(G: Group) -> tuple[Group, Homomorphism]:
    if isinstance(G, FreeGroup):
        A = FreeAbelianGroup(G.ngens, G.names)
        return A, Homomorphism(G, A, A.gens())
    if isinstance(G, FreeAbelianGroup):
        return G, Homomorphism(G, G, G.gens())
    if isinstance(G, HeisenbergGroup):
        A = FreeAbelianGroup(2, G.names[:2])
        return A, Homomorphism(G, A, [Word.gen(0), Word.gen(1), Word()])
    if isinstance(G, FiniteTableGroup):
        allg = list(range(G.order))
        D = commutator_subgroup_elements(G, allg, allg)
        Q, pi, _ = _table_quotient(G, D)
        return Q, pi
    if isinstance(G, ProductGroup):
        A1, p1 = abelianization_map(G.left)
        A2, p2 = abelianization_map(G.right)
        A = ProductGroup(A1, A2, names=G.names if A1.ngens + A2.ngens == G.ngens else None)
        images = [w for w in p1.images] + [w.shift(A1.ngens) for w in p2.images]
        return A, Homomorphism(G, A, images)
    raise UnsupportedFamily(f"abelianization not available for {G.family}")


def _table_quotient(G: FiniteTableGroup, N):
    N = set(int(x) for x in N)
    if len(N) == 1:
        return G, Homomorphism(G, G, G.gens()), G.gens()
    T = G.table
    for g in range(G.order):
        for n in N:
            if int(T[T[G.inv[g], n], g]) not in N:
                raise UnsupportedFamily("subgroup is not normal")
    coset_of, reps = {}, []
    for g in range(G.order):
        if g in coset_of:
            continue
        k = len(reps)
        reps.append(g)
        for n in N:
            coset_of[int(T[g, n])] = k
    m = len(reps)
    qt = np.array([[coset_of[int(T[reps[a], reps[b]])] for b in range(m)] for a in range(m)])
    gens = [coset_of[s] for s in G.generators]
    Q = FiniteTableGroup(qt, elements=[G.elements[r] + "N" for r in reps], generators=gens, names=G.names)
    return Q, Homomorphism(G, Q, Q.gens()), G.gens()


def quotient(G: Group, N: Subgroup) -> tuple[Group, Homomorphism, list[Word]]:
    """G/N with the quotient map and a lift of each quotient generator."""
    if N.is_trivial():
        return G, Homomorphism(G, G, G.gens()), G.gens()
    if isinstance(G, FiniteTableGroup):
        return _table_quotient(G, subgroup_elements(G, N))
    if isinstance(G, HeisenbergGroup):
        coords = [G.coords(w) for w in N.generators]
        if all(a == 0 and b == 0 for a, b, _ in coords):
            g = 0
            for _, _, c in coords:
                g = gcd(g, c)
            if g == 1:
                A = FreeAbelianGroup(2, G.names[:2])
                return A, Homomorphism(G, A, [Word.gen(0), Word.gen(1), Word()]), [Word.gen(0), Word.gen(1)]
    if isinstance(G, FreeAbelianGroup):
        killed = set()
        for w in N.generators:
            if len(w.letters) == 1 and abs(w.letters[0][1]) == 1:
                killed.add(w.letters[0][0])
            else:
                break
        else:
            keep = [i for i in range(G.ngens) if i not in killed]
            A = FreeAbelianGroup(len(keep), [G.names[i] for i in keep])
            images = [Word() if i in killed else Word.gen(keep.index(i)) for i in range(G.ngens)]
            return A, Homomorphism(G, A, images), [Word.gen(i) for i in keep]
    if isinstance(G, ProductGroup):
        sides = [G.project(w) for w in N.generators]
        if all(not l or not r for l, r in sides):
            QL, pl, ll = quotient(G.left, Subgroup(G.left, [l for l, _ in sides if l]))
            QR, pr, lr = quotient(G.right, Subgroup(G.right, [r for _, r in sides if r]))
            Q = ProductGroup(QL, QR)
            images = list(pl.images) + [w.shift(QL.ngens) for w in pr.images]
            lifts = [G.embed_left(w) for w in ll] + [G.embed_right(w) for w in lr]
            return Q, Homomorphism(G, Q, images), lifts
    raise UnsupportedFamily(f"quotient of {G.family} by {N.describe()} not constructible")


def subgroup_contains(G: Group, H: Subgroup, w: Word) -> bool | None:
    """Membership where decidable here; None when undecided."""
    if isinstance(G, FiniteTableGroup):
        return G.elem(w) in set(subgroup_elements(G, H))
    if not G.has_normal_form:
        return None
    nw = G.normal_form(w)
    if not nw:
        return True
    if any(G.equal(nw, g) or G.equal(nw, g.inverse()) for g in H.generators):
        return True
    if isinstance(G, FreeAbelianGroup):
        from .linalg import solve
        M = np.array([[Fraction(x) for x in G.exponents(g)] for g in H.generators], dtype=object).T
        if M.shape[1] == 0:
            return False
        sol = solve(M, np.array([Fraction(x) for x in G.exponents(nw)], dtype=object))
        if sol is None:
            return False
        if all(Fraction(v).denominator == 1 for v in sol) and len(H.generators) <= G.ngens:
            return True
        return None
    return None


# -- measures ---------------------------------------------------------------

class MeasureError(ValueError):
    pass


class FiniteSupportMeasure:
    """Probability weights on finitely many group words.

    Weights are Fractions when every input weight is rational, floats
    otherwise.  Atoms are normal forms when the group has them.
    """

    def __init__(self, group: Group, atoms, tol: float = 1e-12):
        from .linalg import parse_scalar
        self.group = group
        items = atoms.items() if isinstance(atoms, dict) else atoms
        parsed = []
        exact = True
        for w, p in items:
            word = w if isinstance(w, Word) else group.parse(w)
            if isinstance(p, float) and not float(p).is_integer():
                exact = False
            parsed.append((word, p))
        acc: dict[Word, object] = {}
        for word, p in parsed:
            val = parse_scalar(p, exact) if exact or not isinstance(p, str) else parse_scalar(p, False)
            if not exact:
                val = float(val)
            if val < 0:
                raise MeasureError(f"negative weight on {group.fmt(word)}")
            if group.has_normal_form:
                word = group.normal_form(word)
            acc[word] = acc.get(word, 0) + val
        self.exact = exact
        self.atoms = {w: acc[w] for w in sorted(acc) if acc[w] != 0}
        total = sum(self.atoms.values())
        if exact and total != 1:
            raise MeasureError(f"weights sum to {total}, not 1")
        if not exact and abs(total - 1.0) > tol:
            raise MeasureError(f"weights sum to {total!r}, not 1")
        if not self.atoms:
            raise MeasureError("empty measure")

    @classmethod
    def delta(cls, group, w=None):
        return cls(group, {w if w is not None else Word(): Fraction(1)})

    @classmethod
    def uniform(cls, group, words):
        words = list(words)
        return cls(group, [(w, Fraction(1, len(words))) for w in words])

    def support(self) -> list[Word]:
        return [w for w, p in self.atoms.items() if p > 0]

    def items(self):
        return self.atoms.items()

    def describe(self) -> dict:
        from .linalg import fmt_scalar
        return {self.group.fmt(w): fmt_scalar(p) for w, p in self.atoms.items()}

    def __eq__(self, other):
        return isinstance(other, FiniteSupportMeasure) and self.atoms == other.atoms

    def __hash__(self):
        return hash(tuple(self.atoms.items()))


def convolve(mu: FiniteSupportMeasure, nu: FiniteSupportMeasure) -> FiniteSupportMeasure:
    """Atoms gh with weight mu(g) nu(h)."""
    G = mu.group
    if not G.has_normal_form:
        raise UnsupportedFamily("convolution needs normal forms")
    acc: dict[Word, object] = {}
    for g, p in mu.items():
        for h, q in nu.items():
            w = G.normal_form(g * h)
            acc[w] = acc.get(w, 0) + p * q
    if not (mu.exact and nu.exact):
        acc = {w: float(v) for w, v in acc.items()}
        total = sum(acc.values())
        acc = {w: v / total for w, v in acc.items()}
    return FiniteSupportMeasure(G, acc)


def symmetric_opposite(mu: FiniteSupportMeasure) -> FiniteSupportMeasure:
    G = mu.group
    return FiniteSupportMeasure(G, {w.inverse(): p for w, p in mu.items()})


def support_subgroup(G: FiniteTableGroup, mu: FiniteSupportMeasure) -> Subgroup:
    """The subgroup generated by the atoms of positive weight."""
    return Subgroup(G, mu.support(), "G_mu")


def embed_measure(mu: FiniteSupportMeasure, hom: Homomorphism) -> FiniteSupportMeasure:
    return FiniteSupportMeasure(hom.target, [(hom(w), p) for w, p in mu.items()])
