"""Symbolic arithmetic in graph groupoid bisection pseudogroups.

A finite directed graph generates a groupoid whose unit space is the
boundary-path space: infinite paths together with the finite words that
stop at a vertex receiving no edges.  Words read right to left, so
e1...en walks en first and s(ei) = r(e(i+1)).  The compact open
bisections Z(x, y) = {(x l, |x| - |y|, y l) : l a boundary path from
s(x)} form a basis, and finite unions of them are closed under the
inverse-semigroup operations.  Everything here manipulates the (x, y)
symbols directly; the boundary space itself is never materialised.
Refining both sides of an identity to a common symbol granularity
(gb_equal) decides it exactly, because distinct refined symbols stand
for disjoint nonempty sets.

Families of idempotents and bisections indexed by the vertices and
edges of a graph (CKFamily, the Cuntz-Krieger relations) represent one
graph groupoid inside another structure; the induced map of bisection
pseudogroups is evaluated symbolically.  The module ships one worked
fixture: a two-petal graph glued from two loop-and-spoke subgraphs over
a common loop, whose mediating maps are verified to bounded depth by
pullback_example_verify.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .groupoid import EtaleGroupoid, bisection_inverse, bisection_product, is_bisection
from .stone import bits, mask_of


class GraphError(Exception):
    def __init__(self, law, witness=None):
        self.law = law
        self.witness = witness
        super().__init__(f"{law}: witness {witness!r}" if witness is not None else law)


class NotCompatibleUnion(GraphError):
    pass


class DepthTooSmall(GraphError):
    pass


class ConditionViolated(GraphError):
    def __init__(self, condition, witness=None):
        self.condition = condition
        GraphError.__init__(self, "condition (%d)" % condition, witness)


# ------------------------------------------------------------------- graphs


@dataclass(frozen=True)
class Graph:
    """A finite directed graph: vertex names and (name, src, rng) edges."""

    vertices: tuple
    edges: tuple

    @staticmethod
    def build(vertices, edges):
        vertices = tuple(str(v) for v in vertices)
        edges = tuple((str(n), str(a), str(b)) for n, a, b in edges)
        assert len(set(vertices)) == len(vertices), "vertex names must be distinct"
        names = [n for n, _, _ in edges]
        assert len(set(names)) == len(names), "edge names must be distinct"
        assert not set(names) & set(vertices), "edge and vertex names must not clash"
        for n, a, b in edges:
            assert a in vertices and b in vertices, (n, a, b)
        return Graph(vertices, edges)

    def src(self, name):
        for n, a, _ in self.edges:
            if n == name:
                return a
        raise KeyError(name)

    def rng(self, name):
        for n, _, b in self.edges:
            if n == name:
                return b
        raise KeyError(name)

    def edges_into(self, v):
        """Names of the edges whose range is v, in declaration order."""
        return tuple(n for n, _, b in self.edges if b == v)

    def is_source(self, v):
        """No edge ranges at v, so words stopping at v are boundary paths."""
        return not self.edges_into(v)


@dataclass(frozen=True)
class Path:
    """A composable edge word read right to left, or a single vertex.

    edges[-1] is walked first; src is the source of the whole word and
    rng its range.  A length-zero word sits at the vertex src == rng.
    """

    edges: tuple
    src: str
    rng: str

    @staticmethod
    def build(graph, edges, vertex=None):
        edges = tuple(edges)
        if not edges:
            assert vertex in graph.vertices, vertex
            return Path((), vertex, vertex)
        for left, right in zip(edges, edges[1:]):
            assert graph.src(left) == graph.rng(right), (left, right)
        src = graph.src(edges[-1])
        if vertex is not None:
            assert vertex == src, (vertex, src)
        return Path(edges, src, graph.rng(edges[0]))


def path_concat(a, b):
    """The word a b; b is walked first, so it needs s(a) = r(b)."""
    assert a.src == b.rng, (a.src, b.rng)
    if not a.edges:
        return b
    if not b.edges:
        return a
    return Path(a.edges + b.edges, b.src, a.rng)


def path_extension(small, big):
    """The suffix w with big = small w, or None when big does not extend
    small.  The seam is checked only for length-zero prefixes; inside a
    valid word it holds automatically."""
    k = len(small.edges)
    if big.edges[:k] != small.edges:
        return None
    if not small.edges and big.rng != small.src:
        return None
    return Path(big.edges[k:], big.src, small.src)


def paths_upto(graph, k):
    """Every word of length at most k, vertices included, by length."""
    layer = [Path.build(graph, (), v) for v in graph.vertices]
    out = list(layer)
    for _ in range(k):
        layer = [
            path_concat(p, Path.build(graph, (e,)))
            for p in layer
            for e in graph.edges_into(p.src)
        ]
        out.extend(layer)
    return tuple(out)


def parse_path(graph, text):
    """Word literals: dotted edge names like "sigma.e1", or "@v" for the
    length-zero word at a vertex."""
    if isinstance(text, Path):
        return text
    text = text.strip()
    if text.startswith("@"):
        return Path.build(graph, (), text[1:])
    return Path.build(graph, tuple(text.split(".")))


def path_text(p):
    return "@" + p.src if not p.edges else ".".join(p.edges)


# -------------------------------------------------------- basic bisections


@dataclass(frozen=True)
class BasicBisection:
    """The symbol Z(x, y): every boundary path l from s(x) contributes
    one arrow (x l, |x| - |y|, y l).  The two words must start at one
    vertex, and finiteness of the graph keeps the set nonempty: from any
    vertex a boundary path exists (stop at a vertex receiving nothing,
    or walk a cycle forever)."""

    graph: Graph
    x: Path
    y: Path

    @staticmethod
    def build(graph, x, y):
        rx = Path.build(graph, x.edges, x.src)
        ry = Path.build(graph, y.edges, y.src)
        assert rx == x and ry == y, "words must live in the ambient graph"
        assert x.src == y.src, "range and source words must start at one vertex"
        return BasicBisection(graph, x, y)

    @property
    def degree(self):
        return len(self.x.edges) - len(self.y.edges)


def pair_text(m):
    return path_text(m.x) + "|" + path_text(m.y)


def _swap(m):
    return BasicBisection(m.graph, m.y, m.x)


def _member_key(m):
    return (
        len(m.x.edges),
        m.x.edges,
        m.x.src,
        len(m.y.edges),
        m.y.edges,
        m.y.src,
    )


def _subsumes(a, b):
    """Whether b = (a.x w, a.y w) for one suffix w, making Z(b) a subset
    of Z(a)."""
    wx = path_extension(a.x, b.x)
    wy = path_extension(a.y, b.y)
    return wx is not None and wy is not None and wx.edges == wy.edges


def zz_product(a, b):
    """Z(x,y) Z(w,z) = Z(x t, z) when w = y t, Z(x, z t) when y = w t,
    and empty otherwise: arrows compose only along a common extension of
    the inner words."""
    assert a.graph == b.graph, "products need one ambient graph"
    t = path_extension(a.y, b.x)
    if t is not None:
        m = BasicBisection.build(a.graph, path_concat(a.x, t), b.y)
        return GraphBis.build(a.graph, (m,))
    t = path_extension(b.x, a.y)
    if t is not None:
        m = BasicBisection.build(a.graph, a.x, path_concat(b.y, t))
        return GraphBis.build(a.graph, (m,))
    return GraphBis.build(a.graph, ())


# ------------------------------------------------------- finite unions


@dataclass(frozen=True)
class GraphBis:
    """A compact open bisection as a canonical finite union of basics.

    Canonical means: no member extends another (so members stand for
    pairwise disjoint sets), members are pairwise compatible, and they
    are sorted by (|x|, x, |y|, y).  Value equality is equality of these
    normal forms at their written granularity; gb_equal decides equality
    of the underlying arrow sets."""

    graph: Graph
    members: tuple

    @staticmethod
    def build(graph, members):
        members = sorted(set(members), key=_member_key)
        kept = []
        for m in members:
            assert m.graph == graph, "members must share the ambient graph"
            if not any(_subsumes(a, m) for a in kept):
                kept.append(m)
        for a, b in itertools.combinations(kept, 2):
            if not _compatible(a, b):
                raise NotCompatibleUnion(
                    "cross-products must be diagonal", (pair_text(a), pair_text(b))
                )
        return GraphBis(graph, tuple(kept))


def _diagonal(u):
    return all(m.x == m.y for m in u.members)


def _compatible(a, b):
    return _diagonal(zz_product(a, _swap(b))) and _diagonal(zz_product(_swap(a), b))


def gb_star(u):
    """U* swaps every member symbol: Z(x,y)* = Z(y,x)."""
    return GraphBis.build(u.graph, tuple(_swap(m) for m in u.members))


def gb_product(u, v):
    assert u.graph == v.graph, "products need one ambient graph"
    out = []
    for a in u.members:
        for b in v.members:
            out.extend(zz_product(a, b).members)
    return GraphBis.build(u.graph, out)


def gb_meet(u, v):
    """The intersection.  Exact with no depth parameter: two basics meet
    in the more extended one when one extends the other on both sides,
    and are disjoint otherwise."""
    assert u.graph == v.graph, "meets need one ambient graph"
    out = []
    for a in u.members:
        for b in v.members:
            if _subsumes(a, b):
                out.append(b)
            elif _subsumes(b, a):
                out.append(a)
    return GraphBis.build(u.graph, out)


def gb_union(u, v):
    """The join of compatible bisections; raises NotCompatibleUnion when
    the union is not itself a bisection."""
    assert u.graph == v.graph, "joins need one ambient graph"
    return GraphBis.build(u.graph, u.members + v.members)


def gb_source(u):
    """U* U: the idempotent made of the Z(y, y) pieces."""
    return GraphBis.build(
        u.graph, tuple(BasicBisection.build(u.graph, m.y, m.y) for m in u.members)
    )


def gb_range(u):
    """U U*: the idempotent made of the Z(x, x) pieces."""
    return GraphBis.build(
        u.graph, tuple(BasicBisection.build(u.graph, m.x, m.x) for m in u.members)
    )


def parse_graphbis(graph, pairs):
    """Members from "x|y" pair literals; an empty list is the zero."""
    out = []
    for pair in pairs:
        xs, _, ys = str(pair).partition("|")
        out.append(
            BasicBisection.build(graph, parse_path(graph, xs), parse_path(graph, ys))
        )
    return GraphBis.build(graph, out)


# ------------------------------------------------ exact bounded equality


def _normal_form(u, depth):
    """Members refined until every range word either stops (its source
    vertex receives nothing, so the symbol is one arrow) or has length
    exactly depth.  One step splits Z(x, y) over the edges ranging at
    s(x): Z(x, y) = join of Z(x e, y e).  Distinct refined symbols stand
    for disjoint nonempty sets, so sets of symbols compare faithfully.
    Raises DepthTooSmall when an unstopped member is already longer than
    depth and cannot be aligned."""
    out = set()
    stack = list(u.members)
    while stack:
        m = stack.pop()
        g = m.graph
        if g.is_source(m.x.src):
            out.add((m.x, m.y))
            continue
        if len(m.x.edges) >= depth:
            if len(m.x.edges) > depth:
                raise DepthTooSmall("alignment", pair_text(m))
            out.add((m.x, m.y))
            continue
        for e in g.edges_into(m.x.src):
            tail = Path.build(g, (e,))
            stack.append(
                BasicBisection.build(
                    g, path_concat(m.x, tail), path_concat(m.y, tail)
                )
            )
    return frozenset(out)


def gb_equal(a, b, depth=2):
    """Whether a and b are the same set of arrows; sound and complete
    whenever depth is at least the longest unstopped range word."""
    assert a.graph == b.graph, "comparisons need one ambient graph"
    return _normal_form(a, depth) == _normal_form(b, depth)


def gb_leq(a, b, depth=2):
    """Whether a is a subset of b, by the same refinement."""
    assert a.graph == b.graph, "comparisons need one ambient graph"
    return _normal_form(a, depth) <= _normal_form(b, depth)


def _safe_depth(*parts):
    """A refinement depth no written member can overflow."""
    longest = 1
    for u in parts:
        for m in u.members:
            longest = max(longest, len(m.x.edges))
    return longest


# --------------------------------------------------- vertex/edge families


@dataclass(frozen=True)
class CKFamily:
    """A representation of a graph inside a target structure: an
    idempotent omega per vertex and a bisection tee per edge, subject to
    the four conditions of validate_ck_family.  The target is another
    graph (values are GraphBis over it) or a finite etale groupoid
    (values are arrow masks)."""

    graph: Graph
    target: object
    omega: tuple
    tee: tuple

    @staticmethod
    def build(graph, target, omega, tee):
        if isinstance(omega, dict):
            omega = tuple(omega[v] for v in graph.vertices)
        if isinstance(tee, dict):
            tee = tuple(tee[n] for n, _, _ in graph.edges)
        omega = tuple(omega)
        tee = tuple(tee)
        assert len(omega) == len(graph.vertices), "one idempotent per vertex"
        assert len(tee) == len(graph.edges), "one bisection per edge"
        if isinstance(target, Graph):
            for u in omega + tee:
                assert isinstance(u, GraphBis) and u.graph == target
            for u in omega:
                assert _diagonal(u), "vertex values must be idempotents"
        else:
            assert isinstance(target, EtaleGroupoid)
            for mask in omega + tee:
                assert is_bisection(target, mask)
            for mask in omega:
                assert mask & ~target.gpd.units == 0, "vertex values must be idempotents"
        return CKFamily(graph, target, omega, tee)

    def omega_of(self, v):
        return self.omega[self.graph.vertices.index(v)]

    def tee_of(self, e):
        return self.tee[[n for n, _, _ in self.graph.edges].index(e)]


def _mask_src(G, mask):
    return mask_of(G.gpd.src[a] for a in bits(mask))


def _mask_rng(G, mask):
    return mask_of(G.gpd.rng[a] for a in bits(mask))


def validate_ck_family(fam, depth=2):
    """Checks, in order: (1) vertex idempotents are pairwise disjoint,
    (2) each tee has source inside omega at its source vertex and range
    inside omega at its range vertex, (3) the tee ranges are pairwise
    disjoint, and (4) omega at every receiving vertex is exhausted by
    the ranges of its incoming tees.  Returns True; raises
    ConditionViolated(condition, witness) otherwise.  Graph targets are
    compared by refinement to the given depth; groupoid targets exactly."""
    g = fam.graph
    if isinstance(fam.target, Graph):
        empty = GraphBis.build(fam.target, ())
        disjoint = lambda a, b: gb_meet(a, b).members == ()
        inside = lambda a, b: gb_leq(a, b, depth)
        same = lambda a, b: gb_equal(a, b, depth)
        join = gb_union
        source, rng = gb_source, gb_range
    else:
        empty = 0
        disjoint = lambda a, b: a & b == 0
        inside = lambda a, b: a & ~b == 0
        same = lambda a, b: a == b
        join = lambda a, b: a | b
        source = lambda m: _mask_src(fam.target, m)
        rng = lambda m: _mask_rng(fam.target, m)
    for v, w in itertools.combinations(g.vertices, 2):
        if not disjoint(fam.omega_of(v), fam.omega_of(w)):
            raise ConditionViolated(1, (v, w))
    for e, a, b in g.edges:
        t = fam.tee_of(e)
        if not (inside(source(t), fam.omega_of(a)) and inside(rng(t), fam.omega_of(b))):
            raise ConditionViolated(2, e)
    for e, f in itertools.combinations([n for n, _, _ in g.edges], 2):
        if not disjoint(rng(fam.tee_of(e)), rng(fam.tee_of(f))):
            raise ConditionViolated(3, (e, f))
    for v in g.vertices:
        incoming = g.edges_into(v)
        if not incoming:
            continue
        total = empty
        for e in incoming:
            total = join(total, rng(fam.tee_of(e)))
        if not same(fam.omega_of(v), total):
            raise ConditionViolated(4, v)
    return True


@dataclass(frozen=True)
class InducedHom:
    """The multiplicative, star and join preserving map fixed by a
    family: Z(v, v) goes to omega at v, Z(e, s(e)) to tee at e, so a
    word maps to the product of its edge images and Z(x, y) to
    tee(x) tee(y)*."""

    fam: CKFamily

    def _graph_target(self):
        return isinstance(self.fam.target, Graph)

    def _mul(self, a, b):
        if self._graph_target():
            return gb_product(a, b)
        return bisection_product(self.fam.target, a, b)

    def _star(self, a):
        if self._graph_target():
            return gb_star(a)
        return bisection_inverse(self.fam.target, a)

    def path_image(self, p):
        if not p.edges:
            return self.fam.omega_of(p.src)
        out = self.fam.tee_of(p.edges[0])
        for e in p.edges[1:]:
            out = self._mul(out, self.fam.tee_of(e))
        return out

    def member_image(self, m):
        return self._mul(self.path_image(m.x), self._star(self.path_image(m.y)))

    def __call__(self, u):
        assert u.graph == self.fam.graph, "arguments live over the family graph"
        if self._graph_target():
            out = GraphBis.build(self.fam.target, ())
            for m in u.members:
                out = gb_union(out, self.member_image(m))
            return out
        out = 0
        for m in u.members:
            out |= self.member_image(m)
        assert is_bisection(self.fam.target, out), "images of bisections are ones"
        return out


def ck_induced_hom(fam):
    """The pseudogroup map induced by a validated family."""
    assert isinstance(fam, CKFamily)
    return InducedHom(fam)


# ------------------------------------------------------ the worked square


@dataclass(frozen=True)
class PullbackExample:
    """The built-in gluing square: graph_e is two spokes e1: v1 -> w and
    e2: v2 -> w plus a loop sigma at w; graph_e1 and graph_e2 drop one
    spoke each; graph_f is the loop alone.  psi1 and psi2 represent the
    two subgraphs in the loop graph (killing the spoke); phi1 and phi2
    represent the whole graph in each subgraph (killing the missing
    spoke) and induce the mediating maps of the square."""

    graph_e: Graph
    graph_e1: Graph
    graph_e2: Graph
    graph_f: Graph
    psi1: CKFamily
    psi2: CKFamily
    phi1: CKFamily
    phi2: CKFamily


def _unit_bis(g, v):
    p = Path.build(g, (), v)
    return GraphBis.build(g, (BasicBisection.build(g, p, p),))


def _edge_bis(g, e):
    x = Path.build(g, (e,))
    y = Path.build(g, (), g.src(e))
    return GraphBis.build(g, (BasicBisection.build(g, x, y),))


def pullback_fixture():
    ge = Graph.build(
        ("v1", "v2", "w"),
        (("e1", "v1", "w"), ("e2", "v2", "w"), ("sigma", "w", "w")),
    )
    ge1 = Graph.build(("v1", "w"), (("e1", "v1", "w"), ("sigma", "w", "w")))
    ge2 = Graph.build(("v2", "w"), (("e2", "v2", "w"), ("sigma", "w", "w")))
    gf = Graph.build(("w",), (("sigma", "w", "w"),))
    zero_f = GraphBis.build(gf, ())

    def drops(sub, keep_v, keep_e):
        zero = GraphBis.build(sub, ())
        omega = {v: _unit_bis(sub, v) if v in keep_v else zero for v in ge.vertices}
        tee = {e: _edge_bis(sub, e) if e in keep_e else zero for e, _, _ in ge.edges}
        return CKFamily.build(ge, sub, omega, tee)

    psi1 = CKFamily.build(
        ge1,
        gf,
        {"v1": zero_f, "w": _unit_bis(gf, "w")},
        {"e1": zero_f, "sigma": _edge_bis(gf, "sigma")},
    )
    psi2 = CKFamily.build(
        ge2,
        gf,
        {"v2": zero_f, "w": _unit_bis(gf, "w")},
        {"e2": zero_f, "sigma": _edge_bis(gf, "sigma")},
    )
    phi1 = drops(ge1, ("v1", "w"), ("e1", "sigma"))
    phi2 = drops(ge2, ("v2", "w"), ("e2", "sigma"))
    return PullbackExample(ge, ge1, ge2, gf, psi1, psi2, phi1, phi2)


def pullback_phi(example, u):
    """The mediating pair over the two subgraphs of a bisection over the
    whole graph."""
    return (ck_induced_hom(example.phi1)(u), ck_induced_hom(example.phi2)(u))


def pullback_alpha(example, u1, u2, depth=2):
    """Glue a matched pair of subgraph bisections into one over the
    whole graph.

    Refined stopped symbols transfer verbatim: their boundary paths stop
    before re-entering the loop, so they exist unchanged in the big
    graph.  Each side leaves at most one unstopped loop remainder; the
    remainders must agree (the matching condition), and together their
    boundary paths cover the big graph's loop cylinder, so they fuse
    into one symbol.  A one-sided remainder is not open in the big graph
    and is rejected."""
    parts = []
    remainders = []
    for u, sub in ((u1, example.graph_e1), (u2, example.graph_e2)):
        assert u.graph == sub, "the pair lives over the two subgraphs"
        loop = []
        for x, y in _normal_form(u, depth):
            if sub.is_source(x.src):
                parts.append(
                    BasicBisection.build(
                        example.graph_e,
                        Path.build(example.graph_e, x.edges, x.src),
                        Path.build(example.graph_e, y.edges, y.src),
                    )
                )
            else:
                loop.append((x, y))
        assert len(loop) <= 1, "a bisection has at most one loop remainder"
        remainders.append(loop)
    if [len(r) for r in remainders] not in ([0, 0], [1, 1]):
        raise GraphError("one-sided-loop-remainder", [len(r) for r in remainders])
    if remainders[0]:
        (x1, y1), (x2, y2) = remainders[0][0], remainders[1][0]
        if (x1.edges, y1.edges) != (x2.edges, y2.edges):
            raise GraphError(
                "loop-remainders-differ",
                (path_text(x1) + "|" + path_text(y1), path_text(x2) + "|" + path_text(y2)),
            )
        parts.append(
            BasicBisection.build(
                example.graph_e,
                Path.build(example.graph_e, x1.edges, x1.src),
                Path.build(example.graph_e, y1.edges, y1.src),
            )
        )
    return GraphBis.build(example.graph_e, parts)


def _loop_word(n):
    return "@w" if n == 0 else ".".join(["sigma"] * n)


def pullback_example_verify(depth=2):
    """Bounded-depth verification of the worked gluing square.

    Checks, with one report row per identity: (a) the spoke symbols and
    their sources and ranges die under psi, (b) loop powers map to the
    expected degree singleton, (c) both ways around the square agree on
    every symbol with words up to the given depth, and (d) the mediating
    maps are mutually inverse on the three generators of the agreement
    pseudogroup and on their products, stars and compatible unions up to
    the given word length."""
    assert depth >= 2, "the demo needs depth at least two"
    ex = pullback_fixture()
    psi = (ck_induced_hom(ex.psi1), ck_induced_hom(ex.psi2))
    phi = (ck_induced_hom(ex.phi1), ck_induced_hom(ex.phi2))
    subs = (ex.graph_e1, ex.graph_e2)
    rows = []

    def row(label, ok):
        rows.append((label, bool(ok)))

    for i in (0, 1):
        spoke = "e%d" % (i + 1)
        for n in range(depth + 1):
            word = ("sigma." * n) + spoke + "|@v%d" % (i + 1)
            u = parse_graphbis(subs[i], (word,))
            dead = (u, gb_source(u), gb_range(u))
            row(
                "psi%d kills Z(%s) with its source and range" % (i + 1, word),
                all(psi[i](p).members == () for p in dead),
            )

    for i in (0, 1):
        for n in range(depth + 1):
            for m in range(depth + 1 - n):
                u = parse_graphbis(subs[i], (_loop_word(n + m) + "|" + _loop_word(m),))
                want = parse_graphbis(ex.graph_f, (_loop_word(n) + "|@w",))
                value = psi[i](u)
                row(
                    "psi%d(Z(%s|%s)) has degree %d"
                    % (i + 1, _loop_word(n + m), _loop_word(m), n),
                    gb_equal(value, want, max(2, _safe_depth(value, want))),
                )

    words = paths_upto(ex.graph_e, depth)
    for x in words:
        for y in words:
            if x.src != y.src:
                continue
            u = GraphBis.build(
                ex.graph_e, (BasicBisection.build(ex.graph_e, x, y),)
            )
            a, b = psi[0](phi[0](u)), psi[1](phi[1](u))
            row(
                "both ways agree at Z(%s|%s)" % (path_text(x), path_text(y)),
                gb_equal(a, b, max(2, _safe_depth(a, b))),
            )

    zero = tuple(GraphBis.build(sub, ()) for sub in subs)
    gens = {
        "e1|@v1": parse_graphbis(ex.graph_e, ("e1|@v1",)),
        "e2|@v2": parse_graphbis(ex.graph_e, ("e2|@v2",)),
        "sigma|@w": parse_graphbis(ex.graph_e, ("sigma|@w",)),
    }
    matched = {
        "e1|@v1": (parse_graphbis(subs[0], ("e1|@v1",)), zero[1]),
        "e2|@v2": (zero[0], parse_graphbis(subs[1], ("e2|@v2",))),
        "sigma|@w": (
            parse_graphbis(subs[0], ("sigma|@w",)),
            parse_graphbis(subs[1], ("sigma|@w",)),
        ),
    }
    for lab, u in gens.items():
        pair = pullback_phi(ex, u)
        down = all(
            gb_equal(pair[i], matched[lab][i], max(2, _safe_depth(pair[i], matched[lab][i])))
            for i in (0, 1)
        )
        back = pullback_alpha(ex, *matched[lab], depth=max(depth, _safe_depth(*matched[lab])))
        row(
            "generator Z(%s) crosses the square both ways" % lab,
            down and gb_equal(back, u, max(2, _safe_depth(back, u))),
        )

    def closure(singles, star, mul, union):
        store = {}
        for lab, v in singles.items():
            store.setdefault(v, lab)
            store.setdefault(star(v), lab + "*")
        layer = dict(store)
        for _ in range(depth - 1):
            grown = {}
            for a, la in layer.items():
                for b, lb in list(store.items()):
                    w = mul(a, b)
                    if w not in store and w not in grown:
                        grown[w] = la + " " + lb
            store.update(grown)
            layer = grown
        for (a, la), (b, lb) in itertools.combinations(list(store.items()), 2):
            try:
                w = union(a, b)
            except NotCompatibleUnion:
                continue
            store.setdefault(w, la + " + " + lb)
        return store

    for u, lab in closure(gens, gb_star, gb_product, gb_union).items():
        pair = pullback_phi(ex, u)
        back = pullback_alpha(ex, *pair, depth=max(depth, _safe_depth(*pair)))
        row(
            "word %s returns through the square" % lab,
            gb_equal(back, u, max(2, _safe_depth(back, u))),
        )

    def pair_star(t):
        return (gb_star(t[0]), gb_star(t[1]))

    def pair_mul(s, t):
        return (gb_product(s[0], t[0]), gb_product(s[1], t[1]))

    def pair_union(s, t):
        return (gb_union(s[0], t[0]), gb_union(s[1], t[1]))

    for t, lab in closure(matched, pair_star, pair_mul, pair_union).items():
        glued = pullback_alpha(ex, *t, depth=max(depth, _safe_depth(*t)))
        pair = pullback_phi(ex, glued)
        row(
            "pair %s returns through the square" % lab,
            all(
                gb_equal(pair[i], t[i], max(2, _safe_depth(pair[i], t[i])))
                for i in (0, 1)
            ),
        )

    return {
        "depth": depth,
        "ok": all(ok for _, ok in rows),
        "identities": len(rows),
        "rows": tuple(rows),
    }
