"""Exhaustive small-structure enumeration and the curated test corpus.

The exhaustive generators walk whole isomorphism classes at desk scale:
finite posets drive both the distributive lattices (as downset lattices)
and the finite spaces (as preorders of specialization), inverse
semigroups come from a skeleton-first table search, and discrete
groupoids are disjoint unions of transitive pieces over a hand-built
group catalogue.  The curated suite_* lists name the fixtures that the
verification suite sweeps.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .groupoid import (
    FiniteGroupoid,
    enumerate_bisections,
    etale_discrete,
    from_group,
    group_actor,
    identity_actor,
    pair_groupoid,
    unit_groupoid,
    validate_etale,
)
from .invsgp import (
    AlgebraError,
    InverseSemigroup,
    PseudogroupHom,
    adjoin_zero,
    frame_pseudogroup,
    symmetric_inverse_monoid,
    validate_pseudogroup,
)
from .limits import (
    Diagram,
    cospan_shape,
    discrete_shape,
    parallel_pair_shape,
)
from .stone import FiniteSpace, Frame, bits, brace_label, mask_of

LETTERS = "abcdefgh"


# ---------------------------------------------------------------- posets


def _relabel_masks(masks, perm):
    n = len(masks)
    out = [0] * n
    for i in range(n):
        m = 0
        for j in bits(masks[i]):
            m |= 1 << perm[j]
        out[perm[i]] = m
    return tuple(out)


def _mask_canon(masks):
    n = len(masks)
    return min(_relabel_masks(masks, p) for p in itertools.permutations(range(n)))


def _downset_masks(up):
    """Masks closed downward: anything below a member is a member."""
    n = len(up)
    return [
        d
        for d in range(1 << n)
        if all((d >> j) & 1 or not (up[j] & d) for j in range(n))
    ]


def poset_layers(n):
    """All posets on 0..n elements up to isomorphism, one layer per size.

    Each poset is a tuple up[i] = mask of elements above i, inclusive.
    Layer k is built by planting a new maximal element over every
    downset of every layer-(k-1) poset, then deduplicating canonically.
    """
    layers = [((),)]
    for k in range(1, n + 1):
        seen = set()
        for up in layers[k - 1]:
            for d in _downset_masks(up):
                ext = tuple(
                    u | (1 << (k - 1)) if (d >> i) & 1 else u
                    for i, u in enumerate(up)
                ) + (1 << (k - 1),)
                seen.add(_mask_canon(ext))
        layers.append(tuple(sorted(seen)))
    return layers


# ---------------------------------------------------------------- frames


def corpus_frames(max_size=6):
    """All bounded distributive lattices with at most max_size elements.

    Every such lattice is the downset lattice of the poset of its
    join-irreducible elements, which has fewer elements, so walking all
    small posets and keeping the small downset families is exhaustive.
    """
    assert max_size >= 1
    out = []
    seen = set()
    for layer in poset_layers(max(0, max_size - 1)):
        for up in layer:
            ds = sorted(_downset_masks(up))
            if len(ds) > max_size:
                continue
            names = tuple(LETTERS[i] for i in range(len(up)))
            frame = Frame.from_masks(lambda m: brace_label(names, m), ds)
            key = _mask_canon(frame.up)
            if key not in seen:
                seen.add(key)
                out.append(frame)
    out.sort(key=lambda f: (f.n, _mask_canon(f.up)))
    return tuple(out)


# ---------------------------------------------------------------- spaces


def _compositions(total, parts):
    if parts == 0:
        return [()] if total == 0 else []
    return [
        (h,) + rest
        for h in range(1, total - parts + 2)
        for rest in _compositions(total - h, parts - 1)
    ]


def corpus_spaces(max_points=4):
    """All finite spaces with at most max_points points up to homeomorphism.

    A finite space is the Alexandrov space of its specialization
    preorder; a preorder is a poset of clusters with a size per cluster.
    """
    out = [FiniteSpace.discrete(())]
    layers = poset_layers(max_points)
    for n in range(1, max_points + 1):
        seen = set()
        spaces = []
        for k in range(1, n + 1):
            for up in layers[k]:
                cluster_below = [
                    mask_of(c for c in range(k) if up[c] & (1 << d))
                    for d in range(k)
                ]
                for sizes in _compositions(n, k):
                    starts = [sum(sizes[:c]) for c in range(k + 1)]
                    point_mask = [
                        mask_of(
                            p
                            for c in bits(cluster_below[d])
                            for p in range(starts[c], starts[c + 1])
                        )
                        for d in range(k)
                    ]
                    below = tuple(
                        point_mask[c]
                        for c in range(k)
                        for _ in range(sizes[c])
                    )
                    key = _mask_canon(below)
                    if key in seen:
                        continue
                    seen.add(key)
                    names = tuple("x%d" % i for i in range(n))
                    spaces.append((key, FiniteSpace.from_preorder(names, below)))
        out.extend(s for _, s in sorted(spaces, key=lambda t: t[0]))
    return tuple(out)


# ------------------------------------------------------ inverse semigroups


def _meet_semilattices(k):
    """Meet tables of the k-element semilattices, up to isomorphism."""
    out = []
    for up in poset_layers(k)[k]:
        below = [
            mask_of(v for v in range(k) if up[v] & (1 << w)) for w in range(k)
        ]
        table = []
        for i in range(k):
            row = []
            for j in range(k):
                lower = below[i] & below[j]
                glb = [w for w in bits(lower) if lower & ~below[w] == 0]
                if len(glb) != 1:
                    row = None
                    break
                row.append(glb[0])
            if row is None:
                table = None
                break
            table.append(tuple(row))
        if table is not None:
            out.append(tuple(table))
    return out


def _isg_skeletons(k, m):
    """Star involution plus source/range idempotents for m non-idempotents."""
    skeletons = []
    for cycles in range(m // 2 + 1):
        star = list(range(k + m))
        for c in range(cycles):
            star[k + 2 * c], star[k + 2 * c + 1] = k + 2 * c + 1, k + 2 * c
        orbits = [(k + 2 * c, k + 2 * c + 1) for c in range(cycles)]
        fixed = list(range(k + 2 * cycles, k + m))
        choice_sets = [range(k * k)] * len(orbits) + [range(k)] * len(fixed)
        for picks in itertools.product(*choice_sets):
            sfun = list(range(k)) + [None] * m
            rfun = list(range(k)) + [None] * m
            for (t, tstar), pick in zip(orbits, picks):
                sfun[t], rfun[t] = pick // k, pick % k
                sfun[tstar], rfun[tstar] = rfun[t], sfun[t]
            for t, pick in zip(fixed, picks[len(orbits):]):
                sfun[t] = rfun[t] = pick
            skeletons.append((tuple(star), tuple(sfun), tuple(rfun)))
    return skeletons


def _fill_isg_tables(n, k, sl, star, sfun, rfun):
    """Complete a skeleton to full inverse-semigroup tables by backtracking.

    Every cell value c for a product a*b must shrink source and range:
    rng(c) <= rng(a) and src(c) <= src(b) in the idempotent semilattice.
    Associativity is checked on every triple whose entries are all known,
    so contradictions prune the tree early; the final table is still
    re-verified from scratch by the caller.
    """
    T = [[None] * n for _ in range(n)]
    for e in range(k):
        for f in range(k):
            T[e][f] = sl[e][f]
    seeds = []
    for t in range(k, n):
        seeds.append((t, star[t], rfun[t]))
        seeds.append((star[t], t, sfun[t]))

    def leq(e, f):
        return sl[e][f] == e

    def consistent(a, b):
        c = T[a][b]
        for x in range(n):
            xa = T[x][a]
            if xa is not None and T[xa][b] is not None and T[x][c] is not None:
                if T[xa][b] != T[x][c]:
                    return False
            bx = T[b][x]
            if bx is not None and T[c][x] is not None and T[a][bx] is not None:
                if T[c][x] != T[a][bx]:
                    return False
        return True

    def place(a, b, c):
        """Set a*b = c and mirror (a*b)* = b* a*; returns undo list or None."""
        undo = []
        for (x, y, v) in ((a, b, c), (star[b], star[a], star[c])):
            if T[x][y] is None:
                T[x][y] = v
                undo.append((x, y))
            elif T[x][y] != v:
                for (p, q) in undo:
                    T[p][q] = None
                return None
        for (x, y) in undo or ((a, b),):
            if not consistent(x, y):
                for (p, q) in undo:
                    T[p][q] = None
                return None
        return undo

    for (a, b, c) in seeds:
        if place(a, b, c) is None:
            return
    cells = [
        (a, b) for a in range(n) for b in range(n) if T[a][b] is None
    ]
    out = []

    def rec(i):
        while i < len(cells) and T[cells[i][0]][cells[i][1]] is not None:
            i += 1
        if i == len(cells):
            out.append(tuple(tuple(row) for row in T))
            return
        a, b = cells[i]
        for c in range(n):
            if not leq(rfun[c], rfun[a]) or not leq(sfun[c], sfun[b]):
                continue
            undo = place(a, b, c)
            if undo is None:
                continue
            rec(i + 1)
            for (p, q) in undo:
                T[p][q] = None

    rec(0)
    return out


def _table_canon(table, k):
    """Least relabelled table over permutations fixing the idempotent block."""
    n = len(table)
    best = None
    rest = range(k, n)
    for ep in itertools.permutations(range(k)):
        for rp in itertools.permutations(rest):
            p = ep + rp
            q = [0] * n
            for i, v in enumerate(p):
                q[v] = i
            cand = tuple(
                p[table[q[i]][q[j]]] for i in range(n) for j in range(n)
            )
            if best is None or cand < best:
                best = cand
    return best


def corpus_inverse_semigroups(max_size=5):
    """All inverse semigroups with at most max_size elements, up to iso.

    The search fixes the shape first: the idempotents form one of the
    small meet semilattices, the star involution pairs or fixes the
    remaining elements, and each of those carries a source and a range
    idempotent.  Backtracking fills in the rest of the table.
    """
    out = []
    for n in range(1, max_size + 1):
        found = {}
        for k in range(1, n + 1):
            m = n - k
            for sl in _meet_semilattices(k):
                for star, sfun, rfun in _isg_skeletons(k, m):
                    for table in _fill_isg_tables(n, k, sl, star, sfun, rfun) or ():
                        try:
                            isg = InverseSemigroup.build(
                                tuple("t%d" % i for i in range(n)), table)
                        except (AlgebraError, AssertionError):
                            continue
                        if isg.idem != (1 << k) - 1:
                            continue
                        key = _table_canon(table, k)
                        if key not in found:
                            found[key] = isg
        out.extend(found[key] for key in sorted(found))
    return tuple(out)


# ---------------------------------------------------------------- groups


def cyclic_table(n):
    return tuple(tuple((i + j) % n for j in range(n)) for i in range(n))


def cyclic_labels(n):
    return tuple(
        "1" if i == 0 else ("g" if n == 2 else "g%d" % i) for i in range(n)
    )


def product_group(a, b):
    """Direct product of two (labels, table) pairs."""
    la, ta = a
    lb, tb = b
    pairs = [(i, j) for i in range(len(la)) for j in range(len(lb))]
    pos = {p: x for x, p in enumerate(pairs)}
    labels = tuple("%s.%s" % (la[i], lb[j]) for (i, j) in pairs)
    table = tuple(
        tuple(pos[(ta[i][x], tb[j][y])] for (x, y) in pairs)
        for (i, j) in pairs
    )
    return labels, table


def dihedral_group(m):
    """Order 2m: index i + m*f is the rotation r^i (f=0) or s r^i (f=1)."""

    def mult(x, y):
        i, f = x % m, x // m
        j, g = y % m, y // m
        return (i + (j if f == 0 else -j)) % m + m * ((f + g) % 2)

    labels = tuple(
        ("1" if i == 0 else "r%d" % i) if f == 0 else "s%d" % i
        for f in (0, 1)
        for i in range(m)
    )
    table = tuple(tuple(mult(x, y) for y in range(2 * m)) for x in range(2 * m))
    return labels, table


def quaternion_group():
    labels = ("1", "-1", "i", "-i", "j", "-j", "k", "-k")
    base = {
        (0, 0): (0, 0), (1, 1): (0, 1), (2, 2): (0, 1), (3, 3): (0, 1),
        (1, 2): (3, 0), (2, 3): (1, 0), (3, 1): (2, 0),
        (2, 1): (3, 1), (3, 2): (1, 1), (1, 3): (2, 1),
    }

    def mult(x, y):
        ax, sx = x // 2, x % 2
        ay, sy = y // 2, y % 2
        if ax == 0:
            az, sz = ay, 0
        elif ay == 0:
            az, sz = ax, 0
        else:
            az, sz = base[(ax, ay)]
        return az * 2 + (sx + sy + sz) % 2

    return labels, tuple(tuple(mult(x, y) for y in range(8)) for x in range(8))


def group_catalogue(max_order=8):
    """One (name, labels, table) triple per group of order <= max_order."""
    z = lambda n: (cyclic_labels(n), cyclic_table(n))
    groups = [("z%d" % n,) + z(n) for n in range(1, max_order + 1)]
    extras = [
        ("v4", product_group(z(2), z(2))),
        ("s3", dihedral_group(3)),
        ("z4xz2", product_group(z(4), z(2))),
        ("z2cubed", product_group(z(2), product_group(z(2), z(2)))),
        ("d4", dihedral_group(4)),
        ("q8", quaternion_group()),
    ]
    groups.extend(
        (name,) + lt for name, lt in extras if len(lt[0]) <= max_order
    )
    groups.sort(key=lambda g: (len(g[1]), g[0]))
    return tuple(groups)


# ----------------------------------------------------------- groupoids


def transitive_piece(base, labels, table):
    """The groupoid with `base` mutually connected units and the given
    isotropy group: arrows (i, j, g) from unit j to unit i."""
    n = len(labels)
    arrows = [(i, j, g) for i in range(base) for j in range(base) for g in range(n)]
    pos = {a: x for x, a in enumerate(arrows)}
    inv_of = [table[g].index(0) for g in range(n)]
    names = tuple(
        labels[g] if base == 1 else "%s@%d%d" % (labels[g], i, j)
        for (i, j, g) in arrows
    )
    source = tuple(pos[(j, j, 0)] for (i, j, g) in arrows)
    rng = tuple(pos[(i, i, 0)] for (i, j, g) in arrows)
    inverse = tuple(pos[(j, i, inv_of[g])] for (i, j, g) in arrows)
    comp = tuple(
        tuple(
            pos[(i, jb, table[g][h])] if j == ib else None
            for (ib, jb, h) in arrows
        )
        for (i, j, g) in arrows
    )
    return FiniteGroupoid.build(names, source, rng, inverse, comp)


def disjoint_union_groupoid(pieces):
    """Block sum of finite groupoids; arrows keep their piece as a prefix."""
    labels, source, rng, inverse = [], [], [], []
    blocks = []
    offset = 0
    for c, g in enumerate(pieces):
        prefix = "c%d:" % c if len(pieces) > 1 else ""
        labels.extend(prefix + str(e) for e in g.elements)
        source.extend(x + offset for x in g.src)
        rng.extend(x + offset for x in g.rng)
        inverse.extend(x + offset for x in g.inv)
        blocks.append((offset, g))
        offset += g.n
    comp = [[None] * offset for _ in range(offset)]
    for off, g in blocks:
        for i in range(g.n):
            for j in range(g.n):
                if g.comp[i][j] is not None:
                    comp[off + i][off + j] = g.comp[i][j] + off
    return FiniteGroupoid.build(labels, source, rng, inverse, comp)


def corpus_groupoids(max_arrows=8):
    """All discrete groupoids with at most max_arrows arrows, up to iso.

    A groupoid splits into transitive components; a transitive component
    with b units and isotropy H has b^2 |H| arrows, so at this scale the
    pieces are the groups of order <= max_arrows and two-unit pieces
    with isotropy of order <= max_arrows // 4.
    """
    pieces = [
        ("%s" % name, len(labels), (1, labels, table))
        for name, labels, table in group_catalogue(max_arrows)
    ]
    pieces.extend(
        ("pair2x%s" % name, 4 * len(labels), (2, labels, table))
        for name, labels, table in group_catalogue(max_arrows // 4)
    )
    out = []

    def rec(start, chosen, left):
        out.append(tuple(chosen))
        for i in range(start, len(pieces)):
            if pieces[i][1] <= left:
                rec(i, chosen + [i], left - pieces[i][1])

    rec(0, [], max_arrows)
    built = []
    for multiset in sorted(set(out)):
        gs = [transitive_piece(*pieces[i][2]) for i in multiset]
        if not gs:
            g = FiniteGroupoid.build((), (), (), (), ())
        elif len(gs) == 1:
            g = gs[0]
        else:
            g = disjoint_union_groupoid(gs)
        name = "+".join(pieces[i][0] for i in multiset) or "empty"
        built.append((name, etale_discrete(g)))
    return tuple(built)


# ------------------------------------------------------- curated fixtures


def chain3_frame():
    return Frame.from_leq(("bot", "mid", "top"), [(0, 1), (1, 2), (0, 2)])


def square_frame():
    return Frame.from_leq(
        ("bot", "a", "b", "top"), [(0, 1), (0, 2), (1, 3), (2, 3), (0, 3)]
    )


def group_with_zero(n):
    return validate_pseudogroup(adjoin_zero(cyclic_labels(n), cyclic_table(n)))


def zn_discrete(n):
    return etale_discrete(from_group(cyclic_labels(n), cyclic_table(n)))


def pair2_discrete():
    return etale_discrete(pair_groupoid(("1", "2")))


def two_loops_groupoid():
    labels = ("u1", "a", "u2", "b")
    comp = [
        [0, 1, None, None],
        [1, 0, None, None],
        [None, None, 2, 3],
        [None, None, 3, 2],
    ]
    return FiniteGroupoid.build(
        labels, (0, 0, 2, 2), (0, 0, 2, 2), (0, 1, 2, 3), comp
    )


def two_loops_linked():
    g = two_loops_groupoid()
    return validate_etale(g, FiniteSpace.closure_build(g.elements, [1, 2, 5, 9]))


def vee_space():
    return FiniteSpace.closure_build(("a", "b", "c"), [1, 2])


def suite_pseudogroups():
    """The corpus pseudogroups, each at most 12 elements, with names."""
    labels, table = product_group(
        (cyclic_labels(2), cyclic_table(2)), (cyclic_labels(2), cyclic_table(2)))
    return (
        ("group-z1-with-zero", group_with_zero(1)),
        ("group-z2-with-zero", group_with_zero(2)),
        ("group-z3-with-zero", group_with_zero(3)),
        ("group-z4-with-zero", group_with_zero(4)),
        ("group-v4-with-zero", validate_pseudogroup(adjoin_zero(labels, table))),
        ("partial-bijections-2", validate_pseudogroup(symmetric_inverse_monoid(2))),
        ("chain3-opens", frame_pseudogroup(chain3_frame())),
        ("square-opens", frame_pseudogroup(square_frame())),
        ("pair2-bisections", enumerate_bisections(pair2_discrete())),
        ("z2-bisections", enumerate_bisections(zn_discrete(2))),
        ("sierpinski-bisections",
         enumerate_bisections(unit_groupoid(FiniteSpace.sierpinski()))),
        ("collapsed-point",
         validate_pseudogroup(InverseSemigroup.build(("0",), ((0,),)))),
    )


def suite_pseudogroup_homs():
    named = dict(suite_pseudogroups())
    z4, z3, z2, z1 = (named["group-z%d-with-zero" % n] for n in (4, 3, 2, 1))
    i2 = named["partial-bijections-2"]
    chain3, square = named["chain3-opens"], named["square-opens"]
    pos = {lab: t for t, lab in enumerate(i2.elements)}
    return (
        ("identity-i2", PseudogroupHom.build(i2, i2, range(i2.n))),
        ("quotient-z4-z2", PseudogroupHom.build(z4, z2, (0, 1, 0, 1, 2))),
        ("collapse-z3-z1", PseudogroupHom.build(z3, z1, (0, 0, 0, 1))),
        ("swap-automorphism-z3", PseudogroupHom.build(z3, z3, (0, 2, 1, 3))),
        ("embed-z2-i2", PseudogroupHom.build(
            z2, i2, (pos["[0>0,1>1]"], pos["[0>1,1>0]"], pos["[]"]))),
        ("chain3-into-square", PseudogroupHom.build(chain3, square, (0, 1, 3))),
        ("zero-endo-z2", PseudogroupHom.build(z2, z2, (2, 2, 2))),
    )


def suite_groupoids():
    """The corpus groupoids with sober unit spaces, with names."""
    return (
        ("one-point-units", unit_groupoid(FiniteSpace.discrete(("p",)))),
        ("two-point-units", unit_groupoid(FiniteSpace.discrete(("p", "q")))),
        ("sierpinski-units", unit_groupoid(FiniteSpace.sierpinski())),
        ("chain3-units", unit_groupoid(FiniteSpace.chain(3))),
        ("vee-units", unit_groupoid(vee_space())),
        ("group-z2", zn_discrete(2)),
        ("group-z3", zn_discrete(3)),
        ("group-z4", zn_discrete(4)),
        ("group-s3", etale_discrete(from_group(*dihedral_group(3)))),
        ("pair-of-points", pair2_discrete()),
        ("linked-loops", two_loops_linked()),
    )


def non_sober_groupoids():
    """Engineered negatives whose unit spaces are not T0."""
    g = two_loops_groupoid()
    return (
        ("indiscrete-pair-units",
         unit_groupoid(FiniteSpace.indiscrete(("p", "q")))),
        ("blurred-loops",
         validate_etale(g, FiniteSpace.closure_build(g.elements, [5, 10]))),
    )


def _ident(ps):
    return PseudogroupHom.build(ps, ps, range(ps.n))


def suite_psgrp_diagrams():
    """Pseudogroup diagrams covering every limit shape the suite checks."""
    z4, z3, z2, z1 = (group_with_zero(n) for n in (4, 3, 2, 1))
    i2 = validate_pseudogroup(symmetric_inverse_monoid(2))
    quot = PseudogroupHom.build(z4, z2, (0, 1, 0, 1, 2))
    triv = PseudogroupHom.build(z4, z2, (0, 0, 0, 0, 2))
    sq = PseudogroupHom.build(z4, z4, (0, 2, 0, 2, 4))
    to1_a = PseudogroupHom.build(z2, z1, (0, 0, 1))
    to1_b = PseudogroupHom.build(z3, z1, (0, 0, 0, 1))
    return (
        ("empty", Diagram.build(discrete_shape(()), "pseudogroups", (), ())),
        ("two-groups-discrete", Diagram.build(
            discrete_shape(("a", "b")), "pseudogroups", (z2, z3),
            (_ident(z2), _ident(z3)))),
        ("monoid-point", Diagram.build(
            discrete_shape(("a",)), "pseudogroups", (i2,), (_ident(i2),))),
        ("quotient-parallel-pair", Diagram.build(
            parallel_pair_shape(), "pseudogroups", (z4, z2),
            (_ident(z4), _ident(z2), quot, triv))),
        ("endomorphism-parallel-pair", Diagram.build(
            parallel_pair_shape(), "pseudogroups", (z4, z4),
            (_ident(z4), _ident(z4), _ident(z4), sq))),
        ("terminal-cospan", Diagram.build(
            cospan_shape(), "pseudogroups", (z2, z3, z1),
            (_ident(z2), _ident(z3), _ident(z1), to1_a, to1_b))),
    )


def suite_gpd_diagrams():
    """Groupoid diagrams for the limit comparisons."""
    z2d, z3d = zn_discrete(2), zn_discrete(3)
    return (
        ("empty", Diagram.build(discrete_shape(()), "groupoids", (), ())),
        ("two-groups-discrete", Diagram.build(
            discrete_shape(("a", "b")), "groupoids", (z2d, z3d),
            (identity_actor(z2d), identity_actor(z3d)))),
        ("collapse-parallel-pair", Diagram.build(
            parallel_pair_shape(), "groupoids", (z2d, z2d),
            (identity_actor(z2d), identity_actor(z2d),
             identity_actor(z2d), group_actor(z2d, z2d, (0, 0))))),
    )
