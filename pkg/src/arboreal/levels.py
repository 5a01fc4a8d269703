"""Finite permutation representations of tree groups on level n.

Vertices of level n are indexed by their rank in lexicographic order (the
base-d value of the word), so exports are stable.  The stabilizer chain is
a deterministic, non-randomized Schreier-Sims: base points are chosen as
the smallest moved point at each layer, orbits are grown breadth first
with generators in a fixed order, and every Schreier generator is sifted
until the chain verifies.  That reproduces identical orders in CI.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field

from .core import identity_perm, pinv, pmul

DEFAULT_MAX_POINTS = 1 << 20
ENV_MAX_POINTS = "ARBOREAL_MAX_POINTS"


class SizeBoundExceeded(ValueError):
    pass


def max_points():
    value = os.environ.get(ENV_MAX_POINTS)
    return int(value) if value else DEFAULT_MAX_POINTS


def vertex_index(v, d):
    """Rank of a level-n word in lexicographic order."""
    idx = 0
    for x in v:
        idx = idx * d + x
    return idx


def index_vertex(idx, d, n):
    out = []
    for _ in range(n):
        out.append(idx % d)
        idx //= d
    return tuple(reversed(out))


def level_perm(g, n):
    """Dense image array of g on the d^n vertices of level n."""
    d = g.automaton.size
    degree = d ** n
    if degree > max_points():
        raise SizeBoundExceeded(
            f"{degree} points exceed the limit {max_points()} (set {ENV_MAX_POINTS} to raise it)")
    images = [0] * degree
    idx = 0
    for v in _lex_vertices(d, n):
        images[idx] = vertex_index(g.act(v), d)
        idx += 1
    return tuple(images)


def _lex_vertices(d, n):
    from itertools import product
    return product(range(d), repeat=n)


@dataclass
class _Layer:
    point: int
    gens: list = field(default_factory=list)
    transversal: dict = field(default_factory=dict)


class LevelPermGroup:
    """Permutation group on the d^n level vertices with a stabilizer chain."""

    def __init__(self, d, level, perms):
        self.d = d
        self.level = level
        self.degree = d ** level
        ident = identity_perm(self.degree)
        self.gens = tuple(p for p in perms if p != ident)
        self._layers = None

    @classmethod
    def on_level(cls, gens, n):
        if not gens:
            raise ValueError("need at least one generator (use the identity element)")
        d = gens[0].automaton.size
        return cls(d, n, [level_perm(g, n) for g in gens])

    # -- chain --------------------------------------------------------------

    def _chain(self):
        if self._layers is None:
            self._layers = _schreier_sims(self.gens, self.degree)
        return self._layers

    def order(self):
        n = 1
        for layer in self._chain():
            n *= len(layer.transversal)
        return n

    def __contains__(self, perm):
        residue, _ = _strip(perm, self._chain(), 0, self.degree)
        return residue == identity_perm(self.degree)

    def is_trivial(self):
        return not self.gens

    def elements(self):
        """All elements, multiplied out of the chain; deterministic order."""
        layers = self._chain()
        ident = identity_perm(self.degree)

        def rec(i):
            if i == len(layers):
                yield ident
                return
            for pt in sorted(layers[i].transversal):
                t = layers[i].transversal[pt]
                for h in rec(i + 1):
                    yield pmul(h, t)
        return rec(0)

    def orbit(self, point):
        return _orbit(self.gens, point)

    def orbit_vertices(self, v):
        idx = vertex_index(v, self.d)
        if len(v) != self.level:
            raise ValueError(f"vertex {v} is not on level {self.level}")
        return {index_vertex(i, self.d, self.level) for i in self.orbit(idx)}


def _orbit(gens, point):
    orbit = {point}
    queue = [point]
    for pt in queue:
        for g in gens:
            q = g[pt]
            if q not in orbit:
                orbit.add(q)
                queue.append(q)
    return orbit


def _strip(perm, layers, start, degree):
    ident = identity_perm(degree)
    g = perm
    for i in range(start, len(layers)):
        layer = layers[i]
        target = g[layer.point]
        if target not in layer.transversal:
            return g, i
        g = pmul(g, pinv(layer.transversal[target]))
        if g == ident:
            return g, i + 1
    return g, len(layers)


def _schreier_sims(gens, degree):
    """Deterministic incremental Schreier-Sims with full verification.

    A strong generator stored at layer k fixes the base points of layers
    < k, so the generating set of layer i's stabilizer is everything
    stored at layers >= i.  All transversals are rebuilt after every
    insertion; a failed strip therefore names a point genuinely outside
    the current basic orbit, each insertion strictly enlarges the product
    of orbit sizes, and the bottom-up verification sweep terminates with a
    chain in which every Schreier generator sifts to the identity.
    """
    ident = identity_perm(degree)
    layers = []

    def effective(i):
        return [g for k in range(i, len(layers)) for g in layers[k].gens]

    def rebuild_all():
        for i, layer in enumerate(layers):
            gens_i = effective(i)
            layer.transversal = {layer.point: ident}
            queue = [layer.point]
            for pt in queue:
                for s in gens_i:
                    q = s[pt]
                    if q not in layer.transversal:
                        layer.transversal[q] = pmul(layer.transversal[pt], s)
                        queue.append(q)

    def add_gen(g, level):
        if level == len(layers):
            point = min(i for i in range(degree) if g[i] != i)
            layers.append(_Layer(point, transversal={point: ident}))
        layers[level].gens.append(g)
        rebuild_all()

    for g in gens:
        residue, level = _strip(g, layers, 0, degree)
        if residue != ident:
            add_gen(residue, level)

    i = len(layers) - 1
    while i >= 0:
        layer = layers[i]
        added = False
        for pt in sorted(layer.transversal):
            t = layer.transversal[pt]
            for s in effective(i):
                schreier = pmul(pmul(t, s), pinv(layer.transversal[s[pt]]))
                residue, level = _strip(schreier, layers, i + 1, degree)
                if residue != ident:
                    add_gen(residue, level)
                    added = True
        if added:
            i = len(layers) - 1
        else:
            i -= 1
    return layers


# ---------------------------------------------------------------------------
# level operations

def perm_group_on_level(gens, n):
    """The image of <gens> on level n, mirroring GAP's PermGroupOnLevel."""
    if n < 1:
        raise ValueError("level must be >= 1")
    return LevelPermGroup.on_level(list(gens), n)


def orbit_on_level(group, v):
    """Orbit of a level-n vertex under a LevelPermGroup, as vertex tuples."""
    return group.orbit_vertices(tuple(v))


def brute_force_elements(perms, cap=10 ** 6):
    """BFS closure of a generating set; the independent order oracle."""
    if not perms:
        return {tuple()}
    degree = len(perms[0])
    ident = identity_perm(degree)
    seen = {ident}
    queue = [ident]
    for p in queue:
        for s in perms:
            q = pmul(p, s)
            if q not in seen:
                if len(seen) >= cap:
                    raise SizeBoundExceeded(f"closure exceeds {cap} elements")
                seen.add(q)
                queue.append(q)
    return seen


def point_stabilizer_gens(perms, point):
    """Schreier generators of the stabilizer of one point (as permutations)."""
    if not perms:
        return []
    degree = len(perms[0])
    ident = identity_perm(degree)
    transversal = {point: ident}
    queue = [point]
    for pt in queue:
        for s in perms:
            q = s[pt]
            if q not in transversal:
                transversal[q] = pmul(transversal[pt], s)
                queue.append(q)
    out = []
    seen = set()
    for pt in queue:
        t = transversal[pt]
        for s in perms:
            g = pmul(pmul(t, s), pinv(transversal[s[pt]]))
            if g != ident and g not in seen:
                seen.add(g)
                out.append(g)
    return out


def stabilizer_words(gens, target="first-level", length_bound=None):
    """Schreier generator words for the first-level (or a vertex) stabilizer.

    `gens` maps generator names to TreeAutomorphisms.  Coset representatives
    are the breadth-first (= shortlex-minimal for the fixed generator order)
    words, so the output is deterministic.  Words are returned as reduced
    factor tuples over the generator names.
    """
    if not gens:
        return []
    items = list(gens.items())
    automaton = items[0][1].automaton

    def reduce(factors):
        return automaton.reduce(factors)

    if target == "first-level":
        # cosets of St(X^1) = kernel of the level-1 representation
        images = {name: level_perm(g, 1) for name, g in items}
        start = identity_perm(automaton.size)
        reps = {start: ()}
        queue = [start]
        for p in queue:
            if length_bound is not None and len(reps[p]) >= length_bound:
                continue
            for name, _ in items:
                q = pmul(p, images[name])
                if q not in reps:
                    reps[q] = reps[p] + ((name, 1),)
                    queue.append(q)
        out = []
        seen = set()
        for p in queue:
            for name, _ in items:
                q = pmul(p, images[name])
                w = reduce(reps[p] + ((name, 1),) + tuple((s, -e) for s, e in reversed(reps[q])))
                if w and w not in seen:
                    seen.add(w)
                    out.append(w)
        return out

    v = tuple(target)
    reps = {v: ()}
    queue = [v]
    for u in queue:
        if length_bound is not None and len(reps[u]) >= length_bound:
            continue
        for name, g in items:
            w = g.act(u)
            if w not in reps:
                reps[w] = reps[u] + ((name, 1),)
                queue.append(w)
    out = []
    seen = set()
    for u in queue:
        for name, g in items:
            w = g.act(u)
            word = reduce(reps[u] + ((name, 1),) + tuple((s, -e) for s, e in reversed(reps[w])))
            if word and word not in seen:
                seen.add(word)
                out.append(word)
    return out


def intersection_trivial_on_level(a, b, threshold=10 ** 6):
    """True iff two same-level permutation groups intersect trivially.

    Enumerates the smaller group through its stabilizer chain and sifts
    each element into the other.  Both groups above the threshold raises
    SizeBoundExceeded (the instances of interest are tiny; the threshold
    is a config knob).
    """
    if a.degree != b.degree or a.level != b.level:
        raise ValueError("groups act on different levels")
    small, large = (a, b) if a.order() <= b.order() else (b, a)
    if small.order() > threshold:
        raise SizeBoundExceeded(
            f"both groups have order > {threshold}; raise the threshold to enumerate")
    ident = identity_perm(small.degree)
    for g in small.elements():
        if g != ident and g in large:
            return False
    return True
