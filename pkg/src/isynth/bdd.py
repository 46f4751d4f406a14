"""Reduced ordered binary decision diagrams.

A plain ROBDD package (no complement edges, no reordering, no garbage
collection).  Nodes live in parallel arrays owned by a `BDD` manager;
node ``0`` is the false terminal and node ``1`` the true terminal.
Public operations take and return `BddRef` handles.  Each manager
keeps exactly one handle object per node, so two handles denote the
same Boolean function iff they are the same object.

Variables are named; the level of a variable is its declaration index
and never changes afterwards.
"""
import logging

from isynth.errors import ManagerMismatch, NonPropositional


logger = logging.getLogger(__name__)

FALSE = 0
TRUE = 1
_TERMINAL_LEVEL = 1 << 30


class BddRef:
    """Handle to a node of one `BDD` manager."""

    __slots__ = ('bdd', 'node', '__weakref__')

    def __init__(self, bdd, node):
        self.bdd = bdd
        self.node = node

    def __and__(self, other):
        return self.bdd.and_(self, other)

    def __or__(self, other):
        return self.bdd.or_(self, other)

    def __invert__(self):
        return self.bdd.not_(self)

    def __repr__(self):
        if self.node == FALSE:
            return '<BddRef FALSE>'
        if self.node == TRUE:
            return '<BddRef TRUE>'
        return f'<BddRef {self.node} @{self.bdd.level_name(self.node)}>'

    @property
    def is_false(self):
        return self.node == FALSE

    @property
    def is_true(self):
        return self.node == TRUE


class BDD:
    """Shared ROBDD manager.

    @param variables: names declared in order (first = top level)
    """

    def __init__(self, variables=()):
        self.vars = {}
        self._names = []
        # node -> level, low, high
        self._level = [_TERMINAL_LEVEL, _TERMINAL_LEVEL]
        self._low = [-1, -1]
        self._high = [-1, -1]
        # (level, low, high) -> node
        self._unique = {}
        self._not_cache = {}
        self._and_cache = {}
        self._or_cache = {}
        self._ite_cache = {}
        self._refs = {}
        self.false = self._ref(FALSE)
        self.true = self._ref(TRUE)
        for name in variables:
            self.declare(name)

    def __len__(self):
        return len(self._level)

    def __contains__(self, ref):
        return isinstance(ref, BddRef) and ref.bdd is self

    # variables

    def declare(self, name):
        """Add variable `name` below all existing ones; return its level."""
        if name in self.vars:
            return self.vars[name]
        level = len(self._names)
        self.vars[name] = level
        self._names.append(name)
        return level

    @property
    def var_names(self):
        return tuple(self._names)

    def level_of(self, name):
        return self.vars[name]

    def name_of(self, level):
        return self._names[level]

    def level_name(self, node):
        return self._names[self._level[node]]

    def var(self, name):
        level = self.vars[name]
        return self._ref(self._mk(level, FALSE, TRUE))

    # handles

    def _ref(self, node):
        r = self._refs.get(node)
        if r is None:
            r = BddRef(self, node)
            self._refs[node] = r
        return r

    def ref(self, node):
        """Return the handle of raw node id `node`."""
        return self._ref(node)

    def _check(self, *refs):
        for r in refs:
            if not isinstance(r, BddRef) or r.bdd is not self:
                raise ManagerMismatch(
                    'operand does not belong to this manager')

    # node construction

    def _mk(self, level, low, high):
        if low == high:
            return low
        key = (level, low, high)
        u = self._unique.get(key)
        if u is not None:
            return u
        u = len(self._level)
        self._level.append(level)
        self._low.append(low)
        self._high.append(high)
        self._unique[key] = u
        return u

    def _cofactors(self, u, level):
        if self._level[u] == level:
            return self._low[u], self._high[u]
        return u, u

    def _not(self, u):
        if u < 2:
            return 1 - u
        r = self._not_cache.get(u)
        if r is not None:
            return r
        r = self._mk(self._level[u],
                     self._not(self._low[u]), self._not(self._high[u]))
        self._not_cache[u] = r
        self._not_cache[r] = u
        return r

    def _and(self, u, v):
        if u == FALSE or v == FALSE:
            return FALSE
        if u == TRUE:
            return v
        if v == TRUE or u == v:
            return u
        if u > v:
            u, v = v, u
        key = (u, v)
        r = self._and_cache.get(key)
        if r is not None:
            return r
        lu, lv = self._level[u], self._level[v]
        level = min(lu, lv)
        u0, u1 = self._cofactors(u, level)
        v0, v1 = self._cofactors(v, level)
        r = self._mk(level, self._and(u0, v0), self._and(u1, v1))
        self._and_cache[key] = r
        return r

    def _or(self, u, v):
        if u == TRUE or v == TRUE:
            return TRUE
        if u == FALSE:
            return v
        if v == FALSE or u == v:
            return u
        if u > v:
            u, v = v, u
        key = (u, v)
        r = self._or_cache.get(key)
        if r is not None:
            return r
        level = min(self._level[u], self._level[v])
        u0, u1 = self._cofactors(u, level)
        v0, v1 = self._cofactors(v, level)
        r = self._mk(level, self._or(u0, v0), self._or(u1, v1))
        self._or_cache[key] = r
        return r

    def _ite(self, f, g, h):
        if f == TRUE:
            return g
        if f == FALSE:
            return h
        if g == h:
            return g
        if g == TRUE and h == FALSE:
            return f
        if g == FALSE and h == TRUE:
            return self._not(f)
        key = (f, g, h)
        r = self._ite_cache.get(key)
        if r is not None:
            return r
        level = min(self._level[f], self._level[g], self._level[h])
        f0, f1 = self._cofactors(f, level)
        g0, g1 = self._cofactors(g, level)
        h0, h1 = self._cofactors(h, level)
        r = self._mk(level, self._ite(f0, g0, h0), self._ite(f1, g1, h1))
        self._ite_cache[key] = r
        return r

    def _quantify(self, u, levels, conj, cache):
        if u < 2:
            return u
        r = cache.get(u)
        if r is not None:
            return r
        level = self._level[u]
        low = self._quantify(self._low[u], levels, conj, cache)
        high = self._quantify(self._high[u], levels, conj, cache)
        if level in levels:
            r = self._and(low, high) if conj else self._or(low, high)
        else:
            r = self._mk(level, low, high)
        cache[u] = r
        return r

    def _restrict(self, u, values, cache):
        if u < 2:
            return u
        r = cache.get(u)
        if r is not None:
            return r
        level = self._level[u]
        if level in values:
            child = self._high[u] if values[level] else self._low[u]
            r = self._restrict(child, values, cache)
        else:
            r = self._mk(level,
                         self._restrict(self._low[u], values, cache),
                         self._restrict(self._high[u], values, cache))
        cache[u] = r
        return r

    # public operations

    def not_(self, f):
        self._check(f)
        return self._ref(self._not(f.node))

    def and_(self, f, g):
        self._check(f, g)
        return self._ref(self._and(f.node, g.node))

    def or_(self, f, g):
        self._check(f, g)
        return self._ref(self._or(f.node, g.node))

    def ite(self, c, t, e):
        self._check(c, t, e)
        return self._ref(self._ite(c.node, t.node, e.node))

    def conj(self, refs):
        u = TRUE
        for r in refs:
            self._check(r)
            u = self._and(u, r.node)
        return self._ref(u)

    def disj(self, refs):
        u = FALSE
        for r in refs:
            self._check(r)
            u = self._or(u, r.node)
        return self._ref(u)

    def _levels(self, names):
        return frozenset(self.vars[v] for v in names)

    def exists(self, f, names):
        self._check(f)
        return self._ref(self._quantify(
            f.node, self._levels(names), False, dict()))

    def forall(self, f, names):
        self._check(f)
        return self._ref(self._quantify(
            f.node, self._levels(names), True, dict()))

    def restrict(self, f, values):
        """Cofactor `f` by the partial assignment `values` (name -> bool)."""
        self._check(f)
        lv = {self.vars[k]: bool(v) for k, v in values.items()}
        return self._ref(self._restrict(f.node, lv, dict()))

    def evaluate_node(self, u, true_names):
        level = self._level
        names = self._names
        while u > 1:
            if names[level[u]] in true_names:
                u = self._high[u]
            else:
                u = self._low[u]
        return u == TRUE

    def eval_assignment(self, f, w):
        """Value of `f` when exactly the variables in `w` are true."""
        self._check(f)
        return self.evaluate_node(f.node, w)

    def support_levels(self, u):
        seen = set()
        levels = set()
        stack = [u]
        while stack:
            v = stack.pop()
            if v < 2 or v in seen:
                continue
            seen.add(v)
            levels.add(self._level[v])
            stack.append(self._low[v])
            stack.append(self._high[v])
        return levels

    def support(self, f):
        self._check(f)
        return {self._names[i] for i in self.support_levels(f.node)}

    def any_sat(self, f):
        """Return the least satisfying assignment of `f`, or `None`.

        Assignments are ordered as binary numbers in which the variable
        of level ``i`` has weight ``2**i``: the first declared variable
        is the least significant bit.  Variables outside the support of
        `f` are false.  The result is a frozenset of true variable names.
        """
        self._check(f)
        if f.node == FALSE:
            return None
        value = self._min_value(f.node, {})
        names = []
        level = 0
        while value:
            if value & 1:
                names.append(self._names[level])
            value >>= 1
            level += 1
        return frozenset(names)

    def _min_value(self, u, memo):
        if u == TRUE:
            return 0
        r = memo.get(u)
        if r is None:
            best = []
            if self._low[u] != FALSE:
                best.append(self._min_value(self._low[u], memo))
            if self._high[u] != FALSE:
                best.append(self._min_value(self._high[u], memo)
                            + (1 << self._level[u]))
            r = min(best)
            memo[u] = r
        return r

    def cubes(self, f):
        """Disjoint cubes covering `f`, one per path to the true terminal.

        Each cube is a dict mapping variable names to bool.
        """
        self._check(f)
        out = []
        path = {}

        def walk(u):
            if u == FALSE:
                return
            if u == TRUE:
                out.append(dict(path))
                return
            name = self._names[self._level[u]]
            path[name] = False
            walk(self._low[u])
            path[name] = True
            walk(self._high[u])
            del path[name]

        walk(f.node)
        return out

    def cube(self, values):
        """Conjunction of literals given as a dict name -> bool."""
        u = TRUE
        for name, val in sorted(values.items(),
                                key=lambda kv: -self.vars[kv[0]]):
            level = self.vars[name]
            u = self._mk(level, FALSE, u) if val else self._mk(level, u, FALSE)
        return self._ref(u)

    def copy(self, f, target):
        """Rebuild `f` inside manager `target` (variables matched by name)."""
        self._check(f)
        for name in self._names:
            target.declare(name)
        cache = {}

        def rec(u):
            if u < 2:
                return u
            r = cache.get(u)
            if r is None:
                name = self._names[self._level[u]]
                var = target._mk(target.vars[name], FALSE, TRUE)
                r = target._ite(var, rec(self._high[u]), rec(self._low[u]))
                cache[u] = r
            return r

        return target._ref(rec(f.node))

    def from_prop(self, phi):
        """Translate a propositional NNF `Formula` into a BDD."""
        from isynth.ltlf import formula as fm

        cache = {}

        def rec(g):
            r = cache.get(g.uid)
            if r is not None:
                return r
            k = g.kind
            if k == fm.TRUE:
                r = TRUE
            elif k == fm.FALSE:
                r = FALSE
            elif k == fm.PROP:
                r = self._mk(self.declare(g.atom), FALSE, TRUE)
            elif k == fm.NPROP:
                r = self._mk(self.declare(g.atom), TRUE, FALSE)
            elif k == fm.AND:
                r = TRUE
                for c in g.children:
                    r = self._and(r, rec(c))
            elif k == fm.OR:
                r = FALSE
                for c in g.children:
                    r = self._or(r, rec(c))
            else:
                raise NonPropositional(f'temporal operator in {g}')
            cache[g.uid] = r
            return r

        return self._ref(rec(phi))
