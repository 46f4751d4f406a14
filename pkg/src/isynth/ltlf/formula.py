"""Hash-consed LTLf formulas in negation normal form.

Every formula is created through a `Context`, which interns nodes so
that structurally equal formulas are the same Python object.  The
context also owns the atom table and the BDD manager used for guards,
so atom ids double as BDD levels.
"""
import re

from isynth.bdd import BDD
from isynth.errors import UnknownAtom


TRUE, FALSE, PROP, NPROP, AND, OR, NEXT, WNEXT, UNTIL, RELEASE = range(10)

KIND_NAMES = ('true', 'false', 'prop', 'nprop', 'and', 'or',
              'next', 'wnext', 'until', 'release')

ATOM_RE = re.compile(r'[a-zA-Z_][a-zA-Z0-9_-]*\Z')
KEYWORDS = frozenset({'true', 'false', 'X', 'N', 'U', 'R', 'F', 'G'})


class Formula:
    """Interned formula node.  Compare with `is` or `==` (identity)."""

    __slots__ = ('ctx', 'kind', 'atom', 'children', 'uid', 'mask',
                 'size', 'depth')

    def __init__(self, ctx, kind, atom, children, uid, mask):
        self.ctx = ctx
        self.kind = kind
        self.atom = atom
        self.children = children
        self.uid = uid
        self.mask = mask
        self.size = 1 + sum(c.size for c in children)
        self.depth = 1 + max((c.depth for c in children), default=0)

    def __repr__(self):
        return f'Formula({to_str(self)!r})'

    def __str__(self):
        return to_str(self)

    @property
    def left(self):
        return self.children[0]

    @property
    def right(self):
        return self.children[1]

    @property
    def child(self):
        return self.children[0]

    @property
    def atoms(self):
        return self.ctx.atoms_of_mask(self.mask)

    def __and__(self, other):
        return self.ctx.and_(self, other)

    def __or__(self, other):
        return self.ctx.or_(self, other)


class Context:
    """Atom table, formula interner and BDD manager of one session.

    @param atoms: atom names registered in order
    @param frozen: if `True`, unknown atoms raise `UnknownAtom`
    """

    def __init__(self, atoms=(), frozen=False):
        self._atom_id = {}
        self._atom_names = []
        self._table = {}
        self._nodes = []
        self.bdd = BDD()
        self.frozen = False
        for name in atoms:
            self.register(name)
        self.frozen = frozen
        self.true = self._intern(TRUE, None, ())
        self.false = self._intern(FALSE, None, ())
        # caches keyed by node uid, owned by progression/semantics
        self.simplify_cache = {}
        self.empty_cache = {}
        self.forget_progressions()

    def forget_progressions(self):
        """Drop the memoized progressions and residual abstractions.

        These tables amount to the transition relation of every automaton
        built so far; clearing them makes the next translation start from
        scratch and bounds memory in long sessions.
        """
        self.prog_cache = {}
        self.prog_raw_cache = {}
        # propositional abstraction of residuals, see `canonical`
        self.abs_bdd = BDD()
        self.abs_cache = {}
        self.abs_rep = {}

    def __len__(self):
        return len(self._nodes)

    # atoms

    def register(self, name):
        """Intern atom `name`; return its id."""
        i = self._atom_id.get(name)
        if i is not None:
            return i
        if self.frozen:
            raise UnknownAtom(f'unknown atom {name!r}')
        if not ATOM_RE.match(name) or name in KEYWORDS:
            raise ValueError(f'invalid atom name {name!r}')
        i = len(self._atom_names)
        self._atom_id[name] = i
        self._atom_names.append(name)
        level = self.bdd.declare(name)
        assert level == i, (level, i)
        return i

    @property
    def atom_names(self):
        return tuple(self._atom_names)

    def atom_id(self, name):
        try:
            return self._atom_id[name]
        except KeyError:
            raise UnknownAtom(f'unknown atom {name!r}') from None

    def has_atom(self, name):
        return name in self._atom_id

    def mask_of(self, names):
        m = 0
        for n in names:
            i = self._atom_id.get(n)
            if i is not None:
                m |= 1 << i
        return m

    def atoms_of_mask(self, mask):
        out = []
        i = 0
        while mask:
            if mask & 1:
                out.append(self._atom_names[i])
            mask >>= 1
            i += 1
        return frozenset(out)

    def ids_of_mask(self, mask):
        out = []
        i = 0
        while mask:
            if mask & 1:
                out.append(i)
            mask >>= 1
            i += 1
        return out

    # interning

    def _intern(self, kind, atom, children):
        key = (kind, atom, tuple(c.uid for c in children))
        f = self._table.get(key)
        if f is not None:
            return f
        mask = 0
        if atom is not None:
            mask = 1 << self._atom_id[atom]
        for c in children:
            mask |= c.mask
        f = Formula(self, kind, atom, tuple(children), len(self._nodes), mask)
        self._table[key] = f
        self._nodes.append(f)
        return f

    def _own(self, f):
        if f.ctx is not self:
            raise ValueError('formula belongs to another context')
        return f

    def prop(self, name):
        self.register(name)
        return self._intern(PROP, name, ())

    def nprop(self, name):
        self.register(name)
        return self._intern(NPROP, name, ())

    def _nary(self, kind, unit, items):
        seen = {}
        for f in items:
            self._own(f)
            seen[f.uid] = f
        if not seen:
            return unit
        if len(seen) == 1:
            return next(iter(seen.values()))
        children = [seen[k] for k in sorted(seen)]
        return self._intern(kind, None, children)

    def and_(self, *items):
        """Conjunction; children deduplicated and sorted, not simplified."""
        if len(items) == 1 and not isinstance(items[0], Formula):
            items = tuple(items[0])
        return self._nary(AND, self.true, items)

    def or_(self, *items):
        if len(items) == 1 and not isinstance(items[0], Formula):
            items = tuple(items[0])
        return self._nary(OR, self.false, items)

    def next(self, f):
        return self._intern(NEXT, None, (self._own(f),))

    def wnext(self, f):
        return self._intern(WNEXT, None, (self._own(f),))

    def until(self, a, b):
        return self._intern(UNTIL, None, (self._own(a), self._own(b)))

    def release(self, a, b):
        return self._intern(RELEASE, None, (self._own(a), self._own(b)))

    def eventually(self, f):
        return self.until(self.true, f)

    def always(self, f):
        return self.release(self.false, f)

    @property
    def not_ended(self):
        """F(true): the trace goes on."""
        return self.until(self.true, self.true)

    @property
    def ended(self):
        """G(false): the trace has ended."""
        return self.release(self.false, self.false)

    def rebuild(self, f):
        """Copy formula `f` (possibly from another context) into this one."""
        if f.ctx is self:
            return f
        cache = {}

        def rec(g):
            r = cache.get(g.uid)
            if r is not None:
                return r
            k = g.kind
            if k == TRUE:
                r = self.true
            elif k == FALSE:
                r = self.false
            elif k == PROP:
                r = self.prop(g.atom)
            elif k == NPROP:
                r = self.nprop(g.atom)
            elif k == AND:
                r = self.and_([rec(c) for c in g.children])
            elif k == OR:
                r = self.or_([rec(c) for c in g.children])
            elif k == NEXT:
                r = self.next(rec(g.child))
            elif k == WNEXT:
                r = self.wnext(rec(g.child))
            elif k == UNTIL:
                r = self.until(rec(g.left), rec(g.right))
            else:
                r = self.release(rec(g.left), rec(g.right))
            cache[g.uid] = r
            return r

        return rec(f)


def size(f):
    """Number of nodes of the syntax tree of `f`."""
    return f.size


def atoms_of(f):
    return f.atoms


def is_propositional(f):
    stack = [f]
    while stack:
        g = stack.pop()
        if g.kind >= NEXT:
            return False
        stack.extend(g.children)
    return True


# simplification

def simplify(f):
    """Semantics-preserving cleanup, applied bottom-up to a fixpoint.

    Constant absorption, flattening of nested conjunctions and
    disjunctions, deduplication, and collapse of complementary
    literals.  The pair F(true)/G(false) is treated as complementary
    too.  The result is a fixpoint: ``simplify(simplify(f)) is
    simplify(f)``.
    """
    ctx = f.ctx
    cache = ctx.simplify_cache
    r = cache.get(f.uid)
    if r is not None:
        return r
    k = f.kind
    if k <= NPROP:
        r = f
    elif k == AND:
        r = simplify_and(ctx, [simplify(c) for c in f.children])
    elif k == OR:
        r = simplify_or(ctx, [simplify(c) for c in f.children])
    elif k == NEXT:
        c = simplify(f.child)
        r = ctx.false if c.kind == FALSE else ctx.next(c)
    elif k == WNEXT:
        c = simplify(f.child)
        r = ctx.true if c.kind == TRUE else ctx.wnext(c)
    elif k == UNTIL:
        a, b = simplify(f.left), simplify(f.right)
        r = ctx.false if b.kind == FALSE else ctx.until(a, b)
    else:
        a, b = simplify(f.left), simplify(f.right)
        r = ctx.true if b.kind == TRUE else ctx.release(a, b)
    cache[f.uid] = r
    cache[r.uid] = r
    return r


def _markers(ctx):
    return ctx.not_ended, ctx.ended


def simplify_and(ctx, children):
    """Conjunction of already simplified `children`, simplified."""
    flat = {}
    for c in children:
        k = c.kind
        if k == FALSE:
            return ctx.false
        if k == TRUE:
            continue
        if k == AND:
            for g in c.children:
                flat[g.uid] = g
        else:
            flat[c.uid] = c
    if not flat:
        return ctx.true
    if len(flat) == 1:
        r = next(iter(flat.values()))
        ctx.simplify_cache[r.uid] = r
        return r
    if _complementary(ctx, flat.values()):
        return ctx.false
    r = ctx._intern(AND, None, [flat[k] for k in sorted(flat)])
    ctx.simplify_cache[r.uid] = r
    return r


def simplify_or(ctx, children):
    flat = {}
    for c in children:
        k = c.kind
        if k == TRUE:
            return ctx.true
        if k == FALSE:
            continue
        if k == OR:
            for g in c.children:
                flat[g.uid] = g
        else:
            flat[c.uid] = c
    if not flat:
        return ctx.false
    if len(flat) == 1:
        r = next(iter(flat.values()))
        ctx.simplify_cache[r.uid] = r
        return r
    if _complementary(ctx, flat.values()):
        return ctx.true
    r = ctx._intern(OR, None, [flat[k] for k in sorted(flat)])
    ctx.simplify_cache[r.uid] = r
    return r


def _complementary(ctx, items):
    pos = set()
    neg = set()
    marks = 0
    going_on, ended = _markers(ctx)
    for g in items:
        if g.kind == PROP:
            pos.add(g.atom)
        elif g.kind == NPROP:
            neg.add(g.atom)
        elif g is going_on:
            marks |= 1
        elif g is ended:
            marks |= 2
    return marks == 3 or not pos.isdisjoint(neg)


def boolean_key(f):
    """Node of `f` in the context's abstraction BDD.

    Temporal subformulas and atoms become variables (``G(false)`` is
    the negation of ``F(true)``), so formulas with equal keys are
    propositionally equivalent and hence equivalent.
    """
    ctx = f.ctx
    cache = ctx.abs_cache
    r = cache.get(f.uid)
    if r is not None:
        return r
    bdd = ctx.abs_bdd
    k = f.kind
    if k == TRUE:
        r = 1
    elif k == FALSE:
        r = 0
    elif k == PROP or k == NPROP:
        v = bdd._mk(bdd.declare('p:' + f.atom), 0, 1)
        r = v if k == PROP else bdd._not(v)
    elif k == AND:
        r = 1
        for c in f.children:
            r = bdd._and(r, boolean_key(c))
    elif k == OR:
        r = 0
        for c in f.children:
            r = bdd._or(r, boolean_key(c))
    elif f is ctx.ended:
        r = bdd._not(boolean_key(ctx.not_ended))
    else:
        r = bdd._mk(bdd.declare(f'n:{f.uid}'), 0, 1)
    cache[f.uid] = r
    return r


def canonical(f):
    """First formula seen with the same `boolean_key` as `f`."""
    return f.ctx.abs_rep.setdefault(boolean_key(f), f)


# printing

_BINARY = (AND, OR, UNTIL, RELEASE)


def to_str(f):
    """Render `f` in the ASCII input syntax (re-parseable)."""
    cache = {}

    def wrap(g):
        s = rec(g)
        if g.kind in _BINARY and not _is_unary_form(g):
            return '(' + s + ')'
        return s

    def rec(g):
        s = cache.get(g.uid)
        if s is not None:
            return s
        k = g.kind
        if k == TRUE:
            s = 'true'
        elif k == FALSE:
            s = 'false'
        elif k == PROP:
            s = g.atom
        elif k == NPROP:
            s = '!' + g.atom
        elif k == AND:
            s = ' & '.join(wrap(c) for c in g.children)
        elif k == OR:
            s = ' | '.join(wrap(c) for c in g.children)
        elif k == NEXT:
            s = 'X(' + rec(g.child) + ')'
        elif k == WNEXT:
            s = 'N(' + rec(g.child) + ')'
        elif k == UNTIL:
            if g.left.kind == TRUE:
                s = 'F(' + rec(g.right) + ')'
            else:
                s = wrap(g.left) + ' U ' + wrap(g.right)
        else:
            if g.left.kind == FALSE:
                s = 'G(' + rec(g.right) + ')'
            else:
                s = wrap(g.left) + ' R ' + wrap(g.right)
        cache[g.uid] = s
        return s

    return rec(f)


def _is_unary_form(g):
    return ((g.kind == UNTIL and g.left.kind == TRUE) or
            (g.kind == RELEASE and g.left.kind == FALSE))
