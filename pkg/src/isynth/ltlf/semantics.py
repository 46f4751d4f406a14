"""Finite-trace semantics and formula progression."""
from isynth.errors import EmptyTraceError
from isynth.ltlf import formula as fm
from isynth.ltlf.formula import (
    TRUE, FALSE, PROP, NPROP, AND, OR, NEXT, WNEXT, UNTIL, RELEASE)


def as_assignment(w):
    """Normalize one trace step to a frozenset of true atom names."""
    if isinstance(w, frozenset):
        return w
    if isinstance(w, dict):
        return frozenset(k for k, v in w.items() if v)
    return frozenset(w)


def as_trace(trace):
    return tuple(as_assignment(w) for w in trace)


def eval_trace(trace, f):
    """Return whether `trace` satisfies `f` at position 0."""
    trace = as_trace(trace)
    n = len(trace)
    if n == 0:
        raise EmptyTraceError('LTLf formulas are evaluated on non-empty traces')
    memo = {}

    def sat(g, i):
        key = (g.uid, i)
        r = memo.get(key)
        if r is not None:
            return r
        k = g.kind
        if k == TRUE:
            r = True
        elif k == FALSE:
            r = False
        elif k == PROP:
            r = g.atom in trace[i]
        elif k == NPROP:
            r = g.atom not in trace[i]
        elif k == AND:
            r = all(sat(c, i) for c in g.children)
        elif k == OR:
            r = any(sat(c, i) for c in g.children)
        elif k == NEXT:
            r = i < n - 1 and sat(g.child, i + 1)
        elif k == WNEXT:
            r = i >= n - 1 or sat(g.child, i + 1)
        elif k == UNTIL:
            r = False
            for j in range(i, n):
                if sat(g.right, j):
                    r = True
                    break
                if not sat(g.left, j):
                    break
        else:
            # release: some j with left at j and right on [i, j],
            # or right everywhere from i
            r = True
            for j in range(i, n):
                if not sat(g.right, j):
                    r = False
                    break
                if sat(g.left, j):
                    break
        memo[key] = r
        return r

    return sat(f, 0)


def eval_empty(f):
    """Whether residual `f` is satisfied if the trace ends now."""
    cache = f.ctx.empty_cache
    r = cache.get(f.uid)
    if r is not None:
        return r
    k = f.kind
    if k == TRUE or k == WNEXT or k == RELEASE:
        r = True
    elif k in (FALSE, PROP, NPROP, NEXT, UNTIL):
        r = False
    elif k == AND:
        r = all(eval_empty(c) for c in f.children)
    else:
        r = any(eval_empty(c) for c in f.children)
    cache[f.uid] = r
    return r


def prog_step(f, w, simplified=True):
    """Progress `f` through one assignment `w` (iterable of true atoms)."""
    ctx = f.ctx
    mask = ctx.mask_of(as_assignment(w))
    if simplified:
        return prog_mask(f, mask)
    return _prog_raw(f, mask)


def prog_trace(f, trace, simplified=True):
    """Left fold of `prog_step` over `trace`; the empty trace returns `f`."""
    for w in trace:
        f = prog_step(f, w, simplified)
    return f


def prog_mask(f, mask):
    """Simplified progression with the step given as an atom-id bitmask."""
    ctx = f.ctx
    key = (f.uid, mask & f.mask)
    cache = ctx.prog_cache
    r = cache.get(key)
    if r is not None:
        return r
    k = f.kind
    if k == TRUE or k == FALSE:
        r = f
    elif k == PROP:
        r = ctx.true if mask & f.mask else ctx.false
    elif k == NPROP:
        r = ctx.false if mask & f.mask else ctx.true
    elif k == AND:
        r = fm.simplify_and(ctx, [prog_mask(c, mask) for c in f.children])
    elif k == OR:
        r = fm.simplify_or(ctx, [prog_mask(c, mask) for c in f.children])
    elif k == NEXT:
        r = fm.simplify_and(ctx, [fm.simplify(f.child), ctx.not_ended])
    elif k == WNEXT:
        r = fm.simplify_or(ctx, [fm.simplify(f.child), ctx.ended])
    elif k == UNTIL:
        # prog(b) | (prog(a) & (a U b) & F(true))
        again = fm.simplify_and(ctx, [fm.simplify(f), ctx.not_ended])
        r = fm.simplify_or(ctx, [
            prog_mask(f.right, mask),
            fm.simplify_and(ctx, [prog_mask(f.left, mask), again])])
    else:
        # prog(b) & (prog(a) | (a R b) | G(false))
        again = fm.simplify_or(ctx, [fm.simplify(f), ctx.ended])
        r = fm.simplify_and(ctx, [
            prog_mask(f.right, mask),
            fm.simplify_or(ctx, [prog_mask(f.left, mask), again])])
    cache[key] = r
    return r


def _prog_raw(f, mask):
    ctx = f.ctx
    key = (f.uid, mask & f.mask)
    cache = ctx.prog_raw_cache
    r = cache.get(key)
    if r is not None:
        return r
    k = f.kind
    if k == TRUE or k == FALSE:
        r = f
    elif k == PROP:
        r = ctx.true if mask & f.mask else ctx.false
    elif k == NPROP:
        r = ctx.false if mask & f.mask else ctx.true
    elif k == AND:
        r = ctx.and_([_prog_raw(c, mask) for c in f.children])
    elif k == OR:
        r = ctx.or_([_prog_raw(c, mask) for c in f.children])
    elif k == NEXT:
        r = ctx.and_(f.child, ctx.not_ended)
    elif k == WNEXT:
        r = ctx.or_(f.child, ctx.ended)
    elif k == UNTIL:
        r = ctx.or_(_prog_raw(f.right, mask),
                    ctx.and_(_prog_raw(f.left, mask),
                             ctx.and_(f, ctx.not_ended)))
    else:
        r = ctx.and_(_prog_raw(f.right, mask),
                     ctx.or_(_prog_raw(f.left, mask),
                             ctx.or_(f, ctx.ended)))
    cache[key] = r
    return r
