"""Parser for the ASCII LTLf syntax and conversion to NNF.

Grammar, loosest to tightest::

    iff    := impl ('<->' iff)?
    impl   := or ('->' impl)?
    or     := and ('|' and)*
    and    := binary ('&' binary)*
    binary := unary (('U' | 'R') binary)?
    unary  := ('!' | 'X' | 'N' | 'F' | 'G') unary | primary
    primary:= 'true' | 'false' | ATOM | '(' iff ')'

``N`` is weak next.  ``#`` starts a comment that runs to end of line.
"""
import re
from dataclasses import dataclass

from isynth.errors import ParseError
from isynth.ltlf import formula as fm


@dataclass(frozen=True)
class Raw:
    """Parser output, before NNF conversion.

    `op` is one of ``true false atom not and or implies iff X N U R F G``.
    A chain ``a & b & c`` is one ``and`` node with three arguments.
    """
    op: str
    args: tuple = ()
    name: str = None

    def __str__(self):
        if self.op in ('true', 'false'):
            return self.op
        if self.op == 'atom':
            return self.name
        if self.op in ('not', 'X', 'N', 'F', 'G'):
            sym = '!' if self.op == 'not' else self.op
            return f'{sym}({self.args[0]})'
        sym = {'and': '&', 'or': '|', 'implies': '->', 'iff': '<->',
               'U': 'U', 'R': 'R'}[self.op]
        return '(' + f' {sym} '.join(map(str, self.args)) + ')'


_TOKEN_RE = re.compile(r'''
    (?P<ws>[ \t\r\n]+)
  | (?P<comment>\#[^\n]*)
  | (?P<op><->|->|[()!&|])
  | (?P<ident>[A-Za-z_](?:[A-Za-z0-9_]|-(?!>))*)
''', re.VERBOSE)

_UNARY = {'X', 'N', 'F', 'G'}
_BINARY_TEMPORAL = {'U', 'R'}


class _Lexer:

    def __init__(self, text):
        self.tokens = []
        line, col, pos = 1, 1, 0
        while pos < len(text):
            m = _TOKEN_RE.match(text, pos)
            if m is None:
                raise ParseError(f'unexpected character {text[pos]!r}',
                                 line, col)
            kind = m.lastgroup
            value = m.group()
            if kind == 'op' or kind == 'ident':
                self.tokens.append((value, line, col))
            for ch in value:
                if ch == '\n':
                    line += 1
                    col = 1
                else:
                    col += 1
            pos = m.end()
        self.tokens.append(('<eof>', line, col))
        self.i = 0

    def peek(self):
        return self.tokens[self.i][0]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def fail(self, expected):
        value, line, col = self.tokens[self.i]
        raise ParseError(f'unexpected token {value!r}', line, col, expected)


_PRIMARY_START = ('(', '!', 'X', 'N', 'F', 'G', 'true', 'false', '<atom>')


def parse(text):
    """Parse `text` into a `Raw` tree."""
    lx = _Lexer(text)
    tree = _iff(lx)
    if lx.peek() != '<eof>':
        lx.fail(('<eof>', '&', '|', '->', '<->', 'U', 'R'))
    return tree


def _iff(lx):
    left = _impl(lx)
    if lx.peek() == '<->':
        lx.take()
        return Raw('iff', (left, _iff(lx)))
    return left


def _impl(lx):
    left = _or(lx)
    if lx.peek() == '->':
        lx.take()
        return Raw('implies', (left, _impl(lx)))
    return left


def _or(lx):
    items = [_and(lx)]
    while lx.peek() == '|':
        lx.take()
        items.append(_and(lx))
    return items[0] if len(items) == 1 else Raw('or', tuple(items))


def _and(lx):
    items = [_binary(lx)]
    while lx.peek() == '&':
        lx.take()
        items.append(_binary(lx))
    return items[0] if len(items) == 1 else Raw('and', tuple(items))


def _binary(lx):
    left = _unary(lx)
    op = lx.peek()
    if op in _BINARY_TEMPORAL:
        lx.take()
        return Raw(op, (left, _binary(lx)))
    return left


def _unary(lx):
    tok = lx.peek()
    if tok == '!':
        lx.take()
        return Raw('not', (_unary(lx),))
    if tok in _UNARY:
        lx.take()
        return Raw(tok, (_unary(lx),))
    return _primary(lx)


def _primary(lx):
    tok = lx.peek()
    if tok == '(':
        lx.take()
        node = _iff(lx)
        if lx.peek() != ')':
            lx.fail((')',))
        lx.take()
        return node
    if tok in ('true', 'false'):
        lx.take()
        return Raw(tok)
    if tok in _BINARY_TEMPORAL or tok == '<eof>' or not _is_ident(tok):
        lx.fail(_PRIMARY_START)
    lx.take()
    return Raw('atom', name=tok)


def _is_ident(tok):
    return fm.ATOM_RE.match(tok) is not None and tok not in fm.KEYWORDS


def raw_atoms(raw):
    out = []
    stack = [raw]
    while stack:
        r = stack.pop()
        if r.op == 'atom':
            out.append(r.name)
        stack.extend(reversed(r.args))
    return out


def to_nnf(raw, ctx):
    """Convert `raw` into an NNF `Formula` of context `ctx`.

    Negations are pushed to the atoms using the usual dualities
    (until/release, next/weak next, eventually/always).  Atoms are
    registered in order of first occurrence.
    """
    for name in raw_atoms(raw):
        ctx.register(name)
    cache = {}

    def rec(r, neg):
        key = (id(r), neg)
        hit = cache.get(key)
        if hit is not None:
            return hit[1]
        out = _nnf(r, neg)
        # keep `r` alive so that id() stays unique
        cache[key] = (r, out)
        return out

    def _nnf(r, neg):
        op = r.op
        if op == 'true':
            return ctx.false if neg else ctx.true
        if op == 'false':
            return ctx.true if neg else ctx.false
        if op == 'atom':
            return ctx.nprop(r.name) if neg else ctx.prop(r.name)
        if op == 'not':
            return rec(r.args[0], not neg)
        if op == 'and' or op == 'or':
            items = [rec(c, neg) for c in r.args]
            if (op == 'and') != neg:
                return ctx.and_(items)
            return ctx.or_(items)
        if op == 'implies':
            # a -> b  ==  !a | b
            if neg:
                return ctx.and_(rec(r.args[0], False), rec(r.args[1], True))
            return ctx.or_(rec(r.args[0], True), rec(r.args[1], False))
        if op == 'iff':
            a, b = r.args
            if neg:
                return ctx.or_(ctx.and_(rec(a, False), rec(b, True)),
                               ctx.and_(rec(a, True), rec(b, False)))
            return ctx.or_(ctx.and_(rec(a, False), rec(b, False)),
                           ctx.and_(rec(a, True), rec(b, True)))
        if op == 'X':
            c = rec(r.args[0], neg)
            return ctx.wnext(c) if neg else ctx.next(c)
        if op == 'N':
            c = rec(r.args[0], neg)
            return ctx.next(c) if neg else ctx.wnext(c)
        if op == 'F':
            c = rec(r.args[0], neg)
            return ctx.always(c) if neg else ctx.eventually(c)
        if op == 'G':
            c = rec(r.args[0], neg)
            return ctx.eventually(c) if neg else ctx.always(c)
        if op == 'U':
            a, b = rec(r.args[0], neg), rec(r.args[1], neg)
            return ctx.release(a, b) if neg else ctx.until(a, b)
        if op == 'R':
            a, b = rec(r.args[0], neg), rec(r.args[1], neg)
            return ctx.until(a, b) if neg else ctx.release(a, b)
        raise ValueError(f'unknown operator {op!r}')

    return rec(raw, False)


def parse_formula(text, ctx, simplified=True):
    """Parse `text`, convert to NNF and (by default) simplify."""
    f = to_nnf(parse(text), ctx)
    return fm.simplify(f) if simplified else f
