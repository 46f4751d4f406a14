"""Semi-symbolic DFAs: explicit states, BDD-guarded edges.

A `Dfa` reads letters from ``2^P`` where ``P`` is its ordered
vocabulary.  The edges of a state are ``(guard, target)`` pairs whose
guards partition the alphabet.
"""
import logging
import time
from collections import deque

from isynth.errors import DfaTooLarge, FormatError, ManagerMismatch, Timeout
from isynth.bdd import BDD, FALSE, TRUE
from isynth.ltlf.formula import Context, canonical
from isynth.ltlf.semantics import as_assignment, eval_empty, prog_mask


logger = logging.getLogger(__name__)
DEFAULT_STATE_CAP = 200_000


class Dfa:
    """Deterministic finite automaton.

    @param bdd: manager owning every guard
    @param atoms: vocabulary, ordered by BDD level
    @param edges: per state, list of `(BddRef, target)` pairs
    @param labels: optional per-state diagnostics (e.g. residual formula)
    """

    def __init__(self, bdd, atoms, initial, accepting, edges, labels=None):
        self.bdd = bdd
        self.atoms = tuple(atoms)
        self.initial = initial
        self.accepting = frozenset(accepting)
        self.edges = edges
        self.labels = labels

    def __len__(self):
        return len(self.edges)

    def __repr__(self):
        return (f'<Dfa states={len(self)} initial={self.initial} '
                f'accepting={len(self.accepting)} atoms={self.atoms}>')

    @property
    def num_states(self):
        return len(self.edges)

    @property
    def states(self):
        return range(len(self.edges))

    def is_accepting(self, s):
        return s in self.accepting

    def with_initial(self, s):
        return Dfa(self.bdd, self.atoms, s, self.accepting, self.edges,
                   self.labels)

    def check(self):
        """Assert totality, determinism and valid targets."""
        n = len(self.edges)
        assert 0 <= self.initial < n
        for s, out in enumerate(self.edges):
            total = FALSE
            for g, t in out:
                assert 0 <= t < n, (s, t)
                assert self.bdd._and(total, g.node) == FALSE, s
                total = self.bdd._or(total, g.node)
            assert total == TRUE, s
        return True


def _vocabulary(bdd, atoms):
    atoms = set(atoms)
    for a in atoms:
        bdd.declare(a)
    return tuple(sorted(atoms, key=bdd.level_of))


def _check_cap(n, cap):
    if n > cap:
        raise DfaTooLarge(f'automaton exceeds {cap} states')


def _check_deadline(deadline):
    if deadline is not None and time.perf_counter() > deadline:
        raise Timeout('time budget exhausted')


# construction

def from_formula(phi, atoms=None, cap=None, deadline=None):
    """Build the DFA of NNF formula `phi` by progression.

    State 0 is a dedicated non-accepting start state, so the empty
    trace is rejected.  Every other state is a simplified residual,
    accepting iff the trace may end there.  Residuals that are equal
    as Boolean combinations of their temporal parts share a state,
    which keeps the construction finite.

    @param atoms: vocabulary; defaults to the atoms of `phi`
    @param cap: maximum number of states
    @param deadline: `time.perf_counter()` value after which to give up
    """
    ctx = phi.ctx
    bdd = ctx.bdd
    cap = DEFAULT_STATE_CAP if cap is None else cap
    if atoms is None:
        atoms = phi.atoms
    vocab = _vocabulary(bdd, atoms)
    missing = phi.atoms - set(vocab)
    if missing:
        raise ValueError(f'atoms {sorted(missing)} not in vocabulary')
    index = {}
    labels = [None]
    edges = [None]
    accepting = set()
    queue = deque()

    def state_of(res):
        s = index.get(res.uid)
        if s is None:
            s = len(labels)
            _check_cap(s + 1, cap)
            index[res.uid] = s
            labels.append(res)
            edges.append(None)
            if eval_empty(res):
                accepting.add(s)
            queue.append(s)
        return s

    def expand(psi):
        succ = _successors(psi)
        return [(bdd.ref(node), state_of(res)) for res, node in succ]

    edges[0] = expand(phi)
    while queue:
        _check_deadline(deadline)
        s = queue.popleft()
        edges[s] = expand(labels[s])
    labels[0] = phi
    return Dfa(bdd, vocab, 0, accepting, edges, labels)


def _successors(psi):
    """Group the one-step progressions of `psi` by residual.

    Enumerates the assignments of the atoms of `psi` only; returns a
    list of ``(residual, guard_node)``.
    """
    ctx = psi.ctx
    bdd = ctx.bdd
    ids = ctx.ids_of_mask(psi.mask)
    k = len(ids)

    def rec(i, mask):
        if i == k:
            res = canonical(prog_mask(psi, mask))
            return {res.uid: (res, TRUE)}
        low = rec(i + 1, mask)
        high = rec(i + 1, mask | (1 << ids[i]))
        out = {}
        for key in low.keys() | high.keys():
            res = (low.get(key) or high.get(key))[0]
            lo = low[key][1] if key in low else FALSE
            hi = high[key][1] if key in high else FALSE
            out[key] = (res, bdd._mk(ids[i], lo, hi))
        return out

    groups = rec(0, 0)
    return sorted(groups.values(), key=lambda rn: rn[1])


# basic operations

def step(A, s, w):
    """Successor of state `s` on assignment `w`."""
    w = as_assignment(w)
    ev = A.bdd.evaluate_node
    for g, t in A.edges[s]:
        if ev(g.node, w):
            return t
    raise AssertionError(f'state {s} has no edge for {sorted(w)}')


def run(A, trace, start=None):
    s = A.initial if start is None else start
    for w in trace:
        s = step(A, s, w)
    return s


def accepts(A, trace):
    return run(A, trace) in A.accepting


def progress(A, h):
    """Same automaton with the initial state moved along history `h`."""
    return A.with_initial(run(A, h))


def trim(A):
    """Restrict `A` to the states reachable from its initial state."""
    order = [A.initial]
    index = {A.initial: 0}
    i = 0
    while i < len(order):
        for _, t in A.edges[order[i]]:
            if t not in index:
                index[t] = len(order)
                order.append(t)
        i += 1
    edges = [[(g, index[t]) for g, t in A.edges[s]] for s in order]
    labels = None if A.labels is None else [A.labels[s] for s in order]
    accepting = {index[s] for s in order if s in A.accepting}
    return Dfa(A.bdd, A.atoms, 0, accepting, edges, labels)


def minimize(A):
    """Minimal DFA of `A`, in canonical breadth-first numbering.

    Moore-style partition refinement on the trimmed automaton.  The
    signature of a state is its block together with the guard leading
    into each block.  Language-equal inputs over the same manager give
    identical outputs.
    """
    A = trim(A)
    bdd = A.bdd
    n = len(A.edges)
    block = [1 if s in A.accepting else 0 for s in range(n)]
    count = len(set(block))
    while True:
        sigs = {}
        new = []
        for s in range(n):
            merged = {}
            for g, t in A.edges[s]:
                b = block[t]
                merged[b] = bdd._or(merged.get(b, FALSE), g.node)
            sig = (block[s], tuple(sorted(merged.items())))
            new.append(sigs.setdefault(sig, len(sigs)))
        block = new
        if len(sigs) == count:
            break
        count = len(sigs)
    # quotient, numbered by BFS from the initial block
    rep = {}
    for s in range(n):
        rep.setdefault(block[s], s)
    start = block[A.initial]
    order = [start]
    index = {start: 0}
    i = 0
    out_edges = []
    while i < len(order):
        b = order[i]
        s = rep[b]
        pairs = []
        merged = {}
        for g, t in A.edges[s]:
            tb = block[t]
            merged[tb] = bdd._or(merged.get(tb, FALSE), g.node)
        for tb, node in sorted(merged.items(), key=lambda kv: kv[1]):
            if tb not in index:
                index[tb] = len(order)
                order.append(tb)
            pairs.append((bdd.ref(node), index[tb]))
        out_edges.append(pairs)
        i += 1
    labels = None
    if A.labels is not None:
        labels = [A.labels[rep[b]] for b in order]
    accepting = {index[b] for b in order if rep[b] in A.accepting}
    return Dfa(bdd, A.atoms, 0, accepting, out_edges, labels)


def product(automata, cap=None, deadline=None):
    """Synchronous product; accepting iff all components accept."""
    automata = list(automata)
    if not automata:
        raise ValueError('product of an empty list')
    first = automata[0]
    bdd = first.bdd
    for A in automata[1:]:
        if A.bdd is not bdd:
            raise ManagerMismatch('automata use different BDD managers')
        if set(A.atoms) != set(first.atoms):
            raise ValueError('automata have different vocabularies')
    cap = DEFAULT_STATE_CAP if cap is None else cap
    start = tuple(A.initial for A in automata)
    index = {start: 0}
    order = [start]
    edges = []
    i = 0
    while i < len(order):
        if i % 64 == 0:
            _check_deadline(deadline)
        tup = order[i]
        combos = [(TRUE, ())]
        for A, s in zip(automata, tup):
            nxt = []
            for g0, t0 in combos:
                for g, t in A.edges[s]:
                    g1 = bdd._and(g0, g.node)
                    if g1 != FALSE:
                        nxt.append((g1, t0 + (t,)))
            combos = nxt
        out = []
        for g, t in combos:
            j = index.get(t)
            if j is None:
                j = len(order)
                _check_cap(j + 1, cap)
                index[t] = j
                order.append(t)
            out.append((bdd.ref(g), j))
        edges.append(out)
        i += 1
    accepting = {
        j for j, tup in enumerate(order)
        if all(s in A.accepting for A, s in zip(automata, tup))}
    return Dfa(bdd, first.atoms, 0, accepting, edges, list(order))


# comparisons

def transfer(A, bdd):
    """Copy `A` into manager `bdd` (variables matched by name)."""
    if A.bdd is bdd:
        return A
    for a in A.atoms:
        bdd.declare(a)
    edges = [[(A.bdd.copy(g, bdd), t) for g, t in out] for out in A.edges]
    atoms = tuple(sorted(A.atoms, key=bdd.level_of))
    return Dfa(bdd, atoms, A.initial, A.accepting, edges, A.labels)


def _canonical(A):
    return (len(A.edges), A.initial, A.accepting,
            tuple(tuple((g.node, t) for g, t in out) for out in A.edges))


def lang_equiv(A, B):
    """Whether `A` and `B` accept the same language."""
    if set(A.atoms) != set(B.atoms):
        raise ValueError('automata have different vocabularies')
    B = transfer(B, A.bdd)
    return _canonical(minimize(A)) == _canonical(minimize(B))


def reject_empty(A):
    """Copy of `A` whose fresh initial state rejects the empty trace."""
    n = len(A.edges)
    edges = list(A.edges) + [list(A.edges[A.initial])]
    labels = None if A.labels is None else list(A.labels) + [None]
    return Dfa(A.bdd, A.atoms, n, A.accepting, edges, labels)


def lang_equiv_nonempty(A, B):
    """Language equality restricted to non-empty traces."""
    return lang_equiv(reject_empty(A), reject_empty(B))


# text formats

def _cube_strings(A, guard):
    out = []
    for cube in A.bdd.cubes(guard):
        chars = []
        for a in A.atoms:
            if a not in cube:
                chars.append('-')
            else:
                chars.append('1' if cube[a] else '0')
        out.append(''.join(chars))
    return out


def export_text(A):
    lines = ['dfa v1',
             ' '.join(['atoms', *A.atoms]),
             f'states {len(A.edges)}',
             f'initial {A.initial}',
             ' '.join(['accepting', *map(str, sorted(A.accepting))])]
    for s, out in enumerate(A.edges):
        for g, t in out:
            lines.append(f'edge {s} {t} ' + ','.join(_cube_strings(A, g)))
    return '\n'.join(lines) + '\n'


def import_text(text, bdd=None):
    """Parse the `export_text` format.

    @param bdd: manager to build guards in; a fresh one by default
    """
    lines = [ln.strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln and not ln.startswith('#')]
    if not lines or lines[0] != 'dfa v1':
        raise FormatError('missing header "dfa v1"')

    def field(i, name):
        if i >= len(lines) or lines[i].split()[0] != name:
            raise FormatError(f'expected "{name}" record at line {i + 1}')
        return lines[i].split()[1:]

    atoms = field(1, 'atoms')
    if len(set(atoms)) != len(atoms):
        raise FormatError('duplicate atoms')
    try:
        (n,) = map(int, field(2, 'states'))
        (initial,) = map(int, field(3, 'initial'))
        accepting = set(map(int, field(4, 'accepting')))
    except ValueError:
        raise FormatError('malformed header record') from None
    if n < 1 or not 0 <= initial < n or any(not 0 <= s < n for s in accepting):
        raise FormatError('state id out of range')
    if bdd is None:
        bdd = Context(atoms).bdd
    for a in atoms:
        bdd.declare(a)
    edges = [[] for _ in range(n)]
    for ln in lines[5:]:
        parts = ln.split()
        if len(parts) != 4 or parts[0] != 'edge':
            raise FormatError(f'malformed edge record {ln!r}')
        try:
            src, dst = int(parts[1]), int(parts[2])
        except ValueError:
            raise FormatError(f'malformed edge record {ln!r}') from None
        if not (0 <= src < n and 0 <= dst < n):
            raise FormatError(f'state id out of range in {ln!r}')
        guard = FALSE
        for cube in parts[3].split(','):
            if len(cube) != len(atoms) or set(cube) - set('01-'):
                raise FormatError(f'malformed cube {cube!r}')
            values = {a: c == '1' for a, c in zip(atoms, cube) if c != '-'}
            guard = bdd._or(guard, bdd.cube(values).node)
        edges[src].append((bdd.ref(guard), dst))
    for s, out in enumerate(edges):
        total = FALSE
        for g, _ in out:
            if bdd._and(total, g.node) != FALSE:
                raise FormatError(f'overlapping guards at state {s}')
            total = bdd._or(total, g.node)
        if total != TRUE:
            raise FormatError(f'guards of state {s} are not total')
    vocab = tuple(sorted(atoms, key=bdd.level_of))
    return Dfa(bdd, vocab, initial, accepting, edges)


def export_dot(A):
    lines = ['digraph dfa {', '  rankdir=LR;', '  node [shape=circle];',
             '  init [shape=point];']
    for s in range(len(A.edges)):
        shape = 'doublecircle' if s in A.accepting else 'circle'
        lines.append(f'  {s} [shape={shape}];')
    lines.append(f'  init -> {A.initial};')
    for s, out in enumerate(A.edges):
        for g, t in out:
            label = ' | '.join(_cube_strings(A, g))
            lines.append(f'  {s} -> {t} [label="{label}"];')
    lines.append('}')
    return '\n'.join(lines) + '\n'
