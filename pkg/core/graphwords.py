"""
Simplicial graphs and the word calculus of graph products.

Words are tuples of vertex indices. Two words are equivalent when one can be
turned into the other by merging equal neighbouring letters and by swapping
neighbouring letters whose vertices share an edge. Every class of reduced words
has one canonical representative, the lexicographically least one.
"""

from collections import deque
from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from itertools import combinations, product
import logging
from pathlib import Path

from .conf import setting
from .exceptions import BadVertex, CapExceeded, GraphFormatError, NonUnique, VertexAbsent

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SimplicialGraph:
    n_vertices: int
    edges: frozenset = field(default_factory=frozenset)

    def __post_init__(self):
        if self.n_vertices < 1:
            raise GraphFormatError("a graph needs at least one vertex")
        normalized = set()
        for i, j in self.edges:
            if i == j:
                raise GraphFormatError(f"self-loop at vertex {i}")
            for v in (i, j):
                if not 0 <= v < self.n_vertices:
                    raise BadVertex(f"edge ({i}, {j}) leaves the vertex set 0..{self.n_vertices - 1}")
            normalized.add((min(i, j), max(i, j)))
        object.__setattr__(self, 'edges', frozenset(normalized))

    @classmethod
    def from_edges(cls, n, edges=()):
        return cls(n, frozenset(tuple(e) for e in edges))

    @classmethod
    def complete(cls, n):
        return cls(n, frozenset(combinations(range(n), 2)))

    @classmethod
    def edgeless(cls, n):
        return cls(n, frozenset())

    @classmethod
    def path(cls, n):
        return cls(n, frozenset((i, i + 1) for i in range(n - 1)))

    @classmethod
    def cycle(cls, n):
        return cls(n, frozenset((i, (i + 1) % n) for i in range(n)))

    @classmethod
    def all_graphs(cls, n):
        """Every labelled simplicial graph on ``n`` vertices."""
        pairs = list(combinations(range(n), 2))
        for mask in range(1 << len(pairs)):
            yield cls(n, frozenset(p for k, p in enumerate(pairs) if mask >> k & 1))

    @classmethod
    def parse(cls, text):
        """
        Read the graph text format: a ``n <count>`` line, then one ``e <i> <j>``
        line per edge. ``#`` starts a comment.
        """
        n = None
        edges = []
        for lineno, raw in enumerate(text.splitlines(), start=1):
            line = raw.split('#', 1)[0].strip()
            if not line:
                continue
            parts = line.split()
            try:
                if parts[0] == 'n' and len(parts) == 2 and n is None:
                    n = int(parts[1])
                elif parts[0] == 'e' and len(parts) == 3 and n is not None:
                    edges.append((int(parts[1]), int(parts[2])))
                else:
                    raise GraphFormatError(f"line {lineno}: unexpected '{line}'")
            except ValueError as exc:
                raise GraphFormatError(f"line {lineno}: {exc}") from exc
        if n is None:
            raise GraphFormatError("missing 'n <count>' line")
        return cls.from_edges(n, edges)

    @classmethod
    def load(cls, path):
        return cls.parse(Path(path).read_text())

    def to_text(self):
        lines = [f"n {self.n_vertices}"]
        lines.extend(f"e {i} {j}" for i, j in sorted(self.edges))
        return "\n".join(lines) + "\n"

    @cached_property
    def _neighbours(self):
        nbrs = [set() for _ in range(self.n_vertices)]
        for i, j in self.edges:
            nbrs[i].add(j)
            nbrs[j].add(i)
        return tuple(frozenset(s) for s in nbrs)

    def adjacent(self, u, v):
        return v in self._neighbours[u]

    def neighbours(self, v):
        return self._neighbours[v]

    def greedy_coloring(self):
        """Proper coloring: each vertex in order 0..n−1 gets the least color unused by earlier neighbours."""
        colors = []
        for v in range(self.n_vertices):
            taken = {colors[u] for u in range(v) if self.adjacent(u, v)}
            colors.append(next(c for c in range(self.n_vertices) if c not in taken))
        return tuple(colors)


@dataclass(frozen=True)
class StdForm:
    y: tuple
    c: tuple
    b: tuple
    v0: int

    @property
    def word(self):
        return self.y + self.c + (self.v0,) + self.b


def check_word(g, w):
    w = tuple(int(v) for v in w)
    for v in w:
        if not 0 <= v < g.n_vertices:
            raise BadVertex(f"letter {v} is not a vertex of a graph on {g.n_vertices} vertices")
    return w


def parse_word(text):
    text = text.strip()
    if not text:
        return ()
    return tuple(int(part) for part in text.split(','))


def format_word(w):
    return ','.join(str(v) for v in w)


def is_reduced(g, w):
    w = check_word(g, w)
    for k in range(len(w)):
        for l in range(k + 1, len(w)):
            if w[k] == w[l] and all(g.adjacent(w[k], w[p]) for p in range(k + 1, l)):
                return False
    return True


def mergeable_pair(g, vertices):
    """
    Leftmost pair (k, l) of equal letters whose intermediate letters are all
    adjacent to them, or None when the word is reduced.
    """
    for k, v in enumerate(vertices):
        for l in range(k + 1, len(vertices)):
            if vertices[l] == v:
                return k, l
            if not g.adjacent(v, vertices[l]):
                break
    return None


@lru_cache(maxsize=65536)
def _reduce(g, w):
    letters = list(w)
    while (pair := mergeable_pair(g, letters)) is not None:
        del letters[pair[0]]
    return tuple(letters)


def reduce(g, w):
    """Merge equal letters brought together by edge swaps until the word is reduced."""
    return _reduce(g, check_word(g, w))


def merge_reduce(g, letters, merge):
    """
    Reduce a word of (vertex, payload) letters. ``merge(v, p, q)`` multiplies
    two payloads at vertex v and returns None when the product is trivial, in
    which case both letters disappear.
    """
    items = list(letters)
    while (pair := mergeable_pair(g, [v for v, _ in items])) is not None:
        k, l = pair
        v = items[k][0]
        merged = merge(v, items[k][1], items[l][1])
        if merged is None:
            del items[l]
        else:
            items[l] = (v, merged)
        del items[k]
    return items


def left_movable(g, w):
    """Positions whose letter commutes with everything before it."""
    return [k for k in range(len(w)) if all(g.adjacent(w[k], w[j]) for j in range(k))]


def right_movable(g, w):
    n = len(w)
    return [k for k in range(n) if all(g.adjacent(w[k], w[j]) for j in range(k + 1, n))]


def sort_payload(g, letters):
    """
    Put a reduced word of (vertex, payload) letters into normal-form order by
    repeatedly pulling the least left-movable letter to the front.
    """
    rest = list(letters)
    out = []
    while rest:
        vertices = [v for v, _ in rest]
        k = min(left_movable(g, vertices), key=lambda i: vertices[i])
        out.append(rest.pop(k))
    return out


@lru_cache(maxsize=65536)
def _normal_form(g, w):
    return tuple(v for v, _ in sort_payload(g, [(v, None) for v in _reduce(g, w)]))


def normal_form(g, w):
    return _normal_form(g, check_word(g, w))


def equivalence_class(g, w, cap=None):
    """All words reachable from ``w`` by swapping neighbouring letters joined by an edge."""
    w = check_word(g, w)
    cap = setting('CLASS_CAP') if cap is None else cap
    seen = {w}
    queue = deque([w])
    while queue:
        u = queue.popleft()
        for i in range(len(u) - 1):
            if g.adjacent(u[i], u[i + 1]):
                swapped = u[:i] + (u[i + 1], u[i]) + u[i + 2:]
                if swapped not in seen:
                    seen.add(swapped)
                    if len(seen) > cap:
                        raise CapExceeded(f"equivalence class of {format_word(w)} exceeds {cap} words")
                    queue.append(swapped)
    return frozenset(seen)


def nc_length(g, w, v0):
    """
    Right-hand non-commutative length with respect to v0: the number of letters
    not adjacent to v0 in front of a terminal v0, or −1 when no rearrangement
    of ``w`` ends in v0.
    """
    w = check_word(g, w)
    if not 0 <= v0 < g.n_vertices:
        raise BadVertex(f"vertex {v0} is not in the graph")
    if v0 not in w:
        return -1
    last = len(w) - 1 - w[::-1].index(v0)
    if not all(g.adjacent(v0, x) for x in w[last + 1:]):
        return -1
    return sum(1 for i, x in enumerate(w) if i != last and not g.adjacent(x, v0))


def set_nc_length(g, words, v0):
    return max((nc_length(g, w, v0) for w in words), default=-1)


def truncations(g, w):
    w = check_word(g, w)
    out = set()
    for k in set(left_movable(g, w)) | set(right_movable(g, w)):
        out.add(normal_form(g, w[:k] + w[k + 1:]))
    return frozenset(out)


def complete_closure(g, words):
    """Smallest set of normal forms containing ``words`` and (), closed under truncation."""
    seen = {()}
    queue = deque()
    for w in words:
        nf = normal_form(g, w)
        if nf not in seen:
            seen.add(nf)
            queue.append(nf)
    while queue:
        for t in truncations(g, queue.popleft()):
            if t not in seen:
                seen.add(t)
                queue.append(t)
    return frozenset(seen)


def payload_truncations(g, w):
    """Truncations of a word of (vertex, payload) letters; the survivors keep their payloads."""
    vertices = [v for v, _ in w]
    out = set()
    for k in set(left_movable(g, vertices)) | set(right_movable(g, vertices)):
        out.add(tuple(sort_payload(g, w[:k] + w[k + 1:])))
    return frozenset(out)


def payload_closure(g, words):
    """Truncation closure of reduced (vertex, payload) words, in normal-form order."""
    seen = {()}
    queue = deque()
    for w in words:
        w = tuple(sort_payload(g, w))
        if w not in seen:
            seen.add(w)
            queue.append(w)
    while queue:
        for t in payload_truncations(g, queue.popleft()):
            if t not in seen:
                seen.add(t)
                queue.append(t)
    return frozenset(seen)


@lru_cache(maxsize=16384)
def _down_set(g, w):
    return complete_closure(g, [w])


def down_set(g, w):
    """{w}^⪯: everything ``w`` truncates to, including w and ()."""
    return _down_set(g, normal_form(g, w))


def precedes(g, y, x):
    return normal_form(g, y) in down_set(g, x)


def is_complete(g, words):
    words = frozenset(tuple(w) for w in words)
    if () not in words:
        return False
    if any(normal_form(g, w) != w for w in words):
        return False
    return all(truncations(g, w) <= words for w in words)


def sort_words(words):
    return sorted(words, key=lambda w: (len(w), w))


def iter_words(n_vertices, max_len):
    for length in range(max_len + 1):
        yield from product(range(n_vertices), repeat=length)


@lru_cache(maxsize=16384)
def _standard_form(g, w, v0, cap):
    top = set_nc_length(g, _down_set(g, w), v0)
    down = _down_set(g, w)
    best = None
    found = set()
    for r in sorted(equivalence_class(g, w, cap)):
        for j, letter in enumerate(r):
            if letter != v0 or nc_length(g, r[:j + 1], v0) != top:
                continue
            b_len = len(r) - j - 1
            for i in range(j + 1):
                y = r[:i]
                yv = y + (v0,)
                if not is_reduced(g, yv) or normal_form(g, yv) not in down:
                    continue
                if nc_length(g, yv, v0) != top:
                    continue
                key = (b_len, i)
                triple = (normal_form(g, y), normal_form(g, r[i:j]), normal_form(g, r[j + 1:]))
                if best is None or key < best:
                    best, found = key, {triple}
                elif key == best:
                    found.add(triple)
                break
    if len(found) != 1:
        raise NonUnique(f"{len(found)} minimal standard forms for {format_word(w)} at vertex {v0}")
    y, c, b = found.pop()
    return StdForm(y=y, c=c, b=b, v0=v0)


def standard_form(g, w, v0, cap=None):
    """
    Factor w ~ y·c·(v0)·b with b of least length such that y·c·(v0) attains the
    largest nc-length found in {w}^⪯, and y of least length such that y·(v0)
    lies in {w}^⪯ with that nc-length. Found by enumerating the class of w.
    """
    w = normal_form(g, w)
    if not 0 <= v0 < g.n_vertices:
        raise BadVertex(f"vertex {v0} is not in the graph")
    if v0 not in w:
        raise VertexAbsent(f"vertex {v0} does not occur in {format_word(w)}")
    return _standard_form(g, w, v0, setting('CLASS_CAP') if cap is None else cap)


WORD_OPERATIONS = ('reduce', 'nf', 'stdform', 'closure', 'nclen', 'truncations')


def run_operation(g, operation, word=(), words=(), v0=None):
    """Evaluate one named word operation and return a JSON-ready dict."""
    if operation == 'reduce':
        return {'word': list(reduce(g, word))}
    if operation == 'nf':
        return {'word': list(normal_form(g, word))}
    if operation == 'stdform':
        std = standard_form(g, word, v0)
        return {'y': list(std.y), 'c': list(std.c), 'v0': std.v0, 'b': list(std.b), 'word': list(std.word)}
    if operation == 'closure':
        seeds = list(words) or [word]
        return {'words': [list(w) for w in sort_words(complete_closure(g, seeds))]}
    if operation == 'nclen':
        return {'nc_length': nc_length(g, normal_form(g, word), v0)}
    if operation == 'truncations':
        return {'words': [list(w) for w in sort_words(truncations(g, reduce(g, word)))]}
    raise ValueError(f"unknown word operation '{operation}'")
