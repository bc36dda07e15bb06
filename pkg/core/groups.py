"""Finite groups, their graph products, and graph products of positive-definite functions."""

from collections import deque
from dataclasses import dataclass
from functools import cached_property
from itertools import permutations
import logging

import numpy as np

from . import graphwords
from .conf import setting
from .exceptions import AlgebraMismatch, SizeCap, SpecInvalid
from .mathcore import Verdict, dagger, fro_norm, is_psd, kron_all, random_isometry, rng_from
from .staralg import GraphProduct, GroupAlgebra, PdMap, ThetaSpec, gp_adjoint, gp_mul, theta_eval

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class FiniteGroup:
    name: str
    table: np.ndarray
    identity: int = 0

    def __post_init__(self):
        n = self.order
        t = self.table
        if t.shape != (n, n) or t.min() < 0 or t.max() >= n:
            raise SpecInvalid(f"{self.name}: Cayley table must be {n}×{n} over 0..{n - 1}")
        if not (np.array_equal(t[self.identity], np.arange(n)) and np.array_equal(t[:, self.identity], np.arange(n))):
            raise SpecInvalid(f"{self.name}: {self.identity} is not an identity")
        if not np.array_equal(t[t], t[:, t]):
            raise SpecInvalid(f"{self.name}: multiplication is not associative")
        if any((t[g] == self.identity).sum() != 1 for g in range(n)):
            raise SpecInvalid(f"{self.name}: some element has no unique inverse")

    @property
    def order(self):
        return self.table.shape[0]

    @cached_property
    def inverse(self):
        return np.array([int(np.flatnonzero(self.table[g] == self.identity)[0]) for g in range(self.order)])

    def mul(self, g, h):
        return int(self.table[g, h])

    @classmethod
    def cyclic(cls, k):
        r = np.arange(k)
        return cls(f"cyclic:{k}", (r[:, None] + r[None, :]) % k)

    @classmethod
    def symmetric(cls, n=3):
        perms = list(permutations(range(n)))
        pos = {p: i for i, p in enumerate(perms)}
        # (p·q)(i) = p(q(i))
        table = np.array([[pos[tuple(p[q[i]] for i in range(n))] for q in perms] for p in perms])
        return cls(f"sym:{n}", table)

    @classmethod
    def parse(cls, text):
        kind, _, arg = text.strip().partition(':')
        try:
            k = int(arg)
        except ValueError:
            raise SpecInvalid(f"bad group spec '{text}'") from None
        if kind == 'cyclic' and k >= 1:
            return cls.cyclic(k)
        if kind == 'sym' and k == 3:
            return cls.symmetric(3)
        raise SpecInvalid(f"unknown group spec '{text}'; use cyclic:k or sym:3")

    def regular(self, g):
        """Permutation matrix of left translation by g."""
        n = self.order
        P = np.zeros((n, n))
        P[self.table[g], np.arange(n)] = 1.0
        return P


@dataclass(frozen=True, eq=False)
class GraphGroup:
    """The graph product of finite groups ⋆_Γ G_v."""

    graph: graphwords.SimplicialGraph
    groups: tuple

    def __post_init__(self):
        if len(self.groups) != self.graph.n_vertices:
            raise AlgebraMismatch(f"{len(self.groups)} groups for {self.graph.n_vertices} vertices")

    def identity(self):
        return GpGroupElement(self, ())

    def generators(self):
        return [GpGroupElement(self, ((v, g),)) for v, G in enumerate(self.groups) for g in range(G.order) if g != G.identity]

    def element(self, letters):
        """Normal form of an arbitrary sequence of (vertex, group element) letters."""
        return GpGroupElement(self, self._normalize(letters))

    def _merge(self, v, p, q):
        G = self.groups[v]
        r = G.mul(p, q)
        return None if r == G.identity else r

    def _normalize(self, letters):
        items = [(v, g) for v, g in letters if g != self.groups[v].identity]
        items = graphwords.merge_reduce(self.graph, items, self._merge)
        return tuple(graphwords.sort_payload(self.graph, items))


@dataclass(frozen=True)
class GpGroupElement:
    group: GraphGroup
    letters: tuple

    @property
    def word(self):
        return tuple(v for v, _ in self.letters)

    def __len__(self):
        return len(self.letters)

    def __mul__(self, other):
        return gp_group_mul(self, other)

    def inverse(self):
        return self.group.element([(v, int(self.group.groups[v].inverse[g])) for v, g in reversed(self.letters)])

    def __repr__(self):
        return '·'.join(f"{g}@{v}" for v, g in self.letters) or 'e'


def gp_group_mul(a, b):
    if a.group is not b.group:
        raise AlgebraMismatch("elements of different graph products of groups")
    return a.group.element(a.letters + b.letters)


def ball(G, radius, cap=None):
    """All elements of normal-form length ≤ radius, identity first, then by length."""
    cap = setting('BALL_CAP') if cap is None else cap
    e = G.identity()
    seen = {e.letters: e}
    frontier = deque([e])
    gens = G.generators()
    for _ in range(radius):
        nxt = deque()
        for x in frontier:
            for s in gens:
                y = gp_group_mul(x, s)
                if y.letters not in seen:
                    seen[y.letters] = y
                    nxt.append(y)
                    if len(seen) > cap:
                        raise SizeCap(f"ball of radius {radius} exceeds {cap} elements")
        frontier = nxt
    return sorted(seen.values(), key=lambda x: (len(x), x.letters))


@dataclass(frozen=True, eq=False)
class PdFunction:
    """f: G → M_D with f(e) = I, stored as an array of shape (|G|, D, D)."""

    group: FiniteGroup
    values: np.ndarray

    @property
    def dim(self):
        return self.values.shape[1]

    def __call__(self, g):
        return self.values[g]

    def gram(self):
        G = self.group
        return np.block([[self.values[G.table[G.inverse[g], h]] for h in range(G.order)] for g in range(G.order)])

    def validate(self, tol=None):
        tol = setting('CHOI_TOL') if tol is None else tol
        if fro_norm(self.values[self.group.identity] - np.eye(self.dim)) > 1e-10:
            raise SpecInvalid("f(e) is not the identity")
        if not is_psd(self.gram(), tol=tol).passed:
            raise SpecInvalid(f"f is not positive definite on {self.group.name}")
        return self


def random_pd(G, D, seed, legs=None, leg=0):
    """
    f(g) = W*(λ(g) ⊗ I_D)W for the left regular representation λ and a random
    isometry W. With ``legs`` the D×D values are placed on tensor leg ``leg``.
    """
    rng = rng_from(seed)
    W = random_isometry(D, G.order * D, rng)
    blocks = [dagger(W) @ np.kron(G.regular(g), np.eye(D)) @ W for g in range(G.order)]
    if legs is not None:
        pre = int(np.prod(legs[:leg], dtype=int))
        post = int(np.prod(legs[leg + 1:], dtype=int))
        blocks = [kron_all([np.eye(pre), b, np.eye(post)]) for b in blocks]
    return PdFunction(G, np.array(blocks))


@dataclass(frozen=True, eq=False)
class PdFamily:
    group: GraphGroup
    functions: tuple

    @property
    def dim(self):
        return self.functions[0].dim

    def validate(self):
        for f in self.functions:
            f.validate()
        for v, w in sorted(self.group.graph.edges):
            for X in self.functions[v].values:
                for Y in self.functions[w].values:
                    if fro_norm(X @ Y - Y @ X) > setting('COMMUTE_TOL') * (1.0 + fro_norm(X) * fro_norm(Y)):
                        raise SpecInvalid(f"ranges of f_{v} and f_{w} do not commute")
        return self


def random_pd_family(G, block, seed):
    """Matrix-valued family with commuting ranges along edges: each vertex acts on the tensor leg of its color."""
    rng = rng_from(seed)
    g = G.graph
    coloring = g.greedy_coloring()
    if block == 1:
        legs = (1,)
    else:
        legs = (block,) * (max(coloring) + 1)
    fns = tuple(
        random_pd(G.groups[v], block, rng, legs=legs, leg=coloring[v] if block > 1 else 0)
        for v in range(g.n_vertices)
    )
    return PdFamily(G, fns)


def gp_pd_eval(F, x):
    """(⋆f_v)(g_1⋯g_n) = f_{v1}(g_1)⋯f_{vn}(g_n) over the normal-form letters."""
    out = np.eye(F.dim, dtype=np.complex128)
    for v, g in x.letters:
        out = out @ F.functions[v](g)
    return out


def pd_gram(F, sample):
    n = F.dim
    N = len(sample)
    M = np.zeros((N * n, N * n), dtype=np.complex128)
    for i, a in enumerate(sample):
        ai = a.inverse()
        for j, b in enumerate(sample):
            M[i * n:(i + 1) * n, j * n:(j + 1) * n] = gp_pd_eval(F, gp_group_mul(ai, b))
    return M


def check_gp_pd(F, sample):
    """[F(g_i⁻¹g_j)] ≥ 0 over a finite sample."""
    M = pd_gram(F, sample)
    verdict = is_psd(M)
    return Verdict(verdict.passed, verdict.residual, verdict.tol, {
        'size': len(sample), 'min_eigenvalue': verdict.min_eigenvalue,
    })


def pd_theta_spec(F):
    """ThetaSpec over the group algebras C*(G_v) with θ_v(u_g) = f_v(g) and canonical traces."""
    product = GraphProduct(F.group.graph, tuple(GroupAlgebra(G) for G in F.group.groups))
    maps = tuple(PdMap(f.values) for f in F.functions)
    return ThetaSpec(product, maps, F.dim)


def group_element_in(product, x):
    """u_x = u_{g1}⋯u_{gn} in the graph product of group algebras."""
    letters = [product.algebras[v].delta(g) for v, g in x.letters]
    return product.elementary(x.word, letters)


def check_theta_agreement(F, sample):
    """Θ(u_a* u_b) computed in ⋆C*(G_v) equals (⋆f_v)(a⁻¹b) for all sample pairs."""
    spec = pd_theta_spec(F)
    n = F.dim
    elements = [group_element_in(spec.product, x) for x in sample]
    M = pd_gram(F, sample)
    worst = 0.0
    for i, a in enumerate(elements):
        ai = gp_adjoint(a)
        for j, b in enumerate(elements):
            blk = theta_eval(spec, gp_mul(ai, b))
            worst = max(worst, fro_norm(blk - M[i * n:(i + 1) * n, j * n:(j + 1) * n]))
    tol = setting('EQ_TOL')
    return Verdict(worst <= tol, worst, tol, {'size': len(sample)})
