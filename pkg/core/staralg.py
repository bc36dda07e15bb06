"""
Vertex algebras with states, the algebraic graph product ⋆_Γ(A_v, φ_v) and
the graph product map Θ = ⋆_Γ θ_v.

An element of the graph product is a scalar unit component plus a sum of
elementary tensors: each term carries a reduced word in normal form, one
centered letter (φ_v(a) = 0) per position and a scalar weight.
"""

from abc import ABC, abstractmethod
from dataclasses import dataclass
from functools import cached_property, reduce as fold
import logging

import numpy as np

from . import graphwords
from .conf import setting
from .exceptions import AlgebraMismatch, BandExceeded, IncompatibleStates, SpecInvalid
from .mathcore import (
    dagger, fro_norm, is_psd, kron_all, op_norm, random_density, random_isometry, rng_from,
)

logger = logging.getLogger(__name__)

ZERO_LETTER = 1e-14


class VertexAlgebra(ABC):
    """A finite-dimensional unital *-algebra with a faithful-enough state."""

    kind = None

    @property
    @abstractmethod
    def dim(self):
        """Linear dimension."""

    @abstractmethod
    def unit(self):
        pass

    @abstractmethod
    def mul(self, a, b):
        pass

    @abstractmethod
    def adjoint(self, a):
        pass

    @abstractmethod
    def state(self, a):
        pass

    @abstractmethod
    def norm(self, a):
        """C*-norm of ``a``."""

    @abstractmethod
    def basis(self):
        pass

    @abstractmethod
    def centered_basis(self):
        """Fixed basis of ker φ; ``centered_coordinates`` expands in it."""

    @abstractmethod
    def centered_coordinates(self, a):
        pass

    @abstractmethod
    def cp_witness(self, fn):
        """Block matrix that is PSD whenever the linear map ``fn`` is completely positive."""

    @abstractmethod
    def random_element(self, rng):
        pass

    def center(self, a):
        s = complex(self.state(a))
        return a - s * self.unit(), s

    def random_centered(self, rng):
        return self.center(self.random_element(rng))[0]

    def is_zero(self, a):
        return a.size == 0 or float(np.max(np.abs(a))) <= ZERO_LETTER


class MatrixAlgebra(VertexAlgebra):
    kind = 'matrix'

    def __init__(self, d, density=None):
        self.d = d
        rho = np.eye(d, dtype=np.complex128) / d if density is None else np.asarray(density, dtype=np.complex128)
        if rho.shape != (d, d):
            raise SpecInvalid(f"density of shape {rho.shape} for M_{d}")
        if abs(np.trace(rho) - 1.0) > 1e-10 or not is_psd(rho, tol=1e-10).passed:
            raise SpecInvalid("state density must be PSD with unit trace")
        self.density = rho

    @property
    def dim(self):
        return self.d * self.d

    def unit(self):
        return np.eye(self.d, dtype=np.complex128)

    def mul(self, a, b):
        return a @ b

    def adjoint(self, a):
        return dagger(a)

    def state(self, a):
        return complex(np.trace(self.density @ a))

    def norm(self, a):
        return op_norm(a)

    def basis(self):
        out = []
        for i in range(self.d):
            for j in range(self.d):
                e = np.zeros((self.d, self.d), dtype=np.complex128)
                e[i, j] = 1.0
                out.append(e)
        return out

    def centered_basis(self):
        # E_ij − φ(E_ij)·1 for (i, j) ≠ (0, 0)
        return [e - self.state(e) * self.unit() for e in self.basis()[1:]]

    def centered_coordinates(self, a):
        # E_00 − φ(E_00)·1 = −Σ_{i≥1} (E_ii − φ(E_ii)·1), so å_00 moves onto the diagonal
        a = np.asarray(a)
        c = a.reshape(-1).copy()
        c[(self.d + 1) * np.arange(1, self.d)] -= a[0, 0]
        return c[1:]

    def cp_witness(self, fn):
        blocks = [[fn(self.basis()[i * self.d + j]) for j in range(self.d)] for i in range(self.d)]
        return np.block(blocks)

    def random_element(self, rng):
        rng = rng_from(rng)
        z = rng.standard_normal((self.d, self.d)) + 1j * rng.standard_normal((self.d, self.d))
        return z / np.sqrt(2 * self.d)


class GroupAlgebra(VertexAlgebra):
    """C*(G) of a finite group with the canonical trace; elements are coefficient vectors."""

    kind = 'group'

    def __init__(self, group):
        self.group = group

    @property
    def dim(self):
        return self.group.order

    def unit(self):
        e = np.zeros(self.group.order, dtype=np.complex128)
        e[self.group.identity] = 1.0
        return e

    def delta(self, g):
        e = np.zeros(self.group.order, dtype=np.complex128)
        e[g] = 1.0
        return e

    def mul(self, a, b):
        out = np.zeros(self.group.order, dtype=np.complex128)
        np.add.at(out, self.group.table.ravel(), np.outer(a, b).ravel())
        return out

    def adjoint(self, a):
        return np.conj(a)[self.group.inverse]

    def state(self, a):
        return complex(a[self.group.identity])

    def regular(self, a):
        n = self.group.order
        L = np.zeros((n, n), dtype=np.complex128)
        for g in range(n):
            L[self.group.table[g], np.arange(n)] += a[g]
        return L

    def norm(self, a):
        return op_norm(self.regular(a))

    def basis(self):
        return [self.delta(g) for g in range(self.group.order)]

    def centered_basis(self):
        return [self.delta(g) for g in range(self.group.order) if g != self.group.identity]

    def centered_coordinates(self, a):
        return np.delete(np.asarray(a), self.group.identity)

    def cp_witness(self, fn):
        inv, table = self.group.inverse, self.group.table
        n = self.group.order
        return np.block([[fn(self.delta(table[inv[g], h])) for h in range(n)] for g in range(n)])

    def random_element(self, rng):
        rng = rng_from(rng)
        n = self.group.order
        return (rng.standard_normal(n) + 1j * rng.standard_normal(n)) / np.sqrt(2 * n)


class LaurentAlgebra(VertexAlgebra):
    """
    Laurent polynomials in one unitary x with degrees in [−band, band] and the
    canonical trace (constant coefficient). Coefficient m sits at index m + band.
    """

    kind = 'laurent'

    def __init__(self, band=None, letter_degree=1):
        self.band = setting('LAURENT_BAND') if band is None else band
        self.letter_degree = letter_degree

    @property
    def dim(self):
        return 2 * self.band + 1

    def monomial(self, m):
        if abs(m) > self.band:
            raise BandExceeded(f"x^{m} lies outside the band ±{self.band}")
        e = np.zeros(self.dim, dtype=np.complex128)
        e[m + self.band] = 1.0
        return e

    def unit(self):
        return self.monomial(0)

    def degrees(self, a):
        return [m - self.band for m in np.flatnonzero(a)]

    def mul(self, a, b):
        full = np.convolve(a, b)
        N = self.band
        if np.any(full[:N]) or np.any(full[3 * N + 1:]):
            raise BandExceeded(f"product degree leaves the band ±{N}")
        return full[N:3 * N + 1]

    def adjoint(self, a):
        return np.conj(a[::-1])

    def state(self, a):
        return complex(a[self.band])

    def norm(self, a):
        # sup over the unit circle: coarse grid, then a fine grid around the best point
        ms = np.arange(-self.band, self.band + 1)
        grid = np.linspace(0.0, 2 * np.pi, 4096, endpoint=False)
        vals = np.abs(np.exp(1j * np.outer(grid, ms)) @ a)
        t0 = grid[int(np.argmax(vals))]
        fine = np.linspace(t0 - 2 * np.pi / 4096, t0 + 2 * np.pi / 4096, 2001)
        return float(max(vals.max(), np.abs(np.exp(1j * np.outer(fine, ms)) @ a).max()))

    def basis(self):
        return [self.monomial(m) for m in range(-self.band, self.band + 1)]

    def centered_basis(self):
        return [self.monomial(m) for m in range(-self.band, self.band + 1) if m != 0]

    def centered_coordinates(self, a):
        return np.delete(np.asarray(a), self.band)

    def cp_witness(self, fn):
        K = self.band
        return np.block([[fn(self.monomial(j - i)) for j in range(K + 1)] for i in range(K + 1)])

    def random_element(self, rng):
        rng = rng_from(rng)
        a = np.zeros(self.dim, dtype=np.complex128)
        k = self.letter_degree
        a[self.band - k:self.band + k + 1] = rng.standard_normal(2 * k + 1) + 1j * rng.standard_normal(2 * k + 1)
        return a / np.sqrt(2 * (2 * k + 1))


@dataclass(frozen=True, eq=False)
class Term:
    word: tuple
    letters: tuple
    coeff: complex

    def __len__(self):
        return len(self.word)


@dataclass(frozen=True, eq=False)
class GpElement:
    product: 'GraphProduct'
    unit_coeff: complex = 0j
    terms: tuple = ()

    def __mul__(self, other):
        return gp_mul(self, other)

    def __add__(self, other):
        return gp_add(self, other)

    @property
    def words(self):
        return {t.word for t in self.terms}


@dataclass(frozen=True, eq=False)
class GraphProduct:
    """The graph product ⋆_Γ(A_v, φ_v) of an assignment of vertex algebras."""

    graph: graphwords.SimplicialGraph
    algebras: tuple

    def __post_init__(self):
        if len(self.algebras) != self.graph.n_vertices:
            raise AlgebraMismatch(f"{len(self.algebras)} algebras for {self.graph.n_vertices} vertices")

    def compatible(self, other):
        return self is other or (
            self.graph == other.graph and all(a is b for a, b in zip(self.algebras, other.algebras))
        )

    def one(self):
        return GpElement(self, 1.0 + 0j, ())

    def scalar(self, c):
        return GpElement(self, complex(c), ())

    def letter(self, v, a):
        """The element ι_v(a) = å + φ_v(a)·1 for an arbitrary a ∈ A_v."""
        ring, s = self.algebras[v].center(np.asarray(a, dtype=np.complex128))
        terms = () if self.algebras[v].is_zero(ring) else (Term((v,), (ring,), 1.0 + 0j),)
        return GpElement(self, s, terms)

    def elementary(self, word, letters, coeff=1.0):
        """A single reduced word of centered letters, put into normal-form order."""
        word = graphwords.check_word(self.graph, word)
        if not graphwords.is_reduced(self.graph, word):
            raise AlgebraMismatch(f"word {graphwords.format_word(word)} is not reduced")
        for v, a in zip(word, letters):
            if abs(self.algebras[v].state(a)) > 1e-12 * (1.0 + fro_norm(a)):
                raise AlgebraMismatch(f"letter at vertex {v} is not centered")
        if not word:
            return self.scalar(coeff)
        items = graphwords.sort_payload(self.graph, list(zip(word, letters)))
        return GpElement(self, 0j, (Term(tuple(v for v, _ in items), tuple(a for _, a in items), complex(coeff)),))

    def word_element(self, word, letters):
        """Product ι_{w1}(a_1)⋯ι_{wn}(a_n) of arbitrary letters."""
        out = self.one()
        for v, a in zip(word, letters):
            out = gp_mul(out, self.letter(v, a))
        return out

    def reduce_items(self, items, coeff):
        """
        Expand a product of centered letters into reduced words. Each merge
        a·b at one vertex splits into (ab)˚ on the merged word plus φ(ab) on
        the word with both letters removed.
        """
        out = []
        stack = [(coeff, items)]
        while stack:
            c, items = stack.pop()
            pair = graphwords.mergeable_pair(self.graph, [v for v, _ in items])
            if pair is None:
                out.append((c, graphwords.sort_payload(self.graph, items)))
                continue
            k, l = pair
            v = items[k][0]
            A = self.algebras[v]
            ring, s = A.center(A.mul(items[k][1], items[l][1]))
            if s != 0:
                stack.append((c * s, items[:k] + items[k + 1:l] + items[l + 1:]))
            if not A.is_zero(ring):
                merged = list(items)
                merged[l] = (v, ring)
                del merged[k]
                stack.append((c, merged))
        return out

    def collect(self, unit, terms):
        buckets = {}
        for t in terms:
            if t.coeff == 0:
                continue
            key = (t.word, tuple(a.tobytes() for a in t.letters))
            if key in buckets:
                prev = buckets[key]
                buckets[key] = Term(prev.word, prev.letters, prev.coeff + t.coeff)
            else:
                buckets[key] = t
        kept = tuple(t for t in buckets.values() if t.coeff != 0)
        return GpElement(self, complex(unit), kept)

    def random_element(self, rng, n_terms=3, max_len=3):
        """Sum of products of random, uncentered letters."""
        rng = rng_from(rng)
        out = self.scalar(rng.standard_normal())
        for _ in range(n_terms):
            length = int(rng.integers(1, max_len + 1))
            word = tuple(int(v) for v in rng.integers(0, self.graph.n_vertices, size=length))
            letters = [self.algebras[v].random_element(rng) for v in word]
            out = gp_add(out, gp_scale(self.word_element(word, letters), rng.standard_normal() + 1j * rng.standard_normal()))
        return out


def _require_same(e1, e2):
    if not e1.product.compatible(e2.product):
        raise AlgebraMismatch("elements belong to different graph products")


def center(A, a):
    return A.center(np.asarray(a, dtype=np.complex128))


def gp_add(e1, e2):
    _require_same(e1, e2)
    return e1.product.collect(e1.unit_coeff + e2.unit_coeff, e1.terms + e2.terms)


def gp_scale(e, c):
    c = complex(c)
    return e.product.collect(e.unit_coeff * c, [Term(t.word, t.letters, t.coeff * c) for t in e.terms])


def gp_mul(e1, e2):
    _require_same(e1, e2)
    P = e1.product
    unit = e1.unit_coeff * e2.unit_coeff
    terms = []
    if e2.unit_coeff != 0:
        terms.extend(Term(t.word, t.letters, t.coeff * e2.unit_coeff) for t in e1.terms)
    if e1.unit_coeff != 0:
        terms.extend(Term(t.word, t.letters, t.coeff * e1.unit_coeff) for t in e2.terms)
    for t1 in e1.terms:
        for t2 in e2.terms:
            items = list(zip(t1.word + t2.word, t1.letters + t2.letters))
            for c, reduced in P.reduce_items(items, t1.coeff * t2.coeff):
                if not reduced:
                    unit += c
                else:
                    terms.append(Term(tuple(v for v, _ in reduced), tuple(a for _, a in reduced), c))
    return P.collect(unit, terms)


def gp_adjoint(e):
    P = e.product
    terms = []
    for t in e.terms:
        items = [(v, P.algebras[v].adjoint(a)) for v, a in zip(reversed(t.word), reversed(t.letters))]
        items = graphwords.sort_payload(P.graph, items)
        terms.append(Term(tuple(v for v, _ in items), tuple(a for _, a in items), np.conj(t.coeff)))
    return P.collect(np.conj(e.unit_coeff), terms)


def vacuum_state(e):
    """The graph product state ⋆φ_v: the unit coefficient of the canonical form."""
    return complex(e.unit_coeff)


def coordinates(e):
    """Expand every letter over the fixed centered bases: {(word, index tuple): coefficient}."""
    P = e.product
    out = {}
    if e.unit_coeff != 0:
        out[((), ())] = complex(e.unit_coeff)
    for t in e.terms:
        tensor = fold(np.multiply.outer, [P.algebras[v].centered_coordinates(a) for v, a in zip(t.word, t.letters)])
        for idx, val in np.ndenumerate(np.asarray(tensor)):
            if val != 0:
                key = (t.word, idx)
                out[key] = out.get(key, 0j) + t.coeff * val
    return out


def canonicalize(e):
    """Rebuild ``e`` with one term per basis tensor; a projection on representations."""
    P = e.product
    unit = 0j
    terms = []
    for (word, idx), val in sorted(coordinates(e).items(), key=lambda kv: (len(kv[0][0]), kv[0])):
        if not word:
            unit += val
            continue
        letters = tuple(P.algebras[v].centered_basis()[i] for v, i in zip(word, idx))
        terms.append(Term(word, letters, val))
    return GpElement(P, unit, tuple(terms))


def gp_distance(e1, e2):
    """Max-norm distance between the canonical coordinates of two elements."""
    _require_same(e1, e2)
    c1, c2 = coordinates(e1), coordinates(e2)
    return max((abs(c1.get(k, 0j) - c2.get(k, 0j)) for k in set(c1) | set(c2)), default=0.0)


# Vertex maps into the shared target algebra

@dataclass(frozen=True, eq=False)
class StinespringMap:
    """a ↦ I ⊗ W*(a ⊗ I_m)W ⊗ I, acting on tensor leg ``leg`` of the target."""

    isometry: np.ndarray
    d: int
    ancilla: int
    leg: int = 0
    legs: tuple = (None,)

    @cached_property
    def block_dim(self):
        return self.isometry.shape[1]

    def block(self, a):
        W = self.isometry
        return dagger(W) @ np.kron(a, np.eye(self.ancilla)) @ W

    def __call__(self, a):
        blk = self.block(a)
        if self.legs == (None,):
            return blk
        pre = int(np.prod(self.legs[:self.leg], dtype=int))
        post = int(np.prod(self.legs[self.leg + 1:], dtype=int))
        return kron_all([np.eye(pre), blk, np.eye(post)])


@dataclass(frozen=True, eq=False)
class PdMap:
    """θ_f(Σ c_g u_g) = Σ c_g f(g) for a positive-definite f on a finite group."""

    values: np.ndarray

    def __call__(self, a):
        return np.tensordot(np.asarray(a), self.values, axes=1)


@dataclass(frozen=True, eq=False)
class SzNagyMap:
    """θ(x^m) = T^m for m ≥ 0 and (T*)^−m for m < 0, extended linearly."""

    T: np.ndarray
    band: int

    @cached_property
    def powers(self):
        n = self.T.shape[0]
        out = {0: np.eye(n, dtype=np.complex128)}
        for m in range(1, self.band + 1):
            out[m] = out[m - 1] @ self.T
            out[-m] = dagger(out[m])
        return out

    def __call__(self, a):
        a = np.asarray(a)
        N = (a.size - 1) // 2
        out = np.zeros_like(self.powers[0])
        for idx in np.flatnonzero(a):
            m = int(idx) - N
            if abs(m) > self.band:
                raise BandExceeded(f"degree {m} exceeds band ±{self.band}")
            out = out + a[idx] * self.powers[m]
        return out


@dataclass(frozen=True, eq=False)
class ThetaSpec:
    """Per-vertex ucp maps θ_v: A_v → B(C^target_dim) whose ranges commute along edges."""

    product: GraphProduct
    maps: tuple
    target_dim: int
    coloring: tuple = None
    legs: tuple = None

    @property
    def graph(self):
        return self.product.graph

    def theta(self, v, a):
        return self.maps[v](a)

    def validate(self):
        eq_tol = setting('EQ_TOL')
        choi_tol = setting('CHOI_TOL')
        commute_tol = setting('COMMUTE_TOL')
        I = np.eye(self.target_dim)
        for v, (A, f) in enumerate(zip(self.product.algebras, self.maps)):
            if fro_norm(f(A.unit()) - I) > eq_tol:
                raise SpecInvalid(f"θ_{v}(1) is not the identity")
            if not is_psd(A.cp_witness(f), tol=choi_tol).passed:
                raise SpecInvalid(f"θ_{v} is not completely positive")
        for v, w in sorted(self.graph.edges):
            images_v = [self.theta(v, b) for b in self.product.algebras[v].basis()]
            images_w = [self.theta(w, b) for b in self.product.algebras[w].basis()]
            for X in images_v:
                for Y in images_w:
                    if fro_norm(X @ Y - Y @ X) > commute_tol * (1.0 + fro_norm(X) * fro_norm(Y)):
                        raise SpecInvalid(f"ranges of θ_{v} and θ_{w} do not commute")
        return self


def theta_eval(spec, e):
    """Θ(e): the unit goes to I and a reduced word a_1⋯a_n to θ(a_1)⋯θ(a_n)."""
    if not spec.product.compatible(e.product):
        raise AlgebraMismatch("element and spec use different graph products")
    out = complex(e.unit_coeff) * np.eye(spec.target_dim, dtype=np.complex128)
    for t in e.terms:
        M = t.coeff * np.eye(spec.target_dim, dtype=np.complex128)
        for v, a in zip(t.word, t.letters):
            M = M @ spec.theta(v, a)
        out = out + M
    return out


def _legs_for(coloring, blocks):
    n_colors = max(coloring) + 1 if coloring else 1
    if isinstance(blocks, int):
        return (blocks,) * n_colors
    blocks = tuple(blocks)
    return tuple(blocks[c] if c < len(blocks) else blocks[-1] for c in range(n_colors))


def random_theta(g, dims, seed, blocks=2, ancilla=None):
    """
    Random valid ThetaSpec over matrix algebras. A greedy proper coloring sends
    each vertex to a tensor leg of size ``blocks`` (an int or one size per
    color); θ_v(a) = W_v*(a ⊗ I)W_v acts on v's leg, so adjacent vertices act
    on different legs.
    """
    rng = rng_from(seed)
    n = g.n_vertices
    dims = (dims,) * n if isinstance(dims, int) else tuple(dims)
    coloring = g.greedy_coloring()
    legs = _legs_for(coloring, blocks)
    algebras = []
    maps = []
    for v in range(n):
        d, k = dims[v], legs[coloring[v]]
        m = k + 1 if ancilla is None else ancilla
        algebras.append(MatrixAlgebra(d, random_density(d, rng)))
        W = random_isometry(k, d * m, rng)
        maps.append(StinespringMap(W, d, m, leg=coloring[v], legs=legs))
    target = int(np.prod(legs, dtype=int))
    logger.debug(f"random ThetaSpec: {n} vertices, legs {legs}, target dimension {target}")
    return ThetaSpec(GraphProduct(g, tuple(algebras)), tuple(maps), target, coloring, legs)


def pullback_density(W, ancilla, sigma):
    """Density of φ = ψ∘θ for θ(a) = W*(a ⊗ I_m)W and ψ = tr(σ ·)."""
    big = W @ sigma @ dagger(W)
    d = big.shape[0] // ancilla
    return np.einsum('iaja->ij', big.reshape(d, ancilla, d, ancilla))


@dataclass(frozen=True)
class ChodaVerdict:
    passed: bool
    source_value: complex
    image_value: complex
    residual: float


def random_choda_setup(g, dims, seed, block=2):
    """
    Per-vertex ucp maps θ_v: M_d → M_k with target states ψ_v and source
    states φ_v = ψ_v∘θ_v. Returns (source product, target product, maps).
    """
    rng = rng_from(seed)
    dims = (dims,) * g.n_vertices if isinstance(dims, int) else tuple(dims)
    sources, targets, maps = [], [], []
    for v in range(g.n_vertices):
        d, m = dims[v], block + 1
        W = random_isometry(block, d * m, rng)
        sigma = random_density(block, rng)
        sources.append(MatrixAlgebra(d, pullback_density(W, m, sigma)))
        targets.append(MatrixAlgebra(block, sigma))
        maps.append(StinespringMap(W, d, m))
    return GraphProduct(g, tuple(sources)), GraphProduct(g, tuple(targets)), tuple(maps)


def choda_check(source, target, maps, e, tol=None):
    """
    Push ``e`` letterwise through the θ_v, re-expand in ⋆(B_v, ψ_v) and compare
    the target vacuum state with the source one.
    """
    tol = setting('EQ_TOL') if tol is None else tol
    for v, (A, B, f) in enumerate(zip(source.algebras, target.algebras, maps)):
        for b in A.basis():
            if abs(B.state(f(b)) - A.state(b)) > 1e-10:
                raise IncompatibleStates(f"ψ_{v}∘θ_{v} differs from φ_{v}")
    if not source.compatible(e.product):
        raise AlgebraMismatch("element does not belong to the source product")
    image = target.scalar(e.unit_coeff)
    for t in e.terms:
        pushed = target.word_element(t.word, [maps[v](a) for v, a in zip(t.word, t.letters)])
        image = gp_add(image, gp_scale(pushed, t.coeff))
    lhs, rhs = vacuum_state(e), vacuum_state(image)
    residual = abs(lhs - rhs)
    return ChodaVerdict(residual <= tol, lhs, rhs, residual)