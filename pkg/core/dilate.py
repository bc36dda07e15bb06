"""
Unitary dilations of contractions and their graph product versions.

Vertex algebras here are banded Laurent polynomials in one unitary x_v with
the canonical trace; θ_v(x^m) = T_v^m for m ≥ 0 and (T_v*)^−m for m < 0.
"""

from collections import deque
from dataclasses import dataclass
import logging

import numpy as np

from . import graphwords
from .conf import setting
from .exceptions import HypothesisNotMet, NotContraction, NotDoublyCommuting, SizeCap
from .fock import TruncatedFock, apply_word
from .mathcore import Verdict, dagger, fro_norm, kron_all, op_norm, psd_sqrt, random_contraction, rng_from
from .staralg import GraphProduct, LaurentAlgebra, SzNagyMap, ThetaSpec
from .verify import WordFamily, concat_operator, factor_gram, gram, gram_of_elements

logger = logging.getLogger(__name__)


def check_contraction(T):
    T = np.asarray(T, dtype=np.complex128)
    norm = op_norm(T)
    if norm > 1.0 + 1e-12:
        raise NotContraction(f"‖T‖ = {norm:.6f} > 1")
    return T


def defect(T):
    """D_T = (I − T*T)^{1/2}."""
    return psd_sqrt(np.eye(T.shape[1]) - dagger(T) @ T)


def halmos(T):
    """U = [[T, D_T*], [D_T, −T*]]."""
    T = check_contraction(T)
    return np.block([[T, defect(dagger(T))], [defect(T), -dagger(T)]])


@dataclass(frozen=True, eq=False)
class NDilation:
    U: np.ndarray
    n: int
    degree: int

    def compression(self, k):
        return np.linalg.matrix_power(self.U, k)[:self.n, :self.n]

    def unitarity_residual(self):
        return fro_norm(dagger(self.U) @ self.U - np.eye(self.U.shape[0]))

    def power_residual(self, T):
        return max(fro_norm(self.compression(k) - np.linalg.matrix_power(T, k)) for k in range(self.degree + 1))


def egervary(T, N):
    """
    Unitary on H^{N+1} whose corner compressions reproduce T^k for 0 ≤ k ≤ N.
    Rows: [T 0 … 0 D_T*], [D_T 0 … 0 −T*], then a shift of the middle copies.
    """
    if N < 1:
        raise HypothesisNotMet(f"dilation degree must be at least 1, got {N}")
    T = check_contraction(T)
    n = T.shape[0]
    I = np.eye(n)
    blocks = [[np.zeros((n, n), dtype=np.complex128) for _ in range(N + 1)] for _ in range(N + 1)]
    blocks[0][0] = T
    blocks[0][N] = defect(dagger(T))
    blocks[1][0] = defect(T)
    blocks[1][N] = -dagger(T)
    for k in range(2, N + 1):
        blocks[k][k - 1] = I
    dil = NDilation(np.block(blocks), n, N)
    logger.debug(f"degree {N} dilation: unitarity residual {dil.unitarity_residual():.2e}")
    return dil


def szn_theta(T, band=None):
    band = setting('LAURENT_BAND') if band is None else band
    return SzNagyMap(check_contraction(T), band)


def check_doubly_commuting(graph, contractions, tol=1e-10):
    for v, w in sorted(graph.edges):
        A, B = contractions[v], contractions[w]
        worst = max(fro_norm(A @ B - B @ A), fro_norm(dagger(A) @ B - B @ dagger(A)))
        if worst > tol:
            raise NotDoublyCommuting(f"T_{v} and T_{w} do not doubly commute ({worst:.2e})")


def random_doubly_commuting(graph, block, seed):
    """Contractions on tensor legs chosen by a proper coloring; adjacent vertices never share a leg."""
    rng = rng_from(seed)
    coloring = graph.greedy_coloring()
    legs = (block,) * (max(coloring) + 1)
    out = []
    for v in range(graph.n_vertices):
        c = coloring[v]
        t = random_contraction(block, rng)
        pre = int(np.prod(legs[:c], dtype=int))
        post = int(np.prod(legs[c + 1:], dtype=int))
        out.append(kron_all([np.eye(pre), t, np.eye(post)]))
    return tuple(out)


def dilation_spec(graph, contractions, band=None):
    band = setting('LAURENT_BAND') if band is None else band
    contractions = [check_contraction(T) for T in contractions]
    check_doubly_commuting(graph, contractions)
    algebras = tuple(LaurentAlgebra(band) for _ in range(graph.n_vertices))
    maps = tuple(SzNagyMap(T, band) for T in contractions)
    return ThetaSpec(GraphProduct(graph, algebras), maps, contractions[0].shape[0])


def check_dilation_gram(graph, contractions, words, seed=0, band=None):
    """Gram positivity of ⋆θ_v over the complete closure of ``words``, letters centered Laurent polynomials of degree 1."""
    spec = dilation_spec(graph, contractions, band)
    fam = WordFamily.from_words(spec.product, words, seed)
    report = gram(spec, fam)
    return report, Verdict(report.passed, report.verdict.residual, report.verdict.tol, {
        'words': len(fam.words), 'lambda_min': report.lambda_min,
    })


# ⋆_Γ ℤ: elements are normal-form tuples of (vertex, nonzero power)

def _merge_power(v, p, q):
    return None if p + q == 0 else p + q


def monomial_mul(graph, a, b):
    items = graphwords.merge_reduce(graph, list(a) + list(b), _merge_power)
    return tuple(graphwords.sort_payload(graph, items))


def monomial_ball(graph, radius, cap=None):
    """Elements of ⋆_Γ ℤ of word length ≤ radius in the generators x_v^{±1}."""
    cap = setting('BALL_CAP') if cap is None else cap
    seen = {(): 0}
    frontier = deque([()])
    gens = [((v, s),) for v in range(graph.n_vertices) for s in (1, -1)]
    for depth in range(1, radius + 1):
        nxt = deque()
        for x in frontier:
            for s in gens:
                y = monomial_mul(graph, s, x)
                if y not in seen:
                    seen[y] = depth
                    nxt.append(y)
        if len(seen) > cap:
            raise SizeCap(f"ball of radius {radius} exceeds {cap} elements")
        frontier = nxt
    return sorted(seen, key=lambda x: (seen[x], x))


def monomial_element(product, x):
    return product.elementary(tuple(v for v, _ in x), [product.algebras[v].monomial(m) for v, m in x])


def evaluate_polynomial(contractions, poly):
    """p(T) for p given as (coefficient, word) pairs; word letters are generators x_v."""
    n = contractions[0].shape[0]
    out = np.zeros((n, n), dtype=np.complex128)
    for coeff, word in poly:
        M = np.eye(n, dtype=np.complex128)
        for v in word:
            M = M @ contractions[v]
        out = out + coeff * M
    return out


@dataclass(frozen=True, eq=False)
class VnReport:
    norm_pT: float
    norm_pL: float
    compression_residual: float
    translation_norms: dict
    verdict: Verdict


def vn_surrogate(graph, contractions, poly, radius=None, band=None):
    """
    Build the concatenation space over a ball S of ⋆_Γ ℤ from the Gram
    [Θ(u_s*u_t)], with translations L_v: ξ⊗e_s ↦ ξ⊗e_{x_v s} (defined where
    x_v s ∈ S). Then p(T) = V₁* p(L) V₁, so ‖p(T)‖ ≤ ‖p(L)‖.
    """
    degree = max((len(w) for _, w in poly), default=0)
    radius = degree if radius is None else radius
    if radius < degree:
        raise HypothesisNotMet("ball radius is below the polynomial degree")
    spec = dilation_spec(graph, contractions, band)
    S = monomial_ball(graph, radius)
    index = {s: i for i, s in enumerate(S)}
    report = gram_of_elements(spec, tuple(S), [monomial_element(spec.product, s) for s in S])
    R, _ = factor_gram(report)
    n = report.block
    scale = op_norm(report.matrix)
    L = {}
    for v in range(graph.n_vertices):
        domain = [s for s in S if monomial_mul(graph, ((v, 1),), s) in index]
        images = [index[monomial_mul(graph, ((v, 1),), s)] for s in domain]
        L[v] = concat_operator(R, [index[s] for s in domain], images, n, scale, tuple(domain))
    r = R.shape[0]
    pL = np.zeros((r, r), dtype=np.complex128)
    for coeff, word in poly:
        M = np.eye(r, dtype=np.complex128)
        for v in word:
            M = M @ L[v].matrix
        pL = pL + coeff * M
    V1 = R[:, :n]
    pT = evaluate_polynomial(contractions, poly)
    compression = fro_norm(dagger(V1) @ pL @ V1 - pT) / (1.0 + fro_norm(pT))
    norm_pT, norm_pL = op_norm(pT), op_norm(pL)
    norms = {v: op_norm(op.matrix) for v, op in L.items()}
    slack = setting('LX_SLACK')
    ok = (norm_pT <= norm_pL * (1.0 + slack) + 1e-12 and compression <= setting('COMPRESSION_TOL')
          and all(x <= 1.0 + slack for x in norms.values()))
    verdict = Verdict(ok, max(compression, max(0.0, norm_pT - norm_pL)), setting('COMPRESSION_TOL'), {
        'norm_pT': norm_pT, 'norm_pL': norm_pL, 'ball': len(S),
    })
    return VnReport(norm_pT, norm_pL, compression, norms, verdict)


def random_polynomial(graph, rng, degree=3, terms=3):
    rng = rng_from(rng)
    out = []
    for _ in range(terms):
        length = int(rng.integers(1, degree + 1))
        word = tuple(int(v) for v in rng.integers(0, graph.n_vertices, size=length))
        out.append((complex(rng.standard_normal(), rng.standard_normal()), word))
    return out


class IndependentContractions:
    """
    T_v = λ_v(t_v) on a truncated Fock space: Γ-independent for the vacuum
    state and doubly commuting along edges.
    """

    def __init__(self, graph, dim, seed, cutoff=None):
        rng = rng_from(seed)
        self.fock = TruncatedFock(graph, dim, cutoff)
        self.local = tuple(random_contraction(dim, rng) for _ in range(graph.n_vertices))

    def image(self, v, a):
        """θ_v(a) as an operator on H_v: Σ a_m t^m with t^−m read as (t*)^m."""
        t = self.local[v]
        N = (len(a) - 1) // 2
        out = np.zeros_like(t)
        for idx in np.flatnonzero(a):
            m = idx - N
            out = out + a[idx] * np.linalg.matrix_power(t if m >= 0 else dagger(t), abs(m))
        return out

    def state_of(self, v, a):
        """φ(θ_v(a)) for the vacuum state: ⟨θ_v(a)ξ, ξ⟩."""
        return complex(self.image(v, a)[0, 0])


def _independence_word(system, word):
    g = system.fock.graph
    word = tuple(word)
    if not graphwords.is_reduced(g, word):
        raise HypothesisNotMet(f"word {graphwords.format_word(word)} is not reduced")
    if len(word) >= system.fock.cutoff:
        raise HypothesisNotMet(f"word of length {len(word)} needs a Fock cutoff above {len(word)}")
    return word


def check_gp_independence_of_dilation(system, word, seed, band=None):
    """
    For a reduced word and Laurent letters a_k centered for φ∘θ, the moment
    ⟨θ_{v_1}(a_1)⋯θ_{v_m}(a_m)Ω, Ω⟩ = φ(Θ(a_1⋯a_m)) vanishes.
    """
    word = _independence_word(system, word)
    rng = rng_from(seed)
    A = LaurentAlgebra(band)
    images = []
    for v in word:
        a = A.random_element(rng)
        a = a - system.state_of(v, a) * A.unit()
        images.append((v, system.image(v, a)))
    value = complex(apply_word(system.fock, images)[0])
    tol = setting('EQ_TOL')
    return Verdict(abs(value) <= tol, abs(value), tol, {'word': list(word), 'moment': [value.real, value.imag]})


def centered_degree_one(A, tau, rng):
    """α x + β x⁻¹ with zero trace and α τ + β τ̄ = 0, τ the state of x under φ∘θ."""
    alpha = complex(rng.standard_normal(), rng.standard_normal())
    if abs(tau) > 1e-12:
        beta = -alpha * tau / np.conj(tau)
    else:
        beta = complex(rng.standard_normal(), rng.standard_normal())
    return alpha * A.monomial(1) + beta * A.monomial(-1)


def check_gp_independence_surrogate(system, word, seed, band=None):
    """
    The same moment through the concatenation space: over the set S of suffixes
    x_{v_k}^{±1}⋯x_{v_m}^{±1} build translations L_{v,±} from the Gram
    [Θ(u_s*u_t)], then V₁*a_1(L)⋯a_m(L)V₁ = Θ(a_1⋯a_m) and its vacuum entry
    vanishes for letters centered both for the trace and for φ∘θ.
    """
    word = _independence_word(system, word)
    g = system.fock.graph
    rng = rng_from(seed)
    contractions = [system.fock.lam(v, system.local[v]).dense() for v in range(g.n_vertices)]
    try:
        spec = dilation_spec(g, contractions, band)
    except NotDoublyCommuting as e:
        raise HypothesisNotMet(f"truncated contractions do not doubly commute: {e}") from None
    A = spec.product.algebras[0]
    letters = [centered_degree_one(A, system.local[v][0, 0], rng) for v in word]

    S, layer = [()], [()]
    for v in reversed(word):
        layer = [monomial_mul(g, ((v, s),), x) for x in layer for s in (1, -1)]
        S.extend(layer)
    index = {s: i for i, s in enumerate(S)}
    report = gram_of_elements(spec, tuple(S), [monomial_element(spec.product, s) for s in S])
    R, _ = factor_gram(report)
    n = report.block
    scale = op_norm(report.matrix)
    L = {}
    for v in set(word):
        for s in (1, -1):
            domain = [x for x in S if monomial_mul(g, ((v, s),), x) in index]
            images = [index[monomial_mul(g, ((v, s),), x)] for x in domain]
            L[v, s] = concat_operator(R, [index[x] for x in domain], images, n, scale, tuple(domain))

    r = R.shape[0]
    M = np.eye(r, dtype=np.complex128)
    direct = np.eye(n, dtype=np.complex128)
    for v, a in zip(word, letters):
        M = M @ (a[A.band + 1] * L[v, 1].matrix + a[A.band - 1] * L[v, -1].matrix)
        direct = direct @ spec.theta(v, a)
    V1 = R[:, :n]
    compressed = dagger(V1) @ M @ V1
    compression = fro_norm(compressed - direct) / (1.0 + fro_norm(direct))
    value = complex(compressed[0, 0])
    tol = setting('COMPRESSION_TOL')
    return Verdict(abs(value) <= tol and compression <= tol, max(abs(value), compression), tol, {
        'word': list(word), 'moment': [value.real, value.imag], 'compression': compression, 'suffixes': len(S),
    })
