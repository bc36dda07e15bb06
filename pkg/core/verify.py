"""
Numerical checks for graph products of ucp maps.

A ``WordFamily`` instantiates a complete set X of reduced words with an
independent centered letter at every occurrence, so that left concatenation
by a letter stays inside X. The Gram matrix [Θ(x*y)] over X is tested for
positivity, and its factorization gives the concatenation space H ⊗_Θ C^|X|
with the isometry V₁ and the left-concatenation operators L_x.
"""

from collections import deque
from dataclasses import dataclass
from functools import cached_property, reduce as fold
from itertools import permutations
import logging

import numpy as np

from . import graphwords
from .conf import setting
from .exceptions import GramNotPSD, HypothesisNotMet, PairNotInX, SpecInvalid
from .mathcore import HermEig, Verdict, dagger, fro_norm, herm_eig, is_psd, op_norm, rng_from
from .staralg import gp_adjoint, gp_mul, theta_eval

logger = logging.getLogger(__name__)


def chain(*elements):
    return fold(gp_mul, elements)


def theta_of(spec, *elements):
    return theta_eval(spec, chain(*elements))


def _rel(diff, scale):
    return fro_norm(diff) / (1.0 + scale)


def instantiate(product, word, rng):
    """Element of ``word`` with a fresh random centered letter at every position."""
    word = tuple(word)
    return product.elementary(word, [product.algebras[v].random_centered(rng) for v in word])


def random_reduced_word(g, rng, max_len, pool=None, min_len=0):
    pool = list(range(g.n_vertices)) if pool is None else list(pool)
    length = int(rng.integers(min_len, max_len + 1))
    return graphwords.normal_form(g, [pool[int(i)] for i in rng.integers(0, len(pool), size=length)])


def vertices_of(w):
    return tuple(v for v, _ in w)


@dataclass(frozen=True, eq=False)
class WordFamily:
    """
    A complete set X of reduced words carrying an independent centered letter
    at every occurrence. A member is a tuple of letters ``(v, k)`` in
    normal-form order, ``k`` indexing ``letters``; truncations keep the letters
    of the word they come from, so left concatenation by a letter of X stays
    well defined.
    """
    product: object
    words: tuple
    letters: tuple

    def __post_init__(self):
        g = self.product.graph
        members = set(self.words)
        if () not in members:
            raise SpecInvalid("word family must contain the empty word")
        owner = {}
        for w in self.words:
            keys = [k for _, k in w]
            if len(set(keys)) != len(keys):
                raise SpecInvalid(f"letter repeated inside {w}")
            if not graphwords.is_reduced(g, vertices_of(w)) or tuple(graphwords.sort_payload(g, w)) != w:
                raise SpecInvalid(f"{w} is not a reduced word in normal-form order")
            for v, k in w:
                if not 0 <= k < len(self.letters):
                    raise SpecInvalid(f"no letter {k}")
                if owner.setdefault(k, v) != v:
                    raise SpecInvalid(f"letter {k} sits at vertices {owner[k]} and {v}")
            if not graphwords.payload_truncations(g, w) <= members:
                raise SpecInvalid("word family is not closed under truncation")

    @classmethod
    def from_words(cls, product, seeds, rng, letters=None):
        """
        Closure of ``seeds`` with a fresh letter at every seed position. Explicit
        ``letters`` give one letter per seed position, seeds read in order.
        """
        rng = rng_from(rng)
        g = product.graph
        pool, labelled = [], []
        for seed in seeds:
            word = []
            for v in graphwords.normal_form(g, seed):
                k = len(pool)
                pool.append(product.algebras[v].random_centered(rng) if letters is None else letters[k])
                word.append((v, k))
            labelled.append(word)
        closure = graphwords.payload_closure(g, labelled)
        return cls(product, tuple(sorted(closure, key=lambda w: (len(w), w))), tuple(pool))

    @classmethod
    def random(cls, product, rng, n_seeds=3, max_len=4, max_size=30):
        """Closure of up to ``n_seeds`` random words; seeds are shortened until |X| ≤ max_size."""
        rng = rng_from(rng)
        g = product.graph
        seeds = [random_reduced_word(g, rng, max_len, min_len=1) for _ in range(n_seeds)]
        while seeds and _labelled_size(g, seeds) > max_size:
            seeds.sort(key=len)
            longest = seeds.pop()
            shorter = longest[:-1]
            if shorter:
                seeds.append(graphwords.normal_form(g, shorter))
        return cls.from_words(product, seeds, rng)

    @cached_property
    def index(self):
        return {w: i for i, w in enumerate(self.words)}

    @cached_property
    def _elements(self):
        return {}

    def labelled(self, w):
        return tuple(graphwords.sort_payload(self.product.graph, w))

    def element(self, w):
        w = self.labelled(w)
        if w not in self._elements:
            self._elements[w] = self.product.elementary(vertices_of(w), [self.letters[k] for _, k in w])
        return self._elements[w]

    def generators(self):
        """Letters ``(v, k)`` that form a member on their own."""
        return sorted(w[0] for w in self.words if len(w) == 1)


def _labelled_size(g, seeds):
    labelled = []
    for seed in seeds:
        labelled.append([(v, (len(labelled), i)) for i, v in enumerate(seed)])
    return len(graphwords.payload_closure(g, labelled))


@dataclass(frozen=True, eq=False)
class GramReport:
    words: tuple
    block: int
    matrix: np.ndarray
    eig: HermEig
    verdict: object

    @property
    def passed(self):
        return self.verdict.passed

    @property
    def lambda_min(self):
        return self.eig.min

    @property
    def lambda_max(self):
        return self.eig.max

    @property
    def rank(self):
        cutoff = setting('QUOTIENT_CUTOFF') * max(self.eig.max, 0.0)
        return int(np.sum(self.eig.eigenvalues > cutoff))

    def block_of(self, i, j):
        n = self.block
        return self.matrix[i * n:(i + 1) * n, j * n:(j + 1) * n]


def gram(spec, fam):
    """Block Gram matrix [Θ(x*y)]_{x,y ∈ X} and its positivity verdict."""
    if not spec.product.compatible(fam.product):
        raise SpecInvalid("family and spec use different graph products")
    return gram_of_elements(spec, fam.words, [fam.element(w) for w in fam.words])


def gram_of_elements(spec, labels, elements):
    n = spec.target_dim
    words = tuple(labels)
    adjoints = [gp_adjoint(e) for e in elements]
    G = np.zeros((len(words) * n, len(words) * n), dtype=np.complex128)
    for i, xs in enumerate(adjoints):
        for j in range(len(words)):
            if j < i:
                continue
            blk = theta_eval(spec, gp_mul(xs, elements[j]))
            G[i * n:(i + 1) * n, j * n:(j + 1) * n] = blk
            if j != i:
                G[j * n:(j + 1) * n, i * n:(i + 1) * n] = dagger(blk)
    eig = herm_eig(G)
    report = GramReport(words, n, G, eig, is_psd(G, eig=eig))
    logger.debug(f"Gram over {len(words)} elements: λ_min={report.lambda_min:.3e}, λ_max={report.lambda_max:.3e}")
    return report


@dataclass(frozen=True, eq=False)
class ConcatOperator:
    matrix: np.ndarray
    domain: tuple
    residual: float


@dataclass(frozen=True, eq=False)
class ConcatSpace:
    gram: GramReport
    R: np.ndarray
    V1: np.ndarray
    L: dict
    letter_norms: dict
    factor_residual: float
    isometry_residual: float

    @property
    def rank(self):
        return self.R.shape[0]

    def columns(self, w):
        n = self.gram.block
        i = self.gram.words.index(w)
        return self.R[:, i * n:(i + 1) * n]

    def word_operator(self, word):
        out = np.eye(self.rank, dtype=np.complex128)
        for x in word:
            out = out @ self.L[x].matrix
        return out


def _block_cols(indices, n):
    return np.concatenate([np.arange(i * n, (i + 1) * n) for i in indices]) if indices else np.zeros(0, dtype=np.intp)


def factor_gram(report):
    """R with R*R = G on the eigenvalues kept by the quotient cutoff, and the relative factorization residual."""
    if not report.passed:
        raise GramNotPSD(f"Gram has eigenvalue {report.lambda_min:.3e}")
    G, eig = report.matrix, report.eig
    keep = eig.eigenvalues >= setting('QUOTIENT_CUTOFF') * max(eig.max, 0.0)
    R = np.sqrt(eig.eigenvalues[keep])[:, None] * dagger(eig.eigenvectors[:, keep])
    return R, fro_norm(dagger(R) @ R - G) / (1.0 + op_norm(G))


def concat_operator(R, domain_indices, image_indices, n, scale, domain=()):
    """
    The operator sending the class of ξ⊗e_i to the class of ξ⊗e_j for paired
    (i, j), defined on the span of the domain classes and zero on their
    orthogonal complement. The residual is the squared defect of that
    assignment, relative to 1 + ‖G‖.
    """
    R_D = R[:, _block_cols(list(domain_indices), n)]
    R_xD = R[:, _block_cols(list(image_indices), n)]
    M = R_xD @ np.linalg.pinv(R_D, rcond=np.sqrt(setting('QUOTIENT_CUTOFF')))
    residual = op_norm(M @ R_D - R_xD) ** 2 / (1.0 + scale) if R_D.size else 0.0
    return ConcatOperator(M, tuple(domain), residual)


def build_concat_space(spec, fam, report=None):
    """
    Factor G = R*R on the numerical range of G and build the left-concatenation
    operators. For a letter x = (v, k) of X, L_x sends the class of ξ⊗e_y to the
    class of ξ⊗e_{xy} for every y with xy reduced and in X; it is defined on the
    span of those classes and is zero on their orthogonal complement.
    """
    report = gram(spec, fam) if report is None else report
    R, factor_residual = factor_gram(report)
    n = report.block
    scale = op_norm(report.matrix)
    V1 = R[:, :n]
    isometry_residual = fro_norm(dagger(V1) @ V1 - np.eye(n))

    g = spec.graph
    index = {w: i for i, w in enumerate(report.words)}
    L, norms = {}, {}
    for x in fam.generators():
        v, k = x
        domain = []
        images = []
        for y in report.words:
            if graphwords.is_reduced(g, (v,) + vertices_of(y)):
                xy = fam.labelled((x,) + y)
                if xy in index:
                    domain.append(y)
                    images.append(index[xy])
        L[x] = concat_operator(R, [index[y] for y in domain], images, n, scale, domain)
        norms[x] = spec.product.algebras[v].norm(fam.letters[k])
    logger.debug(f"concatenation space of rank {R.shape[0]} with generators {sorted(L)}")
    return ConcatSpace(report, R, V1, L, norms, factor_residual, isometry_residual)


def check_lx_bound(cs, x):
    """‖L_x‖ ≤ ‖x‖, the C*-norm of the letter x = (v, k)."""
    slack = setting('LX_SLACK')
    norm_L = op_norm(cs.L[x].matrix)
    bound = cs.letter_norms[x]
    excess = max(0.0, norm_L - bound) / max(bound, 1e-300)
    return Verdict(
        passed=norm_L <= bound * (1.0 + slack) + 1e-12,
        residual=excess if bound > 0 else norm_L,
        tol=slack,
        detail={'vertex': x[0], 'letter': x[1], 'norm_L': norm_L, 'norm_x': bound, 'domain_residual': cs.L[x].residual},
    )


def check_compression(cs, spec, fam):
    """L_w V₁ = V_w for every w ∈ X and V₁*L_x*L_yV₁ = Θ(x*y) for every pair."""
    tol = setting('COMPRESSION_TOL')
    report = cs.gram
    scale = 1.0 + op_norm(report.matrix)
    images = {w: cs.word_operator(w) @ cs.V1 for w in report.words}
    hom = max(fro_norm(images[w] - cs.columns(w)) for w in report.words) / scale
    comp = 0.0
    for i, x in enumerate(report.words):
        for j, y in enumerate(report.words):
            comp = max(comp, fro_norm(dagger(images[x]) @ images[y] - report.block_of(i, j)) / scale)
    well_defined = max((op.residual for op in cs.L.values()), default=0.0)
    residual = max(hom, comp, well_defined, cs.factor_residual, cs.isometry_residual)
    return Verdict(residual <= tol, residual, tol, {
        'homomorphism': hom, 'compression': comp, 'well_defined': well_defined,
        'factorization': cs.factor_residual, 'isometry': cs.isometry_residual,
    })


def schwarz_pairs(fam, c_vertices=None):
    """
    All (b, c) with b, c ∈ X and c·b reduced with labelled normal form in X.
    With ``c_vertices`` given, c only uses those vertices and b avoids them.
    """
    g = fam.product.graph
    out = []
    for b in fam.words:
        for c in fam.words:
            if c_vertices is not None and not (set(vertices_of(c)) <= c_vertices and c_vertices.isdisjoint(vertices_of(b))):
                continue
            if _in_x(fam, c + b):
                out.append((b, c))
    return out


def _in_x(fam, w):
    return graphwords.is_reduced(fam.product.graph, vertices_of(w)) and fam.labelled(w) in fam.index


def check_schwarz(spec, fam, pairs, cs=None):
    """
    [Θ(b_i*c_i*c_jb_j)] − [Θ(b_i*)Θ(c_i*c_j)Θ(b_j)] ≥ 0 for pairs whose c
    vertices never occur in any b. On the concatenation space the difference
    is the Gram matrix of E_i = L_{c_i}(1 − V₁V₁*)L_{b_i}V₁ plus the cross terms
    Θ(b_i*)F_ij + F_ji*Θ(b_j) with F_ij = Θ(c_i*c_jb_j) − Θ(c_i*c_j)Θ(b_j), and
    F vanishes on such pairs since every reduced term of c_i*c_j meets b_j
    without cancellation.
    """
    pairs = [(tuple(b), tuple(c)) for b, c in pairs]
    for b, c in pairs:
        if not (b in fam.index and c in fam.index and _in_x(fam, c + b)):
            raise PairNotInX(f"pair b={b}, c={c} leaves X")
    shared = {v for _, c in pairs for v in vertices_of(c)} & {v for b, _ in pairs for v in vertices_of(b)}
    if shared:
        raise HypothesisNotMet(f"vertices {sorted(shared)} occur both in a c and in a b")
    cs = build_concat_space(spec, fam) if cs is None else cs
    n = spec.target_dim
    N = len(pairs)
    scale = 1.0 + op_norm(cs.gram.matrix)

    bs = [fam.element(b) for b, _ in pairs]
    cs_el = [fam.element(c) for _, c in pairs]
    theta_b = [theta_eval(spec, b) for b in bs]
    lhs = np.zeros((N * n, N * n), dtype=np.complex128)
    rhs = np.zeros_like(lhs)
    factorization = 0.0
    for i in range(N):
        for j in range(N):
            blk = slice(i * n, (i + 1) * n), slice(j * n, (j + 1) * n)
            cc = theta_of(spec, gp_adjoint(cs_el[i]), cs_el[j])
            lhs[blk] = theta_of(spec, gp_adjoint(bs[i]), gp_adjoint(cs_el[i]), cs_el[j], bs[j])
            rhs[blk] = dagger(theta_b[i]) @ cc @ theta_b[j]
            factorization = max(factorization, _rel(theta_of(spec, gp_adjoint(cs_el[i]), cs_el[j], bs[j]) - cc @ theta_b[j], scale))
    diff = (lhs - rhs + dagger(lhs - rhs)) / 2.0

    P_perp = np.eye(cs.rank, dtype=np.complex128) - cs.V1 @ dagger(cs.V1)
    E = np.concatenate([cs.word_operator(c) @ P_perp @ cs.word_operator(b) @ cs.V1 for b, c in pairs], axis=1)
    decomposition = _rel(diff - dagger(E) @ E, scale - 1.0)

    psd = is_psd(diff)
    eq_tol, tol = setting('EQ_TOL'), setting('COMPRESSION_TOL')
    passed = psd.passed and factorization <= eq_tol and decomposition <= tol
    logger.debug(f"Schwarz over {N} pairs: λ_min={psd.min_eigenvalue:.3e}, factorization {factorization:.2e}, decomposition {decomposition:.2e}")
    return Verdict(passed, psd.residual, psd.tol, {
        'pairs': [[[list(x) for x in b], [list(x) for x in c]] for b, c in pairs],
        'min_eigenvalue': psd.min_eigenvalue,
        'factorization': factorization,
        'decomposition': decomposition,
    })


# Lemma instances

def nc_of_down_set(g, w, v0):
    return graphwords.set_nc_length(g, graphwords.down_set(g, w), v0)


def _parts(product, std, rng):
    a = instantiate(product, (std.v0,), rng)
    return tuple(instantiate(product, w, rng) for w in (std.y, std.c)) + (a, instantiate(product, std.b, rng))


def _pick_v0_word(g, rng, max_len, min_nc=0):
    v0 = int(rng.integers(g.n_vertices))
    x = random_reduced_word(g, rng, max_len - 1)
    x = graphwords.normal_form(g, graphwords.reduce(g, x + (v0,) + random_reduced_word(g, rng, 1)))
    if v0 not in x:
        return None
    N = nc_of_down_set(g, x, v0)
    return (v0, x, N) if N >= min_nc else None


@dataclass(frozen=True, eq=False)
class X1Instance:
    std: graphwords.StdForm
    x: tuple
    x_prime: tuple
    parts: tuple
    other: object

    @property
    def v0(self):
        return self.std.v0


@dataclass(frozen=True, eq=False)
class Y1Instance:
    std: graphwords.StdForm
    std_prime: graphwords.StdForm
    parts: tuple
    parts_prime: tuple


def find_x1_instance(spec, rng, max_len=4, attempts=400, prefer_nc=True):
    """Search for (x, x′) with nc({x′}^⪯) < nc({x}^⪯); x′ is built mostly from letters of x."""
    g = spec.graph
    rng = rng_from(rng)
    for attempt in range(attempts):
        picked = _pick_v0_word(g, rng, max_len, min_nc=1 if prefer_nc and attempt % 2 == 0 else 0)
        if picked is None:
            continue
        v0, x, N = picked
        std = graphwords.standard_form(g, x, v0)
        pool = list(std.y + std.c) + [int(rng.integers(g.n_vertices))]
        x_prime = random_reduced_word(g, rng, max_len, pool=pool)
        if nc_of_down_set(g, x_prime, v0) >= N:
            continue
        return X1Instance(std, x, x_prime, _parts(spec.product, std, rng), instantiate(spec.product, x_prime, rng))
    raise HypothesisNotMet("no X1 instance found")


def check_lemma_x1(spec, inst):
    """Θ(b*a*c*y*x′) = Θ(b*a*)Θ(c*y*x′)."""
    g = spec.graph
    N = nc_of_down_set(g, inst.x, inst.v0)
    if nc_of_down_set(g, inst.x_prime, inst.v0) >= N:
        raise HypothesisNotMet("x′ does not have smaller nc-length")
    if graphwords.standard_form(g, inst.x, inst.v0) != inst.std:
        raise HypothesisNotMet("instance is not in standard form")
    y, c, a, b = inst.parts
    ys, cs, as_, bs = (gp_adjoint(e) for e in (y, c, a, b))
    lhs = theta_of(spec, bs, as_, cs, ys, inst.other)
    rhs = theta_of(spec, bs, as_) @ theta_of(spec, cs, ys, inst.other)
    tol = setting('EQ_TOL')
    residual = _rel(lhs - rhs, fro_norm(lhs))
    combined = tuple(reversed(inst.std.word)) + inst.x_prime
    return Verdict(residual <= tol, residual, tol, {
        'nc': N, 'reduced': graphwords.is_reduced(g, combined), 'x': list(inst.x), 'x_prime': list(inst.x_prime),
    })


def find_y1_instance(spec, rng, max_len=4, attempts=600):
    """Search for x, x′ with equal positive nc-length and different y-words."""
    g = spec.graph
    rng = rng_from(rng)
    for _ in range(attempts):
        picked = _pick_v0_word(g, rng, max_len, min_nc=1)
        if picked is None:
            continue
        v0, x, N = picked
        std = graphwords.standard_form(g, x, v0)
        pool = list(std.y + std.c) + [int(rng.integers(g.n_vertices))]
        tail = random_reduced_word(g, rng, 1)
        x_prime = graphwords.reduce(g, random_reduced_word(g, rng, max_len - 1, pool=pool) + (v0,) + tail)
        x_prime = graphwords.normal_form(g, x_prime)
        if v0 not in x_prime or nc_of_down_set(g, x_prime, v0) != N:
            continue
        std_prime = graphwords.standard_form(g, x_prime, v0)
        if std_prime.y == std.y:
            continue
        return Y1Instance(std, std_prime, _parts(spec.product, std, rng), _parts(spec.product, std_prime, rng))
    raise HypothesisNotMet("no Y1 instance found")


def check_lemma_y1(spec, inst):
    """
    Θ(b*a*c*y*y′c′a′b′) = Θ(b*a*)Θ(c*y*y′c′a′b′). The further factorization
    through Θ(a′b′) is reported separately under ``second``.
    """
    g = spec.graph
    v0 = inst.std.v0
    N = nc_of_down_set(g, inst.std.word, v0)
    if N <= 0 or nc_of_down_set(g, inst.std_prime.word, v0) != N or inst.std.y == inst.std_prime.y:
        raise HypothesisNotMet("Y1 hypotheses do not hold")
    y, c, a, b = inst.parts
    y2, c2, a2, b2 = inst.parts_prime
    ys, cs, as_, bs = (gp_adjoint(e) for e in (y, c, a, b))
    lhs = theta_of(spec, bs, as_, cs, ys, y2, c2, a2, b2)
    head = theta_of(spec, bs, as_)
    first = head @ theta_of(spec, cs, ys, y2, c2, a2, b2)
    second = head @ theta_of(spec, cs, ys, y2, c2) @ theta_of(spec, a2, b2)
    tol = setting('EQ_TOL')
    r1 = _rel(lhs - first, fro_norm(lhs))
    r2 = _rel(lhs - second, fro_norm(lhs))
    return Verdict(r1 <= tol, r1, tol, {
        'nc': N, 'second': r2, 'second_passed': r2 <= tol,
        'x': list(inst.std.word), 'x_prime': list(inst.std_prime.word),
    })


def find_techlem_instance(spec, rng, max_len=3, attempts=200):
    """(v0, y, a) with (v0)·y reduced and a an arbitrary, uncentered element of A_v0."""
    g = spec.graph
    rng = rng_from(rng)
    for _ in range(attempts):
        v0 = int(rng.integers(g.n_vertices))
        y = random_reduced_word(g, rng, max_len)
        if graphwords.is_reduced(g, (v0,) + y):
            a = spec.product.algebras[v0].random_element(rng)
            return v0, instantiate(spec.product, y, rng), a
    raise HypothesisNotMet("no reduced extension (v0)·y found")


def check_techlem(spec, v0, y, a):
    """Θ(y*a*ay) ≥ Θ(y*)θ_v0(a*a)Θ(y), with Θ(y*)Θ(a*a)Θ(y) = Θ(y*)θ_v0(a*a)Θ(y)."""
    g = spec.graph
    word = y.terms[0].word if y.terms else ()
    if len(y.terms) > 1 or not graphwords.is_reduced(g, (v0,) + word):
        raise HypothesisNotMet("(v0)·y is not a reduced word")
    A = spec.product.algebras[v0]
    aa = A.mul(A.adjoint(a), a)
    middle = spec.product.letter(v0, aa)
    ys = gp_adjoint(y)
    lhs = theta_of(spec, ys, middle, y)
    ty = theta_eval(spec, y)
    via_theta = dagger(ty) @ theta_eval(spec, middle) @ ty
    rhs = dagger(ty) @ spec.theta(v0, aa) @ ty
    eq_residual = _rel(via_theta - rhs, fro_norm(rhs))
    diff = lhs - rhs
    verdict = is_psd((diff + dagger(diff)) / 2.0)
    ok = verdict.passed and eq_residual <= setting('EQ_TOL')
    branch = any(not g.adjacent(v0, v) for v in word)
    return Verdict(ok, max(verdict.residual, eq_residual), verdict.tol, {
        'min_eigenvalue': verdict.min_eigenvalue, 'middle_residual': eq_residual,
        'noncommuting': branch, 'y': list(word), 'v0': v0,
    })


def find_y1_square_instances(spec, rng, max_len=4, n=3, samples=60):
    """Up to ``n`` distinct (std form, parts) pairs sharing one y-word, largest group found."""
    g = spec.graph
    rng = rng_from(rng)
    groups = {}
    for _ in range(samples):
        picked = _pick_v0_word(g, rng, max_len)
        if picked is None:
            continue
        v0, x, _ = picked
        std = graphwords.standard_form(g, x, v0)
        groups.setdefault((v0, std.y), set()).add(std)
    if not groups:
        raise HypothesisNotMet("no word containing a chosen vertex")
    key = max(groups, key=lambda k: (len(groups[k]), len(k[1]), k))
    stds = sorted(groups[key], key=lambda s: s.word)[:n]
    return [(s, _parts(spec.product, s, rng)) for s in stds]


def y1_square_blocks(spec, instances):
    n = spec.target_dim
    N = len(instances)
    lhs = np.zeros((N * n, N * n), dtype=np.complex128)
    rhs = np.zeros_like(lhs)
    xs = [chain(*parts) for _, parts in instances]
    heads = [theta_of(spec, a, b) for _, (_, _, a, b) in instances]
    for i, (_, (yi, ci, _, _)) in enumerate(instances):
        for j, (_, (yj, cj, _, _)) in enumerate(instances):
            blk = slice(i * n, (i + 1) * n), slice(j * n, (j + 1) * n)
            lhs[blk] = theta_of(spec, gp_adjoint(xs[i]), xs[j])
            rhs[blk] = dagger(heads[i]) @ theta_of(spec, gp_adjoint(ci), gp_adjoint(yi), yj, cj) @ heads[j]
    return lhs, rhs


def check_y1_square(spec, instances):
    """[Θ(x_i*x_j)] ≥ [Θ(b_i*a_i*)Θ(c_i*y_i*y_jc_j)Θ(a_jb_j)] for x_i sharing one y-word."""
    if not instances:
        raise HypothesisNotMet("empty instance list")
    v0 = instances[0][0].v0
    ys = {s.y for s, _ in instances}
    if len(ys) != 1 or any(s.v0 != v0 for s, _ in instances):
        raise HypothesisNotMet("instances do not share one y-word")
    lhs, rhs = y1_square_blocks(spec, instances)
    diff = lhs - rhs
    verdict = is_psd((diff + dagger(diff)) / 2.0)
    g = spec.graph
    nc = max(nc_of_down_set(g, s.word, v0) for s, _ in instances)
    return Verdict(verdict.passed, verdict.residual, verdict.tol, {
        'min_eigenvalue': verdict.min_eigenvalue, 'nc': nc, 'y': list(ys.pop()), 'size': len(instances),
    })


def split_standard(g, w, v0):
    """
    Standard form of a labelled word at v0 and its labelled parts y, c, the v0
    letter and b. Letters at one vertex never swap, so the k-th occurrence of a
    vertex in the standard form carries the k-th letter at that vertex in w.
    """
    std = graphwords.standard_form(g, vertices_of(w), v0)
    queues = {}
    for x in w:
        queues.setdefault(x[0], deque()).append(x)
    ordered = tuple(queues[v].popleft() for v in std.word)
    i, j = len(std.y), len(std.y) + len(std.c)
    return std, (ordered[:i], ordered[i:j], ordered[j:j + 1], ordered[j + 1:])


def check_main_decomposition(spec, fam, v0):
    """
    Split X at v0: words without v0, and the words containing v0 grouped by the
    y-word of their standard form. Cross terms between groups of different
    nc-length must factor as in Lemma X1, cross terms between groups of equal
    positive nc-length and different y-words as in Lemma Y1, and each group
    must satisfy the Y1 square inequality.
    """
    g = spec.graph
    tol = setting('EQ_TOL')
    info = {}
    for w in fam.words:
        if v0 in vertices_of(w):
            std, parts = split_standard(g, w, v0)
            info[w] = (nc_of_down_set(g, vertices_of(w), v0), std, tuple(fam.element(p) for p in parts))
    worst = 0.0
    counts = {'x1': 0, 'y1': 0, 'groups': 0}
    for x, (N, std, (y, c, a, b)) in info.items():
        head = theta_of(spec, gp_adjoint(b), gp_adjoint(a))
        tail = chain(gp_adjoint(c), gp_adjoint(y))
        for z in fam.words:
            other = info.get(z)
            if other is None or other[0] < N:
                zel = fam.element(z)
                lhs = theta_of(spec, gp_adjoint(fam.element(x)), zel)
                worst = max(worst, _rel(lhs - head @ theta_of(spec, tail, zel), fro_norm(lhs)))
                counts['x1'] += 1
            elif other[0] == N and N > 0 and other[1].y != std.y:
                y2, c2, a2, b2 = other[2]
                lhs = theta_of(spec, gp_adjoint(fam.element(x)), fam.element(z))
                worst = max(worst, _rel(lhs - head @ theta_of(spec, tail, y2, c2, a2, b2), fro_norm(lhs)))
                counts['y1'] += 1
    square = 0.0
    groups = {}
    for x, (N, std, parts) in info.items():
        groups.setdefault(std.y, []).append((std, parts))
    for members in groups.values():
        lhs, rhs = y1_square_blocks(spec, members)
        diff = lhs - rhs
        square = max(square, is_psd((diff + dagger(diff)) / 2.0).residual)
        counts['groups'] += 1
    passed = worst <= tol and square <= setting('PSD_TOL')
    return Verdict(passed, max(worst, square), tol, dict(counts, equality=worst, square=square, v0=v0))


# Degenerations

def _free_eval(spec, letters):
    """Θ on a product of centered letters computed by free-product reduction alone."""
    for i in range(len(letters) - 1):
        (v, p), (w, q) = letters[i], letters[i + 1]
        if v == w:
            A = spec.product.algebras[v]
            ring, s = A.center(A.mul(p, q))
            out = s * _free_eval(spec, letters[:i] + letters[i + 2:])
            return out + _free_eval(spec, letters[:i] + [(v, ring)] + letters[i + 2:])
    out = np.eye(spec.target_dim, dtype=np.complex128)
    for v, p in letters:
        out = out @ spec.theta(v, p)
    return out


def free_gram(spec, fam):
    n = spec.target_dim
    words = fam.words
    G = np.zeros((len(words) * n, len(words) * n), dtype=np.complex128)
    for i, x in enumerate(words):
        left = [(v, spec.product.algebras[v].adjoint(fam.letters[k])) for v, k in reversed(x)]
        for j, y in enumerate(words):
            G[i * n:(i + 1) * n, j * n:(j + 1) * n] = _free_eval(spec, left + [(v, fam.letters[k]) for v, k in y])
    return G


def degeneration_suite(spec, fam):
    """Complete graphs: Θ of every word is order independent and standard forms are x = c·a. Edgeless: Gram equals the free-product one."""
    g = spec.graph
    n = g.n_vertices
    tol = setting('EQ_TOL')
    if len(g.edges) == n * (n - 1) // 2:
        worst = 0.0
        for w in fam.words:
            ref = theta_eval(spec, fam.element(w))
            for order in set(permutations(range(len(w)))):
                M = np.eye(spec.target_dim, dtype=np.complex128)
                for i in order:
                    v, k = w[i]
                    M = M @ spec.theta(v, fam.letters[k])
                worst = max(worst, _rel(M - ref, fro_norm(ref)))
            for v0 in set(vertices_of(w)):
                std = graphwords.standard_form(g, vertices_of(w), v0)
                if std.y or std.b:
                    return Verdict(False, np.inf, tol, {'case': 'complete', 'word': list(vertices_of(w)), 'v0': v0})
        return Verdict(worst <= tol, worst, tol, {'case': 'complete', 'words': len(fam.words)})
    if not g.edges:
        report = gram(spec, fam)
        G = free_gram(spec, fam)
        residual = _rel(G - report.matrix, op_norm(G))
        same = is_psd(G).passed == report.passed
        return Verdict(same and residual <= tol, residual, tol, {
            'case': 'edgeless', 'gram_passed': report.passed, 'free_passed': is_psd(G).passed,
        })
    raise HypothesisNotMet("graph is neither complete nor edgeless")
