"""
Truncated reduced graph product Hilbert spaces.

The basis is the vacuum Ω plus, for every normal-form reduced word w with
|w| ≤ L, the product basis of H̊_{w1} ⊗ … ⊗ H̊_{wn}, where H̊_v is spanned by
the basis vectors of H_v other than ξ_v = e_0.

λ_v(x) acts fiber by fiber: for each w with v·w reduced, the fiber
span{h_w} ⊕ (H̊_v ⊗ h_w) ≅ H_v carries a copy of x. Fibers whose v-part would
exceed length L are cut, which makes λ_v(x) exact only on vectors of length
at most L − 1.
"""

from dataclasses import dataclass
from functools import cached_property
from itertools import product as cartesian
import logging

import numpy as np

from . import graphwords
from .conf import setting
from .exceptions import BudgetExceeded, HypothesisNotMet
from .mathcore import Verdict, dagger, herm_eig, rng_from

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class VertexSpace:
    dim: int

    @property
    def xi(self):
        e = np.zeros(self.dim, dtype=np.complex128)
        e[0] = 1.0
        return e


def gns(A, density=None, cutoff=1e-12):
    """
    GNS construction for a matrix algebra and a density state. Returns the
    vertex space with ξ as first basis vector and the representation a ↦ π(a).
    """
    d = A.d
    rho = A.density if density is None else density
    basis = A.basis()
    # form[p, q] = φ(e_p* e_q)
    form = np.array([[np.trace(rho @ dagger(ep) @ eq) for eq in basis] for ep in basis])
    eig = herm_eig(form)
    keep = eig.eigenvalues > cutoff * max(eig.max, 0.0)
    R = np.sqrt(eig.eigenvalues[keep])[:, None] * dagger(eig.eigenvectors[:, keep])
    R_pinv = np.linalg.pinv(R)
    xi = R @ np.eye(d, dtype=np.complex128).reshape(-1)
    r = R.shape[0]
    Q, _ = np.linalg.qr(np.column_stack([xi, np.eye(r, dtype=np.complex128)]))
    Q = Q[:, :r]
    Q[:, 0] = Q[:, 0] * np.vdot(Q[:, 0], xi)

    def pi(a):
        left = np.kron(np.asarray(a), np.eye(d))
        return dagger(Q) @ R @ left @ R_pinv @ Q

    return VertexSpace(r), pi


class TruncatedFock:
    def __init__(self, graph, dims, cutoff=None, max_dim=None):
        self.graph = graph
        self.dims = (dims,) * graph.n_vertices if isinstance(dims, int) else tuple(dims)
        self.cutoff = setting('FOCK_CUTOFF') if cutoff is None else cutoff
        max_dim = setting('FOCK_MAX_DIM') if max_dim is None else max_dim
        if self.cutoff < 1:
            raise BudgetExceeded("cutoff must be at least 1")
        labels = [((), ())]
        for w in graphwords.iter_words(graph.n_vertices, self.cutoff):
            if not w or not graphwords.is_reduced(graph, w) or graphwords.normal_form(graph, w) != w:
                continue
            for idx in cartesian(*(range(1, self.dims[v]) for v in w)):
                labels.append((w, idx))
                if len(labels) > max_dim:
                    raise BudgetExceeded(f"Fock space exceeds {max_dim} dimensions at cutoff {self.cutoff}")
        self.labels = tuple(labels)
        self.index = {lab: i for i, lab in enumerate(labels)}
        logger.debug(f"truncated Fock space of dimension {len(labels)} (cutoff {self.cutoff})")

    @property
    def dim(self):
        return len(self.labels)

    def vacuum(self):
        e = np.zeros(self.dim, dtype=np.complex128)
        e[0] = 1.0
        return e

    def word_lengths(self):
        return np.array([len(w) for w, _ in self.labels])

    @cached_property
    def _fibers(self):
        return {}

    def fibers(self, v):
        """
        Array of shape (#fibers, d_v): column 0 is h_w, column i is the vector of
        v·w whose v-letter carries basis index i. Cut entries point at ``dim``.
        """
        if v in self._fibers:
            return self._fibers[v]
        g = self.graph
        d = self.dims[v]
        rows = []
        partial = False
        for w, idx in self.labels:
            if not graphwords.is_reduced(g, (v,) + w):
                continue
            row = [self.index[(w, idx)]]
            items = graphwords.sort_payload(g, [(v, -1)] + [(u, k) for k, u in enumerate(w)])
            vw = tuple(u for u, _ in items)
            for i in range(1, d):
                label = (vw, tuple(i if k == -1 else idx[k] for _, k in items))
                if label in self.index:
                    row.append(self.index[label])
                else:
                    row.append(self.dim)
                    partial = True
            rows.append(row)
        fib = np.array(rows, dtype=np.intp).reshape(len(rows), d)
        self._fibers[v] = (fib, partial)
        return self._fibers[v]

    def apply(self, v, x, vec):
        """λ_v(x) applied to ``vec``."""
        fib, _ = self.fibers(v)
        ext = np.append(np.asarray(vec, dtype=np.complex128), 0.0)
        out = np.zeros(self.dim + 1, dtype=np.complex128)
        np.add.at(out, fib, ext[fib] @ np.asarray(x).T)
        return out[:self.dim]

    def lam(self, v, x):
        return LambdaOperator(self, v, np.asarray(x, dtype=np.complex128))

    def safe_vectors(self, rng, max_len, count=3):
        """Random vectors supported on basis words of length ≤ max_len."""
        rng = rng_from(rng)
        mask = self.word_lengths() <= max_len
        if not mask.any():
            return []
        out = []
        for _ in range(count):
            z = (rng.standard_normal(self.dim) + 1j * rng.standard_normal(self.dim)) * mask
            out.append(z / np.linalg.norm(z))
        return out


@dataclass(frozen=True, eq=False)
class LambdaOperator:
    space: TruncatedFock
    vertex: int
    x: np.ndarray

    @property
    def partial(self):
        return self.space.fibers(self.vertex)[1]

    def __matmul__(self, vec):
        return self.space.apply(self.vertex, self.x, vec)

    def dense(self):
        return np.column_stack([self @ col for col in np.eye(self.space.dim, dtype=np.complex128)])


def lam(f, v0, x):
    return f.lam(v0, x)


def apply_word(f, letters, vec=None):
    """λ_{v1}(x1)⋯λ_{vm}(xm) applied to ``vec`` (the vacuum by default)."""
    vec = f.vacuum() if vec is None else vec
    for v, x in reversed(list(letters)):
        vec = f.apply(v, x, vec)
    return vec


def moment(f, letters):
    """⟨λ_{v1}(x1)⋯λ_{vm}(xm)Ω, Ω⟩ for operators x_k on H_{v_k}."""
    letters = list(letters)
    if len(letters) > f.cutoff:
        raise BudgetExceeded(f"word of length {len(letters)} exceeds cutoff {f.cutoff}")
    return complex(apply_word(f, letters)[0])


def center_operator(x):
    x = np.asarray(x, dtype=np.complex128)
    return x - x[0, 0] * np.eye(x.shape[0])


def check_independence(f, family, word, budget=None):
    """
    ⟨λ_{w1}(x̊_{w1})⋯λ_{wm}(x̊_{wm})Ω, Ω⟩ = 0 for a reduced word w, where each
    family member is centered for the vector state of ξ.
    """
    budget = f.cutoff if budget is None else budget
    word = tuple(word)
    if len(word) > min(f.cutoff, budget):
        raise BudgetExceeded(f"word of length {len(word)} exceeds the budget")
    if not graphwords.is_reduced(f.graph, word):
        raise HypothesisNotMet(f"word {graphwords.format_word(word)} is not reduced")
    letters = []
    for k, v in enumerate(word):
        x = family[v][k] if isinstance(family[v], (list, tuple)) else family[v]
        letters.append((v, center_operator(x)))
    value = moment(f, letters)
    tol = setting('EQ_TOL')
    return Verdict(abs(value) <= tol, abs(value), tol, {'word': list(word), 'moment': [value.real, value.imag]})


def check_homomorphism(f, v, x, y, rng):
    """λ(xy) = λ(x)λ(y) and ⟨λ(x)u, u′⟩ = ⟨u, λ(x*)u′⟩ on vectors of length ≤ L − 2."""
    worst = 0.0
    for u in f.safe_vectors(rng, f.cutoff - 2):
        worst = max(worst, np.linalg.norm(f.apply(v, x, f.apply(v, y, u)) - f.apply(v, x @ y, u)))
    for u, w in zip(f.safe_vectors(rng, f.cutoff), f.safe_vectors(rng, f.cutoff)):
        worst = max(worst, abs(np.vdot(w, f.apply(v, x, u)) - np.vdot(f.apply(v, dagger(x), w), u)))
    return Verdict(worst <= 1e-10, worst, 1e-10, {'vertex': v})


def check_edge_commutation(f, v, w, x, y, rng):
    worst = 0.0
    for u in f.safe_vectors(rng, f.cutoff - 2):
        worst = max(worst, np.linalg.norm(f.apply(v, x, f.apply(w, y, u)) - f.apply(w, y, f.apply(v, x, u))))
    return Verdict(worst <= 1e-10, worst, 1e-10, {'edge': [v, w]})


class ProductFock:
    """The truncated Fock space of a graph product of matrix algebras, through their GNS spaces."""

    def __init__(self, product, cutoff=None):
        self.product = product
        triples = [gns(A) for A in product.algebras]
        self.spaces = tuple(s for s, _ in triples)
        self.reps = tuple(pi for _, pi in triples)
        self.fock = TruncatedFock(product.graph, [s.dim for s in self.spaces], cutoff)

    def pi(self, v, a):
        return self.reps[v](a)

    def moment(self, word, letters):
        """⟨λ(π(a1))⋯λ(π(am))Ω, Ω⟩ for algebra elements a_k ∈ A_{w_k}."""
        return moment(self.fock, [(v, self.pi(v, a)) for v, a in zip(word, letters)])
