"""
Seeded verification suites.

A suite runs one trial function ``trials`` times. Trial k draws all of its
randomness from ``np.random.default_rng([seed, k])``, so a report depends only
on the run configuration and the seed. Trials may run on a thread pool; the
report is assembled afterwards in trial order.
"""

from concurrent.futures import ThreadPoolExecutor
from contextlib import nullcontext
import csv
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import product as cartesian
import logging
import math

from django.conf import settings
from django.test.utils import override_settings
from django.utils import timezone
import numpy as np

from . import dilate, fock, graphwords, groups, staralg, verify
from .conf import setting
from .exceptions import (
    BudgetExceeded, CapExceeded, GraphStarError, HypothesisNotMet, NonUnique, SizeCap, SpecInvalid,
)
from .graphwords import SimplicialGraph
from .mathcore import Verdict, fro_norm, random_contraction, random_density
from .serializers import GraphSerializer, ThetaSpecSerializer, encode_array

logger = logging.getLogger(__name__)

UCP_BLOCKS = (2, 2, 2, 1, 1)
SCHWARZ_PAIRS = 12
VACUITY_FRACTION = 0.3
MAX_TRIALS = 100000
MAX_WORD_LEN = 8
MAX_VERTICES = 8
MAX_DIM = 4
MAX_DEGREE = 8
MAX_RADIUS = 4


@dataclass(frozen=True)
class RunConfig:
    name: str
    seed: int
    trials: int = 10
    graph: SimplicialGraph = None
    dims: tuple = None
    groups: tuple = None
    max_word_len: int = 4
    max_vertices: int = 5
    block: int = None
    degree: int = None
    radius: int = None
    tol: float = None
    threads: int = None

    def __post_init__(self):
        if self.name not in SUITES:
            raise SpecInvalid(f"unknown suite '{self.name}'")
        if self.seed is None or self.seed < 0:
            raise SpecInvalid("a non-negative seed is required")
        checks = [
            ('trials', self.trials, 1, MAX_TRIALS),
            ('max_word_len', self.max_word_len, 1, MAX_WORD_LEN),
            ('max_vertices', self.max_vertices, 1, MAX_VERTICES),
            ('block', self.block, 1, MAX_DIM),
            ('degree', self.degree, 1, MAX_DEGREE),
            ('radius', self.radius, 0, MAX_RADIUS),
            ('threads', self.threads, 1, 64),
        ]
        for name, value, low, high in checks:
            if value is not None and not low <= value <= high:
                raise CapExceeded(f"{name}={value} is outside {low}..{high}")
        if self.graph is not None and self.graph.n_vertices > MAX_VERTICES:
            raise CapExceeded(f"graphs are limited to {MAX_VERTICES} vertices")
        for key in ('dims', 'groups'):
            values = getattr(self, key)
            if values is None or len(values) == 1:
                continue
            if self.graph is None:
                raise SpecInvalid(f"per-vertex {key} need an explicit graph")
            if len(values) != self.graph.n_vertices:
                raise SpecInvalid(f"{len(values)} {key} for {self.graph.n_vertices} vertices")
        if self.dims is not None and any(not 1 <= d <= MAX_DIM for d in self.dims):
            raise CapExceeded(f"vertex dimensions are limited to 1..{MAX_DIM}")
        if self.groups is not None:
            for text in self.groups:
                groups.FiniteGroup.parse(text)

    def as_dict(self):
        return {
            'suite': self.name, 'seed': self.seed, 'trials': self.trials,
            'graph': GraphSerializer(self.graph).data if self.graph is not None else None,
            'dims': list(self.dims) if self.dims else None,
            'groups': list(self.groups) if self.groups else None,
            'max_word_len': self.max_word_len, 'max_vertices': self.max_vertices,
            'block': self.block, 'degree': self.degree, 'radius': self.radius, 'tol': self.tol,
        }


@dataclass(frozen=True)
class Trial:
    index: int
    rng: np.random.Generator
    config: RunConfig


@dataclass
class Outcome:
    passed: bool
    residual: float
    detail: dict = field(default_factory=dict)
    artifact: dict = None
    spectrum: np.ndarray = None
    noncommutative: bool = None

    @classmethod
    def of(cls, verdicts, detail=None, **kwargs):
        """Merge named verdicts: pass when all pass, residual is the worst one."""
        checks = {name: {'passed': bool(v.passed), 'residual': float(v.residual)} for name, v in verdicts.items()}
        for name, v in verdicts.items():
            extra = getattr(v, 'detail', None)
            if extra:
                checks[name]['detail'] = extra
        return cls(
            passed=all(v.passed for v in verdicts.values()),
            residual=max((float(v.residual) for v in verdicts.values()), default=0.0),
            detail=dict(detail or {}, checks=checks),
            **kwargs,
        )


@dataclass
class TrialRecord:
    index: int
    status: str
    residual: float
    detail: dict
    artifact: dict = None
    spectrum: np.ndarray = None
    noncommutative: bool = None


@dataclass(frozen=True)
class SuiteEntry:
    name: str
    trial: object
    guarded: bool = False
    count: object = None


@dataclass(frozen=True)
class SuiteResult:
    report: dict
    records: tuple


SUITES = {}


def suite(name, guarded=False, count=None):
    def register(fn):
        SUITES[name] = SuiteEntry(name, fn, guarded, count)
        return fn
    return register


def plain(obj):
    """JSON-ready copy: numpy scalars and arrays become Python values, complex becomes [re, im]."""
    if isinstance(obj, dict):
        return {str(k): plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, frozenset, set)):
        items = sorted(obj) if isinstance(obj, (set, frozenset)) else obj
        return [plain(v) for v in items]
    if isinstance(obj, np.ndarray):
        return plain(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        return [plain(obj.real), plain(obj.imag)]
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        return x if math.isfinite(x) else str(x)
    return obj


# Trial helpers

def random_graph(rng, max_vertices, min_vertices=2):
    n = int(rng.integers(min_vertices, max(max_vertices, min_vertices) + 1))
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    keep = rng.random(len(pairs)) < 0.5
    return SimplicialGraph.from_edges(n, [p for p, k in zip(pairs, keep) if k])


def trial_graph(t, max_vertices=None):
    cfg = t.config
    if cfg.graph is not None:
        return cfg.graph
    cap = cfg.max_vertices if max_vertices is None else min(max_vertices, cfg.max_vertices)
    return random_graph(t.rng, cap)


def trial_dims(t, g, low=2, high=3):
    dims = t.config.dims
    if dims is not None:
        return tuple(dims) * g.n_vertices if len(dims) == 1 else tuple(dims)
    return tuple(int(d) for d in t.rng.integers(low, high + 1, size=g.n_vertices))


def trial_group(t, g):
    names = t.config.groups
    if names is None:
        names = [('cyclic:2', 'cyclic:3')[int(k)] for k in t.rng.integers(0, 2, size=g.n_vertices)]
    elif len(names) == 1:
        names = list(names) * g.n_vertices
    return groups.GraphGroup(g, tuple(groups.FiniteGroup.parse(s) for s in names))


def random_matrix(rng, d):
    return (rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))) / np.sqrt(2 * d)


def nonempty_reduced_word(g, rng, max_len):
    word = verify.random_reduced_word(g, rng, max_len, min_len=1)
    if not word:
        raise HypothesisNotMet("drawn word reduced to the empty word")
    return word


def spec_artifact(spec, fam=None):
    doc = {'spec': ThetaSpecSerializer(spec).data}
    if fam is not None:
        doc['words'] = [[list(x) for x in w] for w in fam.words]
        doc['letters'] = [encode_array(a) for a in fam.letters]
    return doc


def ucp_setup(t, max_size=30):
    g = trial_graph(t)
    spec = staralg.random_theta(g, trial_dims(t, g), t.rng, blocks=t.config.block or UCP_BLOCKS)
    fam = verify.WordFamily.random(spec.product, t.rng, max_len=t.config.max_word_len, max_size=max_size)
    return spec, fam


def graph_detail(g):
    return {'n': g.n_vertices, 'edges': [list(e) for e in sorted(g.edges)]}


# verify

@suite('verify ucp')
def ucp_trial(t):
    spec, fam = ucp_setup(t)
    report = verify.gram(spec, fam)
    verdicts = {'gram': report.verdict}
    if report.passed:
        cs = verify.build_concat_space(spec, fam, report)
        for v, k in fam.generators():
            verdicts[f'lx_{v}_{k}'] = verify.check_lx_bound(cs, (v, k))
        verdicts['compression'] = verify.check_compression(cs, spec, fam)
    detail = {
        'graph': graph_detail(spec.graph), 'words': len(fam.words), 'target_dim': spec.target_dim,
        'lambda_min': report.lambda_min, 'lambda_max': report.lambda_max, 'rank': report.rank,
    }
    return Outcome.of(verdicts, detail, artifact=spec_artifact(spec, fam), spectrum=report.eig.eigenvalues)


@suite('verify schwarz', guarded=True)
def schwarz_trial(t):
    spec, fam = ucp_setup(t, max_size=20)
    g = spec.graph
    vertices = sorted({v for v, _ in fam.generators()})
    if len(vertices) < 2:
        raise HypothesisNotMet("family uses fewer than two vertices")
    size = int(t.rng.integers(1, len(vertices)))
    c_vertices = frozenset(int(v) for v in t.rng.choice(vertices, size=size, replace=False))
    pairs = [(b, c) for b, c in verify.schwarz_pairs(fam, c_vertices) if b and c]
    if not pairs:
        raise HypothesisNotMet("no pair (b, c) with c·b in X")
    pick = sorted(t.rng.choice(len(pairs), size=min(len(pairs), SCHWARZ_PAIRS), replace=False))
    chosen = [pairs[i] for i in pick]
    nc = any(not g.adjacent(u, v) for b, c in chosen for u, _ in b for v, _ in c)
    verdict = verify.check_schwarz(spec, fam, chosen)
    return Outcome.of({'schwarz': verdict}, {'graph': graph_detail(g), 'c_vertices': sorted(c_vertices)},
                      artifact=spec_artifact(spec, fam), noncommutative=nc)


@suite('verify lemmas', guarded=True)
def lemmas_trial(t):
    g = trial_graph(t)
    spec = staralg.random_theta(g, trial_dims(t, g), t.rng, blocks=t.config.block or 2)
    x1 = verify.find_x1_instance(spec, t.rng, max_len=t.config.max_word_len)
    y1 = verify.find_y1_instance(spec, t.rng, max_len=t.config.max_word_len)
    v1 = verify.check_lemma_x1(spec, x1)
    v2 = verify.check_lemma_y1(spec, y1)
    return Outcome.of({'x1': v1, 'y1': v2}, {'graph': graph_detail(g)}, artifact=spec_artifact(spec),
                      noncommutative=v1.detail['nc'] >= 1)


@suite('verify techlem', guarded=True)
def techlem_trial(t):
    g = trial_graph(t)
    spec = staralg.random_theta(g, trial_dims(t, g), t.rng, blocks=t.config.block or 2)
    v0, y, a = verify.find_techlem_instance(spec, t.rng, max_len=min(3, t.config.max_word_len))
    verdict = verify.check_techlem(spec, v0, y, a)
    return Outcome.of({'techlem': verdict}, {'graph': graph_detail(g)}, artifact=spec_artifact(spec),
                      noncommutative=verdict.detail['noncommuting'])


@suite('verify y1square', guarded=True)
def y1square_trial(t):
    g = trial_graph(t)
    spec = staralg.random_theta(g, trial_dims(t, g), t.rng, blocks=t.config.block or 2)
    instances = verify.find_y1_square_instances(spec, t.rng, max_len=t.config.max_word_len)
    verdict = verify.check_y1_square(spec, instances)
    return Outcome.of({'y1square': verdict}, {'graph': graph_detail(g)}, artifact=spec_artifact(spec),
                      noncommutative=verdict.detail['nc'] >= 1)


@suite('verify degenerate')
def degenerate_trial(t):
    g = t.config.graph
    if g is None:
        n = int(t.rng.integers(2, min(4, t.config.max_vertices) + 1)) if t.config.max_vertices >= 2 else 1
        g = SimplicialGraph.complete(n) if t.rng.random() < 0.5 else SimplicialGraph.edgeless(n)
    spec = staralg.random_theta(g, trial_dims(t, g), t.rng, blocks=t.config.block or 2)
    fam = verify.WordFamily.random(spec.product, t.rng, max_len=min(3, t.config.max_word_len), max_size=20)
    verdict = verify.degeneration_suite(spec, fam)
    return Outcome.of({'degenerate': verdict}, {'graph': graph_detail(g)}, artifact=spec_artifact(spec, fam))


@suite('verify choda')
def choda_trial(t):
    g = trial_graph(t)
    source, target, maps = staralg.random_choda_setup(g, trial_dims(t, g), t.rng, block=t.config.block or 2)
    e = source.random_element(t.rng, max_len=t.config.max_word_len)
    verdict = staralg.choda_check(source, target, maps, e)
    return Outcome.of({'choda': verdict}, {
        'graph': graph_detail(g), 'source_value': verdict.source_value, 'image_value': verdict.image_value,
    })


@suite('verify decomposition')
def decomposition_trial(t):
    spec, fam = ucp_setup(t, max_size=20)
    vertices = sorted({v for v, _ in fam.generators()})
    if not vertices:
        raise HypothesisNotMet("family has no letters")
    v0 = vertices[int(t.rng.integers(len(vertices)))]
    verdict = verify.check_main_decomposition(spec, fam, v0)
    return Outcome.of({'decomposition': verdict}, {'graph': graph_detail(spec.graph)},
                      artifact=spec_artifact(spec, fam))


# fock

@suite('fock independence')
def fock_independence_trial(t):
    g = trial_graph(t, max_vertices=4)
    dims = trial_dims(t, g)
    f = fock.TruncatedFock(g, dims, cutoff=min(setting('FOCK_CUTOFF'), t.config.max_word_len))
    word = nonempty_reduced_word(g, t.rng, f.cutoff)
    family = {v: [random_matrix(t.rng, dims[v]) for _ in word] for v in range(g.n_vertices)}
    verdicts = {'independence': fock.check_independence(f, family, word)}
    v = int(t.rng.integers(g.n_vertices))
    verdicts['homomorphism'] = fock.check_homomorphism(
        f, v, random_matrix(t.rng, dims[v]), random_matrix(t.rng, dims[v]), t.rng)
    for v, w in sorted(g.edges):
        verdicts[f'commute_{v}_{w}'] = fock.check_edge_commutation(
            f, v, w, random_matrix(t.rng, dims[v]), random_matrix(t.rng, dims[w]), t.rng)
    return Outcome.of(verdicts, {'graph': graph_detail(g), 'dims': dims, 'fock_dim': f.dim, 'word': list(word)})


@suite('fock moments')
def fock_moments_trial(t):
    """Every word of length ≤ 3: the Fock vacuum moment equals the graph product state."""
    g = trial_graph(t, max_vertices=4)
    dims = trial_dims(t, g, 2, 2)
    product = staralg.GraphProduct(
        g, tuple(staralg.MatrixAlgebra(d, random_density(d, t.rng)) for d in dims))
    length = min(3, t.config.max_word_len)
    pf = fock.ProductFock(product, cutoff=length)
    worst = 0.0
    count = 0
    for word in graphwords.iter_words(g.n_vertices, length):
        if not word:
            continue
        letters = [product.algebras[v].random_element(t.rng) for v in word]
        lhs = pf.moment(word, letters)
        rhs = staralg.vacuum_state(product.word_element(word, letters))
        worst = max(worst, abs(lhs - rhs) / (1.0 + abs(rhs)))
        count += 1
    tol = 1e-10
    return Outcome.of({'moments': Verdict(worst <= tol, worst, tol)}, {
        'graph': graph_detail(g), 'dims': dims, 'words': count, 'fock_dim': pf.fock.dim,
    })


# groups

@suite('groups pd')
def groups_pd_trial(t):
    g = trial_graph(t, max_vertices=3)
    G = trial_group(t, g)
    D = t.config.block or int(t.rng.integers(1, 3))
    F = groups.random_pd_family(G, D, t.rng).validate()
    S = groups.ball(G, 2 if t.config.radius is None else t.config.radius)
    pick = sorted(t.rng.choice(len(S), size=min(len(S), 8), replace=False))
    verdicts = {
        'pd': groups.check_gp_pd(F, S),
        'theta_agreement': groups.check_theta_agreement(F, [S[i] for i in pick]),
    }
    return Outcome.of(verdicts, {
        'graph': graph_detail(g), 'groups': [H.name for H in G.groups], 'D': F.dim, 'ball': len(S),
    }, artifact={'values': [encode_array(f.values) for f in F.functions]})


@suite('groups ball')
def groups_ball_trial(t):
    """The ball agrees with all products of at most R generators; every element times its inverse is e."""
    g = trial_graph(t, max_vertices=3)
    G = trial_group(t, g)
    R = 2 if t.config.radius is None else t.config.radius
    S = groups.ball(G, R)
    gens = G.generators()
    brute = {G.identity().letters}
    for r in range(1, R + 1):
        for combo in cartesian(gens, repeat=r):
            brute.add(G.element([l for x in combo for l in x.letters]).letters)
    found = [x.letters for x in S]
    ordered = S[0].letters == () and all(len(a) <= len(b) for a, b in zip(S, S[1:]))
    inverses = sum(1 for x in S if (x * x.inverse()).letters != ())
    mismatch = len(set(found) ^ brute) + len(found) - len(set(found)) + inverses + (0 if ordered else 1)
    return Outcome.of({'ball': Verdict(mismatch == 0, float(mismatch), 0.0)}, {
        'graph': graph_detail(g), 'groups': [H.name for H in G.groups], 'radius': R, 'size': len(S),
    })


# dilate

@suite('dilate halmos')
def halmos_trial(t):
    n = t.config.block or int(t.rng.integers(1, 4))
    T = random_contraction(n, t.rng)
    U = dilate.halmos(T)
    tol = 1e-9
    unitarity = fro_norm(U.conj().T @ U - np.eye(2 * n))
    corner = fro_norm(U[:n, :n] - T)
    return Outcome.of({
        'unitarity': Verdict(unitarity <= tol, unitarity, tol),
        'corner': Verdict(corner <= tol, corner, tol),
    }, {'n': n}, artifact={'T': encode_array(T)})


@suite('dilate egervary')
def egervary_trial(t):
    n = t.config.block or int(t.rng.integers(1, 4))
    N = t.config.degree or int(t.rng.integers(1, 7))
    T = random_contraction(n, t.rng)
    dil = dilate.egervary(T, N)
    tol = 1e-9
    u, p = dil.unitarity_residual(), dil.power_residual(T)
    return Outcome.of({
        'unitarity': Verdict(u <= tol, u, tol),
        'powers': Verdict(p <= tol, p, tol),
    }, {'n': n, 'degree': N}, artifact={'T': encode_array(T), 'degree': N})


@suite('dilate gram')
def dilation_gram_trial(t):
    g = trial_graph(t, max_vertices=3)
    contractions = dilate.random_doubly_commuting(g, t.config.block or 2, t.rng)
    length = min(3, t.config.max_word_len)
    words = [verify.random_reduced_word(g, t.rng, length, min_len=1) for _ in range(2)]
    report, verdict = dilate.check_dilation_gram(g, contractions, words, seed=t.rng)
    return Outcome.of({'gram': verdict}, {'graph': graph_detail(g)}, spectrum=report.eig.eigenvalues,
                      artifact={'contractions': [encode_array(T) for T in contractions],
                                'words': [list(w) for w in words]})


@suite('dilate vn')
def vn_trial(t):
    g = trial_graph(t, max_vertices=2)
    contractions = dilate.random_doubly_commuting(g, t.config.block or 2, t.rng)
    poly = dilate.random_polynomial(g, t.rng, degree=t.config.degree or 2)
    report = dilate.vn_surrogate(g, contractions, poly, radius=t.config.radius)
    return Outcome.of({'vn': report.verdict}, {'graph': graph_detail(g), 'translation_norms': report.translation_norms},
                      artifact={'contractions': [encode_array(T) for T in contractions],
                                'polynomial': [[c, list(w)] for c, w in poly]})


@suite('dilate independence')
def dilation_independence_trial(t):
    g = trial_graph(t, max_vertices=3)
    cutoff = max(2, min(4, t.config.max_word_len + 1))
    system = dilate.IndependentContractions(g, t.config.block or 2, t.rng, cutoff=cutoff)
    word = nonempty_reduced_word(g, t.rng, cutoff - 1)
    verdicts = {'independence': dilate.check_gp_independence_of_dilation(system, word, t.rng)}
    try:
        verdicts['surrogate'] = dilate.check_gp_independence_surrogate(system, word[:2], t.rng)
    except HypothesisNotMet as e:
        logger.debug(f"translation check skipped: {e}")
    return Outcome.of(verdicts, {'graph': graph_detail(g), 'fock_dim': system.fock.dim},
                      artifact={'local': [encode_array(T) for T in system.local], 'word': list(word)})


# words

@lru_cache(maxsize=8)
def oracle_graphs(max_vertices):
    return tuple(g for n in range(1, max_vertices + 1) for g in SimplicialGraph.all_graphs(n))


def _swap_class(g, w):
    seen = {w}
    stack = [w]
    while stack:
        u = stack.pop()
        for i in range(len(u) - 1):
            if u[i] != u[i + 1] and g.adjacent(u[i], u[i + 1]):
                s = u[:i] + (u[i + 1], u[i]) + u[i + 2:]
                if s not in seen:
                    seen.add(s)
                    stack.append(s)
    return seen


def _collapse(u, first=True):
    spots = [i for i in range(len(u) - 1) if u[i] == u[i + 1]]
    i = spots[0] if first else spots[-1]
    return u[:i] + u[i + 1:]


def _oracle(g, w, memo, conflicts):
    """Least reduced representative found by swapping and merging neighbours, with no reference to graphwords."""
    if w in memo:
        return memo[w]
    members = sorted(_swap_class(g, w))
    mergeable = [u for u in members if any(u[i] == u[i + 1] for i in range(len(u) - 1))]
    if not mergeable:
        out = members[0]
    else:
        out = _oracle(g, _collapse(mergeable[0]), memo, conflicts)
        other = _oracle(g, _collapse(mergeable[-1], first=False), memo, conflicts)
        if other != out:
            conflicts.append(w)
    for u in members:
        memo[u] = out
    return out


@suite('words oracle', count=lambda cfg: len(oracle_graphs(cfg.max_vertices)))
def oracle_trial(t):
    """Exhaustive over one graph: normal forms against the oracle, then standard-form uniqueness."""
    g = oracle_graphs(t.config.max_vertices)[t.index]
    memo, conflicts = {}, []
    mismatches = words = 0
    for w in graphwords.iter_words(g.n_vertices, t.config.max_word_len):
        words += 1
        if graphwords.normal_form(g, w) != _oracle(g, w, memo, conflicts):
            mismatches += 1
    nonunique = forms = 0
    for w in sorted(set(memo.values())):
        for v0 in sorted(set(w)):
            forms += 1
            try:
                graphwords.standard_form(g, w, v0)
            except NonUnique:
                nonunique += 1
    bad = mismatches + len(conflicts) + nonunique
    return Outcome(bad == 0, float(bad), {
        'graph': graph_detail(g), 'words': words, 'mismatches': mismatches,
        'length_conflicts': len(conflicts), 'standard_forms': forms, 'nonunique': nonunique,
    })


# Orchestration

def run_trial(entry, cfg, index):
    rng = np.random.default_rng([cfg.seed, index])
    try:
        out = entry.trial(Trial(index, rng, cfg))
    except (HypothesisNotMet, SizeCap, BudgetExceeded, CapExceeded) as exc:
        logger.debug(f"{cfg.name} trial {index} skipped: {exc}")
        return TrialRecord(index, 'skipped', 0.0, {'reason': f"{type(exc).__name__}: {exc}"})
    except GraphStarError as exc:
        logger.warning(f"{cfg.name} trial {index} raised {type(exc).__name__}: {exc}")
        detail = {'error': type(exc).__name__, 'message': str(exc)}
        return TrialRecord(index, 'failed', math.inf, detail, {'trial': index, **detail})
    if not out.passed:
        logger.warning(f"{cfg.name} trial {index} failed with residual {out.residual:.3e}")
    artifact = None if out.passed else {'trial': index, 'detail': out.detail, **(out.artifact or {})}
    status = 'passed' if out.passed else 'failed'
    return TrialRecord(index, status, out.residual, out.detail, artifact, out.spectrum, out.noncommutative)


def _tolerances(tol):
    if tol is None:
        return nullcontext()
    current = dict(getattr(settings, 'GRAPHSTAR', {}))
    return override_settings(GRAPHSTAR={**current, 'PSD_TOL': tol, 'EQ_TOL': tol})


def run_suite(cfg):
    entry = SUITES[cfg.name]
    trials = entry.count(cfg) if entry.count else cfg.trials
    threads = cfg.threads or setting('THREADS')
    logger.info(f"suite {cfg.name}: {trials} trials, seed {cfg.seed}, {threads} thread(s)")
    with _tolerances(cfg.tol):
        if threads > 1:
            with ThreadPoolExecutor(max_workers=threads) as pool:
                records = list(pool.map(lambda k: run_trial(entry, cfg, k), range(trials)))
        else:
            records = [run_trial(entry, cfg, k) for k in range(trials)]
    report = assemble_report(cfg, entry, records)
    logger.info(f"suite {cfg.name}: {report['passes']} passed, {report['failures']} failed, "
                f"{report['skipped']} skipped")
    return SuiteResult(report, tuple(records))


def assemble_report(cfg, entry, records):
    passes = sum(1 for r in records if r.status == 'passed')
    failures = sum(1 for r in records if r.status == 'failed')
    skipped = sum(1 for r in records if r.status == 'skipped')
    ran = [r for r in records if r.status != 'skipped']
    guards = {}
    if entry.guarded:
        flagged = [r for r in ran if r.noncommutative is not None]
        fraction = sum(1 for r in flagged if r.noncommutative) / len(flagged) if flagged else 0.0
        guards['noncommutative'] = {
            'fraction': fraction, 'required': VACUITY_FRACTION, 'passed': fraction >= VACUITY_FRACTION,
        }
    passed = failures == 0 and passes > 0 and all(gd['passed'] for gd in guards.values())
    report = {
        'schema_version': setting('REPORT_SCHEMA_VERSION'),
        'suite': cfg.name,
        'seed': cfg.seed,
        'trials': len(records),
        'config': cfg.as_dict(),
        'passes': passes,
        'failures': failures,
        'skipped': skipped,
        'worst_residual': max((r.residual for r in ran), default=0.0),
        'guards': guards,
        'passed': passed,
        'results': [
            {'trial': r.index, 'status': r.status, 'residual': r.residual, 'detail': r.detail} for r in records
        ],
        'artifacts': [r.artifact for r in records if r.artifact is not None],
        'timestamp': timezone.now().isoformat(),
    }
    return plain(report)


def write_spectra(path, result):
    """One CSV row per trial that produced a Gram spectrum: suite, trial, then the eigenvalues."""
    with open(path, 'w', newline='') as fh:
        writer = csv.writer(fh)
        writer.writerow(['suite', 'trial', 'eigenvalues'])
        for r in result.records:
            if r.spectrum is not None:
                writer.writerow([result.report['suite'], r.index] + [repr(float(x)) for x in r.spectrum])
