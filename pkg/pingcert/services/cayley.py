"""Finite Cayley-graph balls: construction, window distances, geodesics,
thinness of triangles and quasigeodesic predicates."""

import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Optional, Sequence

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import dijkstra

from pingcert.config import get_settings
from pingcert.errors import RadiusTooSmallError, ResourceBudgetError, WindowError
from pingcert.services.presentation import WordOracle
from pingcert.services.words import Word, alphabet_codes, invert_letters

logger = logging.getLogger(__name__)

OUTSIDE = -1
STRATEGIES = ("bucketed", "pairwise")


@dataclass(frozen=True)
class QuasiParams:
    """(λ, ε, L); L=None means infinity, i.e. the global definition."""

    lam: Fraction
    eps: Fraction
    L: Optional[Fraction] = None

    def __post_init__(self):
        if self.lam <= 0:
            raise ValueError("lambda must be positive")
        if self.eps < 0:
            raise ValueError("epsilon must be nonnegative")


@dataclass(frozen=True)
class PathInBall:
    start: int
    letters: tuple[int, ...]
    vertices: tuple[int, ...]

    def __len__(self) -> int:
        return len(self.letters)

    @property
    def end(self) -> int:
        return self.vertices[-1]

    @property
    def label(self) -> Word:
        return Word(self.letters)


@dataclass(frozen=True)
class QuasiCheck:
    passed: bool
    witness: Optional[tuple[int, int]] = None  # (i, j) letter offsets of p'
    geodesic_length: Optional[int] = None


@dataclass(frozen=True)
class DeltaEstimate:
    delta: int
    mode: str
    triangles: int
    seed: Optional[int] = None
    method: str = "interval-scan"


class CayleyBall:
    """Radius-R ball; vertex 0 is the identity, vertices sorted shortlex."""

    def __init__(self, oracle: WordOracle, radius: int, words: list[tuple[int, ...]], edges: np.ndarray, offsets: list[int]):
        self.oracle = oracle
        self.radius = radius
        self.words = words
        self.edges = edges
        self.offsets = offsets
        self.codes = alphabet_codes(oracle.rank)
        self._col = {c: j for j, c in enumerate(self.codes)}
        self.layer = np.zeros(len(words), dtype=np.int32)
        for k in range(radius + 1):
            self.layer[offsets[k] : offsets[k + 1]] = k
        self._buckets: dict = {}
        for i, w in enumerate(words):
            self._buckets.setdefault(oracle.fingerprint(w), []).append(i)
        self._graph: Optional[csr_matrix] = None
        self._dense: Optional[np.ndarray] = None
        self._rows: dict[int, np.ndarray] = {}
        self.dense_limit = get_settings().dense_distance_limit

    @property
    def size(self) -> int:
        return len(self.words)

    def sphere_sizes(self) -> list[int]:
        return [self.offsets[k + 1] - self.offsets[k] for k in range(self.radius + 1)]

    def word(self, v: int) -> Word:
        return Word(self.words[v])

    def col(self, code: int) -> int:
        return self._col[code]

    def step(self, v: int, code: int) -> int:
        return int(self.edges[v, self._col[code]])

    def walk(self, letters: Sequence[int], start: int = 0) -> Optional[list[int]]:
        """Vertex sequence of the path, or None if it leaves the ball."""
        out = [start]
        v = start
        for c in letters:
            v = int(self.edges[v, self._col[c]])
            if v == OUTSIDE:
                return None
            out.append(v)
        return out

    def path(self, letters: Sequence[int], start: int = 0) -> PathInBall:
        vertices = self.walk(letters, start)
        if vertices is None:
            raise WindowError(f"path {Word(tuple(letters))} leaves the radius-{self.radius} ball")
        return PathInBall(start=start, letters=tuple(letters), vertices=tuple(vertices))

    def locate(self, letters: Sequence[int]) -> Optional[int]:
        """Vertex representing the word, or None if it lies outside the ball."""
        vertices = self.walk(letters)
        if vertices is not None:
            return vertices[-1]
        reduced = self.oracle.reduce_letters(letters)
        vertices = self.walk(reduced)
        if vertices is not None:
            return vertices[-1]
        for i in self._buckets.get(self.oracle.fingerprint(reduced), ()):
            if self.oracle.fingerprint_is_exact or self.oracle.is_trivial_letters(
                tuple(reduced) + invert_letters(self.words[i])
            ):
                return i
        return None

    # distances

    @property
    def graph(self) -> csr_matrix:
        if self._graph is None:
            rows, cols = np.nonzero(self.edges != OUTSIDE)
            targets = self.edges[rows, cols]
            data = np.ones(len(rows), dtype=np.int8)
            self._graph = csr_matrix((data, (rows, targets)), shape=(self.size, self.size))
            self._graph.sum_duplicates()
        return self._graph

    @property
    def is_tree(self) -> bool:
        """The window graph is acyclic, as in every free-group window."""
        graph = self.graph
        return not graph.diagonal().any() and graph.nnz == 2 * (self.size - 1)

    def _ensure_rows(self, sources: Sequence[int]) -> None:
        if self.size <= self.dense_limit:
            if self._dense is None:
                full = dijkstra(self.graph, directed=False, unweighted=True)
                self._dense = full.astype(np.int32)
            return
        missing = sorted({int(s) for s in sources if int(s) not in self._rows})
        if missing:
            block = dijkstra(self.graph, directed=False, unweighted=True, indices=missing)
            for s, row in zip(missing, np.atleast_2d(block)):
                self._rows[s] = row.astype(np.int32)

    def distance_row(self, v: int) -> np.ndarray:
        self._ensure_rows([v])
        if self._dense is not None:
            return self._dense[v]
        return self._rows[int(v)]

    def distances(self, sources: Sequence[int], targets: Sequence[int]) -> np.ndarray:
        self._ensure_rows(sources)
        src = np.asarray(sources, dtype=np.int64)
        tgt = np.asarray(targets, dtype=np.int64)
        if self._dense is not None:
            return self._dense[np.ix_(src, tgt)]
        return np.stack([self._rows[int(s)][tgt] for s in src]) if len(src) else np.zeros((0, len(tgt)), np.int32)

    def distance(self, u: int, v: int) -> int:
        return int(self.distance_row(u)[v])

    def distance_to_set(self, sources: Sequence[int]) -> np.ndarray:
        """Window distance from every vertex to the nearest source."""
        if not len(sources):
            raise ValueError("empty source set")
        dist = dijkstra(self.graph, directed=False, unweighted=True, indices=list(sources), min_only=True)
        return dist.astype(np.int32)

    def contains_geodesics(self, u: int, v: int) -> bool:
        """Every u–v geodesic of the group lies in the ball (and d is exact)."""
        return min(int(self.layer[u]), int(self.layer[v])) + self.distance(u, v) <= self.radius

    def interval(self, u: int, v: int) -> np.ndarray:
        """Indices of vertices lying on some u–v geodesic."""
        du = self.distance_row(u)
        dv = self.distance_row(v)
        return np.flatnonzero(du + dv == du[v])

    def truncate(self, radius: int) -> "CayleyBall":
        """The sub-window of the given radius as a ball of its own."""
        if radius > self.radius:
            raise RadiusTooSmallError(f"cannot truncate radius {self.radius} ball to {radius}")
        n = self.offsets[radius + 1]
        edges = self.edges[:n].copy()
        edges[edges >= n] = OUTSIDE
        return CayleyBall(self.oracle, radius, self.words[:n], edges, self.offsets[: radius + 2])

    def non_backtracking_paths(self, max_length: int) -> Iterator[PathInBall]:
        """Every freely reduced path from the identity of length 1..max_length."""
        stack: list[tuple[tuple[int, ...], tuple[int, ...]]] = [((), (0,))]
        while stack:
            letters, vertices = stack.pop()
            if letters:
                yield PathInBall(start=0, letters=letters, vertices=vertices)
            if len(letters) == max_length:
                continue
            for c in reversed(self.codes):
                if letters and letters[-1] == -c:
                    continue
                nxt = int(self.edges[vertices[-1], self._col[c]])
                if nxt != OUTSIDE:
                    stack.append((letters + (c,), vertices + (nxt,)))


def build_ball(oracle: WordOracle, radius: int, strategy: str = "bucketed", max_vertices: Optional[int] = None) -> CayleyBall:
    """BFS from the identity; canonical words are shortlex-least geodesics."""
    if radius < 0:
        raise ValueError("radius must be nonnegative")
    if strategy not in STRATEGIES:
        raise ValueError(f"unknown identification strategy {strategy!r}")
    budget = max_vertices if max_vertices is not None else get_settings().max_ball_vertices

    codes = alphabet_codes(oracle.rank)
    col = {c: j for j, c in enumerate(codes)}
    words: list[tuple[int, ...]] = [()]
    edges: list[list[int]] = [[OUTSIDE] * len(codes)]
    offsets = [0, 1]
    buckets: dict = {oracle.fingerprint(()): [0]}
    exact = oracle.fingerprint_is_exact

    def identify(candidate: tuple[int, ...], lo: int) -> Optional[int]:
        if strategy == "bucketed":
            for i in buckets.get(oracle.fingerprint(candidate), ()):
                if exact or (i >= lo and oracle.is_trivial_letters(candidate + invert_letters(words[i]))):
                    return i
            return None
        for i in range(lo, len(words)):
            if oracle.is_trivial_letters(candidate + invert_letters(words[i])):
                return i
        return None

    for k in range(radius + 1):
        start, end = offsets[k], offsets[k + 1]
        lo = offsets[k - 1] if k > 0 else 0
        for v in range(start, end):
            for c in codes:
                j = col[c]
                if edges[v][j] != OUTSIDE:
                    continue
                candidate = words[v] + (c,)
                target = identify(candidate, lo)
                if target is None:
                    if k == radius:
                        continue
                    if len(words) >= budget:
                        raise ResourceBudgetError(f"ball exceeds {budget} vertices", completed_radius=k)
                    target = len(words)
                    words.append(candidate)
                    edges.append([OUTSIDE] * len(codes))
                    buckets.setdefault(oracle.fingerprint(candidate), []).append(target)
                edges[v][j] = target
                edges[target][col[-c]] = v
        if k < radius:
            offsets.append(len(words))
            logger.debug("sphere %d: %d vertices", k + 1, offsets[-1] - offsets[-2])

    logger.info("built radius-%d ball with %d vertices (%s)", radius, len(words), strategy)
    return CayleyBall(oracle, radius, words, np.asarray(edges, dtype=np.int32), offsets)


def geodesics_between(ball: CayleyBall, u: int, v: int, cap: Optional[int] = None) -> tuple[list[PathInBall], bool]:
    """All u–v geodesics up to `cap`; the flag reports truncation."""
    if not ball.contains_geodesics(u, v):
        raise RadiusTooSmallError(
            f"radius too small: geodesics from {ball.word(u)} to {ball.word(v)} may leave the radius-{ball.radius} ball"
        )
    cap = cap if cap is not None else get_settings().geodesic_cap
    row = ball.distance_row(v)
    found: list[PathInBall] = []
    stack: list[tuple[tuple[int, ...], tuple[int, ...]]] = [((), (u,))]
    while stack:
        letters, vertices = stack.pop()
        x = vertices[-1]
        if x == v:
            if len(found) == cap:
                return found, True
            found.append(PathInBall(start=u, letters=letters, vertices=vertices))
            continue
        for c in reversed(ball.codes):
            y = int(ball.edges[x, ball.col(c)])
            if y != OUTSIDE and row[y] == row[x] - 1:
                stack.append((letters + (c,), vertices + (y,)))
    return found, False


def _geodesic_layers(ball: CayleyBall, u: int, v: int) -> list[np.ndarray]:
    """Vertices on u–v geodesics, grouped by distance from u."""
    du = ball.distance_row(u)
    dv = ball.distance_row(v)
    n = int(du[v])
    on = du + dv == n
    return [np.flatnonzero(on & (du == t)) for t in range(n + 1)]


def _farthest_geodesic(ball: CayleyBall, points: np.ndarray, layers: list[np.ndarray]) -> np.ndarray:
    """For each point, the largest distance to a single geodesic of the side.

    Bottleneck recursion over the geodesic layers: the value at a vertex is
    the best over its predecessors, capped by the point's distance to it.
    """
    best = ball.distances(points, layers[0])
    for prev, cur in zip(layers, layers[1:]):
        adjacent = (ball.edges[cur][:, :, None] == prev[None, None, :]).any(axis=1)
        reach = np.where(adjacent[None, :, :], best[:, None, :], -1).max(axis=2)
        best = np.minimum(ball.distances(points, cur), reach)
    return best[:, 0]


def triangle_thinness(ball: CayleyBall, y: int, z: int) -> int:
    """Worst thinness of the triangle (1, y, z) over all choices of geodesic sides."""
    sides = (_geodesic_layers(ball, 0, y), _geodesic_layers(ball, 0, z), _geodesic_layers(ball, y, z))
    worst = 0
    for a in range(3):
        b, c = [s for s in range(3) if s != a]
        points = np.concatenate(sides[a])
        far = np.minimum(_farthest_geodesic(ball, points, sides[b]), _farthest_geodesic(ball, points, sides[c]))
        worst = max(worst, int(far.max()))
    return worst


def estimate_delta(
    ball: CayleyBall,
    mode: str = "exhaustive",
    samples: Optional[int] = None,
    seed: Optional[int] = None,
) -> DeltaEstimate:
    """Thinness of geodesic triangles with a vertex at the identity.

    A side of length n is never more than n // 2 away from the other two, so
    triangles whose longest side cannot beat the running maximum are skipped.
    """
    if ball.radius < 2:
        raise RadiusTooSmallError("delta estimation needs radius >= 2")
    settings = get_settings()

    if mode == "exhaustive":
        if ball.is_tree:
            logger.info("delta_hat=0 on acyclic radius-%d window", ball.radius)
            return DeltaEstimate(delta=0, mode=mode, triangles=0, method="tree")
        pairs = _admissible_pairs(ball)
    elif mode == "sampled":
        seed = settings.default_seed if seed is None else seed
        pairs = _sampled_pairs(ball, samples or settings.delta_samples, seed)
    else:
        raise ValueError(f"unknown delta mode {mode!r}")

    delta = 0
    triangles = 0
    for y, z, bound in pairs:
        triangles += 1
        if bound > delta:
            delta = max(delta, triangle_thinness(ball, y, z))

    if triangles == 0:
        raise WindowError("no admissible triangle in window")
    logger.info("delta_hat=%d over %d triangles (%s, R=%d)", delta, triangles, mode, ball.radius)
    return DeltaEstimate(delta=delta, mode=mode, triangles=triangles, seed=seed if mode == "sampled" else None)


def _side_bounds(ball: CayleyBall, y: int, zs: np.ndarray, row: np.ndarray) -> np.ndarray:
    return np.maximum(np.maximum(ball.layer[zs], ball.layer[y]), row[zs]) // 2


def _admissible_pairs(ball: CayleyBall) -> Iterator[tuple[int, int, int]]:
    for y in range(ball.size):
        row = ball.distance_row(y)
        zs = np.flatnonzero(np.minimum(ball.layer, ball.layer[y]) + row <= ball.radius)
        zs = zs[zs >= y]
        yield from zip([y] * len(zs), zs.tolist(), _side_bounds(ball, y, zs, row).tolist())


def _sampled_pairs(ball: CayleyBall, count: int, seed: int) -> Iterator[tuple[int, int, int]]:
    rng = np.random.default_rng(seed)
    for _ in range(count):
        y = int(rng.integers(ball.size))
        row = ball.distance_row(y)
        admissible = np.flatnonzero(np.minimum(ball.layer, ball.layer[y]) + row <= ball.radius)
        z = int(admissible[rng.integers(len(admissible))])
        yield y, z, int(_side_bounds(ball, y, np.array([z]), row)[0])


def check_local_quasigeodesic(ball: CayleyBall, p: PathInBall, q: QuasiParams) -> QuasiCheck:
    """|γ| >= λ|p′| − ε for every subpath p′ with |p′| < L."""
    n = len(p)
    for i in range(n + 1):
        row = ball.distance_row(p.vertices[i])
        for j in range(i + 1, n + 1):
            if q.L is not None and j - i >= q.L:
                break
            u, v = p.vertices[i], p.vertices[j]
            d = int(row[v])
            if min(int(ball.layer[u]), int(ball.layer[v])) + d > ball.radius:
                raise RadiusTooSmallError(f"radius too small to measure subpath [{i}, {j}]")
            if d < q.lam * (j - i) - q.eps:
                return QuasiCheck(passed=False, witness=(i, j), geodesic_length=d)
    return QuasiCheck(passed=True)
