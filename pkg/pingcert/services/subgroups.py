"""Subgroup membership, quasiconvexity estimates, double cosets, relative
Cayley graphs and malnormality on a window."""

import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Hashable, Optional, Sequence, Union

import networkx as nx
import numpy as np

from pingcert.errors import RadiusTooSmallError, WindowError
from pingcert.services.cayley import CayleyBall
from pingcert.services.folding import FoldedGraph
from pingcert.services.presentation import OracleKind, WordOracle
from pingcert.services.words import (
    Word,
    alphabet_codes,
    cyclically_reduce,
    invert_letters,
    reduce_letters,
    shortlex_key,
)

logger = logging.getLogger(__name__)


class Membership(str, Enum):
    YES = "yes"
    NO = "no"
    UNKNOWN = "unknown"


class MembershipMode(str, Enum):
    TRIVIAL = "trivial"
    FOLDED = "folded"
    CYCLIC = "cyclic"
    BOUNDED = "bounded"


@dataclass(frozen=True)
class SubgroupSpec:
    oracle: WordOracle = field(repr=False)
    generators: tuple[Word, ...]
    name: str = "H"

    def __post_init__(self):
        for g in self.generators:
            if self.oracle.is_trivial(g):
                raise ValueError(f"generator {g} of subgroup {self.name} is trivial")

    def format(self) -> str:
        names = self.oracle.presentation.names
        return "<" + ", ".join(g.format(names) for g in self.generators) + ">"


def power_letters(h: Word, k: int) -> tuple[int, ...]:
    """A compact word for h^k built from the cyclically reduced core."""
    core, conj = cyclically_reduce(h)
    body = core.letters * k if k >= 0 else invert_letters(core.letters) * -k
    return reduce_letters(conj.letters + body + invert_letters(conj.letters))


class MembershipOracle:
    """Decides g ∈ H. Exact in trivial/folded/cyclic modes; the bounded mode
    answers inside its validity radius and says UNKNOWN beyond it.
    `bounded=True` forces the window closure even when an exact mode exists."""

    def __init__(self, spec: SubgroupSpec, ball: Optional[CayleyBall] = None, bounded: bool = False):
        self.spec = spec
        self.oracle = spec.oracle
        self.validity_radius: Optional[int] = None
        self._ball = ball
        self._folded: Optional[FoldedGraph] = None
        self._bounded: set[int] = set()
        self._elements: dict[CayleyBall, np.ndarray] = {}
        gens = spec.generators

        if not gens:
            self.mode = MembershipMode.TRIVIAL
        elif not bounded and self.oracle.kind is OracleKind.FREE_GROUP:
            self.mode = MembershipMode.FOLDED
            self._folded = FoldedGraph(gens)
        elif not bounded and len(gens) == 1 and any(self.oracle.abelian_image(gens[0].letters)):
            self.mode = MembershipMode.CYCLIC
            self._h = gens[0]
            self._h_image = self.oracle.abelian_image(gens[0].letters)
            self._pivot = next(i for i, x in enumerate(self._h_image) if x)
        else:
            if ball is None:
                raise WindowError(f"subgroup {spec.name} needs a window for bounded membership")
            self.mode = MembershipMode.BOUNDED
            self._close_in_ball(ball)

    @property
    def exact(self) -> bool:
        return self.mode is not MembershipMode.BOUNDED

    def _close_in_ball(self, ball: CayleyBall) -> None:
        steps = [g.letters for g in self.spec.generators] + [invert_letters(g.letters) for g in self.spec.generators]
        seen = {0}
        frontier = [0]
        while frontier:
            nxt = []
            for v in frontier:
                for s in steps:
                    u = ball.locate(ball.words[v] + s)
                    if u is not None and u not in seen:
                        seen.add(u)
                        nxt.append(u)
            frontier = nxt
        self._bounded = seen
        longest = max(len(g) for g in self.spec.generators)
        self.validity_radius = max(ball.radius - longest, 0)
        logger.info("bounded membership for %s: %d window elements, valid to radius %d", self.spec.name, len(seen), self.validity_radius)

    def _cyclic_exponent(self, letters: Sequence[int]) -> Optional[int]:
        image = self.oracle.abelian_image(letters)
        step = self._h_image[self._pivot]
        if image[self._pivot] % step:
            return None
        k = image[self._pivot] // step
        if any(a != k * b for a, b in zip(image, self._h_image)):
            return None
        return k

    def is_member(self, letters: Union[Word, Sequence[int]]) -> Membership:
        if isinstance(letters, Word):
            letters = letters.letters
        if self.mode is MembershipMode.TRIVIAL:
            return Membership.YES if self.oracle.is_trivial_letters(letters) else Membership.NO
        if self.mode is MembershipMode.FOLDED:
            return Membership.YES if self._folded.accepts(letters) else Membership.NO
        if self.mode is MembershipMode.CYCLIC:
            k = self._cyclic_exponent(letters)
            if k is None:
                return Membership.NO
            rest = tuple(letters) + power_letters(self._h, -k)
            return Membership.YES if self.oracle.is_trivial_letters(rest) else Membership.NO
        v = self._ball.locate(letters)
        if v is None or self._ball.layer[v] > self.validity_radius:
            return Membership.UNKNOWN
        return Membership.YES if v in self._bounded else Membership.NO

    def coset_fingerprint(self, letters: Sequence[int]) -> Hashable:
        """Equal right cosets Hg share a fingerprint (exact when folded)."""
        if self.mode is MembershipMode.TRIVIAL:
            return self.oracle.fingerprint(letters)
        if self.mode is MembershipMode.FOLDED:
            return self._folded.coset_key(letters)
        if self.mode is MembershipMode.CYCLIC:
            image = self.oracle.abelian_image(letters)
            k = image[self._pivot] // self._h_image[self._pivot]
            return tuple(a - k * b for a, b in zip(image, self._h_image))
        return ()

    @property
    def coset_fingerprint_is_exact(self) -> bool:
        if self.mode is MembershipMode.TRIVIAL:
            return self.oracle.fingerprint_is_exact
        return self.mode is MembershipMode.FOLDED

    def elements_in_ball(self, ball: CayleyBall) -> np.ndarray:
        """Window vertices lying in the subgroup (within validity)."""
        if ball in self._elements:
            return self._elements[ball]
        if self.mode is MembershipMode.BOUNDED:
            if ball is not self._ball:
                raise WindowError(f"bounded membership for {self.spec.name} is tied to its own window")
            limit = self.validity_radius
            found = sorted(v for v in self._bounded if ball.layer[v] <= limit)
        else:
            found = [v for v in range(ball.size) if self.is_member(ball.words[v]) is Membership.YES]
        self._elements[ball] = np.array(found, dtype=np.int64)
        return self._elements[ball]

    def elements_up_to(self, max_length: int) -> list[Word]:
        """Nontrivial subgroup elements as words of at most max_length letters, shortlex order."""
        if self.mode is MembershipMode.TRIVIAL:
            return []
        if self.mode is MembershipMode.FOLDED:
            found = set(self._folded.closed_reduced_paths(max_length))
        elif self.mode is MembershipMode.CYCLIC:
            found = set()
            k = 1
            while True:
                batch = [self.oracle.reduce_letters(power_letters(self._h, s * k)) for s in (1, -1)]
                fits = [w for w in batch if len(w) <= max_length]
                found.update(w for w in fits if w)
                # |h^k| grows at least like k times the l1 norm of its abelian image
                if k * sum(abs(x) for x in self._h_image) > max_length:
                    break
                k += 1
        else:
            limit = min(max_length, self.validity_radius)
            found = {self._ball.words[v] for v in self._bounded if 0 < self._ball.layer[v] <= limit}
        return [Word(w) for w in sorted(found, key=shortlex_key)]


def estimate_mu(spec: SubgroupSpec, ball: CayleyBall, membership: Optional[MembershipOracle] = None) -> int:
    """Largest window distance from a geodesic between subgroup elements to the subgroup."""
    membership = membership or MembershipOracle(spec, ball)
    elements = membership.elements_in_ball(ball)
    if len(elements) < 2:
        raise WindowError(f"fewer than two elements of {spec.name} in the radius-{ball.radius} window")
    to_subgroup = ball.distance_to_set(elements)
    mu = 0
    pairs = 0
    for i, h1 in enumerate(elements):
        for h2 in elements[i + 1 :]:
            if not ball.contains_geodesics(int(h1), int(h2)):
                continue
            pairs += 1
            mu = max(mu, int(to_subgroup[ball.interval(int(h1), int(h2))].max()))
    if pairs == 0:
        raise WindowError(f"no pair of {spec.name} elements has its geodesics inside the window")
    logger.info("mu_hat(%s)=%d over %d pairs (R=%d)", spec.name, mu, pairs, ball.radius)
    return mu


SIDES = ("left-only", "right-only", "both")


def shortest_double_coset_rep(h: Word, g0: MembershipOracle, ball: CayleyBall, side: str = "both") -> Word:
    """Shortlex-least geodesic word in G0·h·G0 (or G0·h, h·G0)."""
    if side not in SIDES:
        raise ValueError(f"side must be one of {SIDES}")
    hv = ball.locate(h.letters)
    if hv is None:
        raise WindowError(f"{h} lies outside the radius-{ball.radius} window")
    if g0.mode is MembershipMode.TRIVIAL:
        return ball.word(hv)

    # |g h| <= |h| forces |g| <= 2|h|; the same window bounds the two-sided search.
    bound = 2 * int(ball.layer[hv])
    if ball.radius < bound or (g0.validity_radius is not None and g0.validity_radius < bound):
        raise WindowError(f"window too small to certify minimality of {h} (needs radius {bound})")
    subgroup = [int(v) for v in g0.elements_in_ball(ball) if ball.layer[v] <= bound]
    lefts = subgroup if side in ("left-only", "both") else [0]
    rights = subgroup if side in ("right-only", "both") else [0]

    best = hv
    for g1 in lefts:
        for g2 in rights:
            v = ball.locate(ball.words[g1] + ball.words[hv] + ball.words[g2])
            if v is not None and v < best:
                best = v
    return ball.word(best)


@dataclass
class RelativeBall:
    """Ball around H·1 in the relative Cayley graph on right cosets Hg."""

    spec: SubgroupSpec
    radius: int
    representatives: list[tuple[int, ...]]
    layers: list[int]
    transitions: list[dict[int, int]]
    graph: nx.MultiDiGraph

    @property
    def size(self) -> int:
        return len(self.representatives)

    def vertex_count(self, r: int) -> int:
        if r > self.radius:
            raise RadiusTooSmallError(f"relative ball has radius {self.radius} < {r}")
        return len(nx.single_source_shortest_path_length(self.graph, 0, cutoff=r))

    def counts(self) -> list[int]:
        return [self.vertex_count(r) for r in range(self.radius + 1)]

    def walk(self, letters: Sequence[int]) -> Optional[int]:
        v = 0
        for c in letters:
            v = self.transitions[v].get(c)
            if v is None:
                return None
        return v


def build_relative_ball(spec: SubgroupSpec, radius: int, membership: Optional[MembershipOracle] = None) -> RelativeBall:
    """BFS on right cosets from H·1; Hg = Hg′ iff g′g⁻¹ ∈ H."""
    membership = membership or MembershipOracle(spec)
    codes = alphabet_codes(spec.oracle.rank)
    reps: list[tuple[int, ...]] = [()]
    layers = [0]
    transitions: list[dict[int, int]] = [{}]
    buckets: dict = {membership.coset_fingerprint(()): [0]}
    exact = membership.coset_fingerprint_is_exact
    graph = nx.MultiDiGraph()
    graph.add_node(0, rep="")

    def identify(candidate: tuple[int, ...]) -> Optional[int]:
        for i in buckets.get(membership.coset_fingerprint(candidate), ()):
            if exact:
                return i
            answer = membership.is_member(reps[i] + invert_letters(candidate))
            if answer is Membership.UNKNOWN:
                raise WindowError(
                    f"membership undecided for coset test at relative radius {layers[i] + 1}; "
                    f"needs validity radius {len(reps[i]) + len(candidate)}"
                )
            if answer is Membership.YES:
                return i
        return None

    frontier = [0]
    for k in range(radius + 1):
        nxt = []
        for v in frontier:
            for c in codes:
                if c in transitions[v]:
                    continue
                candidate = reps[v] + (c,)
                target = identify(candidate)
                if target is None:
                    if k == radius:
                        continue
                    target = len(reps)
                    reps.append(candidate)
                    layers.append(k + 1)
                    transitions.append({})
                    buckets.setdefault(membership.coset_fingerprint(candidate), []).append(target)
                    graph.add_node(target, rep=spec.oracle.presentation.format_word(Word(candidate)))
                    nxt.append(target)
                transitions[v][c] = target
                graph.add_edge(v, target, label=c)
                if -c not in transitions[target]:
                    transitions[target][-c] = v
                    graph.add_edge(target, v, label=-c)
        frontier = nxt

    logger.info("relative ball of %s: radius %d, %d cosets", spec.name, radius, len(reps))
    return RelativeBall(spec=spec, radius=radius, representatives=reps, layers=layers, transitions=transitions, graph=graph)


def lemma6_constants(rel: RelativeBall, mu: int, delta: int) -> tuple[int, int]:
    """m = cosets within μ + 2δ of H·1 (closed ball), M = m² + 1."""
    r = mu + 2 * delta
    if rel.radius < r:
        raise RadiusTooSmallError(f"relative ball radius {rel.radius} < mu + 2 delta = {r}")
    m = rel.vertex_count(r)
    return m, m * m + 1


@dataclass(frozen=True)
class MalnormalVerdict:
    violation: bool
    radius: int
    g: Optional[Word] = None
    witness: Optional[Word] = None
    undecided: int = 0


def check_malnormal(spec: SubgroupSpec, ball: CayleyBall, membership: Optional[MembershipOracle] = None) -> MalnormalVerdict:
    """First g ∉ H with g h g⁻¹ ∈ H for a nontrivial window element h ∈ H."""
    membership = membership or MembershipOracle(spec, ball)
    elements = [int(v) for v in membership.elements_in_ball(ball) if v != 0]
    undecided = 0
    for g in range(ball.size):
        g_word = ball.words[g]
        answer = membership.is_member(g_word)
        if answer is Membership.UNKNOWN:
            undecided += 1
            continue
        if answer is Membership.YES:
            continue
        g_inv = invert_letters(g_word)
        for h in elements:
            conj = membership.is_member(g_word + ball.words[h] + g_inv)
            if conj is Membership.YES:
                logger.info("malnormality violation in %s: g=%s", spec.name, ball.word(g))
                return MalnormalVerdict(violation=True, radius=ball.radius, g=ball.word(g), witness=ball.word(h), undecided=undecided)
            if conj is Membership.UNKNOWN:
                undecided += 1
    return MalnormalVerdict(violation=False, radius=ball.radius, undecided=undecided)
