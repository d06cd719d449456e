"""Finite permutation quotients of free groups and the depth of their kernels."""

import logging
import re
from collections import deque
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
from sympy.combinatorics import Permutation

from pingcert.config import get_settings
from pingcert.errors import PresentationParseError, UnsupportedPresentationError
from pingcert.models.schemas import DepthReportRecord
from pingcert.services.instance import PingPongInstance, WindowAnalysis, build_instance
from pingcert.services.presentation import OracleKind
from pingcert.services.subgroups import SubgroupSpec, power_letters
from pingcert.services.words import DEFAULT_NAMES, Word, alphabet_codes, format_letters

logger = logging.getLogger(__name__)

PERM_LINE = re.compile(r"^perm:\s*(\w)\s*=\s*(.*)$")
CYCLE = re.compile(r"\(([^()]*)\)")


@dataclass(frozen=True)
class FiniteQuotientSpec:
    """Free group of the given rank mapped to Sym(degree), one image per generator."""

    rank: int
    degree: int
    images: tuple[Permutation, ...]
    names: tuple[str, ...] = DEFAULT_NAMES

    def __post_init__(self):
        if len(self.images) != self.rank:
            raise ValueError(f"need {self.rank} images, got {len(self.images)}")
        for p in self.images:
            if p.size != self.degree:
                raise ValueError(f"image {p} does not act on {self.degree} points")

    def arrays(self) -> dict[int, np.ndarray]:
        """Image of every letter code as a point map."""
        out = {}
        for i, p in enumerate(self.images):
            out[i + 1] = np.array(p.array_form, dtype=np.int64)
            out[-(i + 1)] = np.array((~p).array_form, dtype=np.int64)
        return out

    def image(self, w: Word) -> Permutation:
        result = Permutation(self.degree - 1)
        for c in w.letters:
            p = self.images[abs(c) - 1]
            result = result * (p if c > 0 else ~p)
        return result

    def order(self, w: Word) -> int:
        return self.image(w).order()

    def cycle_notation(self) -> dict[str, str]:
        return {self.names[i]: format_cycles(p) for i, p in enumerate(self.images)}

    def relabel(self, sigma: Permutation) -> "FiniteQuotientSpec":
        """Conjugate every image by sigma (a relabelling of the points)."""
        return FiniteQuotientSpec(self.rank, self.degree, tuple(~sigma * p * sigma for p in self.images), self.names)


@dataclass(frozen=True)
class DepthReport:
    spec: FiniteQuotientSpec
    depth: int
    witness: Word

    def record(self) -> DepthReportRecord:
        return DepthReportRecord(
            rank=self.spec.rank,
            degree=self.spec.degree,
            images=self.spec.cycle_notation(),
            depth=self.depth,
            witness=format_letters(self.witness.letters, self.spec.names),
        )


@dataclass(frozen=True)
class QuotientSearch:
    found: bool
    seed: int
    tried: int
    report: Optional[DepthReport] = None


def format_cycles(p: Permutation) -> str:
    cycles = [c for c in p.cyclic_form if len(c) > 1]
    if not cycles:
        return "()"
    return "".join("(" + " ".join(str(x + 1) for x in c) + ")" for c in cycles)


def parse_quotient_spec(text: str, names: Sequence[str] = DEFAULT_NAMES, rank: Optional[int] = None) -> FiniteQuotientSpec:
    """Parse `perm: a = (1 2 3)(4 5)` lines; points are 1-based, missing generators map to the identity."""
    cycles_by_name: dict[str, list[list[int]]] = {}
    degree = 1
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        match = PERM_LINE.match(line)
        if not match:
            raise PresentationParseError(line_no, f"expected 'perm: <gen> = <cycles>', got {line!r}")
        name, body = match.groups()
        if name not in names:
            raise PresentationParseError(line_no, f"unknown generator {name!r}")
        if CYCLE.sub("", body).strip():
            raise PresentationParseError(line_no, f"malformed cycle notation {body!r}")
        cycles = []
        for group in CYCLE.findall(body):
            try:
                points = [int(x) for x in group.split()]
            except ValueError:
                raise PresentationParseError(line_no, f"non-integer point in ({group})") from None
            if any(x < 1 for x in points) or len(set(points)) != len(points):
                raise PresentationParseError(line_no, f"invalid cycle ({group})")
            if points:
                degree = max(degree, max(points))
                cycles.append([x - 1 for x in points])
        cycles_by_name[name] = cycles

    rank = rank if rank is not None else max([names.index(n) + 1 for n in cycles_by_name] or [1])
    images = []
    for name in names[:rank]:
        p = Permutation(degree - 1)
        for cycle in cycles_by_name.get(name, []):
            p = p * Permutation([cycle], size=degree)
        images.append(p)
    return FiniteQuotientSpec(rank, degree, tuple(images), tuple(names))


def shortest_kernel_element(spec: FiniteQuotientSpec) -> DepthReport:
    """BFS over (image, last letter) states; the first reduced word reaching the identity is shortlex-least."""
    arrays = spec.arrays()
    codes = alphabet_codes(spec.rank)
    identity = np.arange(spec.degree, dtype=np.int64)
    start = (identity.tobytes(), 0)
    seen = {start}
    queue = deque([(identity, 0, ())])
    while queue:
        perm, last, word = queue.popleft()
        for c in codes:
            if c == -last:
                continue
            nxt = arrays[c][perm]
            letters = word + (c,)
            if np.array_equal(nxt, identity):
                logger.debug("kernel element %s at depth %d", letters, len(letters))
                return DepthReport(spec=spec, depth=len(letters), witness=Word(letters))
            state = (nxt.tobytes(), c)
            if state not in seen:
                seen.add(state)
                queue.append((nxt, c, letters))
    # a finite image always has a kernel; unreachable for rank >= 1
    raise ValueError("quotient has no kernel element")


def kernel_free_below(spec: FiniteQuotientSpec, n: int) -> bool:
    """No reduced word with 1 <= |w| < n maps to the identity (plain enumeration)."""
    arrays = spec.arrays()
    identity = np.arange(spec.degree, dtype=np.int64)
    stack = [(identity, 0, 0)]
    while stack:
        perm, last, length = stack.pop()
        if length and np.array_equal(perm, identity):
            return False
        if length + 1 >= n:
            continue
        for c in alphabet_codes(spec.rank):
            if c != -last:
                stack.append((arrays[c][perm], c, length + 1))
    return True


def find_deep_quotient(
    rank: int,
    n: int,
    budget: Optional[int] = None,
    max_degree: Optional[int] = None,
    seed: Optional[int] = None,
) -> QuotientSearch:
    """Seeded search, degree by degree, for a quotient whose kernel has no reduced word shorter than n."""
    if n < 1:
        raise ValueError("n must be at least 1")
    settings = get_settings()
    budget = settings.quotient_budget if budget is None else budget
    max_degree = settings.quotient_max_degree if max_degree is None else max_degree
    if max_degree < 2:
        raise ValueError("max_degree must be at least 2")
    seed = settings.default_seed if seed is None else seed
    rng = np.random.default_rng(seed)
    degrees = list(range(2, max_degree + 1))
    share, extra = divmod(budget, len(degrees))

    tried = 0
    for index, degree in enumerate(degrees):
        for _ in range(share + 1 if index < extra else share):
            tried += 1
            images = tuple(Permutation([int(x) for x in rng.permutation(degree)]) for _ in range(rank))
            report = shortest_kernel_element(FiniteQuotientSpec(rank, degree, images))
            if report.depth < n:
                continue
            if not kernel_free_below(report.spec, n):
                raise AssertionError(f"depth report for degree {degree} contradicts enumeration")
            logger.info("quotient of degree %d with kernel depth %d after %d candidates", degree, report.depth, tried)
            return QuotientSearch(found=True, seed=seed, tried=tried, report=report)
    logger.info("no quotient with kernel depth >= %d in %d candidates", n, tried)
    return QuotientSearch(found=False, seed=seed, tried=tried)


def corollary_instance(
    analysis: WindowAnalysis,
    h: Word,
    k: Word,
    spec_h: FiniteQuotientSpec,
    spec_k: Optional[FiniteQuotientSpec] = None,
    whole_k: bool = False,
) -> PingPongInstance:
    """H1 = ⟨h^s⟩, K1 = ⟨k^t⟩ with s, t the image orders; whole_k keeps K and builds a theorem2 instance."""
    oracle = analysis.oracle
    if oracle.kind is not OracleKind.FREE_GROUP:
        raise UnsupportedPresentationError("quotient instances are built over free ambient groups only")
    spec_k = spec_k or spec_h
    s = spec_h.order(h)
    H = SubgroupSpec(oracle, (h,), name="H")
    K = SubgroupSpec(oracle, (k,), name="K")
    H1 = SubgroupSpec(oracle, (Word(power_letters(h, s)),), name="H1")
    G0 = SubgroupSpec(oracle, (), name="G0")
    if whole_k:
        return build_instance(analysis, H, K, H1, None, G0, mode="theorem2")
    t = spec_k.order(k)
    K1 = SubgroupSpec(oracle, (Word(power_letters(k, t)),), name="K1")
    logger.info("corollary instance: s=%d t=%d", s, t)
    return build_instance(analysis, H, K, H1, K1, G0, mode="theorem1")
