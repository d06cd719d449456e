"""Theorem 1 / Theorem 2 certification pipelines on a Cayley-ball window."""

import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from pingcert.config import get_settings
from pingcert.errors import (
    DegenerateSyllableError,
    InconclusiveError,
    NormalizeFirstError,
    PingCertError,
    RadiusTooSmallError,
    ResourceBudgetError,
    WindowError,
)
from pingcert.models.schemas import (
    Certificate,
    MalnormalRecord,
    OracleRecord,
    OverlapRecord,
    QuasiParamsRecord,
    Verdict,
    rational,
)
from pingcert.services.cayley import CayleyBall, PathInBall, QuasiParams, check_local_quasigeodesic
from pingcert.services.free_product_oracle import OracleOutcome, oracle_free_product_check
from pingcert.services.gate_engine import evaluate_gates
from pingcert.services.instance import PingPongInstance
from pingcert.services.presentation import OracleKind
from pingcert.services.subgroups import (
    Membership,
    MembershipOracle,
    SubgroupSpec,
    build_relative_ball,
    estimate_mu,
    lemma6_constants,
    shortest_double_coset_rep,
)
from pingcert.services.words import Word

logger = logging.getLogger(__name__)

LAMBDA0 = {"theorem1": Fraction(1, 3), "theorem2": Fraction(1, 6)}
STRATEGIES = ("empirical", "supplied")


@dataclass(frozen=True)
class LocalToGlobal:
    params: QuasiParams
    provenance: str
    strategy: str

    def record(self) -> QuasiParamsRecord:
        return QuasiParamsRecord(
            L=rational(self.params.L),
            lam=rational(self.params.lam),
            eps=rational(self.params.eps),
            provenance=self.provenance,
            strategy=self.strategy,
        )


@dataclass(frozen=True)
class ShortElementCheck:
    holds: bool
    checked: int
    witness: Optional[Word] = None


@dataclass(frozen=True)
class SyllablePath:
    """Assembled p = p1 q1 ... ; boundaries[i] is the letter offset where factor i ends."""

    factors: tuple[Word, ...]
    path: PathInBall
    boundaries: tuple[int, ...]
    minimal: tuple[bool, ...]

    @property
    def syllable_count(self) -> int:
        return sum(1 for f in self.factors if f)

    def syllable_vertices(self, i: int) -> tuple[int, ...]:
        start = self.boundaries[i - 1] if i else 0
        return self.path.vertices[start : self.boundaries[i] + 1]


@dataclass(frozen=True)
class JunctionOverlap:
    junction: int
    lemma5: int
    lemma6: Optional[int] = None


@dataclass
class OverlapReport:
    lemma5_bound: int
    lemma6_bound: Optional[int]
    junctions: list[JunctionOverlap] = field(default_factory=list)
    lemma5_violations: int = 0
    lemma6_violations: int = 0


def count_A(ball: CayleyBall, mu: int, delta: int) -> int:
    """Group elements strictly shorter than 2μ + δ."""
    bound = 2 * mu + delta
    if ball.radius < bound:
        raise RadiusTooSmallError(f"window radius {ball.radius} < 2 mu + delta = {bound}")
    return int(ball.offsets[bound])


def _path_profile(ball: CayleyBall, p: PathInBall, lam: Fraction, eps0: Fraction) -> tuple[Optional[int], Fraction]:
    """(length of the shortest locally violating subpath, largest deficiency λ|p′| − |γ|)."""
    first: Optional[int] = None
    worst = Fraction(0)
    n = len(p)
    for i in range(n):
        row = ball.distance_row(p.vertices[i])
        for j in range(i + 1, n + 1):
            u, v = p.vertices[i], p.vertices[j]
            d = int(row[v])
            if min(int(ball.layer[u]), int(ball.layer[v])) + d > ball.radius:
                continue
            deficit = lam * (j - i) - d
            worst = max(worst, deficit)
            if deficit > eps0 and (first is None or j - i < first):
                first = j - i
    return first, worst


def local_to_global(
    strategy: str,
    lambda0: Fraction,
    epsilon0: Fraction,
    delta: int,
    ball: CayleyBall,
    supplied: Optional[QuasiParams] = None,
    max_length: Optional[int] = None,
) -> LocalToGlobal:
    """Constants (L, λ, ε) turning local (λ0, ε0, L)-quasigeodesics into global ones.

    "supplied" echoes literature constants. "empirical" scans every
    non-backtracking path from the identity up to the window and returns the
    smallest L whose local paths all satisfy the global inequality with
    λ = λ0 and the tightest ε ≤ ε0.
    """
    lambda0 = Fraction(lambda0)
    epsilon0 = Fraction(epsilon0)
    if not 0 < lambda0 <= 1:
        raise ValueError("lambda0 must lie in (0, 1]")
    if epsilon0 < 0:
        raise ValueError("epsilon0 must be nonnegative")
    if strategy == "supplied":
        if supplied is None:
            raise ValueError("the supplied strategy needs (L, lambda, epsilon)")
        return LocalToGlobal(supplied, "external-literature", "supplied")
    if strategy != "empirical":
        raise ValueError(f"strategy must be one of {STRATEGIES}")

    ell = min(ball.radius, max_length or get_settings().empirical_path_length)
    profiles = [_path_profile(ball, p, lambda0, epsilon0) for p in ball.non_backtracking_paths(ell)]
    for L in range(1, ell + 1):
        eps = max((worst for first, worst in profiles if first is None or first >= L), default=Fraction(0))
        if eps <= epsilon0:
            logger.info("empirical local-to-global: L=%d lambda=%s eps=%s over %d paths", L, lambda0, eps, len(profiles))
            return LocalToGlobal(
                QuasiParams(lam=lambda0, eps=eps, L=Fraction(L)),
                f"window-empirical, radius {ball.radius}",
                "empirical",
            )
    raise InconclusiveError(
        "local-to-global",
        f"no L <= {ell} makes local ({lambda0}, {epsilon0}, L)-quasigeodesics global in the window",
    )


def compute_C(L: Fraction, lam: Fraction, eps: Fraction) -> Fraction:
    if lam <= 0:
        raise ValueError("lambda must be positive")
    return max(Fraction(L), Fraction(eps) / Fraction(lam))


def short_element_condition(membership: MembershipOracle, C: Fraction, g0: MembershipOracle, ball: CayleyBall) -> ShortElementCheck:
    """Every subgroup element with |g| < C lies in G0; the witness is shortlex-least."""
    C = Fraction(C)
    if ball.radius < math.ceil(C):
        raise RadiusTooSmallError(f"window radius {ball.radius} < ceil(C) = {math.ceil(C)}")
    limit = math.ceil(C) - 1
    if membership.validity_radius is not None and membership.validity_radius < limit:
        raise WindowError(f"membership of {membership.spec.name} only enumerable to radius {membership.validity_radius}")
    checked = 0
    for v in membership.elements_in_ball(ball):
        v = int(v)
        if v == 0 or ball.layer[v] > limit:
            continue
        checked += 1
        answer = g0.is_member(ball.words[v])
        if answer is Membership.UNKNOWN:
            raise WindowError(f"G0 membership undecided for {ball.word(v)}")
        if answer is Membership.NO:
            return ShortElementCheck(holds=False, checked=checked, witness=ball.word(v))
    return ShortElementCheck(holds=True, checked=checked)


def _coset_side(i: int, last: int) -> str:
    if i == 0:
        return "right-only"
    if i == last:
        return "left-only"
    return "both"


def normalize_factors(instance: PingPongInstance, factors: Sequence[Word]) -> tuple[Word, ...]:
    """Replace each h-factor by its shortest coset representative (shortlex ties)."""
    factors = tuple(factors)
    if sum(1 for f in factors if f) < 2:
        return factors
    g0 = instance.membership(instance.G0)
    last = len(factors) - 1
    out = []
    for i, f in enumerate(factors):
        if f and i % 2 == 0:
            f = shortest_double_coset_rep(f, g0, instance.ball, side=_coset_side(i, last))
        out.append(f)
    return tuple(out)


def assemble_syllable_path(instance: PingPongInstance, factors: Sequence[Word]) -> SyllablePath:
    """Concatenate alternating H1/K1 factors (H1 first) into a path from 1."""
    factors = tuple(factors)
    if not factors:
        raise ValueError("no factors")
    ball = instance.ball
    names = instance.oracle.presentation.names
    g0 = instance.membership(instance.G0)
    last = len(factors) - 1
    several = sum(1 for f in factors if f) > 1
    minimal = []

    for i, f in enumerate(factors):
        if not f:
            if 0 < i < last:
                raise DegenerateSyllableError(f"degenerate syllable: empty factor at position {i}")
            minimal.append(True)
            continue
        spec = instance.factor_spec(i)
        answer = instance.membership(spec).is_member(f)
        if answer is Membership.UNKNOWN:
            raise WindowError(f"membership of {f.format(names)} in {spec.name} undecided in window")
        if answer is Membership.NO:
            raise ValueError(f"factor {f.format(names)} at position {i} is not in {spec.name}")
        if g0.is_member(f) is Membership.YES:
            raise DegenerateSyllableError(f"degenerate syllable: {f.format(names)} lies in G0")
        if i % 2 == 0 and several:
            rep = shortest_double_coset_rep(f, g0, ball, side=_coset_side(i, last))
        else:
            v = ball.locate(f.letters)
            if v is None:
                raise WindowError(f"factor {f.format(names)} lies outside the window")
            rep = ball.word(v)
        if len(rep) < len(f):
            raise NormalizeFirstError(f"normalize first: {f.format(names)} can be shortened to {rep.format(names)}")
        minimal.append(True)

    letters = tuple(c for f in factors for c in f.letters)
    path = ball.path(letters)
    boundaries = []
    offset = 0
    for f in factors:
        offset += len(f)
        boundaries.append(offset)
    return SyllablePath(factors=factors, path=path, boundaries=tuple(boundaries), minimal=tuple(minimal))


def _longest_run(vertices: Sequence[int], dist: np.ndarray, reach: int) -> int:
    """Longest subpath (in letters) whose vertices all lie within reach."""
    best = -1
    run = 0
    for v in vertices:
        if dist[v] <= reach:
            run += 1
            best = max(best, run - 1)
        else:
            run = 0
    return max(best, 0)


def measure_overlaps(
    instance: PingPongInstance,
    sp: SyllablePath,
    delta: int,
    mu: int,
    A: int,
    M: Optional[int] = None,
) -> OverlapReport:
    """Junction overlaps: h-side within δ of the k-side, and (given M) H-syllables
    within 2δ of the next H-syllable across one K-syllable."""
    ball = instance.ball
    reach = 2 * delta
    if max(int(ball.layer[v]) for v in sp.path.vertices) + reach > ball.radius:
        raise WindowError(f"path neighbourhoods of radius {reach} leave the radius-{ball.radius} window")

    report = OverlapReport(lemma5_bound=4 * mu * A + delta, lemma6_bound=M)
    present = [i for i, f in enumerate(sp.factors) if f]
    vertices = {i: sp.syllable_vertices(i) for i in present}
    dist = {i: ball.distance_to_set(vertices[i]) for i in present}

    for i, j in zip(present, present[1:]):
        h_side, k_side = (i, j) if i % 2 == 0 else (j, i)
        l5 = _longest_run(vertices[h_side], dist[k_side], delta)
        l6 = None
        if M is not None and i % 2 == 0 and i + 2 in vertices:
            l6 = max(
                _longest_run(vertices[i], dist[i + 2], reach),
                _longest_run(vertices[i + 2], dist[i], reach),
            )
            if l6 >= M:
                report.lemma6_violations += 1
        if l5 > report.lemma5_bound:
            report.lemma5_violations += 1
        report.junctions.append(JunctionOverlap(junction=sp.boundaries[i], lemma5=l5, lemma6=l6))
    return report


def sample_syllable_paths(instance: PingPongInstance, max_length: int, count: int, seed: int) -> list[SyllablePath]:
    """Seeded random syllable paths with 2-4 syllables that fit in max_length letters."""
    ball = instance.ball
    g0 = instance.membership(instance.G0)
    pools = []
    for spec in (instance.H1, instance.K1):
        members = instance.membership(spec).elements_in_ball(ball)
        pools.append(
            [
                ball.word(int(v))
                for v in members
                if v and ball.layer[v] <= max_length and g0.is_member(ball.words[int(v)]) is Membership.NO
            ]
        )
    if not all(pools):
        return []

    rng = np.random.default_rng(seed)
    paths: list[SyllablePath] = []
    for _ in range(10 * count):
        if len(paths) == count:
            break
        factors = [Word(())] if rng.integers(2) else []
        for _ in range(int(rng.integers(2, 5))):
            pool = pools[len(factors) % 2]
            factors.append(pool[int(rng.integers(len(pool)))])
        if sum(len(f) for f in factors) > max_length:
            continue
        try:
            sp = assemble_syllable_path(instance, normalize_factors(instance, factors))
        except PingCertError as exc:
            logger.debug("skipping sampled factors: %s", exc)
            continue
        paths.append(sp)
    return paths


def oracle_record(outcome: OracleOutcome, instance: PingPongInstance) -> OracleRecord:
    fmt = instance.oracle.presentation.format_word
    return OracleRecord(
        maxlen=outcome.maxlen,
        outcome=outcome.status,
        achieved_length=outcome.achieved_length,
        normal_forms=outcome.normal_forms,
        counterexample=fmt(outcome.counterexample) if outcome.counterexample is not None else None,
        syllables=[fmt(w) for w in outcome.syllables],
    )


def _certify(
    instance: PingPongInstance,
    mode: str,
    strategy: str,
    supplied: Optional[QuasiParams],
    oracle_maxlen: Optional[int],
    run_oracle: bool,
    seed: Optional[int],
    path_count: Optional[int],
) -> Certificate:
    if instance.mode != mode:
        raise ValueError(f"instance was built for {instance.mode}, not {mode}")
    settings = get_settings()
    seed = instance.analysis.seed if seed is None else seed
    path_count = settings.syllable_path_cap if path_count is None else path_count
    ball = instance.ball
    fmt = instance.oracle.presentation.format_word
    presentation = instance.oracle.presentation

    fields: dict = {
        "mode": mode,
        "presentation_hash": presentation.digest(),
        "presentation": presentation.canonical_text(),
        "subgroups": instance.subgroup_words(),
        "window_radius": ball.radius,
        "seeds": {"syllable_paths": seed},
        "provenance": {},
        "notes": ["A counts group elements shorter than 2 mu + delta, not letter strings."],
    }
    metrics: dict = {"instance_invariants": True}
    reason: Optional[str] = None
    provenance = fields["provenance"]

    try:
        if instance.oracle.kind is OracleKind.FREE_ABELIAN_CONTROL:
            raise InconclusiveError("non-hyperbolic-control", "free-abelian controls are never certified")
        if mode == "theorem2":
            malnormal = instance.malnormality
            fields["malnormality"] = MalnormalRecord(
                subgroup=instance.H.name,
                violation=malnormal.violation,
                radius=malnormal.radius,
                g=fmt(malnormal.g) if malnormal.g is not None else None,
                witness=fmt(malnormal.witness) if malnormal.witness is not None else None,
                undecided=malnormal.undecided,
            )
            metrics["malnormal_violation"] = malnormal.violation
            if malnormal.violation:
                raise InconclusiveError("malnormality", f"{instance.H.name} is not malnormal: g = {fmt(malnormal.g)}")

        estimate = instance.analysis.delta()
        delta = estimate.delta
        fields["delta_hat"] = delta
        fields["delta_mode"] = estimate.mode
        if estimate.seed is not None:
            fields["seeds"]["delta"] = estimate.seed

        mu_by = {s.name: instance.analysis.mu(s) for s in (instance.H, instance.K)}
        mu = max(mu_by.values())
        fields["mu_hat_by_subgroup"] = mu_by
        fields["mu_hat"] = mu
        metrics["mu_stable"] = all(instance.analysis.mu_stable(s) for s in (instance.H, instance.K))
        try:
            fields["mu1_hat"] = max(instance.analysis.mu(s) for s in (instance.H1, instance.K1))
        except WindowError as exc:
            fields["notes"].append(f"mu1 not measured: {exc}")
        provenance.update({"delta_hat": "window-empirical", "mu_hat": "window-empirical", "A": "window-empirical"})

        A = count_A(ball, mu, delta)
        fields["A"] = A
        lambda0 = LAMBDA0[mode]
        epsilon0 = Fraction(4 * mu * A + delta)
        M = None
        if mode == "theorem2":
            rel = build_relative_ball(instance.H, mu + 2 * delta, instance.membership(instance.H))
            fields["m_rel"], M = lemma6_constants(rel, mu, delta)
            fields["M"] = M
            epsilon0 += M
            provenance["M"] = "window-empirical"
        fields["lambda0"] = rational(lambda0)
        fields["epsilon0"] = rational(epsilon0)
        provenance.update({"lambda0": "paper-formula", "epsilon0": "paper-formula"})

        ltg = local_to_global(strategy, lambda0, epsilon0, delta, ball, supplied=supplied)
        fields["local_to_global"] = ltg.record()
        provenance["local_to_global"] = ltg.provenance
        C = compute_C(ltg.params.L, ltg.params.lam, ltg.params.eps)
        fields["C"] = rational(C)
        provenance["C"] = "paper-formula"

        g0 = instance.membership(instance.G0)
        restricted = (instance.H1, instance.K1) if mode == "theorem1" else (instance.H1,)
        for spec in restricted:
            check = short_element_condition(instance.membership(spec), C, g0, ball)
            metrics[f"short_elements_{spec.name}"] = check.holds
            if not check.holds:
                fields["notes"].append(f"{spec.name} has {fmt(check.witness)} shorter than C outside G0")

        local = QuasiParams(lam=lambda0, eps=epsilon0, L=ltg.params.L)
        paths = sample_syllable_paths(instance, ball.radius - 2 * delta, path_count, seed)
        tight_bound = 4 * mu * A
        failures = unmeasured = 0
        l5_violations = l6_violations = above_tight = 0
        junctions: list[OverlapRecord] = []
        violations: list[OverlapRecord] = []
        for index, sp in enumerate(paths):
            try:
                if not check_local_quasigeodesic(ball, sp.path, local).passed:
                    failures += 1
            except RadiusTooSmallError:
                unmeasured += 1
            report = measure_overlaps(instance, sp, delta, mu, A, M)
            l5_violations += report.lemma5_violations
            l6_violations += report.lemma6_violations
            for j in report.junctions:
                record = OverlapRecord(path=index, junction=j.junction, lemma5=j.lemma5, lemma6=j.lemma6)
                junctions.append(record)
                if j.lemma5 > tight_bound:
                    above_tight += 1
                if j.lemma5 > report.lemma5_bound or (M is not None and j.lemma6 is not None and j.lemma6 >= M):
                    violations.append(record)
        fields.update(
            syllable_paths_checked=len(paths),
            unmeasured_paths=unmeasured,
            max_lemma5=max((j.lemma5 for j in junctions), default=0),
            max_lemma6=max((j.lemma6 or 0 for j in junctions), default=0) if M is not None else None,
            lemma5_bound=4 * mu * A + delta,
            lemma5_tight_bound=tight_bound,
            lemma5_above_tight_bound=above_tight,
            junctions=junctions,
            overlaps=violations,
        )
        if not paths:
            fields["notes"].append(f"no syllable path fits in {ball.radius - 2 * delta} letters")
        metrics["syllable_paths_checked"] = len(paths)
        metrics["unmeasured_paths"] = unmeasured
        metrics["local_quasigeodesic_failures"] = failures
        metrics["lemma5_violations"] = l5_violations
        if mode == "theorem2":
            metrics["lemma6_violations"] = l6_violations
    except InconclusiveError as exc:
        reason = exc.reason
        fields["notes"].append(str(exc))
    except (WindowError, RadiusTooSmallError, ResourceBudgetError) as exc:
        reason = "resource"
        fields["notes"].append(str(exc))
        logger.warning("certification stopped early: %s", exc)

    outcome: Optional[OracleOutcome] = None
    if run_oracle:
        outcome = oracle_free_product_check(instance, oracle_maxlen)
        fields["oracle"] = oracle_record(outcome, instance)
        metrics["oracle_consistent"] = outcome.status == "consistent"
    else:
        metrics["oracle_consistent"] = True
        fields["notes"].append("oracle cross-check disabled")

    passed, gates = evaluate_gates(mode, metrics)
    fields["gates"] = gates
    if outcome is not None and outcome.status == "counterexample":
        verdict = Verdict(status="REFUTED", counterexample=fmt(outcome.counterexample))
    elif reason is not None:
        verdict = Verdict(status="INCONCLUSIVE", reason=reason)
    elif passed:
        verdict = Verdict(status="CERTIFIED")
    else:
        failing = next(g for g in gates if not g.passed)
        verdict = Verdict(status="INCONCLUSIVE", reason=failing.gate_id)
    fields["verdict"] = verdict

    if verdict.status == "CERTIFIED":
        try:
            fields["join_mu_hat"] = _join_mu(instance)
            provenance["join_mu_hat"] = "window-empirical"
        except PingCertError as exc:
            fields["notes"].append(f"join quasiconvexity not measured: {exc}")

    logger.info("%s verdict: %s %s", mode, verdict.status, verdict.reason or "")
    return Certificate(**fields)


def certify_theorem1(
    instance: PingPongInstance,
    strategy: str = "empirical",
    supplied: Optional[QuasiParams] = None,
    oracle_maxlen: Optional[int] = None,
    run_oracle: bool = True,
    seed: Optional[int] = None,
    path_count: Optional[int] = None,
) -> Certificate:
    return _certify(instance, "theorem1", strategy, supplied, oracle_maxlen, run_oracle, seed, path_count)


def certify_theorem2(
    instance: PingPongInstance,
    strategy: str = "empirical",
    supplied: Optional[QuasiParams] = None,
    oracle_maxlen: Optional[int] = None,
    run_oracle: bool = True,
    seed: Optional[int] = None,
    path_count: Optional[int] = None,
) -> Certificate:
    return _certify(instance, "theorem2", strategy, supplied, oracle_maxlen, run_oracle, seed, path_count)


def _join_mu(instance: PingPongInstance) -> int:
    join = SubgroupSpec(instance.oracle, instance.H1.generators + instance.K1.generators, name="join")
    return estimate_mu(join, instance.ball, instance.membership(join))


def estimate_join_quasiconvexity(instance: PingPongInstance, certificate: Certificate) -> int:
    """Window μ̂ of ⟨H1, K1⟩ for a certified instance."""
    if certificate.verdict.status != "CERTIFIED":
        raise ValueError("join quasiconvexity is only measured for certified instances")
    return _join_mu(instance)
