"""Ping-pong instances over one window, with memoized window constants."""

import logging
from dataclasses import dataclass
from typing import Optional

from pingcert.config import get_settings
from pingcert.errors import InstanceInvariantError, PingCertError
from pingcert.services.cayley import CayleyBall, DeltaEstimate, estimate_delta
from pingcert.services.presentation import WordOracle
from pingcert.services.subgroups import (
    MalnormalVerdict,
    Membership,
    MembershipOracle,
    SubgroupSpec,
    check_malnormal,
    estimate_mu,
)

logger = logging.getLogger(__name__)

THEOREM_MODES = ("theorem1", "theorem2")


class WindowAnalysis:
    """Window constants (δ̂, μ̂, membership oracles) cached per ball.

    One analysis can serve many instances over the same ball, which is what
    the Schottky and quotient searches rely on.
    """

    def __init__(self, ball: CayleyBall, delta_mode: Optional[str] = None, seed: Optional[int] = None):
        settings = get_settings()
        self.ball = ball
        self.seed = settings.default_seed if seed is None else seed
        exact = ball.is_tree or ball.size <= settings.delta_exhaustive_limit
        self.delta_mode = delta_mode or ("exhaustive" if exact else "sampled")
        self._delta: Optional[DeltaEstimate] = None
        self._memberships: dict[tuple, MembershipOracle] = {}
        self._mu: dict[tuple, int] = {}
        self._stable: dict[tuple, bool] = {}

    @property
    def oracle(self) -> WordOracle:
        return self.ball.oracle

    def membership(self, spec: SubgroupSpec) -> MembershipOracle:
        key = spec.generators
        if key not in self._memberships:
            self._memberships[key] = MembershipOracle(spec, self.ball)
        return self._memberships[key]

    def delta(self) -> DeltaEstimate:
        if self._delta is None:
            self._delta = estimate_delta(self.ball, mode=self.delta_mode, seed=self.seed)
        return self._delta

    def mu(self, spec: SubgroupSpec) -> int:
        key = spec.generators
        if key not in self._mu:
            self._mu[key] = estimate_mu(spec, self.ball, self.membership(spec))
        return self._mu[key]

    def mu_stable(self, spec: SubgroupSpec) -> bool:
        """μ̂ at radius R-1 equals μ̂ at R."""
        key = spec.generators
        if key not in self._stable:
            try:
                smaller = self.ball.truncate(self.ball.radius - 1)
                previous = estimate_mu(spec, smaller, MembershipOracle(spec, smaller))
                self._stable[key] = previous == self.mu(spec)
            except PingCertError as exc:
                logger.info("mu stability for %s undecided: %s", spec.name, exc)
                self._stable[key] = False
        return self._stable[key]


@dataclass
class PingPongInstance:
    analysis: WindowAnalysis
    H: SubgroupSpec
    K: SubgroupSpec
    H1: SubgroupSpec
    K1: SubgroupSpec
    G0: SubgroupSpec
    mode: str = "theorem1"
    malnormality: Optional[MalnormalVerdict] = None

    @property
    def ball(self) -> CayleyBall:
        return self.analysis.ball

    @property
    def oracle(self) -> WordOracle:
        return self.analysis.oracle

    def membership(self, spec: SubgroupSpec) -> MembershipOracle:
        return self.analysis.membership(spec)

    def factor_spec(self, position: int) -> SubgroupSpec:
        """Subgroup of the syllable at this position of an alternating product."""
        return self.H1 if position % 2 == 0 else self.K1

    def subgroup_words(self) -> dict[str, list[str]]:
        fmt = self.oracle.presentation.format_word
        return {role: [fmt(g) for g in getattr(self, role).generators] for role in ("H", "K", "H1", "K1", "G0")}


def _require_generators_in(inner: SubgroupSpec, outer: MembershipOracle) -> None:
    for g in inner.generators:
        if outer.is_member(g) is not Membership.YES:
            raise InstanceInvariantError(
                f"generator {g.format(inner.oracle.presentation.names)} of {inner.name} is not shown to lie in {outer.spec.name}"
            )


def _require_meet_in_g0(first: MembershipOracle, second: MembershipOracle, g0: MembershipOracle, ball: CayleyBall) -> None:
    names = ball.oracle.presentation.names
    for v in first.elements_in_ball(ball):
        w = ball.words[int(v)]
        if second.is_member(w) is Membership.YES and g0.is_member(w) is Membership.NO:
            raise InstanceInvariantError(
                f"{first.spec.name} ∩ {second.spec.name} contains {ball.word(int(v)).format(names)} outside G0 on the window"
            )


def build_instance(
    analysis: WindowAnalysis,
    H: SubgroupSpec,
    K: SubgroupSpec,
    H1: SubgroupSpec,
    K1: Optional[SubgroupSpec],
    G0: SubgroupSpec,
    mode: str = "theorem1",
) -> PingPongInstance:
    """Check the window invariants and assemble an instance.

    In theorem2 mode K enters whole: K1 must be omitted or equal to K.
    """
    if mode not in THEOREM_MODES:
        raise ValueError(f"mode must be one of {THEOREM_MODES}")
    if mode == "theorem2":
        if K1 is not None and K1.generators != K.generators:
            raise InstanceInvariantError("theorem2 instances use K whole (K1 = K)")
        K1 = K
    if K1 is None:
        raise InstanceInvariantError("K1 is required in theorem1 mode")

    ball = analysis.ball
    h, k, h1, k1, g0 = (analysis.membership(s) for s in (H, K, H1, K1, G0))
    _require_generators_in(H1, h)
    _require_generators_in(K1, k)
    _require_generators_in(G0, h1)
    _require_generators_in(G0, k1)
    _require_meet_in_g0(h1, k1, g0, ball)
    _require_meet_in_g0(h, k, g0, ball)

    malnormality = check_malnormal(H, ball, h) if mode == "theorem2" else None
    logger.info("instance %s verified on radius-%d window", mode, ball.radius)
    return PingPongInstance(analysis=analysis, H=H, K=K, H1=H1, K1=K1, G0=G0, mode=mode, malnormality=malnormality)
