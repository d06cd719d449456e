"""Abstract ping-pong lemma check on finite action tables, and Schottky power search."""

import itertools
import logging
from typing import Optional

from pingcert.errors import ActionOutsideSetError, InstanceInvariantError
from pingcert.models.schemas import (
    AbstractPingPongInstance,
    PingPongResult,
    SchottkyAttempt,
    SchottkyResult,
)
from pingcert.services.certifier import certify_theorem1
from pingcert.services.instance import WindowAnalysis, build_instance
from pingcert.services.subgroups import SubgroupSpec, power_letters
from pingcert.services.words import Word

logger = logging.getLogger(__name__)

Action = dict[str, str]


def _compose(outer: Action, inner: Action) -> Action:
    """(outer ∘ inner)(s), defined where both steps are."""
    return {s: outer[t] for s, t in inner.items() if t in outer}


def _agree(f: Action, g: Action) -> bool:
    common = f.keys() & g.keys()
    return bool(common) and all(f[s] == g[s] for s in common)


def _coset_classes(elements: list[str], g0: list[str], actions: dict[str, Action]) -> list[list[str]]:
    """Group listed elements into left cosets xG0, comparing actions where defined."""
    classes: list[list[str]] = []
    for x in elements:
        for cls in classes:
            y = cls[0]
            if any(_agree(actions[x], _compose(actions[y], actions[z])) for z in g0):
                cls.append(x)
                break
        else:
            classes.append([x])
    return classes


def abstract_ping_pong_check(inst: AbstractPingPongInstance, maxsyll: int) -> PingPongResult:
    """Check the ping-pong hypotheses on a finite set and the odd-product conclusion.

    Products whose action is undefined on all of S_H are counted but do not
    block verification.
    """
    points = set(inst.points)
    s_h, s_k = set(inst.S_H), set(inst.S_K)
    actions = inst.actions

    def fail(reason: str, **extra) -> PingPongResult:
        logger.info("ping-pong hypotheses fail: %s", reason)
        return PingPongResult(status="hypotheses-fail", reason=reason, maxsyll=maxsyll, **extra)

    for name in set(inst.H) | set(inst.K) | set(inst.G0):
        if name not in actions:
            raise ActionOutsideSetError(f"element {name} has no action table")
        for s, t in actions[name].items():
            if s not in points or t not in points:
                raise ActionOutsideSetError(f"element {name} maps {s} to {t} outside S")

    if not s_h or not s_k:
        return fail("S_H and S_K must be nonempty")
    if s_h & s_k:
        return fail(f"S_H and S_K share {sorted(s_h & s_k)[0]}")
    if not (s_h | s_k) <= points:
        return fail("S_H and S_K must be subsets of S")

    g0 = set(inst.G0)
    h_out = [x for x in inst.H if x not in g0]
    k_out = [x for x in inst.K if x not in g0]
    for name, source, target, label in [(x, s_h, s_k, "S_H into S_K") for x in h_out] + [
        (x, s_k, s_h, "S_K into S_H") for x in k_out
    ]:
        for s in source:
            t = actions[name].get(s)
            if t is not None and t not in target:
                return fail(f"{name} does not map {label}: {s} -> {t}")

    g0_list = list(inst.G0)
    h_classes = _coset_classes(list(inst.H), g0_list, actions) if g0_list else [[x] for x in dict.fromkeys(inst.H)]
    k_classes = _coset_classes(list(inst.K), g0_list, actions) if g0_list else [[x] for x in dict.fromkeys(inst.K)]
    index_h, index_k = len(h_classes), len(k_classes)
    if index_h == 2 and index_k == 2:
        logger.info("both coset indices are 2; ping-pong conclusion not claimed")
        return PingPongResult(status="index-guard", reason="|H:G0| = |K:G0| = 2", maxsyll=maxsyll, index_H=index_h, index_K=index_k)

    odd = undefined = even = stuck = 0
    coset_of = {x: i for i, cls in enumerate(h_classes) for x in cls}
    g0_class = next((coset_of[x] for x in inst.G0 if x in coset_of), None)
    for length in range(1, maxsyll + 1):
        for start, first_pool, second_pool in ((0, h_out, k_out), (1, k_out, h_out)):
            if length % 2 == 1 and start == 1:
                continue
            pools = [first_pool if i % 2 == 0 else second_pool for i in range(length)]
            for seq in itertools.product(*pools):
                action: Action = {s: s for s in inst.points}
                for name in reversed(seq):
                    action = _compose(actions[name], action)
                if length % 2 == 1:
                    odd += 1
                    moved = [s for s in s_h if s in action]
                    if not moved:
                        undefined += 1
                        continue
                    if all(action[s] == s for s in moved):
                        return fail(f"product {'·'.join(seq)} fixes S_H", index_H=index_h, index_K=index_k)
                else:
                    even += 1
                    if start == 0:
                        excluded = {g0_class, coset_of.get(seq[0])}
                        if not any(coset_of[x] not in excluded for x in h_out):
                            stuck += 1

    logger.info("ping-pong verified to %d syllables (%d odd products)", maxsyll, odd)
    return PingPongResult(
        status="verified",
        maxsyll=maxsyll,
        index_H=index_h,
        index_K=index_k,
        odd_products_checked=odd,
        undefined_products=undefined,
        even_products_checked=even,
        even_products_without_conjugator=stuck,
    )


def schottky_power_search(
    analysis: WindowAnalysis,
    h: Word,
    k: Word,
    maxpow: int,
    maxlen: Optional[int] = None,
    seed: Optional[int] = None,
) -> SchottkyResult:
    """First (m, n), ordered by (max(m, n), m, n), with ⟨h^m⟩ * ⟨k^n⟩ certified."""
    oracle = analysis.oracle
    presentation = oracle.presentation
    H = SubgroupSpec(oracle, (h,), name="H")
    K = SubgroupSpec(oracle, (k,), name="K")
    G0 = SubgroupSpec(oracle, (), name="G0")
    result = SchottkyResult(
        presentation_hash=presentation.digest(),
        h=presentation.format_word(h),
        k=presentation.format_word(k),
        maxpow=maxpow,
        found=False,
    )
    pairs = sorted(itertools.product(range(1, maxpow + 1), repeat=2), key=lambda p: (max(p), p[0], p[1]))
    for m, n in pairs:
        H1 = SubgroupSpec(oracle, (Word(power_letters(h, m)),), name="H1")
        K1 = SubgroupSpec(oracle, (Word(power_letters(k, n)),), name="K1")
        try:
            instance = build_instance(analysis, H, K, H1, K1, G0)
        except InstanceInvariantError as exc:
            result.attempts.append(SchottkyAttempt(m=m, n=n, status="invalid", reason=str(exc)))
            continue
        certificate = certify_theorem1(instance, oracle_maxlen=maxlen, seed=seed)
        result.attempts.append(SchottkyAttempt(m=m, n=n, status=certificate.verdict.status, reason=certificate.verdict.reason))
        if certificate.verdict.status == "CERTIFIED":
            logger.info("Schottky pair certified at (m, n) = (%d, %d)", m, n)
            result.found = True
            result.m, result.n = m, n
            result.certificate = certificate
            return result
    return result
