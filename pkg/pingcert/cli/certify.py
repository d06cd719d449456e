"""Certification commands: certify-t1, certify-t2, oracle, pingpong-abstract, schottky."""

import json
from pathlib import Path

from pydantic import ValidationError

from pingcert.cli.common import (
    EXIT_INCONCLUSIVE,
    EXIT_OK,
    EXIT_REFUTED,
    EXIT_USAGE,
    VERDICT_EXIT,
    CommandError,
    add_output_args,
    add_presentation_args,
    emit,
    load_oracle,
    natural,
    positive,
    quasi_params,
    subgroup,
)
from pingcert.models.schemas import AbstractPingPongInstance, Certificate, OracleResult
from pingcert.services.cayley import build_ball
from pingcert.services.certifier import oracle_record, certify_theorem1, certify_theorem2
from pingcert.services.free_product_oracle import oracle_free_product_check
from pingcert.services.instance import WindowAnalysis, build_instance
from pingcert.services.pdf_generator import generate_certificate_pdf
from pingcert.services.pingpong import abstract_ping_pong_check, schottky_power_search

ORACLE_EXIT = {"consistent": EXIT_OK, "partial": EXIT_INCONCLUSIVE, "counterexample": EXIT_REFUTED}


def _analysis(args, oracle, max_vertices=None) -> WindowAnalysis:
    ball = build_ball(oracle, args.radius, max_vertices=max_vertices)
    return WindowAnalysis(ball, seed=args.seed)


def summarize(certificate: Certificate) -> str:
    verdict = certificate.verdict
    line = f"{certificate.mode}: {verdict.status}"
    if verdict.status == "REFUTED":
        line += f" (counterexample {verdict.counterexample})"
    elif verdict.status == "INCONCLUSIVE":
        line += f" ({verdict.reason})"
    failing = certificate.first_failing_gate
    if failing is not None:
        line += f"; first failing gate: {failing.gate_id} [{failing.message}]"
    if certificate.C is not None:
        line += f"; C = {certificate.C}"
    return line


def _emit_certificate(args, certificate: Certificate) -> int:
    if args.pdf is not None:
        args.pdf.parent.mkdir(parents=True, exist_ok=True)
        args.pdf.write_bytes(generate_certificate_pdf(certificate.model_dump()))
    emit(args, "certificate", certificate, summarize(certificate))
    return VERDICT_EXIT[certificate.verdict.status]


def _certify(args, mode: str) -> int:
    oracle = load_oracle(args)
    analysis = _analysis(args, oracle, args.budget)
    H = subgroup(oracle, args.H, "H")
    K = subgroup(oracle, args.K, "K")
    H1 = subgroup(oracle, args.H1, "H1")
    K1 = subgroup(oracle, args.K1, "K1") if mode == "theorem1" else None
    G0 = subgroup(oracle, args.G0, "G0")
    instance = build_instance(analysis, H, K, H1, K1, G0, mode=mode)
    certify = certify_theorem1 if mode == "theorem1" else certify_theorem2
    certificate = certify(
        instance,
        strategy="supplied" if args.supplied_lge is not None else "empirical",
        supplied=args.supplied_lge,
        oracle_maxlen=args.maxlen,
        run_oracle=not args.no_oracle,
        seed=args.seed,
        path_count=args.paths,
    )
    return _emit_certificate(args, certificate)


def run_certify_t1(args) -> int:
    return _certify(args, "theorem1")


def run_certify_t2(args) -> int:
    return _certify(args, "theorem2")


def run_oracle(args) -> int:
    oracle = load_oracle(args)
    analysis = _analysis(args, oracle)
    H1 = subgroup(oracle, args.H1, "H1")
    K1 = subgroup(oracle, args.K1, "K1")
    G0 = subgroup(oracle, args.G0, "G0")
    instance = build_instance(analysis, H1, K1, H1, K1, G0)
    outcome = oracle_free_product_check(instance, args.maxlen, args.budget)
    record = oracle_record(outcome, instance)
    document = OracleResult(
        presentation_hash=oracle.presentation.digest(),
        H1=instance.subgroup_words()["H1"],
        K1=instance.subgroup_words()["K1"],
        G0=instance.subgroup_words()["G0"],
        oracle=record,
    )
    summary = f"oracle: {record.outcome} to length {record.achieved_length}"
    if record.counterexample is not None:
        summary += f"; counterexample {record.counterexample}"
    emit(args, "oracle", document, summary)
    return ORACLE_EXIT[outcome.status]


def run_pingpong_abstract(args) -> int:
    try:
        instance = AbstractPingPongInstance.model_validate(json.loads(args.instance.read_text(encoding="utf-8")))
    except (OSError, json.JSONDecodeError, ValidationError) as exc:
        raise CommandError(EXIT_USAGE, f"{args.instance}: {exc}") from None
    result = abstract_ping_pong_check(instance, args.maxsyll)
    summary = f"ping-pong: {result.status}"
    if result.reason:
        summary += f" ({result.reason})"
    emit(args, "pingpong", result, summary)
    return EXIT_OK if result.status == "verified" else EXIT_INCONCLUSIVE


def run_schottky(args) -> int:
    oracle = load_oracle(args)
    analysis = _analysis(args, oracle, args.budget)
    try:
        h = oracle.presentation.parse_word(args.h)
        k = oracle.presentation.parse_word(args.k)
    except ValueError as exc:
        raise CommandError(EXIT_USAGE, str(exc)) from None
    result = schottky_power_search(analysis, h, k, args.maxpow, maxlen=args.maxlen, seed=args.seed)
    summary = f"schottky: found (m, n) = ({result.m}, {result.n})" if result.found else f"schottky: exhausted up to power {args.maxpow}"
    emit(args, "schottky", result, summary)
    return EXIT_OK if result.found else EXIT_INCONCLUSIVE


def _add_certify_args(p, with_k1: bool) -> None:
    add_presentation_args(p)
    p.add_argument("--H", required=True)
    p.add_argument("--K", required=True)
    p.add_argument("--H1", required=True)
    if with_k1:
        p.add_argument("--K1", required=True)
    p.add_argument("--G0", default="", help="generators of H ∩ K (default: trivial)")
    p.add_argument("--maxlen", type=natural, default=None, help="oracle cross-check length")
    p.add_argument("--seed", type=natural, default=None)
    p.add_argument("--paths", type=natural, default=None, help="number of sampled syllable paths")
    p.add_argument("--supplied-lge", type=quasi_params, default=None, metavar="L,LAMBDA,EPS")
    p.add_argument("--no-oracle", action="store_true")
    p.add_argument("--pdf", type=Path, default=None, help="also write a PDF summary")
    add_output_args(p)


def register(subparsers) -> None:
    p = subparsers.add_parser("certify-t1", help="certify H1 * K1 over G0 (Theorem 1)")
    _add_certify_args(p, with_k1=True)
    p.set_defaults(handler=run_certify_t1)

    p = subparsers.add_parser("certify-t2", help="certify H1 * K over G0 with H malnormal (Theorem 2)")
    _add_certify_args(p, with_k1=False)
    p.set_defaults(handler=run_certify_t2)

    p = subparsers.add_parser("oracle", help="enumerate alternating normal forms looking for a relation")
    add_presentation_args(p)
    p.add_argument("--H1", required=True)
    p.add_argument("--K1", required=True)
    p.add_argument("--G0", default="")
    p.add_argument("--maxlen", type=natural, default=None)
    p.add_argument("--seed", type=natural, default=None)
    add_output_args(p)
    p.set_defaults(handler=run_oracle)

    p = subparsers.add_parser("pingpong-abstract", help="check the ping-pong lemma on a finite action table")
    p.add_argument("--instance", type=Path, required=True, help="JSON action table")
    p.add_argument("--maxsyll", type=positive, default=3)
    add_output_args(p)
    p.set_defaults(handler=run_pingpong_abstract)

    p = subparsers.add_parser("schottky", help="smallest powers h^m, k^n certified to generate a free product")
    add_presentation_args(p)
    p.add_argument("--h", required=True)
    p.add_argument("--k", required=True)
    p.add_argument("--maxpow", type=positive, default=6)
    p.add_argument("--maxlen", type=natural, default=None)
    p.add_argument("--seed", type=natural, default=None)
    add_output_args(p)
    p.set_defaults(handler=run_schottky)
