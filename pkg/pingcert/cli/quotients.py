"""deep-quotient: finite quotients with deep kernels and their corollary instances."""

from pathlib import Path

from pingcert.cli.common import (
    EXIT_INCONCLUSIVE,
    EXIT_OK,
    EXIT_USAGE,
    VERDICT_EXIT,
    CommandError,
    add_output_args,
    emit,
    load_oracle,
    natural,
    positive,
)
from pingcert.errors import PresentationParseError
from pingcert.models.schemas import DeepQuotientResult
from pingcert.services.cayley import build_ball
from pingcert.services.certifier import certify_theorem1, certify_theorem2
from pingcert.services.instance import WindowAnalysis
from pingcert.services.residual import (
    QuotientSearch,
    corollary_instance,
    find_deep_quotient,
    parse_quotient_spec,
    shortest_kernel_element,
)


def run_deep_quotient(args) -> int:
    if args.quotient is not None:
        try:
            spec = parse_quotient_spec(args.quotient.read_text(encoding="utf-8"), rank=args.rank)
        except (OSError, PresentationParseError) as exc:
            raise CommandError(EXIT_USAGE, f"{args.quotient}: {exc}") from None
        report = shortest_kernel_element(spec)
        search = QuotientSearch(found=report.depth >= args.n, seed=0, tried=1, report=report)
    else:
        search = find_deep_quotient(args.rank, args.n, budget=args.budget, max_degree=args.max_degree, seed=args.seed)

    result = DeepQuotientResult(
        rank=args.rank,
        n=args.n,
        found=search.found,
        seed=search.seed,
        candidates_tried=search.tried,
        report=search.report.record() if search.report is not None else None,
    )
    code = EXIT_OK if search.found else EXIT_INCONCLUSIVE

    if search.found and args.pres is not None:
        oracle = load_oracle(args)
        analysis = WindowAnalysis(build_ball(oracle, args.radius), seed=args.seed)
        h = oracle.presentation.parse_word(args.h)
        k = oracle.presentation.parse_word(args.k)
        instance = corollary_instance(analysis, h, k, search.report.spec, whole_k=args.whole_k)
        certify = certify_theorem2 if args.whole_k else certify_theorem1
        result.certificate = certify(instance, oracle_maxlen=args.maxlen, seed=args.seed)
        code = VERDICT_EXIT[result.certificate.verdict.status]

    summary = f"deep-quotient: {'found' if search.found else 'exhausted'}"
    if search.report is not None:
        summary += f", depth {search.report.depth} (witness {result.report.witness}, degree {search.report.spec.degree})"
    if result.certificate is not None:
        summary += f"; corollary instance {result.certificate.verdict.status}"
    emit(args, "deep-quotient", result, summary)
    return code


def register(subparsers) -> None:
    p = subparsers.add_parser("deep-quotient", help="find a permutation quotient with no short kernel elements")
    p.add_argument("--rank", type=positive, default=2)
    p.add_argument("--n", type=positive, required=True, help="required kernel depth")
    p.add_argument("--budget", type=positive, default=None, help="candidate quotients to try")
    p.add_argument("--max-degree", type=positive, default=None)
    p.add_argument("--seed", type=natural, default=None)
    p.add_argument("--quotient", type=Path, default=None, help="analyse this `perm:` file instead of searching")
    p.add_argument("--pres", default=None, help="free presentation for the corollary instance")
    p.add_argument("--h", default="a")
    p.add_argument("--k", default="b")
    p.add_argument("--whole-k", action="store_true", help="keep K whole (theorem2 instance)")
    p.add_argument("--radius", type=natural, default=4)
    p.add_argument("--maxlen", type=natural, default=None)
    add_output_args(p)
    p.set_defaults(handler=run_deep_quotient)
