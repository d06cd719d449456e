"""Window geometry commands: ball, delta, mu, malnormal, relball."""

from pingcert.cli.common import (
    EXIT_OK,
    EXIT_REFUTED,
    add_output_args,
    add_presentation_args,
    emit,
    load_oracle,
    natural,
    positive,
    subgroup,
)
from pingcert.models.schemas import BallExport, DeltaResult, MalnormalRecord, MuResult, RelativeBallResult
from pingcert.services.cayley import STRATEGIES, build_ball, estimate_delta
from pingcert.services.subgroups import (
    MembershipOracle,
    build_relative_ball,
    check_malnormal,
    estimate_mu,
    lemma6_constants,
)
from pingcert.services.words import alphabet_codes, format_letters


def _ball(args, oracle):
    return build_ball(oracle, args.radius, strategy=getattr(args, "strategy", "bucketed"), max_vertices=args.budget)


def run_ball(args) -> int:
    oracle = load_oracle(args)
    ball = _ball(args, oracle)
    names = oracle.presentation.names
    document = BallExport(
        presentation_hash=oracle.presentation.digest(),
        radius=ball.radius,
        letters=[format_letters((c,), names) for c in alphabet_codes(oracle.rank)],
        vertices=[format_letters(w, names) for w in ball.words],
        sphere_sizes=ball.sphere_sizes(),
        edges=ball.edges.tolist(),
    )
    emit(args, "ball", document, f"ball: radius {ball.radius}, {ball.size} vertices, spheres {ball.sphere_sizes()}")
    return EXIT_OK


def run_delta(args) -> int:
    oracle = load_oracle(args)
    ball = _ball(args, oracle)
    estimate = estimate_delta(ball, mode=args.mode, samples=args.samples, seed=args.seed)
    document = DeltaResult(
        presentation_hash=oracle.presentation.digest(),
        radius=ball.radius,
        delta_hat=estimate.delta,
        mode=estimate.mode,
        triangles=estimate.triangles,
        seed=estimate.seed,
        method=estimate.method,
    )
    emit(args, "delta", document, f"delta_hat = {estimate.delta} ({estimate.mode}, {estimate.method}, {estimate.triangles} triangles, R={ball.radius})")
    return EXIT_OK


def run_mu(args) -> int:
    oracle = load_oracle(args)
    ball = _ball(args, oracle)
    spec = subgroup(oracle, args.H, "H")
    membership = MembershipOracle(spec, ball)
    mu = estimate_mu(spec, ball, membership)
    document = MuResult(
        presentation_hash=oracle.presentation.digest(),
        radius=ball.radius,
        subgroup=[oracle.presentation.format_word(g) for g in spec.generators],
        membership_mode=membership.mode.value,
        mu_hat=mu,
    )
    emit(args, "mu", document, f"mu_hat({spec.format()}) = {mu} (R={ball.radius})")
    return EXIT_OK


def run_malnormal(args) -> int:
    oracle = load_oracle(args)
    ball = _ball(args, oracle)
    spec = subgroup(oracle, args.H, "H")
    verdict = check_malnormal(spec, ball)
    fmt = oracle.presentation.format_word
    document = MalnormalRecord(
        subgroup=spec.format(),
        violation=verdict.violation,
        radius=verdict.radius,
        g=fmt(verdict.g) if verdict.g is not None else None,
        witness=fmt(verdict.witness) if verdict.witness is not None else None,
        undecided=verdict.undecided,
    )
    if verdict.violation:
        summary = f"malnormality violation: g = {document.g}, g h g^-1 in H for h = {document.witness}"
    else:
        summary = f"no malnormality violation within radius {ball.radius} ({verdict.undecided} undecided)"
    emit(args, "malnormal", document, summary)
    return EXIT_REFUTED if verdict.violation else EXIT_OK


def run_relball(args) -> int:
    oracle = load_oracle(args)
    spec = subgroup(oracle, args.H, "H")
    window = build_ball(oracle, args.window, max_vertices=args.budget) if args.window else None
    rel = build_relative_ball(spec, args.radius, MembershipOracle(spec, window))
    m = M = None
    if args.mu is not None and args.delta is not None:
        m, M = lemma6_constants(rel, args.mu, args.delta)
    names = oracle.presentation.names
    document = RelativeBallResult(
        presentation_hash=oracle.presentation.digest(),
        subgroup=[oracle.presentation.format_word(g) for g in spec.generators],
        radius=rel.radius,
        counts=rel.counts(),
        representatives=[format_letters(r, names) for r in rel.representatives],
        m_rel=m,
        M=M,
    )
    summary = f"relative ball of {spec.format()}: counts {document.counts}"
    if m is not None:
        summary += f"; m = {m}, M = {M}"
    emit(args, "relball", document, summary)
    return EXIT_OK


def register(subparsers) -> None:
    p = subparsers.add_parser("ball", help="build and export a Cayley ball")
    add_presentation_args(p)
    p.add_argument("--strategy", choices=STRATEGIES, default="bucketed")
    add_output_args(p)
    p.set_defaults(handler=run_ball)

    p = subparsers.add_parser("delta", help="estimate the thinness constant on a window")
    add_presentation_args(p)
    p.add_argument("--mode", choices=("exhaustive", "sampled"), default="exhaustive")
    p.add_argument("--samples", type=positive, default=None)
    p.add_argument("--seed", type=natural, default=None)
    add_output_args(p)
    p.set_defaults(handler=run_delta)

    p = subparsers.add_parser("mu", help="estimate the quasiconvexity constant of a subgroup")
    add_presentation_args(p)
    p.add_argument("--H", required=True, help="comma-separated generators")
    add_output_args(p)
    p.set_defaults(handler=run_mu)

    p = subparsers.add_parser("malnormal", help="search the window for a malnormality violation")
    add_presentation_args(p)
    p.add_argument("--H", required=True)
    add_output_args(p)
    p.set_defaults(handler=run_malnormal)

    p = subparsers.add_parser("relball", help="ball in the relative Cayley graph on right cosets")
    add_presentation_args(p, radius_default=1)
    p.add_argument("--H", required=True)
    p.add_argument("--window", type=natural, default=None, help="Cayley window for bounded membership")
    p.add_argument("--mu", type=natural, default=None)
    p.add_argument("--delta", type=natural, default=None)
    add_output_args(p)
    p.set_defaults(handler=run_relball)
