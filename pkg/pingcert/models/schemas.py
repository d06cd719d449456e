"""JSON document schemas for certificates and command results."""

from fractions import Fraction
from typing import Literal, Optional, Union

from pydantic import BaseModel, Field

SCHEMA_VERSION = "1.0"

Status = Literal["CERTIFIED", "INCONCLUSIVE", "REFUTED"]


def rational(value: Union[Fraction, int, None]) -> Optional[str]:
    """Serialize a rational as "p/q" (or "n")."""
    if value is None:
        return None
    value = Fraction(value)
    return str(value.numerator) if value.denominator == 1 else f"{value.numerator}/{value.denominator}"


class GateOutcome(BaseModel):
    """Single certification gate result."""

    gate_id: str
    gate_name: str
    passed: bool
    message: str
    details: Optional[dict] = None


class QuasiParamsRecord(BaseModel):
    L: Optional[str] = None
    lam: str
    eps: str
    provenance: str
    strategy: str


class OracleRecord(BaseModel):
    """Outcome of the brute-force free-product cross-check."""

    maxlen: int
    outcome: Literal["consistent", "counterexample", "partial"]
    achieved_length: int
    normal_forms: int
    counterexample: Optional[str] = None
    syllables: list[str] = Field(default_factory=list)


class OverlapRecord(BaseModel):
    path: int
    junction: int
    lemma5: int
    lemma6: Optional[int] = None


class MalnormalRecord(BaseModel):
    subgroup: str
    violation: bool
    radius: int
    g: Optional[str] = None
    witness: Optional[str] = None
    undecided: int = 0


class Verdict(BaseModel):
    status: Status
    reason: Optional[str] = None
    counterexample: Optional[str] = None


class Certificate(BaseModel):
    """Window certificate for a Theorem-1 or Theorem-2 free-product claim."""

    schema_version: str = SCHEMA_VERSION
    mode: Literal["theorem1", "theorem2"]
    presentation_hash: str
    presentation: str
    subgroups: dict[str, list[str]]
    window_radius: int
    delta_hat: Optional[int] = None
    delta_mode: Optional[str] = None
    mu_hat: Optional[int] = None
    mu_hat_by_subgroup: dict[str, int] = Field(default_factory=dict)
    mu1_hat: Optional[int] = None
    A: Optional[int] = None
    lambda0: Optional[str] = None
    epsilon0: Optional[str] = None
    local_to_global: Optional[QuasiParamsRecord] = None
    C: Optional[str] = None
    m_rel: Optional[int] = None
    M: Optional[int] = None
    malnormality: Optional[MalnormalRecord] = None
    gates: list[GateOutcome] = Field(default_factory=list)
    syllable_paths_checked: int = 0
    unmeasured_paths: int = 0
    lemma5_bound: Optional[int] = None
    lemma5_tight_bound: Optional[int] = None
    lemma5_above_tight_bound: int = 0
    max_lemma5: Optional[int] = None
    max_lemma6: Optional[int] = None
    junctions: list[OverlapRecord] = Field(default_factory=list)
    overlaps: list[OverlapRecord] = Field(default_factory=list)
    oracle: Optional[OracleRecord] = None
    join_mu_hat: Optional[int] = None
    verdict: Verdict
    seeds: dict[str, int] = Field(default_factory=dict)
    provenance: dict[str, str] = Field(default_factory=dict)
    notes: list[str] = Field(default_factory=list)

    @property
    def first_failing_gate(self) -> Optional[GateOutcome]:
        return next((g for g in self.gates if not g.passed), None)


class BallExport(BaseModel):
    """Vertices in shortlex order; edges[v][j] follows the j-th letter, -1 outside."""

    schema_version: str = SCHEMA_VERSION
    presentation_hash: str
    radius: int
    letters: list[str]
    vertices: list[str]
    sphere_sizes: list[int]
    edges: list[list[int]]


class DeltaResult(BaseModel):
    presentation_hash: str
    radius: int
    delta_hat: int
    mode: str
    triangles: int
    seed: Optional[int] = None
    method: str = "interval-scan"


class MuResult(BaseModel):
    presentation_hash: str
    radius: int
    subgroup: list[str]
    membership_mode: str
    mu_hat: int


class RelativeBallResult(BaseModel):
    presentation_hash: str
    subgroup: list[str]
    radius: int
    counts: list[int]
    representatives: list[str]
    m_rel: Optional[int] = None
    M: Optional[int] = None


class OracleResult(BaseModel):
    presentation_hash: str
    H1: list[str]
    K1: list[str]
    G0: list[str]
    oracle: OracleRecord


class AbstractPingPongInstance(BaseModel):
    """Finite set with a (possibly partial) action table of named elements."""

    points: list[str]
    actions: dict[str, dict[str, str]]
    H: list[str]
    K: list[str]
    G0: list[str] = Field(default_factory=list)
    S_H: list[str]
    S_K: list[str]


class PingPongResult(BaseModel):
    status: Literal["verified", "hypotheses-fail", "index-guard"]
    reason: Optional[str] = None
    maxsyll: int
    index_H: Optional[int] = None
    index_K: Optional[int] = None
    odd_products_checked: int = 0
    undefined_products: int = 0
    even_products_checked: int = 0
    even_products_without_conjugator: int = 0


class SchottkyAttempt(BaseModel):
    m: int
    n: int
    status: str
    reason: Optional[str] = None


class SchottkyResult(BaseModel):
    presentation_hash: str
    h: str
    k: str
    maxpow: int
    found: bool
    m: Optional[int] = None
    n: Optional[int] = None
    attempts: list[SchottkyAttempt] = Field(default_factory=list)
    certificate: Optional[Certificate] = None


class DepthReportRecord(BaseModel):
    rank: int
    degree: int
    images: dict[str, str]
    depth: int
    witness: str


class DeepQuotientResult(BaseModel):
    rank: int
    n: int
    found: bool
    seed: int
    candidates_tried: int
    report: Optional[DepthReportRecord] = None
    certificate: Optional[Certificate] = None
