"""Parametric solar-shortfall insurance with provable settlement.

The pipeline estimates surface solar irradiance from calibrated satellite
counts in exact fixed-point arithmetic, arithmetizes the payout predicate
as a constraint system over committed polynomials, proves it without
revealing the underlying measurements, anchors the data to a signed
provider commitment, and settles the policy on a simulated ledger.
"""

from .circuit import (
    CircuitShape,
    ClaimInputs,
    LinearConstraintSet,
    WitnessVectors,
    build_linear_constraints,
    build_polynomials,
    build_witness,
    check_constraints_direct,
    derive_challenge_vectors,
    split_r,
)
from .commitments import OpeningProof, Srs, commit, open_at, setup, verify_open, verify_open_batch
from .contract import ClaimOutcome, Contract, PolicyState, PolicyTerms
from .errors import (
    ConfigError,
    ConstantTermError,
    DatasetError,
    DegreeError,
    DimensionError,
    EvaluationError,
    ParameterError,
    ParasolError,
    ProvenanceError,
    ProvingError,
    RangeError,
    SerializationError,
    StateError,
    WitnessUnavailable,
)
from .poly import Laurent
from .protocol import ClaimContext, ClaimProof, VerifyResult, prove, verify
from .provider import (
    AreaRect,
    DataRequest,
    DataResponse,
    Dataset,
    ProvenanceResult,
    ingest_dataset,
    serve_request,
    verify_provenance,
)
from .signatures import SigningKey, generate_keypair, sign, verify_signature
from .ssi import (
    SCALE,
    ClaimDecision,
    ModelParams,
    RemoteSensingSample,
    SsiResult,
    bit_decompose,
    compute_ssi,
    evaluate_claim,
)
from .transcript import Transcript

__version__ = "0.1.0"

__all__ = [
    "AreaRect",
    "CircuitShape",
    "ClaimContext",
    "ClaimDecision",
    "ClaimInputs",
    "ClaimOutcome",
    "ClaimProof",
    "ConfigError",
    "ConstantTermError",
    "Contract",
    "DataRequest",
    "DataResponse",
    "Dataset",
    "DatasetError",
    "DegreeError",
    "DimensionError",
    "EvaluationError",
    "Laurent",
    "LinearConstraintSet",
    "ModelParams",
    "OpeningProof",
    "ParameterError",
    "ParasolError",
    "PolicyState",
    "PolicyTerms",
    "ProvenanceError",
    "ProvenanceResult",
    "ProvingError",
    "RangeError",
    "RemoteSensingSample",
    "SCALE",
    "SerializationError",
    "SigningKey",
    "SsiResult",
    "Srs",
    "StateError",
    "Transcript",
    "VerifyResult",
    "WitnessUnavailable",
    "WitnessVectors",
    "bit_decompose",
    "build_linear_constraints",
    "build_polynomials",
    "build_witness",
    "check_constraints_direct",
    "commit",
    "compute_ssi",
    "derive_challenge_vectors",
    "evaluate_claim",
    "generate_keypair",
    "ingest_dataset",
    "open_at",
    "prove",
    "serve_request",
    "setup",
    "sign",
    "split_r",
    "verify",
    "verify_open",
    "verify_open_batch",
    "verify_provenance",
    "verify_signature",
    "__version__",
]
