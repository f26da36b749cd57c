"""Exception taxonomy for the parasol package.

Every error raised by library code derives from ParasolError so callers can
catch one family. Subclasses map one-to-one onto the failure categories the
CLI turns into exit codes.
"""


class ParasolError(Exception):
    """Base class for all parasol errors."""


class DimensionError(ParasolError):
    """Vector or grid dimensions disagree."""


class ParameterError(ParasolError):
    """A supplied parameter violates a documented precondition."""


class RangeError(ParasolError):
    """A value falls outside its admissible range."""


class ConstantTermError(ParasolError):
    """Polynomial has a nonzero constant coefficient where policy forbids it."""


class DegreeError(ParasolError):
    """Polynomial degree window exceeds what the reference string supports."""


class EvaluationError(ParasolError):
    """Evaluation point is invalid (zero for a Laurent polynomial)."""


class SerializationError(ParasolError):
    """Bytes do not decode to a canonical object."""


class WitnessUnavailable(ParasolError):
    """No satisfying witness exists (claim not payable or deficit oversized)."""


class ProvenanceError(ParasolError):
    """Remote-sensing data fails its provenance checks."""


class ProvingError(ParasolError):
    """Prover refused or failed to produce a proof."""


class StateError(ParasolError):
    """Operation illegal in the current policy or ledger state."""


class DatasetError(ParasolError):
    """Dataset file is malformed."""


class ConfigError(ParasolError):
    """Scenario configuration is missing or inconsistent."""
