"""Simulated remote sensing data provider.

The provider owns a pixel-grid dataset (radiance and calibration channels
per timestamp), serves rectangular crops of it for requested instants, and
vouches for each response by committing to the data polynomial and signing

    h = SHA256(commit_r_raw || SHA256(canonical request metadata))

with its long-lived key.  A client holding only the raw samples, the
metadata, and the shared reference string can recompute the commitment and
the digest, so tampering with any raw value, the commitment, or the
metadata is detectable without contacting the provider again.

Dataset files are JSON:

    {"dataset_id": "...", "grid": {"rows": R, "cols": C},
     "samples": [{"timestamp": t, "radiance": [...], "calibration": [...]}]}

with row-major pixel order and integer values only.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from pathlib import Path

from .circuit import CircuitShape, raw_data_polynomial
from .commitments import Srs, commit
from .curve import g1_to_bytes
from .errors import DatasetError, ParameterError, ProvenanceError
from .signatures import SigningKey, sign, verify_signature
from .ssi import RemoteSensingSample
from .transcript import _frame


@dataclass(frozen=True)
class AreaRect:
    """Rectangle of pixels inside a provider grid, row-major."""

    row: int
    col: int
    rows: int
    cols: int

    def __post_init__(self) -> None:
        if self.row < 0 or self.col < 0:
            raise ParameterError(f"area origin must be non-negative: {self}")
        if self.rows < 1 or self.cols < 1:
            raise ParameterError(f"area extent must be positive: {self}")

    @property
    def n_pixels(self) -> int:
        return self.rows * self.cols

    def to_dict(self) -> dict:
        return {"row": self.row, "col": self.col, "rows": self.rows, "cols": self.cols}

    @classmethod
    def from_dict(cls, data: dict) -> "AreaRect":
        try:
            return cls(
                row=int(data["row"]),
                col=int(data["col"]),
                rows=int(data["rows"]),
                cols=int(data["cols"]),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise ParameterError(f"malformed area rectangle: {data!r}") from exc


@dataclass(frozen=True)
class Dataset:
    """In-memory pixel grid indexed by timestamp."""

    dataset_id: str
    rows: int
    cols: int
    frames: dict[int, tuple[tuple[int, ...], tuple[int, ...]]]

    @property
    def timestamps(self) -> tuple[int, ...]:
        return tuple(sorted(self.frames))

    @property
    def n_pixels(self) -> int:
        return self.rows * self.cols

    def contains(self, area: AreaRect) -> bool:
        return area.row + area.rows <= self.rows and area.col + area.cols <= self.cols


def ingest_dataset(path: str | Path) -> Dataset:
    """Load and validate a dataset file; errors carry record context."""
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise DatasetError(f"cannot read dataset {path}: {exc}") from exc
    if not text.strip():
        raise DatasetError(f"dataset {path} is empty")
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise DatasetError(f"dataset {path} is not valid JSON: {exc}") from exc
    try:
        dataset_id = str(doc["dataset_id"])
        rows = int(doc["grid"]["rows"])
        cols = int(doc["grid"]["cols"])
        records = doc["samples"]
    except (KeyError, TypeError) as exc:
        raise DatasetError(f"dataset {path} is missing required fields: {exc}") from exc
    if rows < 1 or cols < 1:
        raise DatasetError(f"dataset {path} grid must be positive, got {rows}x{cols}")
    if not isinstance(records, list) or not records:
        raise DatasetError(f"dataset {path} has no samples")
    n_pixels = rows * cols
    frames: dict[int, tuple[tuple[int, ...], tuple[int, ...]]] = {}
    for index, record in enumerate(records):
        try:
            timestamp = int(record["timestamp"])
            radiance = tuple(record["radiance"])
            calibration = tuple(record["calibration"])
        except (KeyError, TypeError) as exc:
            raise DatasetError(f"sample {index} in {path} is malformed: {exc}") from exc
        if len(radiance) != n_pixels or len(calibration) != n_pixels:
            raise DatasetError(
                f"sample {index} in {path}: vectors have lengths "
                f"{len(radiance)}/{len(calibration)}, grid needs {n_pixels}"
            )
        for name, vec in (("radiance", radiance), ("calibration", calibration)):
            for j, value in enumerate(vec):
                if not isinstance(value, int) or isinstance(value, bool):
                    raise DatasetError(
                        f"sample {index} in {path}: {name}[{j}] is not an integer"
                    )
                if value < 0:
                    raise DatasetError(
                        f"sample {index} in {path}: {name}[{j}] is negative"
                    )
        if timestamp in frames:
            raise DatasetError(f"sample {index} in {path}: duplicate timestamp {timestamp}")
        frames[timestamp] = (radiance, calibration)
    return Dataset(dataset_id=dataset_id, rows=rows, cols=cols, frames=frames)


@dataclass(frozen=True)
class DataRequest:
    """Request for a crop of the grid at chosen instants."""

    area: AreaRect
    timestamps: tuple[int, ...]
    policy_id: str

    def __post_init__(self) -> None:
        object.__setattr__(self, "timestamps", tuple(self.timestamps))
        if not self.timestamps:
            raise ParameterError("request must name at least one timestamp")
        if list(self.timestamps) != sorted(self.timestamps):
            raise ParameterError("request timestamps must be sorted ascending")
        if len(set(self.timestamps)) != len(self.timestamps):
            raise ParameterError("request timestamps must be distinct")


@dataclass(frozen=True)
class DataResponse:
    """Raw samples plus the provider's commitment and signature."""

    dataset_id: str
    area: AreaRect
    timestamps: tuple[int, ...]
    samples: tuple[RemoteSensingSample, ...]
    commit_r_raw: bytes
    signature: bytes
    key_id: str

    def to_json(self) -> str:
        doc = {
            "dataset_id": self.dataset_id,
            "area": self.area.to_dict(),
            "timestamps": list(self.timestamps),
            "samples": [
                {
                    "timestamp": s.timestamp,
                    "radiance": list(s.radiance),
                    "calibration": list(s.calibration),
                }
                for s in self.samples
            ],
            "commit_r_raw": self.commit_r_raw.hex(),
            "signature": self.signature.hex(),
            "key_id": self.key_id,
        }
        return json.dumps(doc, sort_keys=True, separators=(",", ":"))

    @classmethod
    def from_json(cls, text: str) -> "DataResponse":
        try:
            doc = json.loads(text)
            return cls(
                dataset_id=str(doc["dataset_id"]),
                area=AreaRect.from_dict(doc["area"]),
                timestamps=tuple(int(t) for t in doc["timestamps"]),
                samples=tuple(
                    RemoteSensingSample(
                        radiance=tuple(s["radiance"]),
                        calibration=tuple(s["calibration"]),
                        timestamp=int(s["timestamp"]),
                    )
                    for s in doc["samples"]
                ),
                commit_r_raw=bytes.fromhex(doc["commit_r_raw"]),
                signature=bytes.fromhex(doc["signature"]),
                key_id=str(doc["key_id"]),
            )
        except (KeyError, TypeError, ValueError, json.JSONDecodeError) as exc:
            raise ProvenanceError(f"malformed data response: {exc}") from exc


@dataclass(frozen=True)
class ProvenanceResult:
    accepted: bool
    reason: str


def canonical_metadata(dataset_id: str, area: AreaRect, timestamps: tuple[int, ...]) -> bytes:
    """Canonical byte encoding of the request metadata that gets signed."""
    doc = {
        "area": area.to_dict(),
        "dataset_id": dataset_id,
        "timestamps": list(timestamps),
    }
    return json.dumps(doc, sort_keys=True, separators=(",", ":")).encode()


def provenance_digest(
    commit_bytes: bytes, dataset_id: str, area: AreaRect, timestamps: tuple[int, ...]
) -> bytes:
    """h = SHA256(commit || SHA256(metadata)), with length-prefixed framing."""
    meta_digest = hashlib.sha256(canonical_metadata(dataset_id, area, timestamps)).digest()
    payload = _frame("commit", commit_bytes) + _frame("metadata-digest", meta_digest)
    return hashlib.sha256(payload).digest()


def _crop(dataset: Dataset, area: AreaRect, timestamp: int) -> RemoteSensingSample:
    radiance_full, calibration_full = dataset.frames[timestamp]
    radiance: list[int] = []
    calibration: list[int] = []
    for r in range(area.row, area.row + area.rows):
        base = r * dataset.cols
        radiance.extend(radiance_full[base + area.col : base + area.col + area.cols])
        calibration.extend(calibration_full[base + area.col : base + area.col + area.cols])
    return RemoteSensingSample(
        radiance=tuple(radiance), calibration=tuple(calibration), timestamp=timestamp
    )


def data_commitment(
    srs: Srs, samples: tuple[RemoteSensingSample, ...], n_pixels: int
) -> bytes:
    """Commit to the data polynomial of the given samples (48-byte encoding)."""
    # the bit width plays no role in the upper exponent layout
    shape = CircuitShape(n_pixels=n_pixels, n_samples=len(samples), m_bits=1)
    return g1_to_bytes(commit(srs, raw_data_polynomial(samples, shape)))


def serve_request(
    dataset: Dataset, request: DataRequest, signing_key: SigningKey, srs: Srs
) -> DataResponse:
    """Extract the requested crop, commit to it, and sign the digest."""
    if not dataset.contains(request.area):
        raise ParameterError(
            f"requested area {request.area} exceeds the {dataset.rows}x{dataset.cols} grid"
        )
    missing = [t for t in request.timestamps if t not in dataset.frames]
    if missing:
        raise ParameterError(f"timestamps not in dataset: {missing}")
    samples = tuple(_crop(dataset, request.area, t) for t in request.timestamps)
    commit_bytes = data_commitment(srs, samples, request.area.n_pixels)
    digest = provenance_digest(
        commit_bytes, dataset.dataset_id, request.area, request.timestamps
    )
    signature = sign(signing_key, digest)
    return DataResponse(
        dataset_id=dataset.dataset_id,
        area=request.area,
        timestamps=request.timestamps,
        samples=samples,
        commit_r_raw=commit_bytes,
        signature=signature,
        key_id=signing_key.key_id,
    )


def verify_provenance(response: DataResponse, public_key: bytes, srs: Srs) -> ProvenanceResult:
    """Client-side check: recompute the commitment and digest, verify the signature."""
    if len(response.samples) != len(response.timestamps):
        return ProvenanceResult(False, "shape-mismatch")
    if any(s.timestamp != t for s, t in zip(response.samples, response.timestamps)):
        return ProvenanceResult(False, "shape-mismatch")
    if any(s.n_pixels != response.area.n_pixels for s in response.samples):
        return ProvenanceResult(False, "shape-mismatch")
    recomputed = data_commitment(srs, response.samples, response.area.n_pixels)
    if recomputed != response.commit_r_raw:
        return ProvenanceResult(False, "commit-mismatch")
    digest = provenance_digest(
        response.commit_r_raw, response.dataset_id, response.area, response.timestamps
    )
    if not verify_signature(public_key, digest, response.signature):
        return ProvenanceResult(False, "bad-signature")
    return ProvenanceResult(True, "ok")
