"""Command-line driver for end-to-end claim scenarios.

One scenario lives in a working directory: ``setup`` reads a config file
and materializes the reference string, dataset, provider key, and ledger
there; the other subcommands advance that state.  Every artifact is
derived deterministically from the config seed, so re-running a scenario
reproduces identical bytes.

Results go to stdout as canonical JSON (sorted keys, no whitespace);
diagnostics go to stderr.  Exit codes:

    0  command completed (including a completed verify that rejected)
    1  unexpected internal failure
    2  bad config, bad arguments, or a lifecycle violation
    3  claim requested but the measured shortfall is not payable
    4  provenance failure on provider data
    5  proof construction failed on an otherwise payable claim
"""

from __future__ import annotations

import hashlib
import json
import logging
import sys
from pathlib import Path
from random import Random

import click

from .circuit import ClaimInputs
from .commitments import Srs, setup as srs_setup
from .contract import Contract, PolicyTerms
from .errors import (
    ConfigError,
    DatasetError,
    ParameterError,
    ParasolError,
    ProvenanceError,
    ProvingError,
    SerializationError,
    StateError,
    WitnessUnavailable,
)
from .protocol import ClaimContext, ClaimProof, VerifyResult, prove, verify
from .provider import DataRequest, DataResponse, ingest_dataset, serve_request, verify_provenance
from .signatures import SigningKey, generate_keypair
from .ssi import compute_ssi, evaluate_claim
from .transcript import Transcript

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_CONFIG = 2
EXIT_NOT_PAYABLE = 3
EXIT_PROVENANCE = 4
EXIT_PROVING = 5

_STATE_FILE = "state.json"
_SRS_FILE = "srs.bin"
_DATASET_FILE = "dataset.json"
_RSP_KEY_FILE = "rsp_key.json"
_RESPONSE_FILE = "response.json"
_CLAIM_FILE = "claim.json"

log = logging.getLogger("parasol")


def _canonical(doc: dict) -> str:
    return json.dumps(doc, sort_keys=True, separators=(",", ":"))


def _emit(doc: dict) -> None:
    click.echo(_canonical(doc))


def _fail(code: int, message: str) -> None:
    click.echo(_canonical({"error": message}), err=True)
    sys.exit(code)


def _seed_bytes(seed: int) -> bytes:
    return seed.to_bytes(8, "big", signed=False)


def _read_json(path: Path, what: str) -> dict:
    try:
        return json.loads(path.read_text())
    except OSError as exc:
        raise ConfigError(f"cannot read {what} at {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{what} at {path} is not valid JSON: {exc}") from exc


def _write_json(path: Path, doc: dict) -> None:
    path.write_text(_canonical(doc) + "\n")


# -- scenario state ----------------------------------------------------------


def _load_scenario(out_dir: Path) -> tuple[dict, Srs, PolicyTerms, bytes]:
    """State document, reference string, policy terms, RSP public key."""
    state = _read_json(out_dir / _STATE_FILE, "scenario state")
    try:
        srs = Srs.load(out_dir / _SRS_FILE)
    except OSError as exc:
        raise ConfigError(f"cannot read reference string: {exc}") from exc
    try:
        terms = PolicyTerms.from_dict(state["policy"])
        rsp_public = bytes.fromhex(state["rsp_public"])
    except (KeyError, ValueError) as exc:
        raise ConfigError(f"scenario state is malformed: {exc}") from exc
    return state, srs, terms, rsp_public


def _save_contract(out_dir: Path, state: dict, contract: Contract) -> None:
    state["contract"] = contract.to_dict()
    _write_json(out_dir / _STATE_FILE, state)


def _claim_context(terms: PolicyTerms, rsp_public: bytes) -> ClaimContext:
    return ClaimContext(
        shape=terms.shape,
        params=terms.params,
        threshold=terms.threshold,
        policy_digest=terms.digest(),
        dataset_id=terms.dataset_id,
        area=terms.area,
        timestamps=terms.timestamps,
        rsp_public=rsp_public,
    )


def _make_verify_fn(srs: Srs, rsp_public: bytes):
    """Settlement verifier: parse failures count as opening failures."""

    def verify_fn(terms: PolicyTerms, proof_bytes: bytes, signature: bytes) -> VerifyResult:
        try:
            proof = ClaimProof.from_bytes(proof_bytes)
        except SerializationError:
            return VerifyResult(accepted=False, reason="bad-opening")
        return verify(srs, _claim_context(terms, rsp_public), proof, signature)

    return verify_fn


def _restore_contract(state: dict, srs: Srs, rsp_public: bytes) -> Contract:
    return Contract.from_dict(state["contract"], verify_fn=_make_verify_fn(srs, rsp_public))


def _policy_id(state: dict, requested: str | None) -> str:
    policy_id = requested or state.get("policy_id")
    if not policy_id:
        raise ConfigError("no policy recorded in the scenario state")
    return policy_id


def _prove_rng(seed: int, policy_digest: bytes) -> Random:
    tr = Transcript("parasol/cli-rng/v1")
    tr.absorb("seed", _seed_bytes(seed))
    tr.absorb("policy", policy_digest)
    return Random(int.from_bytes(tr.fork_seed("prove"), "big"))


# -- stages ------------------------------------------------------------------


def run_setup(config_path: Path, out_dir: Path, seed_override: int | None) -> dict:
    config = _read_json(config_path, "config")
    try:
        seed = int(config["seed"]) if seed_override is None else seed_override
        accounts = {str(k): int(v) for k, v in config["accounts"].items()}
        policy_doc = config["policy"]
        dataset_spec = config["dataset"]
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"config is missing or mistypes a field: {exc}") from exc

    rsp_key = generate_keypair(_seed_bytes(seed) + b"/rsp-key")
    policy_doc = dict(policy_doc)
    if policy_doc.get("rsp_key_id") in (None, "", "auto"):
        policy_doc["rsp_key_id"] = rsp_key.key_id
    terms = PolicyTerms.from_dict(policy_doc)
    if terms.rsp_key_id != rsp_key.key_id:
        raise ConfigError(
            f"policy names provider key {terms.rsp_key_id!r} but the derived key is "
            f"{rsp_key.key_id!r}"
        )
    out_dir.mkdir(parents=True, exist_ok=True)

    if isinstance(dataset_spec, str):
        dataset_path = Path(dataset_spec)
        if not dataset_path.is_absolute():
            dataset_path = config_path.parent / dataset_path
        dataset_doc = _read_json(dataset_path, "dataset")
    elif isinstance(dataset_spec, dict):
        dataset_doc = dataset_spec
    else:
        raise ConfigError("config field 'dataset' must be a path or an inline document")
    _write_json(out_dir / _DATASET_FILE, dataset_doc)
    dataset = ingest_dataset(out_dir / _DATASET_FILE)
    if dataset.dataset_id != terms.dataset_id:
        raise ConfigError(
            f"policy names dataset {terms.dataset_id!r} but the file holds "
            f"{dataset.dataset_id!r}"
        )

    _write_json(
        out_dir / _RSP_KEY_FILE,
        {"key_id": rsp_key.key_id, "secret": format(rsp_key.secret, "x"), "public": rsp_key.public.hex()},
    )

    length = terms.shape.witness_length
    log.info("generating reference string for witness length %d", length)
    _, srs = srs_setup(4 * length + 8, 3 * length, seed=_seed_bytes(seed) + b"/srs")
    srs.save(out_dir / _SRS_FILE)

    contract = Contract(verify_fn=_make_verify_fn(srs, rsp_key.public))
    for account, endowment in accounts.items():
        contract.open_account(account, endowment)
    contract.create_policy(terms)

    state = {
        "seed": seed,
        "policy_id": terms.policy_id,
        "policy": terms.to_dict(),
        "policy_digest": terms.digest().hex(),
        "rsp_public": rsp_key.public.hex(),
        "rsp_key_id": rsp_key.key_id,
        "srs_digest": srs.digest(),
    }
    _save_contract(out_dir, state, contract)
    return {
        "policy_id": terms.policy_id,
        "policy_digest": state["policy_digest"],
        "rsp_key_id": rsp_key.key_id,
        "srs_digest": state["srs_digest"],
        "state": contract.policies[terms.policy_id].state.value,
    }


def run_fund(out_dir: Path, party: str, amount: int | None, policy: str | None) -> dict:
    state, srs, terms, rsp_public = _load_scenario(out_dir)
    policy_id = _policy_id(state, policy)
    contract = _restore_contract(state, srs, rsp_public)
    if amount is None:
        if party == terms.insuree:
            amount = terms.premium
        elif party == terms.insurer:
            amount = terms.sum_insured
        else:
            raise ParameterError(f"{party} is not a party to policy {policy_id}")
    new_state = contract.fund(policy_id, party, amount)
    _save_contract(out_dir, state, contract)
    return {
        "policy_id": policy_id,
        "party": party,
        "amount": amount,
        "state": new_state.value,
        "balances": {k: v for k, v in sorted(contract.accounts.items())},
    }


def run_request_data(out_dir: Path, policy: str | None) -> dict:
    state, srs, terms, rsp_public = _load_scenario(out_dir)
    policy_id = _policy_id(state, policy)
    dataset = ingest_dataset(out_dir / _DATASET_FILE)
    key_doc = _read_json(out_dir / _RSP_KEY_FILE, "provider key")
    signing_key = SigningKey(
        secret=int(key_doc["secret"], 16),
        public=bytes.fromhex(key_doc["public"]),
        key_id=str(key_doc["key_id"]),
    )
    request = DataRequest(area=terms.area, timestamps=terms.timestamps, policy_id=policy_id)
    response = serve_request(dataset, request, signing_key, srs)
    provenance = verify_provenance(response, rsp_public, srs)
    if not provenance.accepted:
        raise ProvenanceError(f"provider response failed its own check: {provenance.reason}")
    (out_dir / _RESPONSE_FILE).write_text(response.to_json() + "\n")
    return {
        "policy_id": policy_id,
        "dataset_id": response.dataset_id,
        "n_samples": len(response.samples),
        "commit_r_raw": response.commit_r_raw.hex(),
        "rsp_key_id": response.key_id,
        "provenance": provenance.reason,
    }


def run_claim(out_dir: Path, policy: str | None) -> dict:
    state, srs, terms, rsp_public = _load_scenario(out_dir)
    policy_id = _policy_id(state, policy)
    try:
        response = DataResponse.from_json((out_dir / _RESPONSE_FILE).read_text())
    except OSError as exc:
        raise ConfigError(f"no provider response on file; run request-data first: {exc}") from exc
    provenance = verify_provenance(response, rsp_public, srs)
    if not provenance.accepted:
        raise ProvenanceError(f"provider response rejected: {provenance.reason}")

    inputs = ClaimInputs(
        samples=response.samples,
        params=terms.params,
        g_e=terms.g_e,
        epsilon_bp=terms.epsilon_bp,
        m_bits=terms.m_bits,
    )
    result = compute_ssi(list(response.samples), terms.params)
    decision = evaluate_claim(
        result.total_ssi, terms.g_e, terms.epsilon_bp, terms.m_bits, terms.params.scale
    )
    if not decision.payable:
        raise WitnessUnavailable(
            f"estimated output {result.total_ssi} is not below threshold {decision.threshold}"
        )
    log.info(
        "claim payable: total %d below threshold %d, proving", result.total_ssi, decision.threshold
    )
    proof = prove(
        srs,
        inputs,
        response,
        terms.digest(),
        _prove_rng(int(state["seed"]), terms.digest()),
    )
    claim_doc = {
        "policy_id": policy_id,
        "proof": proof.to_bytes().hex(),
        "signature": response.signature.hex(),
        "rsp_key_id": response.key_id,
    }
    _write_json(out_dir / _CLAIM_FILE, claim_doc)
    return {
        "policy_id": policy_id,
        "payable": True,
        "total_ssi": result.total_ssi,
        "threshold": decision.threshold,
        "proof_bytes": len(proof.to_bytes()),
        "claim_file": str(out_dir / _CLAIM_FILE),
    }


def run_verify_settle(out_dir: Path, proof_path: Path | None, now: int | None, policy: str | None) -> dict:
    state, srs, terms, rsp_public = _load_scenario(out_dir)
    policy_id = _policy_id(state, policy)
    contract = _restore_contract(state, srs, rsp_public)
    if now is not None:
        contract.set_now(now)
    path = proof_path or (out_dir / _CLAIM_FILE)
    try:
        raw = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read claim file {path}: {exc}") from exc
    # A mangled claim file is a rejected claim, not a usage error.
    try:
        claim_doc = json.loads(raw)
        proof_bytes = bytes.fromhex(claim_doc["proof"])
        signature = bytes.fromhex(claim_doc["signature"])
    except (json.JSONDecodeError, KeyError, TypeError, ValueError):
        proof_bytes, signature = b"", b""
    outcome = contract.submit_claim(policy_id, proof_bytes, signature)
    _save_contract(out_dir, state, contract)
    return {
        "policy_id": policy_id,
        "accepted": outcome.accepted,
        "reason": outcome.reason,
        "state": outcome.state.value,
        "balances": {k: v for k, v in sorted(contract.accounts.items())},
    }


def run_expire(out_dir: Path, now: int, policy: str | None) -> dict:
    state, srs, terms, rsp_public = _load_scenario(out_dir)
    policy_id = _policy_id(state, policy)
    contract = _restore_contract(state, srs, rsp_public)
    new_state = contract.expire(policy_id, now=now)
    _save_contract(out_dir, state, contract)
    return {
        "policy_id": policy_id,
        "state": new_state.value,
        "balances": {k: v for k, v in sorted(contract.accounts.items())},
    }


def run_inspect(out_dir: Path) -> dict:
    state, srs, terms, rsp_public = _load_scenario(out_dir)
    contract = _restore_contract(state, srs, rsp_public)
    return {
        "now": contract.now,
        "policy_id": state.get("policy_id"),
        "policy_digest": state.get("policy_digest"),
        "srs_digest": state.get("srs_digest"),
        "rsp_key_id": state.get("rsp_key_id"),
        "policies": {
            pid: record.state.value for pid, record in sorted(contract.policies.items())
        },
        "balances": {k: v for k, v in sorted(contract.accounts.items())},
        "events": len(contract.events),
    }


# -- click wiring ------------------------------------------------------------


def _dispatch(stage, *args) -> None:
    try:
        doc = stage(*args)
    except (ConfigError, DatasetError, ParameterError, StateError, SerializationError) as exc:
        _fail(EXIT_CONFIG, str(exc))
    except WitnessUnavailable as exc:
        _fail(EXIT_NOT_PAYABLE, str(exc))
    except ProvenanceError as exc:
        _fail(EXIT_PROVENANCE, str(exc))
    except ProvingError as exc:
        _fail(EXIT_PROVING, str(exc))
    except ParasolError as exc:
        _fail(EXIT_ERROR, str(exc))
    else:
        _emit(doc)


_out_option = click.option(
    "--out",
    "out_dir",
    type=click.Path(path_type=Path),
    default=Path("parasol-run"),
    show_default=True,
    help="Scenario working directory.",
)
_policy_option = click.option("--policy", default=None, help="Policy id (defaults to the scenario's).")


@click.group()
@click.option("-v", "--verbose", is_flag=True, help="Log progress to stderr.")
def main(verbose: bool) -> None:
    """Parametric solar-shortfall insurance pipeline."""
    logging.basicConfig(
        stream=sys.stderr,
        level=logging.INFO if verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )


@main.command()
@click.option("--config", "config_path", type=click.Path(path_type=Path), required=True,
              help="Scenario config JSON.")
@_out_option
@click.option("--seed", type=int, default=None, help="Override the config seed.")
def setup(config_path: Path, out_dir: Path, seed: int | None) -> None:
    """Materialize reference string, dataset, keys, and ledger."""
    _dispatch(run_setup, config_path, out_dir, seed)


@main.command()
@_out_option
@click.option("--party", required=True, help="Account paying its leg.")
@click.option("--amount", type=int, default=None, help="Exact amount (defaults to the party's leg).")
@_policy_option
def fund(out_dir: Path, party: str, amount: int | None, policy: str | None) -> None:
    """Pay one funding leg into escrow."""
    _dispatch(run_fund, out_dir, party, amount, policy)


@main.command("request-data")
@_out_option
@_policy_option
def request_data(out_dir: Path, policy: str | None) -> None:
    """Fetch the signed, committed observation window from the provider."""
    _dispatch(run_request_data, out_dir, policy)


@main.command()
@_out_option
@_policy_option
def claim(out_dir: Path, policy: str | None) -> None:
    """Evaluate the claim locally and produce a proof if payable."""
    _dispatch(run_claim, out_dir, policy)


@main.command("verify-settle")
@_out_option
@click.option("--proof", "proof_path", type=click.Path(path_type=Path), default=None,
              help="Claim file (defaults to the scenario's claim.json).")
@click.option("--now", type=int, default=None, help="Advance the logical clock first.")
@_policy_option
def verify_settle(out_dir: Path, proof_path: Path | None, now: int | None, policy: str | None) -> None:
    """Verify a submitted claim and settle the policy on acceptance."""
    _dispatch(run_verify_settle, out_dir, proof_path, now, policy)


@main.command()
@_out_option
@click.option("--now", type=int, required=True, help="Logical time of the expiry call.")
@_policy_option
def expire(out_dir: Path, now: int, policy: str | None) -> None:
    """Expire a policy at or after its deadline and release escrow."""
    _dispatch(run_expire, out_dir, now, policy)


@main.command()
@_out_option
def inspect(out_dir: Path) -> None:
    """Show ledger balances, policy states, and event count."""
    _dispatch(run_inspect, out_dir)


if __name__ == "__main__":
    main()
