"""In-process simulation of the insurance ledger and policy lifecycle.

Money is integer minor units moving between named accounts plus one escrow
account per policy; the sum over all accounts is invariant under every
operation.  Time is an injected logical clock, never the wall clock.

Lifecycle:

    Created --fund(premium)/fund(sum insured)--> Funded --both legs--> Active
    Active --accepted claim--> PaidOut     (sum insured to the insuree,
                                            premium to the insurer)
    Active --deadline--> Expired           (premium and sum insured to the
                                            insurer)
    Created/Funded --deadline--> Expired   (each paid leg refunded to its
                                            payer; the policy never ran)

PaidOut and Expired are terminal.  Closed is reserved for future
administrative shutdown and is never entered by the operations here.

Claim verification is injected as a callable so the ledger logic stays
independent of the proof system; every verify outcome is appended to the
event log, and a policy can reach PaidOut only through exactly one
accepted claim.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable

from .circuit import CircuitShape
from .errors import ParameterError, StateError
from .protocol import VerifyResult
from .provider import AreaRect
from .ssi import ModelParams


class PolicyState(str, Enum):
    CREATED = "created"
    FUNDED = "funded"
    ACTIVE = "active"
    PAID_OUT = "paid_out"
    EXPIRED = "expired"
    CLOSED = "closed"


_TERMINAL = {PolicyState.PAID_OUT, PolicyState.EXPIRED, PolicyState.CLOSED}


@dataclass(frozen=True)
class PolicyTerms:
    """Agreed terms of one parametric policy."""

    policy_id: str
    insurer: str
    insuree: str
    dataset_id: str
    area: AreaRect
    timestamps: tuple[int, ...]
    period_start: int
    period_end: int
    rsp_key_id: str
    g_e: int
    epsilon_bp: int
    m_bits: int
    params: ModelParams
    sum_insured: int
    premium: int
    expiry: int

    def __post_init__(self) -> None:
        object.__setattr__(self, "timestamps", tuple(self.timestamps))
        if not self.policy_id:
            raise ParameterError("policy_id must be non-empty")
        if self.insurer == self.insuree:
            raise ParameterError("insurer and insuree must be distinct accounts")
        if not 0 <= self.epsilon_bp <= self.params.scale:
            raise ParameterError(
                f"epsilon_bp must lie in [0, {self.params.scale}], got {self.epsilon_bp}"
            )
        if not 1 <= self.m_bits <= 64:
            raise ParameterError(f"m_bits must lie in [1, 64], got {self.m_bits}")
        if self.g_e < 0:
            raise ParameterError(f"g_e is negative: {self.g_e}")
        if self.period_end < self.period_start:
            raise ParameterError("period_end precedes period_start")
        if self.expiry <= self.period_end:
            raise ParameterError("expiry must fall after the period end")
        if not self.timestamps:
            raise ParameterError("policy must name at least one sampling instant")
        if list(self.timestamps) != sorted(set(self.timestamps)):
            raise ParameterError("sampling instants must be distinct and ascending")
        if self.timestamps[0] < self.period_start or self.timestamps[-1] > self.period_end:
            raise ParameterError("sampling instants must lie within the period")
        if len(self.timestamps) != self.params.n_samples:
            raise ParameterError(
                f"policy names {len(self.timestamps)} instants but params define "
                f"{self.params.n_samples}"
            )
        if self.params.n_pixels != self.area.n_pixels:
            raise ParameterError(
                f"params define {self.params.n_pixels} pixels but the area has "
                f"{self.area.n_pixels}"
            )
        if self.sum_insured < 1 or self.premium < 1:
            raise ParameterError("sum_insured and premium must be positive")

    @property
    def threshold(self) -> int:
        return (self.g_e * self.epsilon_bp) // self.params.scale

    @property
    def shape(self) -> CircuitShape:
        return CircuitShape(
            n_pixels=self.params.n_pixels,
            n_samples=len(self.timestamps),
            m_bits=self.m_bits,
        )

    def to_dict(self) -> dict:
        return {
            "policy_id": self.policy_id,
            "insurer": self.insurer,
            "insuree": self.insuree,
            "dataset_id": self.dataset_id,
            "area": self.area.to_dict(),
            "timestamps": list(self.timestamps),
            "period_start": self.period_start,
            "period_end": self.period_end,
            "rsp_key_id": self.rsp_key_id,
            "g_e": self.g_e,
            "epsilon_bp": self.epsilon_bp,
            "m_bits": self.m_bits,
            "params": {
                "sigma0": list(self.params.sigma0),
                "sigma1": list(self.params.sigma1),
                "g_cs": list(self.params.g_cs),
                "g_prd": self.params.g_prd,
                "scale": self.params.scale,
            },
            "sum_insured": self.sum_insured,
            "premium": self.premium,
            "expiry": self.expiry,
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "PolicyTerms":
        try:
            params = ModelParams(
                sigma0=tuple(doc["params"]["sigma0"]),
                sigma1=tuple(doc["params"]["sigma1"]),
                g_cs=tuple(doc["params"]["g_cs"]),
                g_prd=int(doc["params"]["g_prd"]),
                scale=int(doc["params"]["scale"]),
            )
            return cls(
                policy_id=str(doc["policy_id"]),
                insurer=str(doc["insurer"]),
                insuree=str(doc["insuree"]),
                dataset_id=str(doc["dataset_id"]),
                area=AreaRect.from_dict(doc["area"]),
                timestamps=tuple(int(t) for t in doc["timestamps"]),
                period_start=int(doc["period_start"]),
                period_end=int(doc["period_end"]),
                rsp_key_id=str(doc["rsp_key_id"]),
                g_e=int(doc["g_e"]),
                epsilon_bp=int(doc["epsilon_bp"]),
                m_bits=int(doc["m_bits"]),
                params=params,
                sum_insured=int(doc["sum_insured"]),
                premium=int(doc["premium"]),
                expiry=int(doc["expiry"]),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise ParameterError(f"malformed policy document: {exc}") from exc

    def digest(self) -> bytes:
        canonical = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canonical.encode()).digest()


@dataclass
class PolicyRecord:
    terms: PolicyTerms
    state: PolicyState = PolicyState.CREATED
    premium_paid: bool = False
    sum_paid: bool = False

    @property
    def escrow_account(self) -> str:
        return f"escrow:{self.terms.policy_id}"


@dataclass(frozen=True)
class ClaimOutcome:
    accepted: bool
    reason: str
    state: PolicyState


VerifyFn = Callable[[PolicyTerms, bytes, bytes], VerifyResult]


class Contract:
    """Single-writer state machine over accounts, policies, and events."""

    def __init__(self, verify_fn: VerifyFn, now: int = 0):
        self._verify_fn = verify_fn
        self.now = now
        self.accounts: dict[str, int] = {}
        self.policies: dict[str, PolicyRecord] = {}
        self.events: list[dict] = []

    # -- plumbing ----------------------------------------------------------

    def set_now(self, now: int) -> None:
        if now < self.now:
            raise StateError(f"logical clock cannot move backwards ({self.now} -> {now})")
        self.now = now

    def open_account(self, account_id: str, endowment: int = 0) -> None:
        if endowment < 0:
            raise ParameterError("endowment must be non-negative")
        if account_id in self.accounts:
            raise StateError(f"account {account_id} already exists")
        self.accounts[account_id] = endowment
        self._log("account_opened", account=account_id, endowment=endowment)

    def balance(self, account_id: str) -> int:
        try:
            return self.accounts[account_id]
        except KeyError as exc:
            raise ParameterError(f"unknown account {account_id}") from exc

    def total_balance(self) -> int:
        return sum(self.accounts.values())

    def _log(self, kind: str, **payload) -> None:
        self.events.append({"seq": len(self.events), "at": self.now, "kind": kind, **payload})

    def _transfer(self, src: str, dst: str, amount: int, note: str) -> None:
        if self.accounts[src] < amount:
            raise ParameterError(f"insufficient balance in {src} for {amount}")
        self.accounts[src] -= amount
        self.accounts[dst] = self.accounts.get(dst, 0) + amount
        self._log("transfer", src=src, dst=dst, amount=amount, note=note)

    def _record(self, policy_id: str) -> PolicyRecord:
        try:
            return self.policies[policy_id]
        except KeyError as exc:
            raise StateError(f"unknown policy {policy_id}") from exc

    # -- lifecycle ---------------------------------------------------------

    def create_policy(self, terms: PolicyTerms) -> str:
        if terms.policy_id in self.policies:
            raise StateError(f"policy {terms.policy_id} already exists")
        for account in (terms.insurer, terms.insuree):
            if account not in self.accounts:
                raise ParameterError(f"unknown account {account}")
        record = PolicyRecord(terms=terms)
        self.policies[terms.policy_id] = record
        self.accounts.setdefault(record.escrow_account, 0)
        self._log(
            "policy_created",
            policy=terms.policy_id,
            digest=terms.digest().hex(),
            rsp_key_id=terms.rsp_key_id,
        )
        return terms.policy_id

    def fund(self, policy_id: str, party: str, amount: int) -> PolicyState:
        record = self._record(policy_id)
        if record.state not in (PolicyState.CREATED, PolicyState.FUNDED):
            raise StateError(f"policy {policy_id} is {record.state.value}, cannot fund")
        terms = record.terms
        if party == terms.insuree:
            if record.premium_paid:
                raise StateError("premium leg already funded")
            if amount != terms.premium:
                raise ParameterError(
                    f"premium leg must be exactly {terms.premium}, got {amount}"
                )
            self._transfer(party, record.escrow_account, amount, "premium")
            record.premium_paid = True
        elif party == terms.insurer:
            if record.sum_paid:
                raise StateError("sum-insured leg already funded")
            if amount != terms.sum_insured:
                raise ParameterError(
                    f"sum-insured leg must be exactly {terms.sum_insured}, got {amount}"
                )
            self._transfer(party, record.escrow_account, amount, "sum_insured")
            record.sum_paid = True
        else:
            raise ParameterError(f"{party} is not a party to policy {policy_id}")
        record.state = (
            PolicyState.ACTIVE
            if record.premium_paid and record.sum_paid
            else PolicyState.FUNDED
        )
        self._log("funded", policy=policy_id, party=party, amount=amount,
                  state=record.state.value)
        return record.state

    def submit_claim(self, policy_id: str, proof_bytes: bytes, signature: bytes) -> ClaimOutcome:
        record = self._record(policy_id)
        if record.state is not PolicyState.ACTIVE:
            raise StateError(
                f"policy {policy_id} is {record.state.value}; claims need an active policy"
            )
        if self.now >= record.terms.expiry:
            raise StateError(f"policy {policy_id} expired at {record.terms.expiry}")
        result = self._verify_fn(record.terms, proof_bytes, signature)
        self._log(
            "claim_verified",
            policy=policy_id,
            accepted=result.accepted,
            reason=result.reason,
        )
        if not result.accepted:
            return ClaimOutcome(accepted=False, reason=result.reason, state=record.state)
        terms = record.terms
        self._transfer(record.escrow_account, terms.insuree, terms.sum_insured, "payout")
        self._transfer(record.escrow_account, terms.insurer, terms.premium, "premium_on_payout")
        record.state = PolicyState.PAID_OUT
        self._log("paid_out", policy=policy_id)
        return ClaimOutcome(accepted=True, reason="ok", state=record.state)

    def expire(self, policy_id: str, now: int | None = None) -> PolicyState:
        if now is not None:
            self.set_now(now)
        record = self._record(policy_id)
        if record.state in _TERMINAL:
            raise StateError(f"policy {policy_id} is already {record.state.value}")
        if self.now < record.terms.expiry:
            raise StateError(
                f"policy {policy_id} does not expire until {record.terms.expiry}"
            )
        terms = record.terms
        if record.state is PolicyState.ACTIVE:
            # the policy ran its course: insurer keeps premium, recovers stake
            self._transfer(record.escrow_account, terms.insurer, terms.premium, "premium_on_expiry")
            self._transfer(record.escrow_account, terms.insurer, terms.sum_insured, "stake_returned")
        else:
            # never activated: refund each funded leg to its payer
            if record.premium_paid:
                self._transfer(record.escrow_account, terms.insuree, terms.premium, "premium_refund")
            if record.sum_paid:
                self._transfer(record.escrow_account, terms.insurer, terms.sum_insured, "stake_refund")
        record.state = PolicyState.EXPIRED
        self._log("expired", policy=policy_id)
        return record.state

    # -- persistence -------------------------------------------------------

    def to_dict(self) -> dict:
        return {
            "now": self.now,
            "accounts": dict(self.accounts),
            "policies": [
                {
                    "terms": record.terms.to_dict(),
                    "state": record.state.value,
                    "premium_paid": record.premium_paid,
                    "sum_paid": record.sum_paid,
                }
                for record in self.policies.values()
            ],
            "events": list(self.events),
        }

    @classmethod
    def from_dict(cls, doc: dict, verify_fn: VerifyFn) -> "Contract":
        contract = cls(verify_fn=verify_fn, now=int(doc["now"]))
        contract.accounts = {str(k): int(v) for k, v in doc["accounts"].items()}
        for entry in doc["policies"]:
            record = PolicyRecord(
                terms=PolicyTerms.from_dict(entry["terms"]),
                state=PolicyState(entry["state"]),
                premium_paid=bool(entry["premium_paid"]),
                sum_paid=bool(entry["sum_paid"]),
            )
            contract.policies[record.terms.policy_id] = record
        contract.events = list(doc["events"])
        return contract
