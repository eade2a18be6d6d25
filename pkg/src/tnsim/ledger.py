"""Exact-integer address ledger with reward-offset pool and remainder accounts.

Balances are account-modelled integer Satoshi. Whenever the miner of a block
is paid something other than the block's total reward, the difference q
(miner_reward - total_reward) is offset so aggregate spending potential
matches a plain ledger where the miner was paid the total:

  * q < 0 (reward capped): |q| flows into a protocol pool P, and every
    address is assigned a pool claim e_x proportional to its spending
    potential, floored to Satoshi; the unassigned residue sits in FP.
  * q > 0 (reward floored): the pool is drawn down first; any excess beyond
    the pool becomes a remainder obligation R, assigned per address as r_x
    (floored, residue in FR), to be deducted from future spending.

An address's spending potential is x + e_x - r_x. When an address sends a
transaction, its net claim e_x - r_x settles: a positive difference is
credited to its balance, a negative one is burned from it (the transaction
is invalid and excluded if the burn exceeds what the balance can cover),
and both claims reset to zero. Each block the unassigned residues FP/FR are
redistributed by the same proportional rule.

Share arithmetic uses exact rationals; only assignments are floored, which
keeps every address within one Satoshi of exact proportionality per event
and makes aggregate neutrality an exact integer identity.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

SHARE_TOLERANCE = Fraction(1, 10**12)


class LedgerError(Exception):
    pass


class DegenerateStateError(LedgerError):
    """No positive spending potential anywhere: shares are undefined."""


class SharesValidationError(LedgerError):
    """Provided shares do not sum to 1 within tolerance."""


@dataclass(frozen=True)
class Transaction:
    sender: str
    recipient: str
    amount: int
    fee: int = 0


@dataclass(frozen=True)
class BlockSettlement:
    """Inputs for settling one block against the ledger."""

    transactions: tuple[Transaction, ...]
    miner: str
    total_reward: int
    miner_reward: int


@dataclass(frozen=True)
class InvalidTransaction:
    index: int
    sender: str
    reason: str


@dataclass(frozen=True)
class SettlementReport:
    """Per-block settlement outcome: exclusions and value created/destroyed.

    minted is the gross new issuance the block implies: the scheduled
    coinbase plus any reward-floor excess the pool cannot cover. burned is
    the value destroyed settling senders' remainder obligations.
    """

    invalid: tuple[InvalidTransaction, ...]
    fees_collected: int
    credited: int  # pool claims paid out to senders
    burned: int  # remainder obligations burned from senders
    minted: int
    miner_paid: int


@dataclass
class LedgerState:
    """Balances plus pool/remainder bookkeeping. Single writer per instance."""

    balances: dict[str, int] = field(default_factory=dict)
    pool_total: int = 0
    pool_shares: dict[str, int] = field(default_factory=dict)
    remainder_total: int = 0
    remainder_shares: dict[str, int] = field(default_factory=dict)
    unassigned_pool: int = 0
    unassigned_remainder: int = 0

    def addresses(self) -> list[str]:
        keys = set(self.balances) | set(self.pool_shares) | set(self.remainder_shares)
        return sorted(keys)


def spending_potential(ledger: LedgerState, address: str) -> int:
    """x + e_x - r_x; unknown addresses have all components zero."""
    return (
        ledger.balances.get(address, 0)
        + ledger.pool_shares.get(address, 0)
        - ledger.remainder_shares.get(address, 0)
    )


def aggregate_spending_potential(ledger: LedgerState) -> int:
    """Sum of address spending potentials plus the unassigned residues."""
    total = sum(spending_potential(ledger, a) for a in ledger.addresses())
    return total + ledger.unassigned_pool - ledger.unassigned_remainder


def compute_shares(ledger: LedgerState) -> dict[str, Fraction]:
    """Exact proportional shares of aggregate address spending potential."""
    potentials = {a: spending_potential(ledger, a) for a in ledger.addresses()}
    total = sum(potentials.values())
    if total <= 0:
        raise DegenerateStateError("aggregate spending potential is not positive")
    return {a: Fraction(p, total) for a, p in potentials.items()}


def _normalize_shares(shares: dict[str, object]) -> dict[str, Fraction]:
    out: dict[str, Fraction] = {}
    for addr, value in shares.items():
        if isinstance(value, Fraction):
            frac = value
        else:
            frac = Fraction(value).limit_denominator(10**12)
        if frac < 0:
            raise SharesValidationError(f"negative share for {addr}")
        out[addr] = frac
    if abs(sum(out.values(), Fraction(0)) - 1) > SHARE_TOLERANCE:
        raise SharesValidationError("shares do not sum to 1")
    return out


def _prune(mapping: dict[str, int]) -> None:
    for key in [k for k, v in mapping.items() if v == 0]:
        del mapping[key]


def _run_transactions(
    ledger: LedgerState, transactions: tuple[Transaction, ...]
) -> tuple[list[Transaction], list[InvalidTransaction], int, int]:
    """Walk transactions in order, settling sender claims on first send.

    A sender's pool claim is paid out of the pool (pool_total shrinks) and
    its remainder obligation is extinguished against its balance
    (remainder_total shrinks), so aggregate spending potential is unchanged
    by the claim settlement itself. Returns (valid, invalid, credited,
    burned); mutates the ledger.
    """
    valid: list[Transaction] = []
    invalid: list[InvalidTransaction] = []
    credited = 0
    burned = 0
    adjusted: set[str] = set()

    for idx, tx in enumerate(transactions):
        if tx.amount < 0 or tx.fee < 0:
            invalid.append(InvalidTransaction(idx, tx.sender, "negative amount or fee"))
            continue
        pending = 0
        if tx.sender not in adjusted:
            pending = ledger.pool_shares.get(
                tx.sender, 0
            ) - ledger.remainder_shares.get(tx.sender, 0)
        available = ledger.balances.get(tx.sender, 0) + pending
        if available < tx.amount + tx.fee:
            reason = (
                "burn exceeds unspent balance"
                if pending < 0
                else "insufficient spending potential"
            )
            invalid.append(InvalidTransaction(idx, tx.sender, reason))
            continue
        if tx.sender not in adjusted:
            claim = ledger.pool_shares.pop(tx.sender, 0)
            obligation = ledger.remainder_shares.pop(tx.sender, 0)
            ledger.pool_total -= claim
            ledger.remainder_total -= obligation
            if pending > 0:
                credited += pending
            else:
                burned += -pending
            ledger.balances[tx.sender] = ledger.balances.get(tx.sender, 0) + pending
            adjusted.add(tx.sender)
        ledger.balances[tx.sender] -= tx.amount + tx.fee
        ledger.balances[tx.recipient] = ledger.balances.get(tx.recipient, 0) + tx.amount
        valid.append(tx)

    return valid, invalid, credited, burned


def clone_ledger(ledger: LedgerState) -> LedgerState:
    return LedgerState(
        balances=dict(ledger.balances),
        pool_total=ledger.pool_total,
        pool_shares=dict(ledger.pool_shares),
        remainder_total=ledger.remainder_total,
        remainder_shares=dict(ledger.remainder_shares),
        unassigned_pool=ledger.unassigned_pool,
        unassigned_remainder=ledger.unassigned_remainder,
    )


def plan_transactions(
    ledger: LedgerState, transactions: tuple[Transaction, ...]
) -> tuple[list[Transaction], list[InvalidTransaction]]:
    """Dry-run the settlement walk: which transactions would be included."""
    valid, invalid, _, _ = _run_transactions(clone_ledger(ledger), transactions)
    return valid, invalid


def settle_transactions(
    ledger: LedgerState, block: BlockSettlement
) -> tuple[LedgerState, SettlementReport]:
    """Execute a block's transactions and pay the miner.

    Invalid transactions are excluded and reported, never raised. The
    caller is responsible for having computed total_reward/miner_reward
    from the transactions that actually settle (see plan_transactions).
    """
    if block.miner_reward < 0 or block.total_reward < 0:
        raise ValueError("rewards must be non-negative")
    valid, invalid, credited, burned = _run_transactions(ledger, block.transactions)
    fees = sum(tx.fee for tx in valid)
    reward_delta = block.miner_reward - block.total_reward
    minted = max(0, block.total_reward - fees) + max(
        0, reward_delta - ledger.pool_total
    )
    ledger.balances[block.miner] = (
        ledger.balances.get(block.miner, 0) + block.miner_reward
    )
    _prune(ledger.balances)
    report = SettlementReport(
        invalid=tuple(invalid),
        fees_collected=fees,
        credited=credited,
        burned=burned,
        minted=minted,
        miner_paid=block.miner_reward,
    )
    return ledger, report


def apply_reward_delta(
    ledger: LedgerState, q: int, shares: dict[str, object]
) -> LedgerState:
    """Offset a miner-reward delta q = miner_reward - total_reward.

    q < 0 grows the pool by |q| with per-address claims floor(share*|q|);
    q > 0 draws the pool down (claims reduced by floor(share*q), never
    below zero, residue reconciled through FP) and overflows into the
    remainder accounts once the pool is exhausted. Exact conservation:
    remainder change minus pool change equals q.
    """
    norm = _normalize_shares(shares)
    if q == 0:
        return ledger

    if q < 0:
        addition = -q
        assigned = 0
        for addr in sorted(norm):
            inc = math.floor(norm[addr] * addition)
            if inc:
                ledger.pool_shares[addr] = ledger.pool_shares.get(addr, 0) + inc
                assigned += inc
        ledger.pool_total += addition
        ledger.unassigned_pool += addition - assigned
        return ledger

    if ledger.pool_total >= q:
        drawn = 0
        for addr in sorted(norm):
            want = math.floor(norm[addr] * q)
            take = min(ledger.pool_shares.get(addr, 0), want)
            if take:
                ledger.pool_shares[addr] -= take
                drawn += take
        shortfall = q - drawn
        from_residue = min(ledger.unassigned_pool, shortfall)
        ledger.unassigned_pool -= from_residue
        shortfall -= from_residue
        # Floors under-draw by less than one Satoshi per address and FP
        # absorbs that. A claim smaller than its proportional draw (shares
        # drifted since it accrued) stops at zero, shifting the rest onto
        # the remaining claims in proportion to what each still holds.
        while shortfall > 0:
            holders = [(a, v) for a, v in sorted(ledger.pool_shares.items()) if v > 0]
            total_remaining = sum(v for _, v in holders)
            if total_remaining < shortfall:
                raise LedgerError("pool draw could not be completed")  # unreachable
            progressed = 0
            for addr, rem in holders:
                c = min(rem, (shortfall * rem) // total_remaining)
                if c:
                    ledger.pool_shares[addr] -= c
                    progressed += c
            if progressed == 0:
                # scattered last Satoshis: take one from the largest claims
                # (progressed == 0 implies shortfall < number of holders)
                for addr, _ in sorted(holders, key=lambda kv: (-kv[1], kv[0])):
                    if shortfall == 0:
                        break
                    ledger.pool_shares[addr] -= 1
                    shortfall -= 1
            else:
                shortfall -= progressed
        ledger.pool_total -= q
        _prune(ledger.pool_shares)
        return ledger

    # Pool exhausted: wipe it and push the excess into remainder accounts.
    excess = q - ledger.pool_total
    ledger.pool_total = 0
    ledger.pool_shares.clear()
    ledger.unassigned_pool = 0
    assigned = 0
    for addr in sorted(norm):
        inc = math.floor(norm[addr] * excess)
        if inc:
            ledger.remainder_shares[addr] = ledger.remainder_shares.get(addr, 0) + inc
            assigned += inc
    ledger.remainder_total += excess
    ledger.unassigned_remainder += excess - assigned
    return ledger


def rounding_assignment(ledger: LedgerState, shares: dict[str, object]) -> LedgerState:
    """Redistribute the unassigned residues FP/FR by the proportional rule.

    Claims grow by floor(share * residue); totals P and R are unchanged, so
    whatever the floors cannot place stays unassigned for the next block.
    """
    norm = _normalize_shares(shares)
    fp = ledger.unassigned_pool
    if fp > 0:
        assigned = 0
        for addr in sorted(norm):
            inc = math.floor(norm[addr] * fp)
            if inc:
                ledger.pool_shares[addr] = ledger.pool_shares.get(addr, 0) + inc
                assigned += inc
        ledger.unassigned_pool = fp - assigned
    fr = ledger.unassigned_remainder
    if fr > 0:
        assigned = 0
        for addr in sorted(norm):
            inc = math.floor(norm[addr] * fr)
            if inc:
                ledger.remainder_shares[addr] = (
                    ledger.remainder_shares.get(addr, 0) + inc
                )
                assigned += inc
        ledger.unassigned_remainder = fr - assigned
    return ledger


def check_invariants(ledger: LedgerState) -> None:
    """Raise if bookkeeping identities or non-negativity are violated."""
    if any(v < 0 for v in ledger.balances.values()):
        raise LedgerError("negative balance")
    if any(v < 0 for v in ledger.pool_shares.values()):
        raise LedgerError("negative pool claim")
    if any(v < 0 for v in ledger.remainder_shares.values()):
        raise LedgerError("negative remainder claim")
    if ledger.pool_total < 0 or ledger.remainder_total < 0:
        raise LedgerError("negative pool or remainder total")
    if ledger.unassigned_pool < 0 or ledger.unassigned_remainder < 0:
        raise LedgerError("negative unassigned residue")
    if sum(ledger.pool_shares.values()) + ledger.unassigned_pool != ledger.pool_total:
        raise LedgerError("pool bookkeeping broken")
    if (
        sum(ledger.remainder_shares.values()) + ledger.unassigned_remainder
        != ledger.remainder_total
    ):
        raise LedgerError("remainder bookkeeping broken")
    for addr in ledger.addresses():
        if spending_potential(ledger, addr) < 0:
            raise LedgerError(f"negative spending potential for {addr}")


def apply_nakamoto_baseline(
    balances: dict[str, int],
    transactions: list[Transaction],
    miner: str,
    total_reward: int,
) -> dict[str, int]:
    """Counterfactual plain-ledger replay: miner paid the full total reward.

    Used as the neutrality reference; applies the already-validated
    transaction set without re-checking balances.
    """
    for tx in transactions:
        balances[tx.sender] = balances.get(tx.sender, 0) - tx.amount - tx.fee
        balances[tx.recipient] = balances.get(tx.recipient, 0) + tx.amount
    balances[miner] = balances.get(miner, 0) + total_reward
    return balances


def ledger_to_json_dict(ledger: LedgerState) -> dict:
    """Versioned snapshot, integer Satoshi only, keys sorted for stability."""
    return {
        "version": 1,
        "balances": {a: ledger.balances[a] for a in sorted(ledger.balances)},
        "pool": {
            "total": ledger.pool_total,
            "shares": {a: ledger.pool_shares[a] for a in sorted(ledger.pool_shares)},
            "unassigned": ledger.unassigned_pool,
        },
        "remainder": {
            "total": ledger.remainder_total,
            "shares": {
                a: ledger.remainder_shares[a] for a in sorted(ledger.remainder_shares)
            },
            "unassigned": ledger.unassigned_remainder,
        },
    }


def ledger_from_json_dict(doc: dict) -> LedgerState:
    if doc.get("version") != 1:
        raise ValueError(f"unsupported ledger snapshot version: {doc.get('version')}")
    return LedgerState(
        balances=dict(doc["balances"]),
        pool_total=doc["pool"]["total"],
        pool_shares=dict(doc["pool"]["shares"]),
        remainder_total=doc["remainder"]["total"],
        remainder_shares=dict(doc["remainder"]["shares"]),
        unassigned_pool=doc["pool"]["unassigned"],
        unassigned_remainder=doc["remainder"]["unassigned"],
    )
