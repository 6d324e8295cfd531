"""Allocation of a network's transaction pool to layer-1 applications and tokens.

Applications draw exclusively from the transaction pool (their base unit is
the transaction fee on PoW, gas on PoS), never from the holding pool, so
registering apps cannot double-count against coin holders. Within an app
three routes exist: pure transaction-based, token-holding-based, and a hybrid
that reuses the host network's weights. Apps are an overlay, not a partition:
whatever share of the pool no app claims stays allocated at the network level.
"""

from __future__ import annotations

import datetime as _dt
from dataclasses import dataclass
from fractions import Fraction

from . import engine
from .errors import NoTransactions, NotAToken, ShareOverflow
from .model import (
    Activity,
    AllocationResult,
    AuditTrail,
    CoinAmount,
    Consensus,
    ConsensusParams,
    Energy,
    Method,
    NetworkDay,
    Share,
    TransactionRecord,
    carbonize,
)


@dataclass(frozen=True)
class AppDay:
    """One day of telemetry for a layer-1 application.

    ``app_fee_share`` is the app's share of the day's total network
    transaction fees (PoW) or gas (PoS) and is ingested data, not recomputed
    from chain indexing. ``token_supply`` is absent for apps without a token;
    NFT collections use the number of distinct items.
    """

    app_id: str
    date: _dt.date
    app_fee_share: Share
    app_tx_count: int
    token_supply: CoinAmount | None = None

    def __post_init__(self):
        if self.app_tx_count < 0:
            raise ValueError("app_tx_count must be >= 0")
        if self.token_supply is not None and self.token_supply.value <= 0:
            raise ValueError("token_supply must be > 0 when present")


@dataclass(frozen=True)
class TokenHolding:
    """An entity's average token balance in one app over one UTC day."""

    entity_id: str
    app_id: str
    date: _dt.date
    amount: CoinAmount


def app_pool(day: NetworkDay, weights: engine.MethodWeights, app: AppDay) -> Energy:
    """The app's slice of the day's transaction pool."""
    if app.date != day.date:
        raise ValueError(f"app day {app.date} does not match network day {day.date}")
    return engine.transaction_pool(day, weights) * app.app_fee_share


def unattributed_remainder(
    day: NetworkDay, weights: engine.MethodWeights, apps: list[AppDay] | tuple[AppDay, ...]
) -> Energy:
    """Transaction-pool energy claimed by no registered app; stays at network level."""
    claimed = sum((app.app_fee_share.value for app in apps), Fraction(0))
    return engine.transaction_pool(day, weights) * Share(1 - claimed)


def _app_scope(scope: tuple[str, ...], app: AppDay) -> tuple[str, ...]:
    return scope + (f"app:{app.app_id}",)


def _app_result(
    day: NetworkDay,
    weights: engine.MethodWeights,
    app: AppDay,
    entity_id: str,
    method: Method,
    activity: Activity,
    extra_factors: tuple[tuple[str, Fraction], ...],
    entity_share: Fraction,
    entity_basis: str,
    scope: tuple[str, ...],
) -> AllocationResult:
    factors = (
        ("transaction_weight", weights.transaction_weight.value),
        ("app_fee_share", app.app_fee_share.value),
    ) + extra_factors
    audit = AuditTrail(
        scope=_app_scope(scope, app),
        base_wh=day.energy.wh,
        pool_factors=factors,
        entity_share=entity_share,
        entity_basis=entity_basis,
        weight_source=weights.source,
        filled_forward=day.filled_forward,
    )
    energy = Energy(audit.replay_wh())
    carbon = carbonize(energy, day.emission_factor) if day.emission_factor is not None else None
    return AllocationResult(
        entity_id=entity_id,
        date=day.date,
        method=method,
        activity=activity,
        energy=energy,
        audit=audit,
        carbon=carbon,
    )


def _app_transaction_share(
    day: NetworkDay, app: AppDay, tx: TransactionRecord, kind: Consensus
) -> tuple[str, Fraction]:
    """Entity share of the app's own activity, on the app-scoped basis.

    The app's fee (or gas) total is derived from its declared share of the
    network total, so the same hierarchy as network-level allocation applies
    within the app.
    """
    if app.app_tx_count == 0:
        raise NoTransactions(
            f"{app.app_id} on {app.date}: transaction record exists but the app reports none"
        )
    fee_total = None
    gas_total = None
    if day.tx_fees_total is not None:
        fee_total = day.tx_fees_total.value * app.app_fee_share.value
    if day.gas_total is not None:
        gas_total = day.gas_total * app.app_fee_share.value
    return engine.transaction_basis(tx, kind, fee_total, gas_total, app.app_tx_count)


def allocate_app_transaction(
    day: NetworkDay,
    weights: engine.MethodWeights,
    app: AppDay,
    tx: TransactionRecord,
    params: ConsensusParams,
    scope: tuple[str, ...] = engine.NETWORK_SCOPE,
    method: Method = Method.TRANSACTION_BASED,
) -> AllocationResult:
    """Pure transaction-based allocation of the app pool to one record."""
    if tx.date != day.date:
        raise ValueError(f"transaction dated {tx.date} does not match day {day.date}")
    basis, share = _app_transaction_share(day, app, tx, params.kind)
    return _app_result(
        day, weights, app, tx.entity_id, method, Activity.TRANSACTION, (), share, basis, scope
    )


def allocate_token_holding(
    day: NetworkDay,
    weights: engine.MethodWeights,
    app: AppDay,
    holding: TokenHolding,
    scope: tuple[str, ...] = engine.NETWORK_SCOPE,
    method: Method = Method.HOLDING_BASED,
    holding_weight: Share | None = None,
) -> AllocationResult:
    """Holding-based allocation of the app pool by token share.

    An entity holding 10% of the tokens of an app responsible for 50% of the
    network's fees bears 5% of the network transaction pool.
    """
    if holding.date != day.date:
        raise ValueError(f"token holding dated {holding.date} does not match day {day.date}")
    if app.token_supply is None:
        raise NotAToken(f"{app.app_id} has no token supply; use transaction-based allocation")
    if holding.amount.value > app.token_supply.value:
        raise ShareOverflow(
            f"{holding.entity_id}: token amount {holding.amount.value} exceeds supply "
            f"{app.token_supply.value}"
        )
    share = holding.amount.value / app.token_supply.value
    extra = (("app_holding_weight", holding_weight.value),) if holding_weight is not None else ()
    return _app_result(
        day, weights, app, holding.entity_id, method, Activity.HOLDING, extra, share, "token", scope
    )


def allocate_app_hybrid(
    day: NetworkDay,
    weights: engine.MethodWeights,
    app: AppDay,
    holding: TokenHolding | None,
    txs: list[TransactionRecord] | tuple[TransactionRecord, ...],
    params: ConsensusParams,
    scope: tuple[str, ...] = engine.NETWORK_SCOPE,
) -> tuple[AllocationResult, ...]:
    """Hybrid allocation within an app, reusing the host network's weights.

    The app pool splits by the network's holding/transaction weights: the
    holding slice is allocated by token share, the transaction slice by the
    app-scoped transaction basis. Apps without a token supply fall back to
    the purely transaction-based route over the full pool.
    """
    if app.token_supply is None:
        if holding is not None:
            raise NotAToken(
                f"{app.app_id} has no token supply; token holdings cannot be allocated"
            )
        return tuple(
            allocate_app_transaction(day, weights, app, tx, params, scope) for tx in txs
        )
    results: list[AllocationResult] = []
    if holding is not None:
        results.append(
            allocate_token_holding(
                day,
                weights,
                app,
                holding,
                scope,
                method=Method.HYBRID,
                holding_weight=weights.holding_weight,
            )
        )
    for tx in txs:
        if tx.date != day.date:
            raise ValueError(f"transaction dated {tx.date} does not match day {day.date}")
        basis, share = _app_transaction_share(day, app, tx, params.kind)
        results.append(
            _app_result(
                day,
                weights,
                app,
                tx.entity_id,
                Method.HYBRID,
                Activity.TRANSACTION,
                (("app_transaction_weight", weights.transaction_weight.value),),
                share,
                basis,
                scope,
            )
        )
    results.sort(key=AllocationResult.sort_key)
    return tuple(results)
