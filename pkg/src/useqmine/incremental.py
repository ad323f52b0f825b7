"""Incremental maintenance of the weighted frequent set as a database grows.

Two strategies share one state object:

* ``uwsinc_step``: rescan nothing; add each increment's contributions to the
  tracked patterns, refresh the thresholds, and drop what fell under the
  buffered threshold. Dropped patterns are gone for good.
* ``uwsincplus_step``: additionally mine the increment itself for locally
  frequent patterns and keep a second buffer of "promising" patterns that sit
  between the local threshold and the buffered global one, so patterns that
  surge later can still be picked up.

Patterns that enter through the local route carry only their support since
entry; their earlier occurrences are never rescanned, so reported values
never overshoot the truth.
"""

from __future__ import annotations

from dataclasses import dataclass

from .fuws import mine_trie
from .model import (
    MiningError,
    MiningParams,
    ScoredPattern,
    Thresholds,
    UncertainDatabase,
    WeightTable,
    meets,
)
from .trie import USeqTrie, sup_calc


@dataclass
class WamAccumulator:
    """Running numerator/denominator of the frequency-weighted mean weight."""

    weighted_freq_sum: float = 0.0
    freq_sum: int = 0

    @property
    def wam(self) -> float:
        return self.weighted_freq_sum / self.freq_sum if self.freq_sum else 0.0

    def add(self, db: UncertainDatabase, weights: WeightTable) -> None:
        for item, freq in db.item_frequencies().items():
            self.weighted_freq_sum += freq * weights.weight(item)
            self.freq_sum += freq


def update_wam(acc: WamAccumulator, delta: UncertainDatabase, weights: WeightTable) -> float:
    """Fold an increment's item frequencies into the accumulator; new mean."""
    acc.add(delta, weights)
    return acc.wam


@dataclass
class IncrementalState:
    seq_trie: USeqTrie  # frequent + semi-frequent, tracked exactly
    pfs_trie: USeqTrie  # promising buffer (uwsincplus only)
    db_size: int
    wam_acc: WamAccumulator
    params: MiningParams
    weights: WeightTable

    def thresholds(self) -> Thresholds:
        return Thresholds.compute(
            self.params.min_sup, self.db_size, self.wam_acc.wam, self.params.wgt_fct, self.params.mu
        )


def init_mining(
    db: UncertainDatabase, weights: WeightTable, params: MiningParams
) -> IncrementalState:
    """Mine the initial database at the buffered threshold and seed the state."""
    if db.size == 0:
        raise MiningError("initial database is empty")
    seq_trie, _ = mine_trie(db, weights, params.min_sup * params.mu, params.wgt_fct)
    acc = WamAccumulator()
    acc.add(db, weights)
    return IncrementalState(
        seq_trie=seq_trie,
        pfs_trie=USeqTrie(),
        db_size=db.size,
        wam_acc=acc,
        params=params,
        weights=weights,
    )


def uwsinc_step(state: IncrementalState, delta: UncertainDatabase) -> list[ScoredPattern]:
    """Fold one increment into the tracked set; returns the frequent patterns."""
    sup_calc(state.seq_trie, delta, state.weights)
    state.db_size += delta.size
    update_wam(state.wam_acc, delta, state.weights)
    th = state.thresholds()
    state.seq_trie.prune_below(th.min_wes_prime)
    return state.seq_trie.collect(th.min_wes)


def local_threshold(state: IncrementalState, delta: UncertainDatabase) -> float:
    """Support threshold applied inside a single increment."""
    p = state.params
    delta_acc = WamAccumulator()
    delta_acc.add(delta, state.weights)
    return p.lwes_factor * p.min_sup * p.mu * delta.size * delta_acc.wam * p.wgt_fct


def uwsincplus_step(state: IncrementalState, delta: UncertainDatabase) -> list[ScoredPattern]:
    """Fold one increment, keeping the promising buffer; returns the frequent set."""
    p = state.params
    lwes = local_threshold(state, delta)
    lfs_trie, _ = mine_trie(
        delta, state.weights, p.lwes_factor * p.min_sup * p.mu, p.wgt_fct
    )
    sup_calc(state.seq_trie, delta, state.weights)
    sup_calc(state.pfs_trie, delta, state.weights)
    state.db_size += delta.size
    update_wam(state.wam_acc, delta, state.weights)
    th = state.thresholds()

    # Demote or drop tracked patterns that fell under the buffered threshold.
    for pat, wes in list(state.seq_trie.patterns()):
        if not meets(wes, th.min_wes_prime):
            state.seq_trie.remove(pat)
            if meets(wes, lwes):
                state.pfs_trie.insert(pat, wes)
    # Promote or expire promising patterns.
    for pat, wes in list(state.pfs_trie.patterns()):
        if meets(wes, th.min_wes_prime):
            state.pfs_trie.remove(pat)
            state.seq_trie.insert(pat, wes)
        elif not meets(wes, lwes):
            state.pfs_trie.remove(pat)
    # Route locally frequent newcomers; existing patterns already got the
    # increment via the scans above and keep their longer history.
    for pat, wes in lfs_trie.patterns():
        if pat in state.seq_trie or pat in state.pfs_trie:
            continue
        if meets(wes, th.min_wes_prime):
            state.seq_trie.insert(pat, wes)
        elif meets(wes, lwes):
            state.pfs_trie.insert(pat, wes)

    return state.seq_trie.collect(th.min_wes)


# -- checkpointing ---------------------------------------------------------
# Text form: a header line "db_size wam_num wam_den min_sup wgt_fct mu
# lwes_factor", then the two trie snapshots introduced by "[seq-trie]" and
# "[pfs-trie]" section lines.

CHECKPOINT_SEQ = "[seq-trie]"
CHECKPOINT_PFS = "[pfs-trie]"


def save_state(state: IncrementalState, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        p = state.params
        fh.write(
            f"{state.db_size} {state.wam_acc.weighted_freq_sum!r} {state.wam_acc.freq_sum} "
            f"{p.min_sup!r} {p.wgt_fct!r} {p.mu!r} {p.lwes_factor!r}\n"
        )
        fh.write(CHECKPOINT_SEQ + "\n")
        fh.write(state.seq_trie.snapshot())
        fh.write(CHECKPOINT_PFS + "\n")
        fh.write(state.pfs_trie.snapshot())


def load_state(path: str, weights: WeightTable) -> IncrementalState:
    with open(path, encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    if not lines:
        raise MiningError(f"empty checkpoint {path}")
    head = lines[0].split()
    if len(head) != 7:
        raise MiningError(f"checkpoint header needs 7 fields, got {len(head)}")
    try:
        db_size = int(head[0])
        wam_num = float(head[1])
        wam_den = int(head[2])
        params = MiningParams(
            min_sup=float(head[3]),
            wgt_fct=float(head[4]),
            mu=float(head[5]),
            lwes_factor=float(head[6]),
        )
    except ValueError as exc:
        raise MiningError(f"bad checkpoint header: {exc}") from None
    try:
        seq_at = lines.index(CHECKPOINT_SEQ)
        pfs_at = lines.index(CHECKPOINT_PFS)
    except ValueError:
        raise MiningError("checkpoint missing trie sections") from None
    seq_trie = USeqTrie.from_snapshot("\n".join(lines[seq_at + 1 : pfs_at]))
    pfs_trie = USeqTrie.from_snapshot("\n".join(lines[pfs_at + 1 :]))
    return IncrementalState(
        seq_trie=seq_trie,
        pfs_trie=pfs_trie,
        db_size=db_size,
        wam_acc=WamAccumulator(weighted_freq_sum=wam_num, freq_sum=wam_den),
        params=params,
        weights=weights,
    )
