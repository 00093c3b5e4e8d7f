"""Volume-correlation subspace detector.

Two regimes are implemented:

* ``noiseless_breakpoint`` -- accumulate noiseless samples and watch the
  volume of the parallelotope spanned by the samples together with the known
  target basis. The first sample count at which that volume vanishes is the
  breakpoint (d1 + 1); whether the samples alone still span a full-volume
  parallelotope there decides the hypothesis.

* the streaming detector (``detector_init`` / ``ingest`` / ``run_stream``)
  -- maintain the running sample covariance, estimate the signal rank from
  its spectrum, and track the test statistic

      T_i = Vol([Q_hat_i, Q_s])

  where Q_hat_i spans the top eigenvectors. 1/T diverges when the target is
  present and levels off at a finite value otherwise.

The statistic is computed in the log domain; 1/T is capped at 1e308.
"""

from __future__ import annotations

import csv
import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .geometry import (
    SubspaceBasis,
    incremental_volume_factor,
    projector_complement_apply,
    stacked_log_volume,
    symmetric_eig,
    volume,
)
from .scenario import Sample

__all__ = [
    "Outcome",
    "Decision",
    "DetectorConfig",
    "DetectorState",
    "detector_init",
    "ingest",
    "estimate_rank",
    "decide",
    "run_stream",
    "noiseless_breakpoint",
    "write_trajectory_csv",
]

INV_T_CAP = 1e308


class Outcome(enum.Enum):
    TARGET_PRESENT = "target_present"
    TARGET_ABSENT = "target_absent"
    UNDECIDED = "undecided"


@dataclass(frozen=True)
class Decision:
    variant: Outcome
    decided_at: int | None = None

    def __post_init__(self):
        if (self.variant is Outcome.UNDECIDED) != (self.decided_at is None):
            raise ValueError("decided_at must be set exactly when a decision was made")


@dataclass(frozen=True)
class DetectorConfig:
    target_basis: SubspaceBasis
    noise_variance_hint: float | None = None
    rank_gap_factor: float = 2.0
    divergence_threshold: float = 1e6
    stall_epsilon: float = 1e-3
    stall_patience: int = 5
    max_samples: int = 512
    zero_volume_tol: float = 1e-8

    def __post_init__(self):
        if self.divergence_threshold <= 1.0:
            raise ValueError("divergence_threshold must exceed 1")
        if self.stall_epsilon <= 0 or self.zero_volume_tol <= 0:
            raise ValueError("stall_epsilon and zero_volume_tol must be positive")
        if self.stall_patience < 1 or self.max_samples < 1:
            raise ValueError("stall_patience and max_samples must be >= 1")
        if self.rank_gap_factor <= 0:
            raise ValueError("rank_gap_factor must be positive")
        if self.noise_variance_hint is not None and self.noise_variance_hint < 0:
            raise ValueError("noise_variance_hint must be non-negative")


@dataclass
class DetectorState:
    config: DetectorConfig
    sample_count: int
    covariance: np.ndarray
    estimated_rank: int
    signal_basis: SubspaceBasis
    trajectory: list[tuple[int, float, float, int]]
    decision: Decision
    _stall_streak: int = 0
    # Raw samples as columns, kept while sample_count < n so the spectrum can
    # be obtained from an n x i SVD instead of an n x n eigendecomposition.
    _sample_block: list[np.ndarray] = field(default_factory=list)


def detector_init(cfg: DetectorConfig) -> DetectorState:
    """Fresh state: zero covariance, empty trajectory, undecided."""
    n = cfg.target_basis.ambient_dim
    return DetectorState(
        config=cfg,
        sample_count=0,
        covariance=np.zeros((n, n)),
        estimated_rank=0,
        signal_basis=SubspaceBasis(np.empty((n, 0))),
        trajectory=[],
        decision=Decision(Outcome.UNDECIDED),
    )


def estimate_rank(eigenvalues, cfg: DetectorConfig, sample_count: int) -> int:
    """Number of above-noise eigenvalues.

    With a noise-variance hint: values exceeding ``rank_gap_factor * sigma^2``
    count (with a relative floor so exact zeros never count when sigma = 0).
    Without a hint: the split maximizing the gap ratio between consecutive
    eigenvalues. Capped at min(sample_count, n - 1).
    """
    lam = np.asarray(eigenvalues, dtype=float)
    if lam.size == 0:
        raise ValueError("eigenvalue list must be non-empty")
    n = lam.size
    cap = min(sample_count, n - 1)
    floor = 1e-10 * max(lam[0], 0.0)
    if cfg.noise_variance_hint is not None:
        threshold = max(cfg.rank_gap_factor * cfg.noise_variance_hint, floor)
        k = int(np.sum(lam > threshold))
    else:
        upper = min(sample_count - 1, n - 1)
        k = 0
        best = 0.0
        for j in range(1, upper + 1):
            if lam[j - 1] <= floor:
                break
            ratio = lam[j - 1] / max(lam[j], floor if floor > 0 else 1e-300)
            if ratio > best:
                best = ratio
                k = j
    return max(0, min(k, cap))


def _spectrum(state: DetectorState) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues (descending, length n) and eigenvectors of the covariance."""
    n = state.covariance.shape[0]
    i = state.sample_count
    if i < n and state._sample_block:
        Y = np.column_stack(state._sample_block) / math.sqrt(i)
        U, s, _ = np.linalg.svd(Y, full_matrices=False)
        lam = np.zeros(n)
        lam[: s.size] = s**2
        return lam, U
    pairs = symmetric_eig(state.covariance)
    return pairs.values, pairs.vectors


def ingest(state: DetectorState, y: Sample | np.ndarray) -> DetectorState:
    """Fold one sample into the state: covariance, rank, statistic, decision."""
    if state.decision.variant is not Outcome.UNDECIDED:
        raise RuntimeError("cannot ingest after a decision was reached")
    vec = y.vector if isinstance(y, Sample) else np.asarray(y, dtype=float)
    n = state.covariance.shape[0]
    if vec.shape != (n,):
        raise ValueError(f"sample length {vec.shape} does not match ambient dim {n}")

    i = state.sample_count + 1
    state.covariance *= (i - 1) / i
    state.covariance += np.outer(vec, vec) / i
    state.sample_count = i
    if i <= n:
        state._sample_block.append(vec)
    elif state._sample_block:
        state._sample_block.clear()

    lam, vecs = _spectrum(state)
    k = estimate_rank(lam, state.config, i)
    state.estimated_rank = k
    state.signal_basis = SubspaceBasis(vecs[:, :k])

    if k == 0:
        log_t = 0.0
    else:
        log_t = stacked_log_volume(state.signal_basis, state.config.target_basis)
    t = math.exp(log_t) if log_t > -700 else 0.0
    inv_t = min(math.exp(-log_t), INV_T_CAP) if log_t > -710 else INV_T_CAP
    state.trajectory.append((i, t, inv_t, k))
    state.decision = decide(state)
    return state


def decide(state: DetectorState) -> Decision:
    """Threshold test on 1/T, then stall test, then budget check."""
    if not state.trajectory:
        raise ValueError("decide requires a non-empty trajectory")
    cfg = state.config
    i, _, inv_t, _ = state.trajectory[-1]
    if inv_t > cfg.divergence_threshold:
        return Decision(Outcome.TARGET_PRESENT, decided_at=i)
    if len(state.trajectory) >= 2:
        prev_inv_t = state.trajectory[-2][2]
        if abs(inv_t - prev_inv_t) < cfg.stall_epsilon * inv_t:
            state._stall_streak += 1
        else:
            state._stall_streak = 0
        if state._stall_streak >= cfg.stall_patience:
            return Decision(Outcome.TARGET_ABSENT, decided_at=i)
    return Decision(Outcome.UNDECIDED)


def run_stream(cfg: DetectorConfig, samples) -> tuple[Decision, list]:
    """Ingest samples until a decision is reached or the budget runs out."""
    state = detector_init(cfg)
    for y in samples:
        ingest(state, y)
        if state.decision.variant is not Outcome.UNDECIDED:
            break
        if state.sample_count >= cfg.max_samples:
            break
    return state.decision, state.trajectory


def noiseless_breakpoint(
    target_basis: SubspaceBasis,
    samples,
    tol: float = 1e-8,
) -> tuple[int | None, bool | None]:
    """Breakpoint search for the noiseless regime.

    Tracks Vol([Q_y, Q_s]) through the one-column-at-a-time residual
    recursion. Returns ``(m, target_present)`` where m is the first sample
    count at which the stacked volume drops to ``tol`` or below, and the
    hypothesis is decided by whether the samples alone still have positive
    volume there. ``(None, None)`` if the stream ends first.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    n = target_basis.ambient_dim
    sample_dirs = SubspaceBasis(np.empty((n, 0)))
    stacked_vol = 1.0
    raw: list[np.ndarray] = []
    for m, y in enumerate(samples, start=1):
        vec = y.vector if isinstance(y, Sample) else np.asarray(y, dtype=float)
        raw.append(vec)
        r = projector_complement_apply(sample_dirs, vec)
        if np.linalg.norm(r) <= tol * max(np.linalg.norm(vec), 1e-300):
            # Sample adds no new direction: column count exceeds the span
            # dimension, so the stacked volume at dimension m + d2 is zero.
            stacked_vol = 0.0
        else:
            q = r / np.linalg.norm(r)
            stacked_vol *= incremental_volume_factor(
                target_basis.basis, sample_dirs.basis, q
            )
            sample_dirs = SubspaceBasis(np.column_stack([sample_dirs.basis, q]))
        if stacked_vol <= tol:
            sample_vol = volume(np.column_stack(raw), m)
            return m, bool(sample_vol > tol)
    return None, None


def write_trajectory_csv(trajectory, decision: Decision, path) -> None:
    """Write one row per ingested sample: ``i,T,inv_T,k_i,decision``.

    The decision column stays empty until the deciding row. Floats use
    repr (shortest round-trip decimal), so output is byte-stable.
    """
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["i", "T", "inv_T", "k_i", "decision"])
        for i, t, inv_t, k in trajectory:
            label = ""
            if decision.decided_at is not None and i == decision.decided_at:
                label = decision.variant.value
            writer.writerow([i, repr(t), repr(inv_t), k, label])
