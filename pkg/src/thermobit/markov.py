"""Discrete-time Markov chains and the Second-Law audit.

The audit machinery exists to falsify demon proposals: if the dynamics
are Markovian and a stationary distribution exists, relative entropy to
that stationary distribution cannot increase, detailed balance or not.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import DomainError, NoStationaryError, ShapeError
from .info import LOG2, Distribution, relative_entropy

_ROW_TOLERANCE = 1e-9
_ROW_RENORM_SKIP = 1e-12
_CONVERGENCE_TOL = 1e-13
_MAX_ITERATIONS = 10**6
_VERIFY_TOL = 1e-10
_MULTIPLICITY_TOL = 1e-8
_PROBE_STARTS = 8
_PROBE_SEED = 0xC0FFEE
_MONOTONE_TOL = 1e-10


class StationaryMultiplicityWarning(UserWarning):
    """Perturbed starting points converged to different stationary points."""


@dataclass(frozen=True, eq=False)
class Channel:
    """A row-stochastic matrix: row i is the next-state distribution from i."""

    matrix: np.ndarray
    labels: tuple[str, ...] | None = None

    def __post_init__(self):
        arr = np.array(self.matrix, dtype=float)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1] or arr.shape[0] == 0:
            raise ShapeError(f"channel matrix must be square, got shape {arr.shape}")
        if not np.all(np.isfinite(arr)):
            raise DomainError("channel entries must be finite")
        if np.any(arr < 0.0):
            raise DomainError("channel entries must be non-negative")
        sums = arr.sum(axis=1)
        bad = np.abs(sums - 1.0) > _ROW_TOLERANCE
        if np.any(bad):
            i = int(np.argmax(bad))
            raise DomainError(
                f"channel row {i} must sum to 1 within {_ROW_TOLERANCE:g}, "
                f"got {float(sums[i])!r}"
            )
        fix = np.abs(sums - 1.0) > _ROW_RENORM_SKIP
        if np.any(fix):
            arr = arr.copy()
            arr[fix] = arr[fix] / sums[fix, None]
        arr.setflags(write=False)
        object.__setattr__(self, "matrix", arr)
        if self.labels is not None:
            labels = tuple(self.labels)
            if len(labels) != arr.shape[0]:
                raise ShapeError(f"{len(labels)} labels for {arr.shape[0]} states")
            object.__setattr__(self, "labels", labels)

    def __len__(self) -> int:
        return int(self.matrix.shape[0])

    def __eq__(self, other) -> bool:
        if not isinstance(other, Channel):
            return NotImplemented
        return np.array_equal(self.matrix, other.matrix) and self.labels == other.labels

    def __repr__(self) -> str:
        return f"Channel({self.matrix.tolist()!r})"


@dataclass(frozen=True)
class Trajectory:
    """Distributions p_0..p_T under repeated channel application, with
    D(p_t‖reference) recorded at every step."""

    distributions: tuple[Distribution, ...]
    d_nats: tuple[float, ...]
    reference: Distribution

    def __len__(self) -> int:
        return len(self.distributions)

    def to_csv(self) -> str:
        """Columns: step, p_1..p_n, D_nats, D_bits."""
        n = len(self.distributions[0])
        lines = ["step," + ",".join(f"p_{i + 1}" for i in range(n)) + ",D_nats,D_bits"]
        for t, (dist, d) in enumerate(zip(self.distributions, self.d_nats)):
            probs = ",".join(repr(float(x)) for x in dist.probs)
            lines.append(f"{t},{probs},{d!r},{d / LOG2!r}")
        return "\n".join(lines) + "\n"


class DetailedBalanceCheck(NamedTuple):
    holds: bool
    max_residual: float


@dataclass(frozen=True)
class AuditVerdict:
    """Outcome of a Second-Law audit run."""

    stationary_found: bool
    stationary: Distribution | None
    detailed_balance: bool
    monotone: bool
    max_violation: float
    steps_checked: int

    def to_json_dict(self) -> dict:
        return {
            "stationary_found": self.stationary_found,
            "stationary": None if self.stationary is None else self.stationary.probs.tolist(),
            "detailed_balance": self.detailed_balance,
            "monotone": self.monotone,
            "max_violation": self.max_violation,
            "steps_checked": self.steps_checked,
        }


@dataclass(frozen=True)
class DataProcessingResult:
    before: float
    after: float
    ok: bool


def apply_channel(p: Distribution, channel: Channel) -> Distribution:
    """One chain step: (pK)_j = sum_i p_i K_ij."""
    if len(p) != len(channel):
        raise ShapeError(
            f"distribution of length {len(p)} against {len(channel)}-state channel"
        )
    return Distribution(p.probs @ channel.matrix, labels=channel.labels)


def stationary_distribution(
    channel: Channel,
    *,
    max_iterations: int = _MAX_ITERATIONS,
    check_multiplicity: bool = True,
) -> Distribution:
    """Find pi with pi K = pi by power iteration on the lazy chain (I + K)/2.

    The lazy chain removes periodicity without changing the stationary set,
    so iteration from the uniform start always settles. The result is
    verified against the original channel at 1e-10 in max norm; failure
    raises NoStationaryError. Eight perturbed starts are also iterated
    (as extra rows of the same matrix product, so nearly free) and a
    StationaryMultiplicityWarning fires if they disagree beyond 1e-8 --
    monotonicity holds against any stationary distribution, so the audit
    proceeds with the uniform-start limit.
    """
    n = len(channel)
    lazy = 0.5 * (np.eye(n) + channel.matrix)
    rows = 1 + (_PROBE_STARTS if check_multiplicity else 0)
    starts = np.full((rows, n), 1.0 / n)
    if check_multiplicity:
        rng = np.random.default_rng(_PROBE_SEED)
        perturbed = rng.random((_PROBE_STARTS, n)) + 0.05
        starts[1:] = perturbed / perturbed.sum(axis=1, keepdims=True)
    current = starts
    for _ in range(max_iterations):
        nxt = current @ lazy
        if float(np.max(np.abs(nxt - current))) < _CONVERGENCE_TOL:
            current = nxt
            break
        current = nxt
    pi = current[0] / current[0].sum()
    residual = float(np.max(np.abs(pi @ channel.matrix - pi)))
    if residual >= _VERIFY_TOL:
        raise NoStationaryError(
            f"power iteration did not verify a stationary distribution "
            f"(residual {residual:.3e} >= {_VERIFY_TOL:g})"
        )
    if check_multiplicity and rows > 1:
        others = current[1:] / current[1:].sum(axis=1, keepdims=True)
        spread = float(np.max(np.abs(others - pi)))
        if spread > _MULTIPLICITY_TOL:
            warnings.warn(
                f"chain has multiple stationary distributions (perturbed "
                f"starts disagree by {spread:.3e}); auditing against the "
                f"uniform-start limit",
                StationaryMultiplicityWarning,
                stacklevel=2,
            )
    return Distribution(pi, labels=channel.labels)


def check_detailed_balance(channel: Channel, pi: Distribution) -> DetailedBalanceCheck:
    """True iff pi_i K_ij = pi_j K_ji for all pairs, within 1e-10."""
    if len(pi) != len(channel):
        raise ShapeError(
            f"distribution of length {len(pi)} against {len(channel)}-state channel"
        )
    flux = pi.probs[:, None] * channel.matrix
    residual = float(np.max(np.abs(flux - flux.T)))
    return DetailedBalanceCheck(holds=residual < _VERIFY_TOL, max_residual=residual)


def evolve(
    p0: Distribution,
    channel: Channel,
    steps: int,
    pi_ref: Distribution | str = "auto",
) -> Trajectory:
    """Run the chain for `steps` steps, recording D(p_t‖pi_ref) along the way.

    pi_ref="auto" resolves the reference via stationary_distribution,
    propagating its no-stationary error.
    """
    if steps < 0:
        raise DomainError(f"steps must be non-negative, got {steps}")
    if isinstance(pi_ref, str):
        if pi_ref != "auto":
            raise DomainError(f"pi_ref must be a Distribution or 'auto', got {pi_ref!r}")
        reference = stationary_distribution(channel)
    else:
        reference = pi_ref
    if len(reference) != len(channel):
        raise ShapeError("reference distribution does not match channel size")
    dists = [p0]
    d_values = [relative_entropy(p0, reference).nats]
    current = p0
    for _ in range(steps):
        current = apply_channel(current, channel)
        dists.append(current)
        d_values.append(relative_entropy(current, reference).nats)
    return Trajectory(tuple(dists), tuple(d_values), reference)


def _max_positive_jump(d_values: tuple[float, ...]) -> float:
    d = np.asarray(d_values)
    jumps = d[1:] - d[:-1]
    jumps[np.isnan(jumps)] = 0.0  # inf to inf: no change
    if jumps.size == 0:
        return 0.0
    return max(0.0, float(np.max(jumps)))


def second_law_audit(
    p0: Distribution,
    channel: Channel,
    steps: int,
    reference: Distribution | None = None,
) -> AuditVerdict:
    """Audit D(p_t‖pi) for non-increase over `steps` chain steps.

    With reference=None the found stationary distribution is used; an
    explicit reference lets callers demonstrate that monotonicity can fail
    against non-stationary references. A failed stationary search is
    reported in the verdict rather than raised.
    """
    if steps < 1:
        raise DomainError(f"audit needs at least one step, got {steps}")
    try:
        pi = stationary_distribution(channel)
    except NoStationaryError:
        return AuditVerdict(
            stationary_found=False,
            stationary=None,
            detailed_balance=False,
            monotone=False,
            max_violation=math.inf,
            steps_checked=0,
        )
    balance = check_detailed_balance(channel, pi)
    trajectory = evolve(p0, channel, steps, pi if reference is None else reference)
    max_violation = _max_positive_jump(trajectory.d_nats)
    return AuditVerdict(
        stationary_found=True,
        stationary=pi,
        detailed_balance=balance.holds,
        monotone=max_violation <= _MONOTONE_TOL,
        max_violation=max_violation,
        steps_checked=steps,
    )


def data_processing_check(
    p: Distribution, q: Distribution, channel: Channel
) -> DataProcessingResult:
    """Check D(pK‖qK) <= D(p‖q), the inequality behind the Second-Law audit."""
    before = relative_entropy(p, q).nats
    after = relative_entropy(
        apply_channel(p, channel), apply_channel(q, channel)
    ).nats
    return DataProcessingResult(before=before, after=after, ok=after <= before + 1e-12)
