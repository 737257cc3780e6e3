"""Seeded randomized sweeps over the package's headline properties.

Each sweep derives one RNG per instance from (seed, instance index), so
results are reproducible and independent of execution order. These back
the `sweep` CLI command and the acceptance suite.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .info import Distribution
from .markov import Channel, data_processing_check, second_law_audit
from .thermo import EnergyLandscape, check_szilard_landauer

DEFAULT_SEED = 0xC0FFEE

IDENTITY_TOLERANCE = 1e-12  # residual per unit of scale = max(1, |F(p)|)
DPI_SLACK = 1e-12
MONOTONE_SLACK = 1e-12


def _instance_rng(seed: int, index: int) -> np.random.Generator:
    return np.random.default_rng([seed, index])


@dataclass(frozen=True)
class IdentitySweepResult:
    """Szilard-Landauer identity, the log-partition proof step, and Gibbs
    optimality, all checked on the same random instances."""

    instances: int
    identity_failures: int
    identity_worst: float  # worst residual / scale
    proof_failures: int
    proof_worst: float
    optimality_failures: int
    min_available: float

    @property
    def all_passed(self) -> bool:
        return (
            self.identity_failures == 0
            and self.proof_failures == 0
            and self.optimality_failures == 0
        )

    def to_json_dict(self) -> dict:
        return {
            "sweep": "identity",
            "instances": self.instances,
            "identity_failures": self.identity_failures,
            "identity_worst": self.identity_worst,
            "proof_failures": self.proof_failures,
            "proof_worst": self.proof_worst,
            "optimality_failures": self.optimality_failures,
            "min_available": self.min_available,
        }


@dataclass(frozen=True)
class DpiSweepResult:
    instances: int
    failures: int
    worst_excess: float  # max of after - before

    @property
    def all_passed(self) -> bool:
        return self.failures == 0

    def to_json_dict(self) -> dict:
        return {
            "sweep": "data_processing",
            "instances": self.instances,
            "failures": self.failures,
            "worst_excess": self.worst_excess,
        }


@dataclass(frozen=True)
class MonotonicitySweepResult:
    instances: int
    failures: int
    worst_violation: float
    non_detailed_balance: int  # how many audited chains lacked detailed balance

    @property
    def all_passed(self) -> bool:
        return self.failures == 0

    def to_json_dict(self) -> dict:
        return {
            "sweep": "second_law",
            "instances": self.instances,
            "failures": self.failures,
            "worst_violation": self.worst_violation,
            "non_detailed_balance": self.non_detailed_balance,
        }


def random_landscape_instance(
    rng: np.random.Generator, max_states: int, kb_choices: tuple[float, ...] = (1.0,)
) -> tuple[EnergyLandscape, Distribution]:
    n = int(rng.integers(2, max_states + 1))
    landscape = EnergyLandscape(
        rng.uniform(-10.0, 10.0, n),
        temperature=float(rng.uniform(0.1, 10.0)),
        boltzmann=float(kb_choices[int(rng.integers(len(kb_choices)))]),
    )
    return landscape, Distribution(rng.dirichlet(np.ones(n)))


def random_channel(rng: np.random.Generator, n: int, *, cycle_bias: bool = False) -> Channel:
    """A strictly positive random channel; with cycle_bias, a noisy rotation
    that strongly violates detailed balance while keeping entries positive."""
    dense = rng.dirichlet(np.ones(n), size=n)
    if cycle_bias:
        rotation = np.roll(np.eye(n), 1, axis=1)
        return Channel(0.9 * rotation + 0.1 * dense)
    return Channel(dense)


def identity_sweep(
    instances: int,
    max_states: int = 64,
    seed: int = DEFAULT_SEED,
    kb_choices: tuple[float, ...] = (1.0,),
    tolerance: float = IDENTITY_TOLERANCE,
) -> IdentitySweepResult:
    identity_failures = proof_failures = optimality_failures = 0
    identity_worst = proof_worst = 0.0
    min_available = np.inf
    for i in range(instances):
        rng = _instance_rng(seed, i)
        landscape, p = random_landscape_instance(rng, max_states, kb_choices)
        report = check_szilard_landauer(landscape, p)
        identity_rel = report.residual / report.scale
        proof_rel = (
            abs(report.free_energy_gibbs + landscape.kT * report.log_partition)
            / report.scale
        )
        identity_worst = max(identity_worst, identity_rel)
        proof_worst = max(proof_worst, proof_rel)
        min_available = min(min_available, report.available)
        if identity_rel > tolerance:
            identity_failures += 1
        if proof_rel > tolerance:
            proof_failures += 1
        if report.available < 0.0:
            optimality_failures += 1
    return IdentitySweepResult(
        instances=instances,
        identity_failures=identity_failures,
        identity_worst=identity_worst,
        proof_failures=proof_failures,
        proof_worst=proof_worst,
        optimality_failures=optimality_failures,
        min_available=float(min_available),
    )


def dpi_sweep(
    instances: int,
    max_states: int = 8,
    seed: int = DEFAULT_SEED,
    slack: float = DPI_SLACK,
) -> DpiSweepResult:
    failures = 0
    worst = -np.inf
    for i in range(instances):
        rng = _instance_rng(seed, i)
        n = int(rng.integers(2, max_states + 1))
        p = Distribution(rng.dirichlet(np.ones(n)))
        q = Distribution(rng.dirichlet(np.ones(n)))
        channel = random_channel(rng, n)
        result = data_processing_check(p, q, channel)
        excess = result.after - result.before
        worst = max(worst, excess)
        if excess > slack:
            failures += 1
    return DpiSweepResult(instances=instances, failures=failures, worst_excess=float(worst))


def monotonicity_sweep(
    instances: int,
    max_states: int = 32,
    steps: int = 100,
    seed: int = DEFAULT_SEED,
    slack: float = MONOTONE_SLACK,
    inject_violation: bool = False,
) -> MonotonicitySweepResult:
    """Audit random chains, one fifth of them noisy rotations (strongly
    non-reversible), for Second-Law monotonicity.

    inject_violation is a test hook: instance 0 is audited against a
    deliberately non-stationary reference, which must be caught.
    """
    failures = 0
    worst = 0.0
    non_db = 0
    for i in range(instances):
        rng = _instance_rng(seed, i)
        n = int(rng.integers(2, max_states + 1))
        channel = random_channel(rng, n, cycle_bias=(i % 5 == 4))
        p0 = Distribution(rng.dirichlet(np.ones(n)))
        reference = None
        if inject_violation and i == 0:
            skew = np.linspace(1.0, 2.0, n)
            reference = Distribution(skew / skew.sum())
            p0 = reference
        verdict = second_law_audit(p0, channel, steps, reference=reference)
        if not verdict.detailed_balance:
            non_db += 1
        if not verdict.stationary_found:
            failures += 1
            worst = np.inf
            continue
        worst = max(worst, verdict.max_violation)
        if verdict.max_violation > slack:
            failures += 1
    return MonotonicitySweepResult(
        instances=instances,
        failures=failures,
        worst_violation=float(worst),
        non_detailed_balance=non_db,
    )
