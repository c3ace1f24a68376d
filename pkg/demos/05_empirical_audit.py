#!/usr/bin/env python3
"""Empirically auditing an indistinguishability claim.

The auditor samples the released statistic under both protected models,
applies the noise plan, and hunts over a family of events for one where
P(release in S | model_i) > e^epsilon P(release in S | model_j) + delta,
folding in a 3-sigma binomial slack so sampling noise cannot manufacture
a violation. A calibrated plan should report nothing; releasing the raw
statistic between well-separated models should be flagged.
"""

import numpy as np

from distpriv.mechanisms import NoisePlan, audit, calibrate_expm
from distpriv.model import GaussianModel, PairFamily, PrivacyParams, SecretLabel
from distpriv.seeding import derive_rng

params = PrivacyParams(epsilon=0.3, delta=0.001)
trials = 100_000

cov = np.array([[4.0, 1.0], [1.0, 3.0]])
lab_a, lab_b = SecretLabel("share", 0.4), SecretLabel("share", 0.6)
family = PairFamily(
    catalog={
        lab_a: GaussianModel([10.0, 20.0], cov, 500),
        lab_b: GaussianModel([12.0, 19.0], cov, 500),
    },
    pairs=[(lab_a, lab_b), (lab_b, lab_a)],
)

plan = calibrate_expm(family, params, "gaussian")
print(f"Calibrated Gaussian plan: sigma = {plan.sigma:.3f} "
      f"for (epsilon, delta) = ({params.epsilon}, {params.delta})")
report = audit(
    plan, family.catalog[lab_a], family.catalog[lab_b], params,
    trials, derive_rng(1, "audit-calibrated"),
)
print(f"  estimated violation over {report.trials} trials: "
      f"{report.estimated_violation:+.4f}  (<= 0 means clean)")
print()

print("Now releasing the raw statistic (no noise) for the same pair:")
report = audit(
    NoisePlan(kind="none"), family.catalog[lab_a], family.catalog[lab_b], params,
    trials, derive_rng(1, "audit-raw"),
)
print(f"  estimated violation: {report.estimated_violation:+.4f}  (> 0 means flagged)")
print()
print("Event family searched:", report.event_family)
print()
print("A clean audit is evidence, not proof: only the calibration's")
print("mathematical guarantee covers every event; the auditor covers the")
print("ones it tested.")
