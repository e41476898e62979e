"""Estimate acceptance and logical error rates with subset sampling.

Simulates the Steane preparation at p = 1e-3 with an effective sample
count above 1e8 (the fault-free bucket is added back analytically), trains
the maximum-likelihood table on half the samples, and decodes the rest
through the two-layer pipeline.
"""

import numpy as np

from ftprep.catalog import get_state
from ftprep.decoder import build_ml_lut, build_mw_lut, evaluate_test_set
from ftprep.library import GadgetLibrary
from ftprep.noise import (
    NoiseModel,
    build_effect_tables,
    build_subset_plan,
    count_fault_locations,
    run_monte_carlo,
)
from ftprep.pipeline import build_preparation_circuit

state = get_state("steane")
library = GadgetLibrary.bundled()
prep = build_preparation_circuit(state, library, seed=9, use_trivial_gadgets=False)
circ = prep.circuit

p = 1e-3
l_p, l_q = count_fault_locations(circ)
print(f"fault locations: {l_p} gate-rate, {l_q} idle")

p_trivial = (1 - p) ** l_p * (1 - p / 100) ** l_q
samples = int(1.05e8 * (1 - p_trivial))
plan = build_subset_plan(l_p, l_q, p, p / 100, samples)
print(f"subset plan: {len(plan.pairs)} fault-count buckets, "
      f"effective samples {plan.effective_samples:.3g}")

tables = build_effect_tables(circ, state)
result = run_monte_carlo(circ, state, NoiseModel(p), plan, seed=42, tables=tables)
lo, hi = result.acceptance_ci
print(f"acceptance rate {result.acceptance_rate:.5f}  95% CI [{lo:.5f}, {hi:.5f}]")

ml = build_ml_lut(result.train)
mw = build_mw_lut(state, "X", 1)
report = evaluate_test_set(result.test, ml, mw)
print(report)

# Scaling with the physical rate: the logical error follows p^(t+1).
rates = []
ps = [2.5e-3, 5e-3, 1e-2]
for pp in ps:
    pl = build_subset_plan(l_p, l_q, pp, pp / 100, 400_000)
    res = run_monte_carlo(circ, state, NoiseModel(pp), pl, seed=7, tables=tables)
    rep = evaluate_test_set(res.test, build_ml_lut(res.train), mw)
    rates.append(rep.logical_error_rate)
    print(f"p={pp:g}: acceptance {res.acceptance_rate:.4f}, logical {rep.logical_error_rate:.3g}")
slope = np.polyfit(np.log(ps), np.log(rates), 1)[0]
print(f"log-log slope: {slope:.2f} (t+1 = 2 expected)")
