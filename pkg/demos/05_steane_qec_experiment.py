"""Steane-QEC with a fault-tolerantly prepared ancilla, and its ablation.

A noisy logical-plus block is corrected by coupling it to a freshly
prepared logical-zero resource state.  Preparing the resource without its
Z-detecting gadgets (fault-tolerant against X errors only) degrades the
logical error scaling from cubic to quadratic: undetected Z hooks in the
preparation corrupt the syndrome the correction is computed from.
"""

import numpy as np

from ftprep.assemble import assemble_ft_circuit, schedule_circuit
from ftprep.catalog import get_state
from ftprep.library import GadgetLibrary
from ftprep.pipeline import build_preparation_circuit
from ftprep.steane_qec import (
    FT_X_ONLY,
    FULL_FT,
    NO_QEC,
    SteaneQecConfig,
    run_steane_qec_experiment,
)

state = get_state("color17")
library = GadgetLibrary.bundled()

prep = build_preparation_circuit(state, library, seed=9, use_trivial_gadgets=False)
ablated = assemble_ft_circuit(
    state, prep.bipartite, library,
    z_gadget_t_override=0, allow_uncertified_override=True, seed=5,
)
ablated_circ = schedule_circuit(ablated, shuffles=50, seed=3)
print(f"resource prep: {prep.metrics.cx_count} CX full, {ablated_circ.cx_count} CX ablated")

ps = [2.5e-3, 5e-3, 1e-2]
for mode, circ in ((FULL_FT, prep.circuit), (FT_X_ONLY, ablated_circ), (NO_QEC, None)):
    rates = []
    for p in ps:
        cfg = SteaneQecConfig(
            state, p, samples=1_000_000, prep_mode=mode,
            data_noise_multiplier=6.0, seed=77,
        )
        res = run_steane_qec_experiment(cfg, circ)
        rates.append(res.logical_error_rate)
        print(res)
    slope = np.polyfit(np.log(ps), np.log(rates), 1)[0]
    print(f"  {mode}: log-log slope {slope:.2f}")
