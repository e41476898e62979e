"""Discover minimal flag gadgets with the backward backtracking search.

Reproduces the distance-4/5 gadget for five targets (two flags, nine CX)
including its optimality certificate: the search proves no single-flag
gadget exists before finding the two-flag one.
"""

from ftprep.gadgets import (
    discover_gadget,
    gadget_ft_test,
    hadamard_conjugate_gadget,
)
from ftprep.serialization import serialize_gadget

# A bare CX fans a single control fault out to its targets: not FT.
print("bare CX(c,t1) passes at t=2, r=5:", gadget_ft_test([(0, 1)], 2, 5, 2))

# One flag is provably not enough for five targets at t=2 ...
res = discover_gadget(t=2, r=5, m=1, budget=None)
print("one-flag search:", res.status, f"({res.nodes} nodes explored)")

# ... and two flags suffice.
res = discover_gadget(t=2, r=5, m=2)
gadget = res.gadget
print(f"two-flag gadget found: {len(gadget.gates)} CX")
print(serialize_gadget(gadget))

# The Z-detecting mirror is the Hadamard conjugate: every CX reverses.
mirror = hadamard_conjugate_gadget(gadget)
print("conjugated gadget detects Z faults:", gadget_ft_test(mirror))
print(serialize_gadget(mirror))

# Flag counts across a sweep of target counts at t = 2.
for r in range(1, 14):
    m = 1
    while True:
        res = discover_gadget(2, r, m)
        if res.found:
            break
        m += 1
    print(f"t=2, {r:2d} targets -> {m} flags")
