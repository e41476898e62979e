"""Persistent library of discovered flag gadgets, keyed by (t, r).

Entries store the smallest known X-detecting gadget for each key together
with an optimality marker: ``optimal`` when the search at one fewer flag
ran to exhaustion, ``possibly suboptimal`` when it only hit its budget.
Z-detecting gadgets are produced on demand by Hadamard conjugation.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

from .gadgets import (
    BUDGET_EXHAUSTED,
    FOUND,
    SEARCH_EXHAUSTED,
    FlagGadget,
    discover_gadget,
    gadget_ft_test,
)


class BudgetExhaustedError(RuntimeError):
    """No gadget found within the node budget at any attempted flag count."""


@dataclass(frozen=True)
class LibraryEntry:
    gadget: FlagGadget
    optimal: bool  # True when m-1 ended in SearchExhausted rather than budget


class GadgetLibrary:
    """Lookup with on-miss discovery at increasing flag counts."""

    def __init__(self, entries: dict[tuple[int, int], LibraryEntry] | None = None) -> None:
        self.entries: dict[tuple[int, int], LibraryEntry] = dict(entries or {})

    def get(
        self,
        t: int,
        r: int,
        budget: int | None = 2_000_000,
        max_flags: int = 16,
    ) -> FlagGadget:
        """Smallest known X-detecting gadget for ``(t, r)``.

        On a miss, runs discovery at m = 1, 2, ... with the given per-m
        budget, stores the first hit, and marks it optimal only when every
        smaller m was fully exhausted.
        """
        key = (t, r)
        if key in self.entries:
            return self.entries[key].gadget
        all_exhausted = True
        for m in range(1, max_flags + 1):
            res = discover_gadget(t, r, m, budget=budget)
            if res.status == FOUND:
                assert res.gadget is not None
                self.entries[key] = LibraryEntry(res.gadget, optimal=all_exhausted)
                return res.gadget
            if res.status == BUDGET_EXHAUSTED:
                all_exhausted = False
        raise BudgetExhaustedError(f"no gadget for t={t}, r={r} within budget up to m={max_flags}")

    def is_optimal(self, t: int, r: int) -> bool | None:
        entry = self.entries.get((t, r))
        return None if entry is None else entry.optimal

    # -- persistence ---------------------------------------------------------

    def save(self, path: str | Path) -> None:
        payload = {
            f"{t},{r}": {
                "t": t,
                "r": r,
                "m": e.gadget.m,
                "gates": [list(g) for g in e.gadget.gates],
                "optimal": e.optimal,
            }
            for (t, r), e in sorted(self.entries.items())
        }
        Path(path).write_text(json.dumps(payload, indent=1))

    @classmethod
    def load(cls, path: str | Path) -> GadgetLibrary:
        payload = json.loads(Path(path).read_text())
        entries = {}
        for spec in payload.values():
            gadget = FlagGadget(
                t=spec["t"],
                r=spec["r"],
                m=spec["m"],
                detect_type="X",
                gates=tuple(tuple(g) for g in spec["gates"]),
            )
            gadget.validate()
            if not gadget_ft_test(gadget):
                raise ValueError(f"library entry t={spec['t']} r={spec['r']} fails its FT test")
            entries[(gadget.t, gadget.r)] = LibraryEntry(gadget, spec["optimal"])
        return cls(entries)

    @classmethod
    def bundled(cls) -> GadgetLibrary:
        """The library shipped with the package."""
        ref = resources.files("ftprep").joinpath("data/gadget_library.json")
        with resources.as_file(ref) as path:
            return cls.load(path)
