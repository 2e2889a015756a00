"""Shared result type for the fuzzy and probabilistic fidelity measures."""
from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class FidelityRow:
    """One contribution to a fidelity value.

    For the probabilistic measure ``item`` is a state and ``value`` its
    limiting mass; for the fuzzy measure ``item`` is a valuation and ``value``
    its aggregated satisfaction.  ``ok`` says whether the item fully satisfies
    the knowledge base.
    """

    item: tuple
    value: float
    ok: bool
    detail: tuple[float, ...] = ()


@dataclass(frozen=True)
class FidelityReport:
    measure: str
    value: float
    rows: tuple[FidelityRow, ...] = ()
    notes: tuple[str, ...] = ()

    @property
    def is_neural_model(self) -> bool:
        return abs(self.value - 1.0) <= 1e-9

    def __float__(self) -> float:
        return float(self.value)
