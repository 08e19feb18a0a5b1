"""Base-theory engines: DLO, TOrd, LRA and pure equality."""
from .engine import (conj_sat, decide_entails, decide_equivalent,
                     decide_ground_sat, finite_order_oracle, qe, simplify)
from .linear import LinearAtom, LinearForm, NonLinearAtom, linearize
from .theory import BaseTheory, MissingQE, UnsupportedPredicate
from .vsub import vs_qe

__all__ = [
    "BaseTheory", "LinearAtom", "LinearForm", "MissingQE", "NonLinearAtom",
    "UnsupportedPredicate", "conj_sat", "decide_entails", "decide_equivalent",
    "decide_ground_sat", "finite_order_oracle", "linearize", "qe", "simplify",
    "vs_qe",
]
