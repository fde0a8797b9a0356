"""Cellular automata over groups: injectivity certificates, inverse synthesis,
Garden-of-Eden witnesses and group-ring stable finiteness at desk scale."""

__version__ = "0.1.0"

from .alphabets import Alphabet, LocalRule, eval_rule, linear_rule, shift_rule, table_rule, validate_hom_rule
from .ca import CellularAutomaton, Pattern, WindowMap, classify, compose, periodic_action, restrict_to_subgroup, window_map
from .groups import FreeAbelianGroup, FreeGroup, FiniteGroup, ball, cyclic, dihedral, product_set, symmetric

__all__ = [
    "Alphabet",
    "CellularAutomaton",
    "FiniteGroup",
    "FreeAbelianGroup",
    "FreeGroup",
    "LocalRule",
    "Pattern",
    "WindowMap",
    "__version__",
    "ball",
    "classify",
    "compose",
    "cyclic",
    "dihedral",
    "eval_rule",
    "linear_rule",
    "periodic_action",
    "product_set",
    "restrict_to_subgroup",
    "shift_rule",
    "symmetric",
    "table_rule",
    "validate_hom_rule",
    "window_map",
]
