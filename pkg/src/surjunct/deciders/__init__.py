"""Radius-indexed decision procedures returning three-valued verdicts."""

from .asymptotic import post_surjectivity, pre_injectivity
from .injectivity import KernelWindowReport, certify_injective, kernel_window, refute_injective
from .inverse import direct_finiteness_check, synthesize_inverse
from .oracles import Exact1D, exact_1d
from .surjectivity import check_surjective_finite, goe_search
from .sweep import surjunctivity_sweep
from .verdict import EXIT_CODES, NO, UNKNOWN, YES, Verdict

__all__ = [
    "EXIT_CODES",
    "Exact1D",
    "KernelWindowReport",
    "NO",
    "UNKNOWN",
    "Verdict",
    "YES",
    "certify_injective",
    "check_surjective_finite",
    "direct_finiteness_check",
    "exact_1d",
    "goe_search",
    "kernel_window",
    "post_surjectivity",
    "pre_injectivity",
    "refute_injective",
    "surjunctivity_sweep",
    "synthesize_inverse",
]
