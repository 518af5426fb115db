"""Numerical checking of contraction certificates and Picard iteration."""

from .certificates import (
    CJMP,
    AlphaF,
    Banach,
    CompatiblePairEF,
    Contractive,
    MeirKeeler,
    Proinov,
    Ri,
    Wardowski,
)
from .iteration import IterationConfig, IterationTrace, picard_iterate, uniqueness_probe
from .maps import MapUnderTest
from .metric import MetricSpaceHandle, PairSampler
from .modulus import ModulusFunction, RightApproachSequence, builtin
from .report import CheckReport, Condition
from .verifier import CheckParams, TheoremCase, classify, verify_counterexample, verify_picard

__all__ = [
    "AlphaF", "Banach", "CJMP", "CheckParams", "CheckReport", "CompatiblePairEF", "Condition", "Contractive",
    "IterationConfig", "IterationTrace", "MapUnderTest", "MeirKeeler", "MetricSpaceHandle", "ModulusFunction",
    "PairSampler", "Proinov", "Ri", "RightApproachSequence", "TheoremCase", "Wardowski", "builtin", "classify",
    "picard_iterate", "uniqueness_probe", "verify_counterexample", "verify_picard",
]
