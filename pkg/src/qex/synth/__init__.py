"""Synthesis of WHILE programs into reversible circuits."""
from .compiler import (BranchInfo, LoopInfo, SynthError, SynthOptions, SynthResult, optimize,
                       synthesize)

__all__ = ["BranchInfo", "LoopInfo", "SynthError", "SynthOptions", "SynthResult", "optimize",
           "synthesize"]
