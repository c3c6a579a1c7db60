"""Classical analyses: concrete oracle, interval abstract interpretation, splitting."""
from .domain import Domain, DomainError, InputDomain, ValueDistribution, as_domain
from .interp import (CapExceeded, ConcreteEnv, Enumeration, InterpError, enumerate_program,
                     interpret, joint_inputs)
from .intervals import IntervalEnv, interval_analyze
from .split import SplitError, index_at_line, observables, split

__all__ = [
    "Domain", "DomainError", "InputDomain", "ValueDistribution", "as_domain", "CapExceeded",
    "ConcreteEnv", "Enumeration", "InterpError", "enumerate_program", "interpret",
    "joint_inputs", "IntervalEnv", "interval_analyze", "SplitError", "index_at_line",
    "observables", "split",
]
