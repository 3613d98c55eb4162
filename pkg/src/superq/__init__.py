"""Baxter Q-operators for graded gl(n|m) spin chains built from superoscillators."""

from .graded import GradingSignature, QuantumSpace, SingularTwistError, TwistConfig, build_hamiltonian
from .oscillators import OscElement, OscFamily, TraceWeight, abel_oracle, family_trace
from .lax import ModuleSpec, SubsetLabel, check_ybe, lax_canonical, verify_factorization
from .transfer import q_operator, t_operator, x_plus_operator
from .hasse import HasseDiagram, NestingPath, enumerate_paths, verify_qq, verify_xqqq
from .bethe import cross_check_spectrum, tj_demo

__version__ = "0.1.0"

__all__ = [
    "GradingSignature", "QuantumSpace", "SingularTwistError", "TwistConfig", "build_hamiltonian",
    "OscElement", "OscFamily", "TraceWeight", "abel_oracle", "family_trace",
    "ModuleSpec", "SubsetLabel", "check_ybe", "lax_canonical", "verify_factorization",
    "q_operator", "t_operator", "x_plus_operator",
    "HasseDiagram", "NestingPath", "enumerate_paths", "verify_qq", "verify_xqqq",
    "cross_check_spectrum", "tj_demo",
]
