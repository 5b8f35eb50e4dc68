"""Analysis of mass-action reaction networks: endotacticity, realizations, equilibria and decay."""

from .errors import PreconditionError, VerificationError
from .netparse import NetworkParseError, ParseDiagnostic, load_network, parse_network, serialize_network
from .network import Reaction, ReactionNetwork

__all__ = [
    "NetworkParseError",
    "ParseDiagnostic",
    "PreconditionError",
    "Reaction",
    "ReactionNetwork",
    "VerificationError",
    "load_network",
    "parse_network",
    "serialize_network",
]

__version__ = "0.1.0"
