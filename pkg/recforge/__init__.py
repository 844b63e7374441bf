"""
recforge: certified examples of sets that are chromatically recurrent
but not density recurrent.

Top-level imports cover the common entry points; everything else lives in
the submodules.
"""

from recforge.assembly import (
    NonrecurrenceWitness,
    PeriodicSet,
    RecurrenceCertificate,
    kriz_iterate,
    kriz_iterate_in_difference_set,
    two_pieces,
    witness_from_set,
)
from recforge.config import Caps
from recforge.errors import DocumentError, ParameterError, RecforgeError, ResourceLimitError, SearchFailure
from recforge.pieces import finite_piece, piece_in_difference_set

__version__ = "0.1.0"

__all__ = [
    "Caps",
    "DocumentError",
    "NonrecurrenceWitness",
    "ParameterError",
    "PeriodicSet",
    "RecforgeError",
    "RecurrenceCertificate",
    "ResourceLimitError",
    "SearchFailure",
    "finite_piece",
    "kriz_iterate",
    "kriz_iterate_in_difference_set",
    "piece_in_difference_set",
    "two_pieces",
    "witness_from_set",
]
