"""Classification of square (0,1) matrices by permutation equivalence, the
extended X-transform equivalence, and Smith normal form."""

from .bitmat import BitMatrix, Perm, SignMatrix, from_hex
from .snf import SnfVector, smith_normal_form

__all__ = ["BitMatrix", "Perm", "SignMatrix", "SnfVector", "from_hex", "smith_normal_form"]
__version__ = "0.1.0"
