"""Special functions: integer-order Bessel functions and Wigner symbols."""

from .bessel import BesselPair, bessel_jy, bessel_jy_array
from .wigner import wigner_3j, wigner_6j

__all__ = ["BesselPair", "bessel_jy", "bessel_jy_array", "wigner_3j", "wigner_6j"]
