"""Computable noncommutative L-functions over global fields.

The package counts points on varieties over finite fields, reconstructs
zeta functions and Frobenius weight data, assembles even/odd L-functions of
formal noncommutative motives, and renders Riemann-hypothesis verdicts when
an exact rational form is available.
"""

__version__ = "0.1.0"

SCHEMA_VERSION = 1
