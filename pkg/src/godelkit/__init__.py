"""Executable incompleteness: register machines, arithmetic, RE theories and
the Kleene, Chaitin and Boolos constructions."""

import sys

# Goedel codes and numerals routinely exceed the default 4300-digit limit
# on int <-> str conversion.
if hasattr(sys, "set_int_max_str_digits"):
    sys.set_int_max_str_digits(0)

__version__ = "0.1.0"
