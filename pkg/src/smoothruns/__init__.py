"""Runs of consecutive smooth integers via Pell equations.

Finds windows of consecutive integers whose prime factors all stay below a
bound by solving Pell equations through compact representations, certifies
results unconditionally with a continued-fraction guard, and assembles the
Erdos gap function f(k) from campaign and witness evidence.
"""

__version__ = "0.1.0"
