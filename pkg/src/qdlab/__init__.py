"""qdlab: a numerical laboratory for the low-lying critical-line zeros of
quadratic Dirichlet L-functions L(s, (.|p)) with prime modulus.

Modules: numth (primes, characters, character sums), special (complex
special functions), kernel (analytic weights and Mellin companions),
lfunc (L and its completion), zeros (certified critical-line ordinates),
density (form factor and one-level density), ratios (ratio-average
predictions with lower-order terms), nonvanish (central values and the
Fejer bound), cli (command-line front end).
"""

__version__ = "0.1.0"
