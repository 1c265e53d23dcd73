"""weilchar: verification laboratory for twisted characters of finite
Heisenberg-Weil representations.

Closed-form character and sign formulas for Weil representations of finite
symplectic groups, checked module by module against brute-force matrix
oracles.
"""

__version__ = "0.1.0"
