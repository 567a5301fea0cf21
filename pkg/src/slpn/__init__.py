"""Symplectic-code cryptography toolkit.

Bit-packed GF(2) symplectic linear algebra, noisy-codeword instance samplers,
a one-bit public-key scheme with seed-expanded (strongly uniform) keys, a
one-way-function family, executable reductions between the underlying decision
problems, and information-set-decoding attacks with a statistics harness.
"""

__version__ = "0.1.0"
