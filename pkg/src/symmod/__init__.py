"""Witness-producing checks of triangle inequalities for the symmetric modulus."""

__version__ = "0.1.0"
