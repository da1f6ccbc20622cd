"""Constructions and checks for distorted free subgroups of cubulated groups."""

__version__ = "0.1.0"
