"""Bound-state spectra of the exponential-coshine-screened Coulomb plus Morse potential."""

__version__ = "0.1.0"
