"""Transmon with a split phonon transducer in a multimode surface-acoustic-wave cavity.

Forward models for the split transducer, Bragg cavity, flux-tunable transmon
and multimode Jaynes-Cummings system, Stark-driven number-splitting spectra,
and least-squares recovery of their parameters.
"""
__version__ = "0.1.0"
