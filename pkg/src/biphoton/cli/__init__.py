"""CLI module.

The command line interface for fitting resonance spectra and simulating, analysing and
sweeping photon-pair sources.
"""
