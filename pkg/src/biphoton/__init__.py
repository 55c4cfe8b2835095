"""biphoton.

Simulation and parameter extraction for photon-pair sources in micro-ring resonators
whose resonances are split by backscattering.

The package comes in two parts:
    * The library: resonance line-shape model and fitting, pump shaping, phase
      matching, joint spectral amplitude computation and Schmidt analysis.
    * The command line interface (CLI) tool which runs fits, simulations and parameter
      sweeps from JSON/YAML run configurations and writes CSV/JSON results.
"""

try:
    from ._version import version as __version__
except ImportError:
    __version__ = "unknown"

version = __version__
