"""Design and simulation tools for hybrid AOD + SLM qubit-array scanners."""

__version__ = "0.1.0"
