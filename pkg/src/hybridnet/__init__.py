"""hybridnet: coverage and rate analysis for hybrid terrestrial/LEO downlinks.

A downlink where sparse multi-antenna base stations and a LEO constellation
serve the same rural users: closed-form association / coverage / rate
evaluation on one side, an independent Monte Carlo simulator on the other,
plus a CLI for sweeps and reference-figure reproduction.
"""

__version__ = "0.1.0"

from .config import SystemConfig, load_config, table1_config  # noqa: E402,F401
