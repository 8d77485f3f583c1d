"""Log-log rate figures rendered from harness CSV reports.

The plots are pure functions of the CSV: no recomputation of statistics,
no randomness, fixed figure geometry and fonts, deterministic SVG output.
"""

__version__ = "0.1.0"

from .frame import MalformedReport, ReportFrame
from .figures import plot_rates, plot_rho
