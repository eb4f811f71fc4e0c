"""Phase sensitivity and quantum Fisher information of a Mach-Zehnder
interferometer with photon subtraction inside the arms.

The analytic path (``series`` -> ``exponents`` -> ``moments`` ->
``metrology``/``fisher``) works on a Gaussian generating function.  The
``oracle`` module is an independent truncated Fock-space simulation used to
cross-check it.
"""

from .errors import *  # noqa: F401,F403
from .fisher import FisherResult, fisher, lossy_from_ideal, qcrb, qfi_ideal, qfi_lossy
from .metrology import (LimitPair, Optimum, SensitivityPoint, homodyne_expectations,
                        intensity_expectations, limits, optimal_phase, phase_sensitivity,
                        sensitivity_curve)
from .model import (NA, NAMED_DETECTIONS, NB, NDIFF, XA, XB, Detection, SchemeConfig,
                    SchemeKind, classify, parse_detection, validate)
from .moments import (MomentTable, internal_moment, normalization, prefactor4_photon_number,
                      total_photon_number)

__version__ = "0.1.0"
