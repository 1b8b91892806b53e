"""Corner scattering toolkit.

Exact finite-order certification that corners force vanishing of Cauchy
data jets, a Nystrom solver for acoustic transmission scattering, and
interior transmission eigenvalues of the disk.
"""

from .exact import GaussianRational, gq, parse_rational
from .geometry import (
    BoundaryCurve,
    CircularCap,
    CornerProfile,
    StrongCorner,
    build_corner_domain,
    disk,
    make_analytic_arc,
    make_strong_corner,
    make_weak_profile,
)
from .incident import CircularWave, PlaneWave
from .ite import IteQuery, IteRoot, find_ites, ite_determinant
from .nystrom import FarField, TransmissionProblem, assemble_and_solve, far_field
from .series import disk_series_farfield
from .sweep import scattering_sweep
from .vanishing import (
    Conclusion,
    VanishingCertificate,
    jet_nullspace,
    operator_span_check,
    strong_corner_induction,
    vandermonde4,
    weak_corner_induction,
)

__version__ = "0.1.0"
