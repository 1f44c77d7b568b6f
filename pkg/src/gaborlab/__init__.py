"""Numerical laboratory for Gabor systems with Gaussian windows.

Point configurations in the time-frequency plane are studied through their
Bargmann-side zero sets: planar densities, banded radial measures with
prescribed upper and lower densities, rotating growth profiles, canonical
products, and direct Gram-matrix probes of completeness and minimality.
"""

from .density import (
    DensityReport,
    circle_pack_set,
    density_report,
    jensen_tradeoff_check,
    lattice_set,
    tau,
)
from .errors import GaborLabError
from .fock import (
    SampledSignal,
    bargmann,
    build_gram,
    completeness_residual,
    gaussian_window,
    minimality_residual,
    tf_shift,
)
from .numerics import LogScalar, PrecisionContext, log_sum
from .pointset import LogPolarPoint, PointSet
from .products import ProductSpec, fock_membership_certificate, growth_constant, jensen_verify
from .radial import RadialMeasure, RadialParams, atomize, build_measure, verify_properties
from .rotating import RotatingParams, subharmonicity_probe

__all__ = [
    "DensityReport",
    "GaborLabError",
    "LogPolarPoint",
    "LogScalar",
    "PointSet",
    "PrecisionContext",
    "ProductSpec",
    "RadialMeasure",
    "RadialParams",
    "RotatingParams",
    "SampledSignal",
    "atomize",
    "bargmann",
    "build_gram",
    "build_measure",
    "circle_pack_set",
    "completeness_residual",
    "density_report",
    "fock_membership_certificate",
    "gaussian_window",
    "growth_constant",
    "jensen_tradeoff_check",
    "jensen_verify",
    "lattice_set",
    "log_sum",
    "minimality_residual",
    "subharmonicity_probe",
    "tau",
    "tf_shift",
    "verify_properties",
]
