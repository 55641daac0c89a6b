"""Cauchy-weighted moments of Dirichlet polynomials, computed several independent ways."""

__version__ = "0.1.0"

from .errors import CapacityError, NonConvergence  # noqa: E402
from .kernel import (CauchyMeanResult, Method, cauchy_mean_2q, limit_s_infinity,  # noqa: E402
                     wilf2_value, wilf_bilinear)
from .poly import (MAX_INVERSE, ConvolutionCoeffs, DirichletPoly, KernelSpec,  # noqa: E402
                   convolution_power, evaluate, read_coeffs_csv)
from .quadrature import QuadratureConfig, cauchy_mean_quadrature  # noqa: E402
from .telescope import (cauchy_mean_2_telescope, cauchy_mean_4_telescope,  # noqa: E402
                        cauchy_mean_telescope)

__all__ = [
    "CapacityError", "NonConvergence", "CauchyMeanResult", "Method", "cauchy_mean_2q",
    "limit_s_infinity", "wilf2_value", "wilf_bilinear", "MAX_INVERSE", "ConvolutionCoeffs",
    "DirichletPoly", "KernelSpec", "convolution_power", "evaluate", "read_coeffs_csv",
    "QuadratureConfig", "cauchy_mean_quadrature", "cauchy_mean_2_telescope",
    "cauchy_mean_4_telescope", "cauchy_mean_telescope", "__version__",
]
