"""Spherical mixed p-spin models: ground-state predictions, complexity
functions, Hessian spectra at simulated minima and Kac-Rice counts."""

__version__ = "0.1.0"

from .mixture import MixtureSpec, MixtureClass, derive_moments, e_inf_thresholds  # noqa: E402
from .analytic import predict, PredictionSet, strip_check  # noqa: E402

__all__ = ["MixtureSpec", "MixtureClass", "derive_moments", "e_inf_thresholds",
           "predict", "PredictionSet", "strip_check", "__version__"]
