"""Fine-Gray competing-risks regression with linear-time risk-set scans."""

from ._fgscan import (  # noqa: F401
    Dataset,
    __version__,
    brute_force,
    cif,
    fit,
    lambda_max,
    penfit,
    scan,
    simulate,
)

__all__ = [
    "Dataset",
    "brute_force",
    "cif",
    "fit",
    "lambda_max",
    "penfit",
    "scan",
    "simulate",
]
