"""Exponentiated Lindley geometric lifetime distribution.

Thin Python surface over the C++ core: distribution functions, seeded
sampling, moments, maximum-likelihood fitting (Newton and EM), model
comparison by information criteria, and likelihood-ratio tests.
"""

from elg._core import (
    cdf,
    compare,
    fit,
    hazard,
    lrtest,
    mgf,
    moment,
    pdf,
    quantile,
    relief_times,
    sample,
    summary,
    survival,
)

__all__ = [
    "cdf",
    "compare",
    "fit",
    "hazard",
    "lrtest",
    "mgf",
    "moment",
    "pdf",
    "quantile",
    "relief_times",
    "sample",
    "summary",
    "survival",
]

__version__ = "1.0.0"
