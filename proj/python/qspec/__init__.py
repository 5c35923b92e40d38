"""Quantile spectral density estimation and hypothesis tests."""

from ._qspec import (
    NullModel,
    QsdEstimate,
    default_levels,
    estimate,
    gof_test,
    reversibility_test,
    simulate,
    two_sample_test,
)

__all__ = [
    "NullModel",
    "QsdEstimate",
    "default_levels",
    "estimate",
    "gof_test",
    "reversibility_test",
    "simulate",
    "two_sample_test",
]
