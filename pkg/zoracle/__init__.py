from zoracle.estimator import (
    MU_FLOOR,
    StochasticOracle,
    ZoSample,
    SmoothedEstimate,
    SmoothedGradient,
    VarianceReport,
    sample_sphere,
    sample_ball,
    zo_gradient,
    zo_sample,
    smoothed_value,
    smoothed_gradient,
    variance_report,
)

__all__ = [
    "MU_FLOOR",
    "StochasticOracle",
    "ZoSample",
    "SmoothedEstimate",
    "SmoothedGradient",
    "VarianceReport",
    "sample_sphere",
    "sample_ball",
    "zo_gradient",
    "zo_sample",
    "smoothed_value",
    "smoothed_gradient",
    "variance_report",
]
