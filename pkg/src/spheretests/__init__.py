"""Uniformity tests for directional data on the circle and hypersphere."""

from .catalog import TestOptions, TestOutcome, run_test
from .circular import (circular_range, greenwood, hodges_ajne, kuiper, rao_spacings,
                       symmetric_spacing, watson)
from .highdim import coherence, coherence_statistic, rayleigh_standardized, regime_classify
from .montecarlo import McConfig, McResult, level_power_study, mc_pvalue
from .nulldist import Regime
from .projection import (ProjectionConfig, multi_projection_test, project,
                         projected_null_cdf, single_projection_test)
from .sample import DirectionalSample, SampleError, ingest, parse
from .samplers import (AlternativeSpec, sample_axial, sample_cardioid, sample_mixture8,
                       sample_uniform, sample_vmf)
from .sobolev import (SobolevWeights, ajne, bingham, eigendim, gegenbauer, gine_f, gine_g,
                      hermans_rasson, inner_product, jupp_data_driven, pycke, rayleigh,
                      rothman, sobolev_statistic)

__all__ = [
    "TestOptions",
    "TestOutcome",
    "run_test",
    "circular_range",
    "greenwood",
    "hodges_ajne",
    "kuiper",
    "rao_spacings",
    "symmetric_spacing",
    "watson",
    "coherence",
    "coherence_statistic",
    "rayleigh_standardized",
    "regime_classify",
    "McConfig",
    "McResult",
    "level_power_study",
    "mc_pvalue",
    "Regime",
    "ProjectionConfig",
    "multi_projection_test",
    "project",
    "projected_null_cdf",
    "single_projection_test",
    "DirectionalSample",
    "SampleError",
    "ingest",
    "parse",
    "AlternativeSpec",
    "sample_axial",
    "sample_cardioid",
    "sample_mixture8",
    "sample_uniform",
    "sample_vmf",
    "SobolevWeights",
    "ajne",
    "bingham",
    "eigendim",
    "gegenbauer",
    "gine_f",
    "gine_g",
    "hermans_rasson",
    "inner_product",
    "jupp_data_driven",
    "pycke",
    "rayleigh",
    "rothman",
    "sobolev_statistic",
]

__version__ = "0.1.0"
