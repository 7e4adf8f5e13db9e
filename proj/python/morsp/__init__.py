"""Smooth gray-scale morphology and skeleton-preserving mask refinement."""

from ._core import (
    MetricsReport,
    SolverConfig,
    classic_skeleton,
    dilate,
    erode,
    evaluate,
    gradcheck,
    project_unit,
    refine,
    sandwich_audit,
    skeleton_cost,
    smooth_dilate,
    smooth_erode,
    smooth_skeleton,
    smooth_skeleton_grad,
    td_regularizer,
    td_subgradient,
)

__all__ = [
    "MetricsReport",
    "SolverConfig",
    "classic_skeleton",
    "dilate",
    "erode",
    "evaluate",
    "gradcheck",
    "project_unit",
    "refine",
    "sandwich_audit",
    "skeleton_cost",
    "smooth_dilate",
    "smooth_erode",
    "smooth_skeleton",
    "smooth_skeleton_grad",
    "td_regularizer",
    "td_subgradient",
]
