"""Finite time scales and their delta/nabla calculus."""

from .calculus import (
    DomainMismatchError,
    GridFunction,
    delta_derivative,
    delta_integral,
    delta_integral_against_derivative,
    nabla_derivative,
    nabla_integral,
    running_delta_integral,
    running_nabla_integral,
    ts_exponential,
)
from .scale import (
    JumpData,
    OffScaleError,
    PointClass,
    ScaleKind,
    ScaleProperties,
    ScaleSpec,
    ScaleSpecError,
    TimeScale,
    build_timescale,
    jump_data,
    modelled_jump_data,
    modelled_point_classes,
    parse_scale_spec,
    point_classes,
    scale_properties,
)

__all__ = [
    "DomainMismatchError",
    "GridFunction",
    "JumpData",
    "OffScaleError",
    "PointClass",
    "ScaleKind",
    "ScaleProperties",
    "ScaleSpec",
    "ScaleSpecError",
    "TimeScale",
    "build_timescale",
    "delta_derivative",
    "delta_integral",
    "delta_integral_against_derivative",
    "jump_data",
    "modelled_jump_data",
    "modelled_point_classes",
    "nabla_derivative",
    "nabla_integral",
    "parse_scale_spec",
    "point_classes",
    "running_delta_integral",
    "running_nabla_integral",
    "scale_properties",
    "ts_exponential",
]
