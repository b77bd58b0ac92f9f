"""Differentiable IFS fractal curves: render, measure, optimize."""

from ._core import (
    DifsError,
    GeneratorSpec,
    Image,
    LossReport,
    Vec2,
    Viewport,
    bmse,
    control_points,
    crossing_heatmap,
    expand_points,
    gaussian_blur,
    loss_gradient,
    optimize,
    preset,
    perturb,
    read_pgm,
    render,
    spec_from_json,
    target_unit_square,
    total_loss,
    write_pgm,
    write_png,
)

__all__ = [
    "DifsError",
    "GeneratorSpec",
    "Image",
    "LossReport",
    "Vec2",
    "Viewport",
    "bmse",
    "control_points",
    "crossing_heatmap",
    "expand_points",
    "gaussian_blur",
    "loss_gradient",
    "optimize",
    "preset",
    "perturb",
    "read_pgm",
    "render",
    "spec_from_json",
    "target_unit_square",
    "total_loss",
    "write_pgm",
    "write_png",
]
