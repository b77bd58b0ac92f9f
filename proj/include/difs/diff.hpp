#pragma once

#include <functional>
#include <span>
#include <utility>
#include <vector>

#include "difs/geometry.hpp"
#include "difs/loss.hpp"
#include "difs/raster.hpp"
#include "difs/tape.hpp"

namespace difs {

// Flattened offsets (v1.x, v1.y, v2.x, ...) — the optimization variables.
using ParamVector = std::vector<double>;
using GradientVector = std::vector<double>;

// A differentiable scalar pipeline: builds its value on the given tape
// from the parameter variables.
using Objective = std::function<ad::Var(ad::Tape&, std::span<const ad::Var>)>;

ParamVector flatten_offsets(const GeneratorSpec& spec);
GeneratorSpec with_offsets(const GeneratorSpec& spec, const ParamVector& params);

// Reverse-mode evaluation: loss value plus d(loss)/d(param) for every
// parameter.  Throws NonFiniteGradient if any entry is NaN/Inf.
std::pair<double, GradientVector> evaluate_with_gradient(
    const Objective& objective, const ParamVector& params);

// Central differences (f(p+h e_k) - f(p-h e_k)) / 2h, forward evaluations
// only.
GradientVector finite_difference_gradient(const Objective& objective,
                                          const ParamVector& params, double h);

// Expands the chain on the tape and attaches the pixel stage (render,
// blur, MSE, heatmap) as two custom nodes whose local derivatives come
// from the analytic adjoint in loss_terms_with_gradient.  Returned pair is
// (bmse, crossing); compose the total on the tape.
std::pair<ad::Var, ad::Var> loss_nodes_on_tape(
    ad::Tape& tape, const std::vector<TVec2<ad::Var>>& chain,
    const RasterImage& target, double sigma, double sigma_blur,
    double sigma_cross);

// The full training objective for a fixed skeleton (endpoints + reflect
// flags from `spec`, offsets supplied by the parameter vector).
Objective make_total_loss_objective(const GeneratorSpec& spec,
                                    const RasterImage& target,
                                    const LossConfig& cfg);

// One optimizer step's worth of evaluation: component values for the log
// plus the gradient of the weighted total.
struct LossEvaluation {
    LossReport report;
    GradientVector grad;
};
LossEvaluation evaluate_loss_with_gradient(const GeneratorSpec& spec,
                                           const RasterImage& target,
                                           const LossConfig& cfg);

// max_k |g_k - ref_k| / max(|ref_k|, floor); pass when <= tol with the
// floor chosen so the absolute error floor is tol*floor
double gradient_mismatch(const GradientVector& g, const GradientVector& ref,
                         double floor = 1e-3);

} // namespace difs
