#pragma once

#include <vector>

#include "difs/blur.hpp"
#include "difs/geometry.hpp"
#include "difs/raster.hpp"
#include "difs/render.hpp"

namespace difs {

struct LossReport {
    double bmse = 0.0;
    double crossing = 0.0;
    double total = 0.0;
    double lambda_cross = 0.0;
};

struct LossConfig {
    int K = 4;
    double sigma = kDefaultSigma;
    double sigma_blur = 2.0;
    double sigma_cross = kDefaultSigmaCross;
    double lambda_cross = 1.0;
    std::size_t budget = kDefaultSegmentBudget;
};

// mean((blur(rendered) - blur(target))^2)
double bmse(const RasterImage& rendered, const RasterImage& target,
            double sigma_blur);

// mean of the crossing heatmap
double crossing_penalty(const SegmentList& segments, const Viewport& vp,
                        double sigma_cross = kDefaultSigmaCross);

// expand + render + both loss terms; target's viewport is the render
// viewport
LossReport total_loss(const GeneratorSpec& spec, const RasterImage& target,
                      const LossConfig& cfg);

// Both loss terms at a fixed expanded chain together with their exact
// gradients with respect to every chain point (world units).  This is the
// analytic adjoint of the pixel stage: blur/MSE flows back through the
// argmin segment of each pixel, the heatmap through the two closest
// segments.  One pixel scan serves both terms.
struct LossTerms {
    double bmse = 0.0;
    double crossing = 0.0;
    std::vector<Vec2> grad_bmse;      // per chain point
    std::vector<Vec2> grad_crossing;  // per chain point
};

LossTerms loss_terms_with_gradient(const std::vector<Vec2>& pts,
                                   const RasterImage& target, double sigma,
                                   double sigma_blur, double sigma_cross);

} // namespace difs
