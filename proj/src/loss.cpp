#include "difs/loss.hpp"

#include <algorithm>
#include <cmath>

namespace difs {

double bmse(const RasterImage& rendered, const RasterImage& target,
            double sigma_blur) {
    require_same_shape(rendered, target);
    const RasterImage br = gaussian_blur(rendered, sigma_blur);
    const RasterImage bt = gaussian_blur(target, sigma_blur);
    double acc = 0.0;
    for (std::size_t i = 0; i < br.values.size(); ++i) {
        const double d = br.values[i] - bt.values[i];
        acc += d * d;
    }
    return acc / static_cast<double>(br.values.size());
}

double crossing_penalty(const SegmentList& segments, const Viewport& vp,
                        double sigma_cross) {
    const RasterImage heat = crossing_heatmap(segments, vp, sigma_cross);
    double acc = 0.0;
    for (double v : heat.values) acc += v;
    return acc / static_cast<double>(heat.values.size());
}

LossTerms loss_terms_with_gradient(const std::vector<Vec2>& pts,
                                   const RasterImage& target, double sigma,
                                   double sigma_blur, double sigma_cross) {
    const Viewport& vp = target.viewport;
    if (target.width != vp.width || target.height != vp.height)
        throw ShapeMismatch("target buffer does not match its viewport");
    if (!(sigma > 0.0) || !(sigma_cross > 0.0))
        throw InvalidSpec("sigma and sigma_cross must be positive");

    const ScanResult scan = scan_chain(pts, vp);
    const std::size_t npix = static_cast<std::size_t>(vp.width) * vp.height;
    const double inv_n = 1.0 / static_cast<double>(npix);
    const double inv_s2 = 1.0 / (sigma * sigma);
    const double inv_sc2 = 1.0 / (sigma_cross * sigma_cross);

    // forward: shaded image and crossing mean off the single scan
    RasterImage rendered(vp);
    double cross_sum = 0.0;
    std::vector<double> heat(npix, 0.0);
    for (std::size_t at = 0; at < npix; ++at) {
        rendered.values[at] = std::exp(-scan.d1[at] * scan.d1[at] * inv_s2);
        if (scan.i2[at] >= 0) {
            heat[at] = std::exp(-scan.d1[at] * scan.d2[at] * inv_sc2);
            cross_sum += heat[at];
        }
    }

    LossTerms out;
    out.crossing = cross_sum * inv_n;

    const RasterImage br = gaussian_blur(rendered, sigma_blur);
    const RasterImage bt = gaussian_blur(target, sigma_blur);
    double acc = 0.0;
    std::vector<double> u(npix);
    for (std::size_t i = 0; i < npix; ++i) {
        const double d = br.values[i] - bt.values[i];
        acc += d * d;
        u[i] = 2.0 * inv_n * d;
    }
    out.bmse = acc * inv_n;

    // pull the image-space gradient back through the blur
    std::vector<double> g_img;
    if (sigma_blur > 0.0)
        detail::blur_transpose(u, g_img, vp.width, vp.height,
                               gaussian_kernel(sigma_blur));
    else
        g_img = std::move(u);

    // pixel-space chain points (same mapping the scan used)
    std::vector<Vec2> ppx(pts.size());
    for (std::size_t k = 0; k < pts.size(); ++k) ppx[k] = vp.to_pixel(pts[k]);

    std::vector<Vec2> ga(pts.size(), Vec2{0.0, 0.0});
    std::vector<Vec2> gb(pts.size(), Vec2{0.0, 0.0});

    for (int row = 0; row < vp.height; ++row) {
        const double py = row + 0.5;
        for (int col = 0; col < vp.width; ++col) {
            const double px = col + 0.5;
            const std::size_t at = static_cast<std::size_t>(row) * vp.width + col;

            const int i1 = scan.i1[at];
            const double t1 = scan.t1[at];
            const Vec2& a1 = ppx[i1];
            const Vec2& b1 = ppx[i1 + 1];
            const double r1x = px - (a1.x + t1 * (b1.x - a1.x));
            const double r1y = py - (a1.y + t1 * (b1.y - a1.y));

            // blurred-MSE path: d(bmse)/d(d1^2) at this pixel
            const double ca = g_img[at] * rendered.values[at] * (-inv_s2);
            ga[i1].x += ca * (-2.0 * (1.0 - t1)) * r1x;
            ga[i1].y += ca * (-2.0 * (1.0 - t1)) * r1y;
            ga[i1 + 1].x += ca * (-2.0 * t1) * r1x;
            ga[i1 + 1].y += ca * (-2.0 * t1) * r1y;

            // heatmap path: through both distances, d = sqrt(d^2)
            const int i2 = scan.i2[at];
            if (i2 < 0 || heat[at] == 0.0) continue;
            const double d1 = scan.d1[at], d2 = scan.d2[at];
            const double ch = inv_n * heat[at] * (-inv_sc2);
            const double c1 = ch * d2 / std::max(2.0 * d1, 1e-300);
            const double c2 = ch * d1 / std::max(2.0 * d2, 1e-300);

            gb[i1].x += c1 * (-2.0 * (1.0 - t1)) * r1x;
            gb[i1].y += c1 * (-2.0 * (1.0 - t1)) * r1y;
            gb[i1 + 1].x += c1 * (-2.0 * t1) * r1x;
            gb[i1 + 1].y += c1 * (-2.0 * t1) * r1y;

            const double t2 = scan.t2[at];
            const Vec2& a2 = ppx[i2];
            const Vec2& b2 = ppx[i2 + 1];
            const double r2x = px - (a2.x + t2 * (b2.x - a2.x));
            const double r2y = py - (a2.y + t2 * (b2.y - a2.y));
            gb[i2].x += c2 * (-2.0 * (1.0 - t2)) * r2x;
            gb[i2].y += c2 * (-2.0 * (1.0 - t2)) * r2y;
            gb[i2 + 1].x += c2 * (-2.0 * t2) * r2x;
            gb[i2 + 1].y += c2 * (-2.0 * t2) * r2y;
        }
    }

    // pixel coords to world coords: px = (x-xmin)*sx, py = (ymax-y)*sy
    const double sx = vp.scale_x(), sy = vp.scale_y();
    for (std::size_t k = 0; k < pts.size(); ++k) {
        ga[k] = Vec2{ga[k].x * sx, -ga[k].y * sy};
        gb[k] = Vec2{gb[k].x * sx, -gb[k].y * sy};
    }
    out.grad_bmse = std::move(ga);
    out.grad_crossing = std::move(gb);
    return out;
}

LossReport total_loss(const GeneratorSpec& spec, const RasterImage& target,
                      const LossConfig& cfg) {
    const auto pts = expand_chain_points(spec, cfg.K, cfg.budget);
    const LossTerms terms = loss_terms_with_gradient(
        pts, target, cfg.sigma, cfg.sigma_blur, cfg.sigma_cross);
    LossReport rep;
    rep.bmse = terms.bmse;
    rep.crossing = terms.crossing;
    rep.lambda_cross = cfg.lambda_cross;
    rep.total = rep.bmse + cfg.lambda_cross * rep.crossing;
    return rep;
}

} // namespace difs
