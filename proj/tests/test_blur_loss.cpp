#include <doctest.h>

#include <cmath>
#include <vector>

#include "difs/blur.hpp"
#include "difs/geometry.hpp"
#include "difs/loss.hpp"
#include "difs/optimize.hpp"
#include "difs/raster.hpp"
#include "difs/render.hpp"
#include "support.hpp"

using namespace difs;

namespace {

RasterImage make_image(int w, int h, double fill = 0.0) {
    RasterImage img;
    img.width = w;
    img.height = h;
    img.viewport.width = w;
    img.viewport.height = h;
    img.values.assign(static_cast<std::size_t>(w) * h, fill);
    return img;
}

RasterImage random_image(int w, int h, detail::SplitMix64& rng) {
    RasterImage img = make_image(w, h);
    for (double& v : img.values) v = rng.uniform();
    return img;
}

double dot(const RasterImage& a, const RasterImage& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.values.size(); ++i)
        s += a.values[i] * b.values[i];
    return s;
}

} // namespace

TEST_CASE("kernel construction") {
    CHECK(gaussian_kernel(0.0).empty());
    CHECK(gaussian_kernel(-1.0).empty());

    const auto k = gaussian_kernel(1.0);
    REQUIRE(k.size() == 7); // radius ceil(3*sigma) = 3
    double sum = 0.0;
    for (double v : k) sum += v;
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
    for (int i = 0; i < 3; ++i) CHECK(k[i] == doctest::Approx(k[6 - i]));
    CHECK(k[3] > k[2]);
    // normalization cancels in the ratio of adjacent taps
    CHECK(k[4] / k[3] == doctest::Approx(std::exp(-0.5)).epsilon(1e-12));
    CHECK(gaussian_kernel(0.4).size() == 2u * 2u + 1u); // ceil(1.2) = 2
}

TEST_CASE("zero-sigma blur is the identity") {
    detail::SplitMix64 rng(3);
    const RasterImage img = random_image(9, 7, rng);
    const RasterImage out = gaussian_blur(img, 0.0);
    for (std::size_t i = 0; i < img.values.size(); ++i)
        CHECK(out.values[i] == img.values[i]);
}

TEST_CASE("blurring a constant image changes nothing") {
    const RasterImage img = make_image(12, 10, 0.625);
    const RasterImage out = gaussian_blur(img, 1.5);
    for (double v : out.values)
        CHECK(v == doctest::Approx(0.625).epsilon(1e-12));
}

TEST_CASE("an isolated bright pixel spreads as the separable kernel") {
    RasterImage img = make_image(16, 16);
    img.at(8, 8) = 1.0;
    const auto k = gaussian_kernel(1.0);
    const int radius = static_cast<int>(k.size() / 2);
    const RasterImage out = gaussian_blur(img, 1.0);
    for (int dr = -radius; dr <= radius; ++dr)
        for (int dc = -radius; dc <= radius; ++dc) {
            const double want = k[radius + dr] * k[radius + dc];
            CHECK(out.at(8 + dr, 8 + dc) ==
                  doctest::Approx(want).epsilon(1e-12));
        }
    CHECK(out.at(8, 8 + radius + 1) == 0.0);
}

TEST_CASE("blur is linear") {
    detail::SplitMix64 rng(17);
    const RasterImage a = random_image(11, 8, rng);
    const RasterImage b = random_image(11, 8, rng);
    RasterImage sum = a;
    for (std::size_t i = 0; i < sum.values.size(); ++i)
        sum.values[i] += 2.0 * b.values[i];
    const RasterImage lhs = gaussian_blur(sum, 1.3);
    const RasterImage ba = gaussian_blur(a, 1.3);
    const RasterImage bb = gaussian_blur(b, 1.3);
    for (std::size_t i = 0; i < lhs.values.size(); ++i)
        CHECK(lhs.values[i] ==
              doctest::Approx(ba.values[i] + 2.0 * bb.values[i]).epsilon(1e-12));
}

TEST_CASE("blur transpose is the exact adjoint of blur") {
    detail::SplitMix64 rng(29);
    for (double sigma : {0.8, 1.7, 3.0}) {
        const RasterImage x = random_image(13, 9, rng);
        const RasterImage y = random_image(13, 9, rng);
        const double lhs = dot(gaussian_blur(x, sigma), y);
        const double rhs = dot(x, blur_transpose(y, sigma));
        CHECK(lhs == doctest::Approx(rhs).epsilon(1e-11));
    }
}

TEST_CASE("blurred mse basics") {
    const RasterImage zeros = make_image(10, 10, 0.0);
    const RasterImage ones = make_image(10, 10, 1.0);
    CHECK(bmse(zeros, zeros, 2.0) == 0.0);
    CHECK(bmse(ones, ones, 2.0) == 0.0);
    // constants are fixed points of the blur, so the mse is exact
    CHECK(bmse(zeros, ones, 2.0) == doctest::Approx(1.0).epsilon(1e-12));

    detail::SplitMix64 rng(41);
    const RasterImage a = random_image(10, 10, rng);
    const RasterImage b = random_image(10, 10, rng);
    CHECK(bmse(a, b, 1.5) == doctest::Approx(bmse(b, a, 1.5)).epsilon(1e-13));
    // with no blur this is the plain mean squared error
    CHECK(bmse(a, b, 0.0) == doctest::Approx(image_mse(a, b)).epsilon(1e-13));
    // blurring first smooths extremes, so the blurred mse cannot exceed... it
    // can in contrived cases, but for independent noise it drops sharply
    CHECK(bmse(a, b, 1.5) < image_mse(a, b));

    const RasterImage small = make_image(9, 10, 0.0);
    CHECK_THROWS_AS(bmse(a, small, 1.0), ShapeMismatch);
}

TEST_CASE("crossing penalty is the heatmap mean and ignores chain direction") {
    Viewport vp;
    vp.width = 48;
    vp.height = 48;
    const SegmentList segs = expand_ifs(preset("arrowhead"), 3);
    const RasterImage heat = crossing_heatmap(segs, vp, 0.5);
    double mean = 0.0;
    for (double v : heat.values) mean += v;
    mean /= static_cast<double>(heat.values.size());
    CHECK(crossing_penalty(segs, vp, 0.5) == doctest::Approx(mean).epsilon(1e-14));

    // direction independence needs a chain without near-equidistant pixels:
    // the near-symmetric arrowhead has pixels where reversing the endpoint
    // arithmetic flips an argmin by an ulp and with it the neighbour window
    const std::vector<Vec2> xpts = {
        {-0.1, -0.1}, {1.1, 1.1}, {-0.1, 1.1}, {1.1, -0.1}};
    SegmentList xsegs;
    for (std::size_t k = 0; k + 1 < xpts.size(); ++k)
        xsegs.push_back({xpts[k], xpts[k + 1]});
    SegmentList reversed;
    for (auto it = xsegs.rbegin(); it != xsegs.rend(); ++it)
        reversed.push_back({it->b, it->a});
    CHECK(crossing_penalty(reversed, vp, 0.5) ==
          doctest::Approx(crossing_penalty(xsegs, vp, 0.5)).epsilon(1e-12));
}

TEST_CASE("total loss composes its two terms") {
    Viewport vp;
    vp.width = 64;
    vp.height = 64;
    const RasterImage target = target_unit_square(vp);
    const GeneratorSpec spec = preset("koch");

    LossConfig cfg;
    cfg.K = 3;
    cfg.sigma_blur = 2.0;
    cfg.lambda_cross = 0.7;
    const LossReport rep = total_loss(spec, target, cfg);
    CHECK(rep.total ==
          doctest::Approx(rep.bmse + 0.7 * rep.crossing).epsilon(1e-14));
    CHECK(rep.lambda_cross == 0.7);

    const SegmentList segs = expand_ifs(spec, 3);
    const RasterImage rendered = render_segments(segs, vp, cfg.sigma);
    CHECK(rep.bmse ==
          doctest::Approx(bmse(rendered, target, 2.0)).epsilon(1e-13));
    CHECK(rep.crossing ==
          doctest::Approx(crossing_penalty(segs, vp, cfg.sigma_cross)).epsilon(1e-13));

    cfg.lambda_cross = 0.0;
    const LossReport plain = total_loss(spec, target, cfg);
    CHECK(plain.total == plain.bmse);
}

TEST_CASE("fused loss terms agree with the standalone evaluations") {
    Viewport vp;
    vp.width = 32;
    vp.height = 32;
    const GeneratorSpec spec = preset("koch");
    const auto pts = expand_chain_points(spec, 3);
    RasterImage target = target_unit_square(vp);

    const LossTerms terms = loss_terms_with_gradient(pts, target, 0.5, 2.0, 0.5);
    SegmentList segs;
    for (std::size_t k = 0; k + 1 < pts.size(); ++k)
        segs.push_back({pts[k], pts[k + 1]});
    const RasterImage rendered = render_segments(segs, vp, 0.5);
    CHECK(terms.bmse ==
          doctest::Approx(bmse(rendered, target, 2.0)).epsilon(1e-12));
    CHECK(terms.crossing ==
          doctest::Approx(crossing_penalty(segs, vp, 0.5)).epsilon(1e-12));
    CHECK(terms.grad_bmse.size() == pts.size());
    CHECK(terms.grad_crossing.size() == pts.size());
}

TEST_CASE("analytic chain-point gradients match central differences") {
    Viewport vp;
    vp.xmin = 0.0;
    vp.xmax = 8.0;
    vp.ymin = 0.0;
    vp.ymax = 8.0;
    vp.width = 8;
    vp.height = 8;

    // two strands genuinely crossing; the coordinates were searched for a
    // configuration where no pixel sits near an argmin tie, so every pixel
    // stays on one smooth branch across the difference stencil
    const std::vector<Vec2> pts = {
        {1.2318954988959974, 0.98185770422482577},
        {6.8769808121087355, 5.9226146505787414},
        {1.2489719124748651, 5.875401996681541},
        {6.4428031340386385, 0.90180498693465416}};
    REQUIRE(testsupport::tie_free(pts, vp, 0.02, 1.0, 0.8));
    std::vector<Vec2> shifted = pts;
    for (Vec2& p : shifted) {
        p.x += 0.4;
        p.y += 0.3;
    }
    SegmentList tsegs;
    for (std::size_t k = 0; k + 1 < shifted.size(); ++k)
        tsegs.push_back({shifted[k], shifted[k + 1]});
    const RasterImage target = render_segments(tsegs, vp, 1.0);

    const double sigma = 1.0, sigma_blur = 1.0, sigma_cross = 0.8;
    const LossTerms base =
        loss_terms_with_gradient(pts, target, sigma, sigma_blur, sigma_cross);

    const double h = 1e-5;
    for (std::size_t i = 0; i < pts.size(); ++i)
        for (int axis = 0; axis < 2; ++axis) {
            auto eval = [&](double delta) {
                std::vector<Vec2> moved = pts;
                (axis == 0 ? moved[i].x : moved[i].y) += delta;
                return loss_terms_with_gradient(moved, target, sigma,
                                                sigma_blur, sigma_cross);
            };
            const LossTerms up = eval(h), dn = eval(-h);
            const double fd_b = (up.bmse - dn.bmse) / (2.0 * h);
            const double fd_c = (up.crossing - dn.crossing) / (2.0 * h);
            const double g_b =
                axis == 0 ? base.grad_bmse[i].x : base.grad_bmse[i].y;
            const double g_c =
                axis == 0 ? base.grad_crossing[i].x : base.grad_crossing[i].y;
            CHECK(std::abs(g_b - fd_b) <=
                  1e-4 * std::max(std::abs(fd_b), 1e-2));
            CHECK(std::abs(g_c - fd_c) <=
                  1e-4 * std::max(std::abs(fd_c), 1e-2));
        }
}
