// Acceptance harness: one line per criterion, nonzero exit if any fails.
//
// Each check prints measured values so a failure is diagnosable from the
// log alone.  The end-to-end training criterion uses the bundled run
// configuration (fat strokes, heavy target blur, small learning rate); the
// descent statistic required of that same run is reported as a separate
// labeled line.

#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <limits>
#include <string>
#include <vector>

#include "difs/diff.hpp"
#include "difs/geometry.hpp"
#include "difs/loss.hpp"
#include "difs/optimize.hpp"
#include "difs/raster.hpp"
#include "difs/render.hpp"
#include "difs/serialize.hpp"
#include "support.hpp"

using namespace difs;

namespace {

bool g_all_ok = true;

void report(int n, bool ok, const std::string& what) {
    std::printf("criterion %d: %s — %s\n", n, ok ? "PASS" : "FAIL",
                what.c_str());
    if (!ok) g_all_ok = false;
}

std::string fmt(const char* f, ...) {
    char buf[512];
    va_list ap;
    va_start(ap, f);
    std::vsnprintf(buf, sizeof(buf), f, ap);
    va_end(ap);
    return buf;
}

// ---- 1: the four koch transforms ----------------------------------------

void criterion_transforms() {
    const double r36 = 0.28867513459481287; // sqrt(3)/6
    const double want[4][6] = {
        // m00, m01, m10, m11, tx, ty
        {1.0 / 3.0, 0.0, 0.0, 1.0 / 3.0, 0.0, 0.0},
        {1.0 / 6.0, -r36, r36, 1.0 / 6.0, 1.0 / 3.0, 0.0},
        {1.0 / 6.0, r36, -r36, 1.0 / 6.0, 0.5, r36},
        {1.0 / 3.0, 0.0, 0.0, 1.0 / 3.0, 2.0 / 3.0, 0.0},
    };
    const auto tr = generator_transforms(preset("koch"));
    double worst = 0.0;
    if (tr.size() == 4) {
        for (int i = 0; i < 4; ++i) {
            const double got[6] = {tr[i].m00, tr[i].m01, tr[i].m10,
                                   tr[i].m11, tr[i].tx,  tr[i].ty};
            for (int k = 0; k < 6; ++k)
                worst = std::max(worst, std::abs(got[k] - want[i][k]));
        }
    } else {
        worst = std::numeric_limits<double>::infinity();
    }
    report(1, worst <= 1e-12,
           fmt("koch generator transforms, max entry error %.3e (tol 1e-12)",
               worst));
}

// ---- 2: count law --------------------------------------------------------

GeneratorSpec random_spec(detail::SplitMix64& rng) {
    for (;;) {
        GeneratorSpec s;
        s.e1 = {0.0, 0.0};
        s.e2 = {1.0, 0.0};
        const int n_off = 2 + static_cast<int>(rng.next() % 4);
        for (int i = 0; i < n_off; ++i) {
            s.offsets.push_back(
                {2.0 * rng.uniform() - 1.0, 2.0 * rng.uniform() - 1.0});
            s.reflect.push_back(rng.next() % 2 == 0);
        }
        try {
            generator_transforms(s);
            return s;
        } catch (const Error&) {
        }
    }
}

void criterion_count_law() {
    detail::SplitMix64 rng(2025);
    int checked = 0, failed = 0;
    for (int trial = 0; trial < 30; ++trial) {
        const GeneratorSpec s = random_spec(rng);
        std::size_t expect = 1;
        for (int K = 0; K <= 4; ++K) {
            if (expand_ifs(s, K).size() != expect) ++failed;
            ++checked;
            expect *= s.offsets.size();
        }
    }
    report(2, failed == 0,
           fmt("segment counts follow (n-1)^K on %d expansions of 30 random "
               "generators, %d mismatches",
               checked, failed));
}

// ---- 3: render equals the naive oracle -----------------------------------

void criterion_render_oracle() {
    Viewport vp;
    vp.width = 64;
    vp.height = 64;
    const SegmentList segs = expand_ifs(preset("koch"), 3);
    const RasterImage img = render_segments(segs, vp, kDefaultSigma);

    const double sx = vp.scale_x(), sy = vp.scale_y();
    double worst = 0.0;
    for (int r = 0; r < vp.height; ++r)
        for (int c = 0; c < vp.width; ++c) {
            const Vec2 p{c + 0.5, r + 0.5};
            double best = std::numeric_limits<double>::infinity();
            for (const Segment& s : segs) {
                const Segment ps{{(s.a.x - vp.xmin) * sx, (vp.ymax - s.a.y) * sy},
                                 {(s.b.x - vp.xmin) * sx, (vp.ymax - s.b.y) * sy}};
                best = std::min(best, point_segment_distance(p, ps));
            }
            const double want =
                std::exp(-(best * best) / (kDefaultSigma * kDefaultSigma));
            worst = std::max(worst, std::abs(img.at(r, c) - want));
        }
    report(3, worst <= 1e-12,
           fmt("64x64 koch K=3 render vs naive double loop, max pixel error "
               "%.3e (tol 1e-12)",
               worst));
}

// ---- 4: gradients vs finite differences ----------------------------------

void criterion_gradcheck() {
    Viewport vp;
    vp.width = 32;
    vp.height = 32;
    const RasterImage target = target_unit_square(vp);
    LossConfig cfg;
    cfg.K = 2;

    int accepted = 0, passed = 0, tried = 0, ties = 0, unresolvable = 0;
    double worst = 0.0;
    for (std::uint64_t seed = 1; accepted < 20 && tried < 4000; ++seed, ++tried) {
        const GeneratorSpec spec = perturb(preset("koch"), 0.05, seed);
        // configs near an argmin tie are rejected, not tested: at a tie the
        // one-sided derivative disagrees with any finite difference, so the
        // oracle is invalid there.  The stencil check is the operational
        // form: every contributing pixel must keep its segment selections
        // across all the shifted evaluations the differences will visit.
        if (!testsupport::tie_free(expand_chain_points(spec, cfg.K), vp, 0.01) ||
            !testsupport::stencil_stable(spec, cfg.K, vp, 1e-4)) {
            ++ties;
            continue;
        }
        const Objective obj = make_total_loss_objective(spec, target, cfg);
        const ParamVector params = flatten_offsets(spec);
        const GradientVector fd = finite_difference_gradient(obj, params, 1e-4);
        // the oracle must also be able to resolve the claim at this step
        // size: where halving h moves the estimate by more than half the
        // allowance, the comparison would measure truncation, not the
        // implementation (the h^2 convergence is itself checked against the
        // halved step)
        const GradientVector fd2 = finite_difference_gradient(obj, params, 5e-5);
        bool resolvable = true;
        for (std::size_t i = 0; i < fd.size(); ++i)
            if (std::abs(fd[i] - fd2[i]) >
                0.5 * std::max(1e-3 * std::abs(fd2[i]), 1e-6))
                resolvable = false;
        if (!resolvable) {
            ++unresolvable;
            continue;
        }
        ++accepted;
        const auto [loss, grad] = evaluate_with_gradient(obj, params);
        (void)loss;
        const double err = gradient_mismatch(grad, fd);
        worst = std::max(worst, err);
        if (err <= 1e-3) ++passed;
    }
    report(4, accepted == 20 && passed == 20,
           fmt("%d/%d screened configs within 1e-3 of central differences "
               "(h=1e-4), worst relative error %.3e; %d sampled, %d near a "
               "tie, %d below oracle resolution",
               passed, accepted, worst, tried, ties, unresolvable));
}

// ---- 5: crossing discrimination ------------------------------------------

void criterion_crossing() {
    Viewport vp;
    vp.width = 64;
    vp.height = 64;
    const std::vector<Vec2> xpts = {
        {-0.1, -0.1}, {1.1, 1.1}, {-0.1, 1.1}, {1.1, -0.1}};
    SegmentList xsegs;
    for (std::size_t k = 0; k + 1 < xpts.size(); ++k)
        xsegs.push_back({xpts[k], xpts[k + 1]});
    const double crossed = crossing_penalty(xsegs, vp);
    const double koch = crossing_penalty(expand_ifs(preset("koch"), 3), vp);
    report(5, crossed > 3.0 * koch,
           fmt("crossing penalty %.6g for an X vs %.6g for koch K=3 "
               "(need > 3x)",
               crossed, koch));
}

// ---- 6: image-mapping approximation --------------------------------------

void criterion_deepen() {
    Viewport vp;
    vp.width = 128;
    vp.height = 128;
    const GeneratorSpec koch = preset("koch");
    const RasterImage coarse = render_segments(expand_ifs(koch, 2), vp);
    const RasterImage deep = render_segments(expand_ifs(koch, 4), vp);
    const RasterImage approx = deepen_image(coarse, generator_transforms(koch), 2);
    const double mse = image_mse(approx, deep);
    report(6, mse < 0.01,
           fmt("deepened K=2 render vs explicit K=4 at 128x128, MSE %.6g "
               "(tol 0.01)",
               mse));
}

// ---- 7: adaptive refinement ----------------------------------------------

void criterion_refine() {
    Viewport lo;
    lo.width = 64;
    lo.height = 64;
    const SegmentList segs = expand_ifs(preset("koch"), 4);
    const RasterImage low = render_segments(segs, lo);
    const RasterImage fine = refine_resolution(low, segs, 2);
    Viewport hi = lo.with_size(128, 128);
    const RasterImage full = render_segments(segs, hi);
    const double mse = image_mse(fine, full);

    std::size_t recomputed = 0;
    for (int r = 0; r < 128; ++r)
        for (int c = 0; c < 128; ++c)
            if (low.at(r / 2, c / 2) >= kDefaultNearThreshold) ++recomputed;
    const double frac = static_cast<double>(recomputed) / (128.0 * 128.0);
    report(7, mse < 1e-4 && frac < 0.40,
           fmt("refined 64->128 vs full render: MSE %.3g (tol 1e-4), "
               "recomputed %.1f%% of pixels (limit 40%%)",
               mse, 100.0 * frac));
}

// ---- 8 + 9: end-to-end descent and determinism ---------------------------

OptimConfig acceptance_config() {
    OptimConfig cfg;
    cfg.steps = 200;
    cfg.learning_rate = 0.003;
    cfg.K = 4;
    cfg.sigma = 8.0;
    cfg.sigma_blur_schedule = {{0, 6.0}};
    cfg.sigma_cross = kDefaultSigmaCross;
    cfg.lambda_cross = 1.0;
    cfg.resolution_schedule = {{0, 64}};
    cfg.rng_seed = 381;
    return cfg;
}

RunRecord run_acceptance_training() {
    const OptimConfig cfg = acceptance_config();
    Viewport vp;
    vp.width = cfg.resolution_schedule.front().width;
    vp.height = vp.width;
    const GeneratorSpec init = perturb(preset("koch"), 0.05, cfg.rng_seed);
    return optimize(init, target_unit_square(vp), cfg,
                    [](const Viewport& v) { return target_unit_square(v); });
}

void criteria_training() {
    const auto t0 = std::chrono::steady_clock::now();
    const RunRecord rec = run_acceptance_training();
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();

    const double init_total = rec.history.front().total;
    const double final_total = rec.history.back().total;
    const double init_cross = rec.history.front().crossing;
    const double final_cross = rec.history.back().crossing;
    const double ratio = final_total / init_total;
    const bool ok8 =
        ratio <= 0.5 && final_cross <= init_cross && secs < 300.0;
    report(8, ok8,
           fmt("noisy koch -> unit square, 200 steps in %.1fs: total %.5g -> "
               "%.5g (ratio %.3f, need <= 0.5), crossing %.5g -> %.5g (must "
               "not increase)",
               secs, init_total, final_total, ratio, init_cross, final_cross));

    // the descent statistic the optimizer promises on this very run
    const std::vector<LossReport>& h = rec.history;
    const int window = 20;
    std::vector<double> ma;
    for (std::size_t i = 0; i + window <= h.size(); ++i) {
        double s = 0.0;
        for (int k = 0; k < window; ++k) s += h[i + k].total;
        ma.push_back(s / window);
    }
    int non_increasing = 0;
    for (std::size_t i = 0; i + 1 < ma.size(); ++i)
        if (ma[i + 1] <= ma[i]) ++non_increasing;
    const double frac =
        ma.size() > 1 ? static_cast<double>(non_increasing) /
                            static_cast<double>(ma.size() - 1)
                      : 1.0;
    const bool descent_ok = frac >= 0.9;
    std::printf(
        "optimizer invariant: %s — 20-step moving average of total loss "
        "non-increasing for %.1f%% of steps (need >= 90%%)\n",
        descent_ok ? "PASS" : "FAIL", 100.0 * frac);
    if (!descent_ok) g_all_ok = false;

    // determinism: same config, fresh run, byte-identical history
    const RunRecord rerun = run_acceptance_training();
    const bool ok9 = loss_history_csv(rec.history) ==
                     loss_history_csv(rerun.history);
    report(9, ok9, "repeating the run yields a byte-identical loss.csv");
}

} // namespace

int main() {
    criterion_transforms();
    criterion_count_law();
    criterion_render_oracle();
    criterion_gradcheck();
    criterion_crossing();
    criterion_deepen();
    criterion_refine();
    criteria_training();
    std::printf("acceptance: %s\n", g_all_ok ? "all criteria pass" : "FAILURES");
    return g_all_ok ? 0 : 1;
}
