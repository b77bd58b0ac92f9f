#include "difs/optimize.hpp"

#include <chrono>
#include <cmath>
#include <numbers>

#include "difs/render.hpp"

namespace difs {

namespace detail {

double gaussian(SplitMix64& rng) {
    const double u1 = rng.uniform();
    const double u2 = rng.uniform();
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * std::numbers::pi * u2);
}

} // namespace detail

void validate(const OptimConfig& cfg) {
    if (cfg.steps < 0) throw ConfigError("steps must be nonnegative");
    if (!(cfg.learning_rate > 0)) throw ConfigError("learning_rate must be positive");
    if (!(cfg.adam_beta1 >= 0 && cfg.adam_beta1 < 1))
        throw ConfigError("adam_beta1 must lie in [0,1)");
    if (!(cfg.adam_beta2 >= 0 && cfg.adam_beta2 < 1))
        throw ConfigError("adam_beta2 must lie in [0,1)");
    if (!(cfg.adam_eps > 0)) throw ConfigError("adam_eps must be positive");
    if (cfg.K < 0) throw ConfigError("K must be nonnegative");
    if (!(cfg.sigma > 0)) throw ConfigError("sigma must be positive");
    if (!(cfg.sigma_cross > 0)) throw ConfigError("sigma_cross must be positive");
    if (cfg.lambda_cross < 0) throw ConfigError("lambda_cross must be nonnegative");

    if (cfg.sigma_blur_schedule.empty() || cfg.resolution_schedule.empty())
        throw ConfigError("schedules must have at least one entry");
    if (cfg.sigma_blur_schedule.front().step != 0 ||
        cfg.resolution_schedule.front().step != 0)
        throw ConfigError("schedules must start at step 0");
    for (std::size_t i = 1; i < cfg.sigma_blur_schedule.size(); ++i)
        if (cfg.sigma_blur_schedule[i].step <= cfg.sigma_blur_schedule[i - 1].step)
            throw ConfigError("sigma_blur schedule steps must be strictly increasing");
    for (std::size_t i = 1; i < cfg.resolution_schedule.size(); ++i)
        if (cfg.resolution_schedule[i].step <= cfg.resolution_schedule[i - 1].step)
            throw ConfigError("resolution schedule steps must be strictly increasing");
    for (const auto& s : cfg.sigma_blur_schedule)
        if (s.value < 0) throw ConfigError("sigma_blur must be nonnegative");
    for (const auto& r : cfg.resolution_schedule)
        if (r.width < 1) throw ConfigError("resolution must be at least 1");
}

GeneratorSpec preset(PresetName name) {
    constexpr double root3_over6 = 0.28867513459481287; // sqrt(3)/6
    constexpr double root3_over4 = 0.4330127018922193;  // sqrt(3)/4
    switch (name) {
    case PresetName::koch:
        return {{0.0, 0.0},
                {1.0, 0.0},
                {{1.0 / 3.0, 0.0},
                 {1.0 / 6.0, root3_over6},
                 {1.0 / 6.0, -root3_over6},
                 {1.0 / 3.0, 0.0}},
                {false, false, false, false}};
    case PresetName::arrowhead:
        // equilateral hat of three equal segments; the middle copy is
        // mirrored, which keeps every level of the expansion free of
        // self-intersections (nearest non-adjacent approach 1/64 at K=6)
        return {{0.0, 0.0},
                {1.0, 0.0},
                {{0.25, root3_over4}, {0.5, 0.0}, {0.25, -root3_over4}},
                {false, true, false}};
    }
    throw UnknownPreset("unknown preset");
}

PresetName preset_from_string(const std::string& name) {
    if (name == "koch") return PresetName::koch;
    if (name == "arrowhead") return PresetName::arrowhead;
    throw UnknownPreset("unknown preset: " + name);
}

GeneratorSpec preset(const std::string& name) {
    return preset(preset_from_string(name));
}

GeneratorSpec perturb(const GeneratorSpec& spec, double noise_std,
                      std::uint64_t seed) {
    if (noise_std < 0) throw InvalidSpec("noise_std must be nonnegative");
    GeneratorSpec out = spec;
    detail::SplitMix64 rng(seed);
    for (auto& o : out.offsets) {
        o.x += noise_std * detail::gaussian(rng);
        o.y += noise_std * detail::gaussian(rng);
    }
    return out;
}

RasterImage target_unit_square(const Viewport& vp) {
    check(vp);
    if (vp.xmin > 0 || vp.xmax < 1 || vp.ymin > 0 || vp.ymax < 1)
        throw ViewportTooSmall("viewport must contain the unit square");
    RasterImage img(vp);
    for (int row = 0; row < vp.height; ++row)
        for (int col = 0; col < vp.width; ++col) {
            const Vec2 w = vp.pixel_center_world(col, row);
            img.at(row, col) =
                (w.x >= 0 && w.x <= 1 && w.y >= 0 && w.y <= 1) ? 1.0 : 0.0;
        }
    return img;
}

namespace {

// value of the last schedule entry with entry.step <= step
template <class Entry>
const Entry& schedule_at(const std::vector<Entry>& sched, int step) {
    std::size_t pick = 0;
    for (std::size_t i = 0; i < sched.size(); ++i)
        if (sched[i].step <= step) pick = i;
    return sched[pick];
}

} // namespace

RunRecord optimize(const GeneratorSpec& init, const RasterImage& target,
                   const OptimConfig& cfg, const TargetProvider& provider,
                   const StepCallback& on_step) {
    validate(init);
    validate(cfg);
    if (target.width != cfg.resolution_schedule.front().width)
        throw ConfigError("target width does not match the first resolution entry");

    const auto t0 = std::chrono::steady_clock::now();

    RasterImage cur_target = target;
    int cur_width = target.width;
    // keep the initial aspect ratio across resolution changes
    const double aspect = static_cast<double>(target.height) / target.width;

    GeneratorSpec spec = init;
    ParamVector theta = flatten_offsets(spec);
    std::vector<double> m(theta.size(), 0.0), v(theta.size(), 0.0);

    RunRecord rec;
    rec.history.reserve(cfg.steps);

    for (int step = 0; step < cfg.steps; ++step) {
        const int want_width = schedule_at(cfg.resolution_schedule, step).width;
        if (want_width != cur_width) {
            const int want_height =
                static_cast<int>(std::lround(want_width * aspect));
            const Viewport vp =
                cur_target.viewport.with_size(want_width, want_height);
            cur_target = provider ? provider(vp)
                                  : resample(target, want_width, want_height);
            cur_width = want_width;
        }

        LossConfig lc;
        lc.K = cfg.K;
        lc.sigma = cfg.sigma;
        lc.sigma_blur = schedule_at(cfg.sigma_blur_schedule, step).value;
        lc.sigma_cross = cfg.sigma_cross;
        lc.lambda_cross = cfg.lambda_cross;
        lc.budget = cfg.budget;

        LossEvaluation eval;
        try {
            eval = evaluate_loss_with_gradient(spec, cur_target, lc);
        } catch (const NonFiniteGradient& e) {
            throw NonFiniteGradient("step " + std::to_string(step) + ": " +
                                    e.what());
        }
        rec.history.push_back(eval.report);

        const double b1 = cfg.adam_beta1, b2 = cfg.adam_beta2;
        const double bc1 = 1.0 - std::pow(b1, step + 1);
        const double bc2 = 1.0 - std::pow(b2, step + 1);
        for (std::size_t i = 0; i < theta.size(); ++i) {
            m[i] = b1 * m[i] + (1.0 - b1) * eval.grad[i];
            v[i] = b2 * v[i] + (1.0 - b2) * eval.grad[i] * eval.grad[i];
            const double mhat = m[i] / bc1;
            const double vhat = v[i] / bc2;
            theta[i] -= cfg.learning_rate * mhat / (std::sqrt(vhat) + cfg.adam_eps);
        }
        spec = with_offsets(spec, theta);

        if (on_step) on_step(step, spec, eval.report);
    }

    rec.final_spec = spec;
    rec.wall_time_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();
    return rec;
}

} // namespace difs
