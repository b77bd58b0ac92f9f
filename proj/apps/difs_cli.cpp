// difs — differentiable IFS fractal curves.
//
// Subcommands: render, optimize, gradcheck, presets.  Exit codes: 0 ok,
// 2 invalid spec/config, 3 segment budget exceeded, 4 non-finite gradient,
// 5 gradient check failed.  Diagnostics go to stderr, results to stdout.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "difs/diff.hpp"
#include "difs/image_io.hpp"
#include "difs/optimize.hpp"
#include "difs/render.hpp"
#include "difs/serialize.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kExitInvalid = 2;
constexpr int kExitBudget = 3;
constexpr int kExitNonFinite = 4;
constexpr int kExitGradMismatch = 5;

difs::GeneratorSpec spec_from_cli(const std::string& preset_name,
                                  const std::string& spec_path) {
    if (!spec_path.empty()) return difs::load_spec(spec_path);
    return difs::preset(preset_name);
}

difs::Viewport viewport_from_rect(const std::vector<double>& rect, int width,
                                  int height) {
    difs::Viewport vp;
    if (!rect.empty()) {
        vp.xmin = rect[0];
        vp.xmax = rect[1];
        vp.ymin = rect[2];
        vp.ymax = rect[3];
    }
    vp.width = width;
    vp.height = height;
    difs::check(vp);
    return vp;
}

int run_render(const std::string& preset_name, const std::string& spec_path,
               int depth, int width, int deepen, double sigma,
               const std::vector<double>& rect, const std::string& out_path) {
    const difs::GeneratorSpec spec = spec_from_cli(preset_name, spec_path);
    const difs::Viewport vp = viewport_from_rect(rect, width, width);

    const auto t0 = std::chrono::steady_clock::now();
    const difs::SegmentList segs = difs::expand_ifs(spec, depth);
    difs::RasterImage img = difs::render_segments(segs, vp, sigma);
    if (deepen > 0)
        img = difs::deepen_image(img, difs::generator_transforms(spec), deepen);
    const double dt =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();

    difs::write_image(out_path, img);
    std::printf("segments=%zu render_seconds=%.3f\n", segs.size(), dt);
    return 0;
}

int run_optimize(const std::string& config_path) {
    const difs::RunConfig rc = difs::load_run_config(config_path);

    difs::GeneratorSpec init = rc.preset_name.empty()
                                   ? difs::load_spec(rc.spec_path)
                                   : difs::preset(rc.preset_name);
    init = difs::perturb(init, rc.noise_std, rc.seed);

    difs::Viewport vp;
    vp.xmin = rc.viewport_rect[0];
    vp.xmax = rc.viewport_rect[1];
    vp.ymin = rc.viewport_rect[2];
    vp.ymax = rc.viewport_rect[3];
    vp.width = rc.optim.resolution_schedule.front().width;
    vp.height = vp.width;
    difs::check(vp);

    difs::RasterImage file_target; // original resolution, when a file is used
    difs::TargetProvider provider;
    if (rc.target == "unit_square") {
        provider = [](const difs::Viewport& v) {
            return difs::target_unit_square(v);
        };
    } else {
        file_target = difs::read_pgm(rc.target_path);
        // the raster is resampled from the original file at every
        // resolution change; world rect comes from the config viewport
        provider = [file_target](const difs::Viewport& v) {
            difs::RasterImage t = difs::resample(file_target, v.width, v.height);
            t.viewport = v;
            return t;
        };
    }
    const difs::RasterImage target = provider(vp);

    fs::create_directories(rc.output_dir);
    difs::StepCallback on_step;
    if (rc.checkpoint_every > 0) {
        const fs::path dir = rc.output_dir;
        const int every = rc.checkpoint_every;
        on_step = [dir, every](int step, const difs::GeneratorSpec& s,
                               const difs::LossReport&) {
            if ((step + 1) % every == 0)
                difs::save_spec(
                    dir / ("checkpoint_" + std::to_string(step + 1) + ".json"),
                    s);
        };
    }

    const difs::RunRecord rec =
        difs::optimize(init, target, rc.optim, provider, on_step);

    difs::save_spec(rc.output_dir / "final.json", rec.final_spec);
    difs::save_loss_csv(rc.output_dir / "loss.csv", rec.history);
    {
        const difs::SegmentList segs =
            difs::expand_ifs(rec.final_spec, rc.optim.K, rc.optim.budget);
        const difs::Viewport final_vp = target.viewport;
        difs::write_png(rc.output_dir / "final.png",
                        difs::render_segments(segs, final_vp, rc.optim.sigma));
    }

    const double initial = rec.history.empty() ? 0.0 : rec.history.front().total;
    const double final_total =
        rec.history.empty() ? 0.0 : rec.history.back().total;
    std::printf("final_total=%.17g initial_total=%.17g\n", final_total, initial);
    return 0;
}

int run_gradcheck(const std::string& preset_name, const std::string& spec_path,
                  std::uint64_t seed, double noise_std, int width, int depth,
                  double h, double tolerance, bool corrupt) {
    difs::GeneratorSpec spec = spec_from_cli(preset_name, spec_path);
    spec = difs::perturb(spec, noise_std, seed);

    difs::Viewport vp;
    vp.width = width;
    vp.height = width;
    const difs::RasterImage target = difs::target_unit_square(vp);

    difs::LossConfig lc;
    lc.K = depth;

    const difs::Objective objective =
        difs::make_total_loss_objective(spec, target, lc);
    const difs::ParamVector params = difs::flatten_offsets(spec);

    auto [loss, grad] = difs::evaluate_with_gradient(objective, params);
    if (corrupt) // negative control for tests
        for (double& g : grad) g += 0.05 * (std::abs(g) + 1.0);
    const difs::GradientVector fd =
        difs::finite_difference_gradient(objective, params, h);

    const double err = difs::gradient_mismatch(grad, fd);
    std::printf("loss=%.17g max_rel_error=%.3e tolerance=%.1e\n", loss, err,
                tolerance);
    return err <= tolerance ? 0 : kExitGradMismatch;
}

int run_presets() {
    for (const char* name : {"koch", "arrowhead"}) {
        const difs::GeneratorSpec s = difs::preset(name);
        std::printf("%s: %zu segments, reflect [", name, s.offsets.size());
        for (std::size_t i = 0; i < s.reflect.size(); ++i)
            std::printf("%s%s", i ? " " : "", s.reflect[i] ? "true" : "false");
        std::printf("]\n");
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"differentiable IFS fractal curves"};
    app.require_subcommand(1);

    // render
    auto* render = app.add_subcommand("render", "render a generator to an image");
    std::string r_preset = "koch", r_spec, r_out = "out.png";
    int r_depth = 4, r_width = 256, r_deepen = 0;
    double r_sigma = difs::kDefaultSigma;
    std::vector<double> r_rect;
    render->add_option("--preset", r_preset, "builtin generator (koch, arrowhead)");
    render->add_option("--spec", r_spec, "generator JSON file (overrides --preset)");
    render->add_option("--depth", r_depth, "recursion depth K")
        ->check(CLI::NonNegativeNumber);
    render->add_option("--width", r_width, "image width = height in px")
        ->check(CLI::Range(16, 8192));
    render->add_option("--deepen", r_deepen,
                       "extra image-space recursion iterations");
    render->add_option("--sigma", r_sigma, "line radius in px");
    render->add_option("--viewport", r_rect, "xmin xmax ymin ymax")
        ->expected(4);
    render->add_option("-o,--output", r_out, "output image (.pgm or .png)");

    // optimize
    auto* optimize = app.add_subcommand("optimize", "fit a generator to a target");
    std::string o_config;
    optimize->add_option("config", o_config, "run config JSON")
        ->required()
        ->check(CLI::ExistingFile);

    // gradcheck
    auto* gradcheck =
        app.add_subcommand("gradcheck", "compare gradient against finite differences");
    std::string g_preset = "koch", g_spec;
    std::uint64_t g_seed = 0;
    double g_noise = 0.05, g_h = 1e-4, g_tol = 1e-3;
    int g_width = 32, g_depth = 2;
    bool g_corrupt = false;
    gradcheck->add_option("--preset", g_preset, "builtin generator");
    gradcheck->add_option("--spec", g_spec, "generator JSON file");
    gradcheck->add_option("--seed", g_seed, "perturbation seed");
    gradcheck->add_option("--noise-std", g_noise, "perturbation noise std");
    gradcheck->add_option("--width", g_width, "image width in px");
    gradcheck->add_option("--depth", g_depth, "recursion depth K");
    gradcheck->add_option("--step", g_h, "finite-difference step");
    gradcheck->add_option("--tolerance", g_tol, "max relative error allowed");
    gradcheck->add_flag("--corrupt-gradient", g_corrupt,
                        "test hook: corrupt the gradient to force a failure");

    auto* presets = app.add_subcommand("presets", "list builtin generators");

    CLI11_PARSE(app, argc, argv);

    try {
        if (render->parsed())
            return run_render(r_preset, r_spec, r_depth, r_width, r_deepen,
                              r_sigma, r_rect, r_out);
        if (optimize->parsed()) return run_optimize(o_config);
        if (gradcheck->parsed())
            return run_gradcheck(g_preset, g_spec, g_seed, g_noise, g_width,
                                 g_depth, g_h, g_tol, g_corrupt);
        if (presets->parsed()) return run_presets();
    } catch (const difs::BudgetExceeded& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitBudget;
    } catch (const difs::NonFiniteGradient& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNonFinite;
    } catch (const difs::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInvalid;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInvalid;
    }
    return 0;
}
