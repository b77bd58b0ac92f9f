#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "difs/diff.hpp"
#include "difs/geometry.hpp"
#include "difs/loss.hpp"
#include "difs/raster.hpp"

namespace difs {

struct SchedulePoint {
    int step = 0;
    double value = 0.0;
};
struct ResolutionPoint {
    int step = 0;
    int width = 0;
};

struct OptimConfig {
    int steps = 200;
    double learning_rate = 0.02;
    double adam_beta1 = 0.9;
    double adam_beta2 = 0.999;
    double adam_eps = 1e-8;
    int K = 4;
    double sigma = kDefaultSigma;
    std::vector<SchedulePoint> sigma_blur_schedule{{0, 2.0}, {140, 1.0}};
    double sigma_cross = kDefaultSigmaCross;
    double lambda_cross = 1.0;
    std::vector<ResolutionPoint> resolution_schedule{{0, 64}, {140, 128}};
    std::uint64_t rng_seed = 0;
    std::size_t budget = kDefaultSegmentBudget;
};

void validate(const OptimConfig& cfg);

struct RunRecord {
    std::vector<LossReport> history; // one entry per step
    GeneratorSpec final_spec;
    double wall_time_seconds = 0.0;
};

enum class PresetName { koch, arrowhead };

PresetName preset_from_string(const std::string& name);
GeneratorSpec preset(PresetName name);
GeneratorSpec preset(const std::string& name);

// i.i.d. Gaussian noise on every offset component; endpoints and reflect
// flags untouched.  Self-contained generator so streams are identical on
// every platform.
GeneratorSpec perturb(const GeneratorSpec& spec, double noise_std,
                      std::uint64_t seed);

// 1 where the pixel center lies in [0,1]^2, else 0
RasterImage target_unit_square(const Viewport& vp);

// Re-derives the target when the resolution schedule changes the raster
// size mid-run.  Defaults to bilinear resampling of the initial target.
using TargetProvider = std::function<RasterImage(const Viewport&)>;

// Called after each completed step (checkpointing, progress).
using StepCallback =
    std::function<void(int step, const GeneratorSpec&, const LossReport&)>;

// Adam on the flattened offsets; sigma_blur / resolution schedules applied
// at their step thresholds.  Deterministic for a fixed config.
RunRecord optimize(const GeneratorSpec& init, const RasterImage& target,
                   const OptimConfig& cfg, const TargetProvider& provider = {},
                   const StepCallback& on_step = {});

namespace detail {

// splitmix64: tiny, seedable, identical everywhere
struct SplitMix64 {
    std::uint64_t state;
    explicit SplitMix64(std::uint64_t seed) : state(seed) {}
    std::uint64_t next() {
        std::uint64_t z = (state += 0x9E3779B97f4A7C15ull);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }
    // in (0,1), never exactly 0 or 1
    double uniform() {
        return (static_cast<double>(next() >> 11) + 0.5) * 0x1.0p-53;
    }
};

// Box-Muller off the generator above; draws two uniforms per call
double gaussian(SplitMix64& rng);

} // namespace detail

} // namespace difs
