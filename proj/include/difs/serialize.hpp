#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "difs/geometry.hpp"
#include "difs/loss.hpp"
#include "difs/optimize.hpp"

namespace difs {

// {"e1":[x,y],"e2":[x,y],"offsets":[[x,y],...],"reflect":[bool,...]}
std::string spec_to_json(const GeneratorSpec& spec);
GeneratorSpec spec_from_json(const std::string& text);

void save_spec(const std::filesystem::path& path, const GeneratorSpec& spec);
GeneratorSpec load_spec(const std::filesystem::path& path);

// step,bmse,crossing,total with full double precision
std::string loss_history_csv(const std::vector<LossReport>& history);
void save_loss_csv(const std::filesystem::path& path,
                   const std::vector<LossReport>& history);

// One optimization run as declared in a JSON config file.  Exactly one of
// preset/spec_path is set; paths are resolved against the config file's
// directory; unknown keys are rejected by name.
struct RunConfig {
    std::string preset_name;             // empty when spec_path is used
    std::filesystem::path spec_path;     // empty when preset_name is used
    double noise_std = 0.0;
    std::uint64_t seed = 0;
    std::filesystem::path output_dir = "out";
    double viewport_rect[4] = {-0.2, 1.2, -0.2, 1.2}; // xmin,xmax,ymin,ymax
    std::string target = "unit_square";  // builtin name or image path
    std::filesystem::path target_path;   // resolved when target is a file
    int checkpoint_every = 0;            // 0 disables checkpoints
    OptimConfig optim;
};

RunConfig parse_run_config(const std::string& json_text,
                           const std::filesystem::path& base_dir);
RunConfig load_run_config(const std::filesystem::path& config_path);

} // namespace difs
