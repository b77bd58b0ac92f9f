#include "difs/serialize.hpp"

#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace difs {

using nlohmann::json;

namespace {

json vec_to_json(const Vec2& v) { return json::array({v.x, v.y}); }

Vec2 vec_from_json(const json& j, const char* what) {
    if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
        throw ConfigError(std::string(what) + " must be a 2-array of numbers");
    return {j[0].get<double>(), j[1].get<double>()};
}

} // namespace

std::string spec_to_json(const GeneratorSpec& spec) {
    json j;
    j["e1"] = vec_to_json(spec.e1);
    j["e2"] = vec_to_json(spec.e2);
    j["offsets"] = json::array();
    for (const auto& o : spec.offsets) j["offsets"].push_back(vec_to_json(o));
    j["reflect"] = json::array();
    for (bool r : spec.reflect) j["reflect"].push_back(r);
    return j.dump(2) + "\n";
}

GeneratorSpec spec_from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("spec is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) throw ConfigError("spec must be a JSON object");
    for (const auto& [key, _] : j.items())
        if (key != "e1" && key != "e2" && key != "offsets" && key != "reflect")
            throw ConfigError("unknown key in spec: " + key);
    for (const char* key : {"e1", "e2", "offsets", "reflect"})
        if (!j.contains(key))
            throw ConfigError(std::string("spec is missing key: ") + key);

    GeneratorSpec spec;
    spec.e1 = vec_from_json(j["e1"], "e1");
    spec.e2 = vec_from_json(j["e2"], "e2");
    if (!j["offsets"].is_array() || !j["reflect"].is_array())
        throw ConfigError("offsets and reflect must be arrays");
    for (const auto& o : j["offsets"])
        spec.offsets.push_back(vec_from_json(o, "offsets entry"));
    for (const auto& r : j["reflect"]) {
        if (!r.is_boolean()) throw ConfigError("reflect entries must be booleans");
        spec.reflect.push_back(r.get<bool>());
    }
    validate(spec);
    return spec;
}

void save_spec(const std::filesystem::path& path, const GeneratorSpec& spec) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write " + path.string());
    out << spec_to_json(spec);
}

GeneratorSpec load_spec(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot read " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return spec_from_json(ss.str());
}

std::string loss_history_csv(const std::vector<LossReport>& history) {
    std::string out = "step,bmse,crossing,total\n";
    char line[160];
    for (std::size_t i = 0; i < history.size(); ++i) {
        std::snprintf(line, sizeof(line), "%zu,%.17g,%.17g,%.17g\n", i,
                      history[i].bmse, history[i].crossing, history[i].total);
        out += line;
    }
    return out;
}

void save_loss_csv(const std::filesystem::path& path,
                   const std::vector<LossReport>& history) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write " + path.string());
    out << loss_history_csv(history);
}

namespace {

const std::set<std::string> kRunConfigKeys = {
    "preset",      "spec",        "noise_std",   "seed",
    "output_dir",  "viewport",    "target",      "steps",
    "learning_rate", "adam_beta1", "adam_beta2", "adam_eps",
    "K",           "sigma",       "sigma_blur",  "sigma_cross",
    "lambda_cross", "resolution", "checkpoint_every", "budget"};

template <class T>
T get_or(const json& j, const char* key, T fallback) {
    if (!j.contains(key)) return fallback;
    try {
        return j.at(key).get<T>();
    } catch (const json::exception&) {
        throw ConfigError(std::string("bad value for key: ") + key);
    }
}

} // namespace

RunConfig parse_run_config(const std::string& json_text,
                           const std::filesystem::path& base_dir) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) throw ConfigError("config must be a JSON object");
    for (const auto& [key, _] : j.items())
        if (!kRunConfigKeys.count(key))
            throw ConfigError("unknown key in config: " + key);

    RunConfig rc;
    const bool has_preset = j.contains("preset");
    const bool has_spec = j.contains("spec");
    if (has_preset == has_spec)
        throw ConfigError("config needs exactly one of 'preset' or 'spec'");
    if (has_preset) {
        rc.preset_name = j.at("preset").get<std::string>();
        preset_from_string(rc.preset_name); // name check up front
    } else {
        rc.spec_path = base_dir / j.at("spec").get<std::string>();
    }

    rc.noise_std = get_or(j, "noise_std", 0.0);
    rc.seed = get_or<std::uint64_t>(j, "seed", 0);
    rc.output_dir = base_dir / get_or<std::string>(j, "output_dir", "out");
    rc.checkpoint_every = get_or(j, "checkpoint_every", 0);
    if (rc.checkpoint_every < 0)
        throw ConfigError("checkpoint_every must be nonnegative");

    if (j.contains("viewport")) {
        const auto& v = j.at("viewport");
        if (!v.is_array() || v.size() != 4)
            throw ConfigError("viewport must be [xmin, xmax, ymin, ymax]");
        for (int i = 0; i < 4; ++i) rc.viewport_rect[i] = v[i].get<double>();
    }

    rc.target = get_or<std::string>(j, "target", "unit_square");
    if (rc.target != "unit_square") rc.target_path = base_dir / rc.target;

    OptimConfig& oc = rc.optim;
    oc.steps = get_or(j, "steps", 200);
    oc.learning_rate = get_or(j, "learning_rate", 0.02);
    oc.adam_beta1 = get_or(j, "adam_beta1", 0.9);
    oc.adam_beta2 = get_or(j, "adam_beta2", 0.999);
    oc.adam_eps = get_or(j, "adam_eps", 1e-8);
    oc.K = get_or(j, "K", 4);
    oc.sigma = get_or(j, "sigma", kDefaultSigma);
    oc.sigma_cross = get_or(j, "sigma_cross", kDefaultSigmaCross);
    oc.lambda_cross = get_or(j, "lambda_cross", 1.0);
    oc.rng_seed = rc.seed;
    oc.budget = get_or<std::size_t>(j, "budget", kDefaultSegmentBudget);

    // defaults move coarse->fine at 70% of the run
    const int knee = static_cast<int>(0.7 * oc.steps);
    if (j.contains("sigma_blur")) {
        oc.sigma_blur_schedule.clear();
        for (const auto& e : j.at("sigma_blur")) {
            if (!e.is_array() || e.size() != 2)
                throw ConfigError("sigma_blur entries must be [step, value]");
            oc.sigma_blur_schedule.push_back(
                {e[0].get<int>(), e[1].get<double>()});
        }
    } else {
        oc.sigma_blur_schedule = {{0, 2.0}};
        if (knee > 0) oc.sigma_blur_schedule.push_back({knee, 1.0});
    }
    if (j.contains("resolution")) {
        oc.resolution_schedule.clear();
        for (const auto& e : j.at("resolution")) {
            if (!e.is_array() || e.size() != 2)
                throw ConfigError("resolution entries must be [step, width]");
            oc.resolution_schedule.push_back({e[0].get<int>(), e[1].get<int>()});
        }
    } else {
        oc.resolution_schedule = {{0, 64}};
        if (knee > 0) oc.resolution_schedule.push_back({knee, 128});
    }
    validate(oc);
    return rc;
}

RunConfig load_run_config(const std::filesystem::path& config_path) {
    std::ifstream in(config_path, std::ios::binary);
    if (!in) throw ConfigError("cannot read " + config_path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_run_config(ss.str(), config_path.parent_path());
}

} // namespace difs
