#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "difs/diff.hpp"
#include "difs/image_io.hpp"
#include "difs/loss.hpp"
#include "difs/optimize.hpp"
#include "difs/render.hpp"
#include "difs/serialize.hpp"

namespace py = pybind11;
using namespace difs;

namespace {

std::vector<std::pair<double, double>> points_as_pairs(
    const std::vector<Vec2>& pts) {
    std::vector<std::pair<double, double>> out;
    out.reserve(pts.size());
    for (const auto& p : pts) out.emplace_back(p.x, p.y);
    return out;
}

OptimConfig config_from_kwargs(int steps, double learning_rate, int K,
                               double sigma,
                               std::vector<std::pair<int, double>> sigma_blur,
                               double sigma_cross, double lambda_cross,
                               std::vector<std::pair<int, int>> resolution,
                               std::uint64_t seed) {
    OptimConfig cfg;
    cfg.steps = steps;
    cfg.learning_rate = learning_rate;
    cfg.K = K;
    cfg.sigma = sigma;
    cfg.sigma_blur_schedule.clear();
    for (auto [s, v] : sigma_blur) cfg.sigma_blur_schedule.push_back({s, v});
    cfg.sigma_cross = sigma_cross;
    cfg.lambda_cross = lambda_cross;
    cfg.resolution_schedule.clear();
    for (auto [s, w] : resolution) cfg.resolution_schedule.push_back({s, w});
    cfg.rng_seed = seed;
    return cfg;
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "differentiable IFS fractal curves";

    py::register_exception<Error>(m, "DifsError");

    py::class_<Vec2>(m, "Vec2")
        .def(py::init<double, double>())
        .def_readwrite("x", &Vec2::x)
        .def_readwrite("y", &Vec2::y)
        .def("__repr__", [](const Vec2& v) {
            return "Vec2(" + std::to_string(v.x) + ", " + std::to_string(v.y) +
                   ")";
        });

    py::class_<Viewport>(m, "Viewport")
        .def(py::init([](double xmin, double xmax, double ymin, double ymax,
                         int width, int height) {
                 Viewport vp{xmin, xmax, ymin, ymax, width, height};
                 check(vp);
                 return vp;
             }),
             py::arg("xmin") = -0.2, py::arg("xmax") = 1.2,
             py::arg("ymin") = -0.2, py::arg("ymax") = 1.2,
             py::arg("width") = 64, py::arg("height") = 64)
        .def_readonly("xmin", &Viewport::xmin)
        .def_readonly("xmax", &Viewport::xmax)
        .def_readonly("ymin", &Viewport::ymin)
        .def_readonly("ymax", &Viewport::ymax)
        .def_readonly("width", &Viewport::width)
        .def_readonly("height", &Viewport::height);

    py::class_<RasterImage>(m, "Image")
        .def_readonly("width", &RasterImage::width)
        .def_readonly("height", &RasterImage::height)
        .def_readonly("values", &RasterImage::values)
        .def_readonly("viewport", &RasterImage::viewport)
        .def("at", [](const RasterImage& img, int row, int col) {
            if (row < 0 || row >= img.height || col < 0 || col >= img.width)
                throw py::index_error("pixel out of range");
            return img.at(row, col);
        });

    py::class_<GeneratorSpec>(m, "GeneratorSpec")
        .def(py::init([](std::pair<double, double> e1,
                         std::pair<double, double> e2,
                         std::vector<std::pair<double, double>> offsets,
                         std::vector<bool> reflect) {
                 GeneratorSpec s;
                 s.e1 = {e1.first, e1.second};
                 s.e2 = {e2.first, e2.second};
                 for (auto [x, y] : offsets) s.offsets.push_back({x, y});
                 s.reflect = std::move(reflect);
                 validate(s);
                 return s;
             }),
             py::arg("e1"), py::arg("e2"), py::arg("offsets"),
             py::arg("reflect"))
        .def_property_readonly(
            "e1",
            [](const GeneratorSpec& s) {
                return std::make_pair(s.e1.x, s.e1.y);
            })
        .def_property_readonly(
            "e2",
            [](const GeneratorSpec& s) {
                return std::make_pair(s.e2.x, s.e2.y);
            })
        .def_property_readonly("offsets",
                               [](const GeneratorSpec& s) {
                                   return points_as_pairs(s.offsets);
                               })
        .def_property_readonly(
            "reflect",
            [](const GeneratorSpec& s) {
                return std::vector<bool>(s.reflect.begin(), s.reflect.end());
            })
        .def("to_json", &spec_to_json);

    py::class_<LossReport>(m, "LossReport")
        .def_readonly("bmse", &LossReport::bmse)
        .def_readonly("crossing", &LossReport::crossing)
        .def_readonly("total", &LossReport::total)
        .def_readonly("lambda_cross", &LossReport::lambda_cross);

    m.def("preset", py::overload_cast<const std::string&>(&preset),
          py::arg("name"));
    m.def("spec_from_json", &spec_from_json, py::arg("text"));
    m.def("perturb", &perturb, py::arg("spec"), py::arg("noise_std"),
          py::arg("seed"));

    m.def(
        "control_points",
        [](const GeneratorSpec& s) {
            return points_as_pairs(control_points_from_offsets(s));
        },
        py::arg("spec"));

    m.def(
        "expand_points",
        [](const GeneratorSpec& s, int K, std::size_t budget) {
            return points_as_pairs(expand_chain_points(s, K, budget));
        },
        py::arg("spec"), py::arg("K"),
        py::arg("budget") = kDefaultSegmentBudget);

    m.def(
        "render",
        [](const GeneratorSpec& s, int K, const Viewport& vp, double sigma) {
            return render_segments(expand_ifs(s, K), vp, sigma);
        },
        py::arg("spec"), py::arg("K"), py::arg("viewport"),
        py::arg("sigma") = kDefaultSigma);

    m.def(
        "crossing_heatmap",
        [](const GeneratorSpec& s, int K, const Viewport& vp,
           double sigma_cross) {
            return crossing_heatmap(expand_ifs(s, K), vp, sigma_cross);
        },
        py::arg("spec"), py::arg("K"), py::arg("viewport"),
        py::arg("sigma_cross") = kDefaultSigmaCross);

    m.def("gaussian_blur", &gaussian_blur, py::arg("image"),
          py::arg("sigma_blur"));
    m.def("bmse", &bmse, py::arg("rendered"), py::arg("target"),
          py::arg("sigma_blur"));
    m.def("target_unit_square", &target_unit_square, py::arg("viewport"));

    m.def(
        "total_loss",
        [](const GeneratorSpec& s, const RasterImage& target, int K,
           double sigma, double sigma_blur, double sigma_cross,
           double lambda_cross) {
            LossConfig cfg;
            cfg.K = K;
            cfg.sigma = sigma;
            cfg.sigma_blur = sigma_blur;
            cfg.sigma_cross = sigma_cross;
            cfg.lambda_cross = lambda_cross;
            return total_loss(s, target, cfg);
        },
        py::arg("spec"), py::arg("target"), py::arg("K") = 4,
        py::arg("sigma") = kDefaultSigma, py::arg("sigma_blur") = 2.0,
        py::arg("sigma_cross") = kDefaultSigmaCross,
        py::arg("lambda_cross") = 1.0);

    m.def(
        "loss_gradient",
        [](const GeneratorSpec& s, const RasterImage& target, int K,
           double sigma, double sigma_blur, double sigma_cross,
           double lambda_cross) {
            LossConfig cfg;
            cfg.K = K;
            cfg.sigma = sigma;
            cfg.sigma_blur = sigma_blur;
            cfg.sigma_cross = sigma_cross;
            cfg.lambda_cross = lambda_cross;
            const LossEvaluation ev = evaluate_loss_with_gradient(s, target, cfg);
            return std::make_pair(ev.report, ev.grad);
        },
        py::arg("spec"), py::arg("target"), py::arg("K") = 4,
        py::arg("sigma") = kDefaultSigma, py::arg("sigma_blur") = 2.0,
        py::arg("sigma_cross") = kDefaultSigmaCross,
        py::arg("lambda_cross") = 1.0);

    m.def(
        "optimize",
        [](const GeneratorSpec& init, const RasterImage& target, int steps,
           double learning_rate, int K, double sigma,
           std::vector<std::pair<int, double>> sigma_blur, double sigma_cross,
           double lambda_cross, std::vector<std::pair<int, int>> resolution,
           std::uint64_t seed) {
            const OptimConfig cfg = config_from_kwargs(
                steps, learning_rate, K, sigma, std::move(sigma_blur),
                sigma_cross, lambda_cross, std::move(resolution), seed);
            const RunRecord rec = optimize(init, target, cfg);
            return py::make_tuple(rec.final_spec, rec.history,
                                  rec.wall_time_seconds);
        },
        py::arg("init"), py::arg("target"), py::arg("steps") = 200,
        py::arg("learning_rate") = 0.02, py::arg("K") = 4,
        py::arg("sigma") = kDefaultSigma,
        py::arg("sigma_blur") =
            std::vector<std::pair<int, double>>{{0, 2.0}, {140, 1.0}},
        py::arg("sigma_cross") = kDefaultSigmaCross,
        py::arg("lambda_cross") = 1.0,
        py::arg("resolution") =
            std::vector<std::pair<int, int>>{{0, 64}, {140, 128}},
        py::arg("seed") = 0);

    m.def("write_pgm", [](const std::string& path,
                          const RasterImage& img) { write_pgm(path, img); });
    m.def("write_png", [](const std::string& path,
                          const RasterImage& img) { write_png(path, img); });
    m.def("read_pgm",
          [](const std::string& path) { return read_pgm(path); });
}
