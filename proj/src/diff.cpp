#include "difs/diff.hpp"

#include <cmath>

namespace difs {

ParamVector flatten_offsets(const GeneratorSpec& spec) {
    ParamVector out;
    out.reserve(spec.offsets.size() * 2);
    for (const auto& o : spec.offsets) {
        out.push_back(o.x);
        out.push_back(o.y);
    }
    return out;
}

GeneratorSpec with_offsets(const GeneratorSpec& spec, const ParamVector& params) {
    if (params.size() != spec.offsets.size() * 2)
        throw InvalidSpec("parameter vector length does not match the offsets");
    GeneratorSpec out = spec;
    for (std::size_t i = 0; i < out.offsets.size(); ++i)
        out.offsets[i] = Vec2{params[2 * i], params[2 * i + 1]};
    return out;
}

std::pair<double, GradientVector> evaluate_with_gradient(
    const Objective& objective, const ParamVector& params) {
    ad::Tape tape;
    std::vector<ad::Var> vars;
    vars.reserve(params.size());
    for (double p : params) vars.push_back(tape.var(p));

    const ad::Var loss = objective(tape, vars);
    const std::vector<double> adj = tape.backward(loss.idx);

    GradientVector grad(params.size());
    for (std::size_t i = 0; i < params.size(); ++i) {
        grad[i] = adj[vars[i].idx];
        if (!std::isfinite(grad[i]))
            throw NonFiniteGradient("gradient entry " + std::to_string(i) +
                                    " is not finite");
    }
    return {loss.v, std::move(grad)};
}

GradientVector finite_difference_gradient(const Objective& objective,
                                          const ParamVector& params, double h) {
    if (!(h > 0.0)) throw InvalidSpec("finite-difference step must be positive");
    auto value_at = [&](const ParamVector& p) {
        ad::Tape tape;
        std::vector<ad::Var> vars;
        vars.reserve(p.size());
        for (double x : p) vars.push_back(tape.var(x));
        return objective(tape, vars).v;
    };
    GradientVector grad(params.size());
    ParamVector p = params;
    for (std::size_t k = 0; k < params.size(); ++k) {
        p[k] = params[k] + h;
        const double fp = value_at(p);
        p[k] = params[k] - h;
        const double fm = value_at(p);
        p[k] = params[k];
        grad[k] = (fp - fm) / (2.0 * h);
    }
    return grad;
}

std::pair<ad::Var, ad::Var> loss_nodes_on_tape(
    ad::Tape& tape, const std::vector<TVec2<ad::Var>>& chain,
    const RasterImage& target, double sigma, double sigma_blur,
    double sigma_cross) {
    std::vector<Vec2> pts(chain.size());
    for (std::size_t k = 0; k < chain.size(); ++k)
        pts[k] = Vec2{chain[k].x.v, chain[k].y.v};

    const LossTerms terms =
        loss_terms_with_gradient(pts, target, sigma, sigma_blur, sigma_cross);

    std::vector<ad::Tape::Edge> ea, eb;
    ea.reserve(chain.size() * 2);
    eb.reserve(chain.size() * 2);
    for (std::size_t k = 0; k < chain.size(); ++k) {
        ea.push_back({chain[k].x.idx, terms.grad_bmse[k].x});
        ea.push_back({chain[k].y.idx, terms.grad_bmse[k].y});
        eb.push_back({chain[k].x.idx, terms.grad_crossing[k].x});
        eb.push_back({chain[k].y.idx, terms.grad_crossing[k].y});
    }
    const int32_t bn = tape.node_n(terms.bmse, ea);
    const int32_t cn = tape.node_n(terms.crossing, eb);
    return {ad::Var(tape, bn, terms.bmse), ad::Var(tape, cn, terms.crossing)};
}

namespace {

std::vector<TVec2<ad::Var>> chain_on_tape(ad::Tape& tape,
                                          const GeneratorSpec& spec,
                                          std::span<const ad::Var> params,
                                          int K, std::size_t budget) {
    if (params.size() != spec.offsets.size() * 2)
        throw InvalidSpec("parameter vector length does not match the offsets");
    const TVec2<ad::Var> e1{tape.var(spec.e1.x), tape.var(spec.e1.y)};
    const TVec2<ad::Var> e2{tape.var(spec.e2.x), tape.var(spec.e2.y)};
    std::vector<TVec2<ad::Var>> offsets(spec.offsets.size());
    for (std::size_t i = 0; i < offsets.size(); ++i)
        offsets[i] = {params[2 * i], params[2 * i + 1]};
    return detail::expand_chain(e1, e2, offsets, spec.reflect, K, budget);
}

} // namespace

Objective make_total_loss_objective(const GeneratorSpec& spec,
                                    const RasterImage& target,
                                    const LossConfig& cfg) {
    validate(spec);
    return [spec, target, cfg](ad::Tape& tape,
                               std::span<const ad::Var> params) {
        const auto chain = chain_on_tape(tape, spec, params, cfg.K, cfg.budget);
        auto [b, c] = loss_nodes_on_tape(tape, chain, target, cfg.sigma,
                                         cfg.sigma_blur, cfg.sigma_cross);
        return b + cfg.lambda_cross * c;
    };
}

LossEvaluation evaluate_loss_with_gradient(const GeneratorSpec& spec,
                                           const RasterImage& target,
                                           const LossConfig& cfg) {
    validate(spec);
    ad::Tape tape;
    std::vector<ad::Var> vars;
    const ParamVector params = flatten_offsets(spec);
    vars.reserve(params.size());
    for (double p : params) vars.push_back(tape.var(p));

    const auto chain = chain_on_tape(tape, spec, vars, cfg.K, cfg.budget);
    auto [b, c] = loss_nodes_on_tape(tape, chain, target, cfg.sigma,
                                     cfg.sigma_blur, cfg.sigma_cross);
    const ad::Var total = b + cfg.lambda_cross * c;
    const std::vector<double> adj = tape.backward(total.idx);

    LossEvaluation out;
    out.report.bmse = b.v;
    out.report.crossing = c.v;
    out.report.lambda_cross = cfg.lambda_cross;
    out.report.total = total.v;
    out.grad.resize(params.size());
    for (std::size_t i = 0; i < params.size(); ++i) {
        out.grad[i] = adj[vars[i].idx];
        if (!std::isfinite(out.grad[i]))
            throw NonFiniteGradient("gradient entry " + std::to_string(i) +
                                    " is not finite");
    }
    return out;
}

double gradient_mismatch(const GradientVector& g, const GradientVector& ref,
                         double floor) {
    if (g.size() != ref.size()) throw ShapeMismatch("gradient lengths differ");
    double worst = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        const double err =
            std::abs(g[i] - ref[i]) / std::max(std::abs(ref[i]), floor);
        worst = std::max(worst, err);
    }
    return worst;
}

} // namespace difs
