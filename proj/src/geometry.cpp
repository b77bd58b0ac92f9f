#include "difs/geometry.hpp"

#include <algorithm>
#include <cmath>

namespace difs {

void validate(const GeneratorSpec& spec) {
    if (spec.offsets.size() < 2)
        throw InvalidSpec("generator needs at least two offsets (three control points)");
    if (spec.reflect.size() != spec.offsets.size())
        throw InvalidSpec("reflect flags must match offsets in length");
    auto finite = [](const Vec2& v) { return std::isfinite(v.x) && std::isfinite(v.y); };
    if (!finite(spec.e1) || !finite(spec.e2))
        throw InvalidSpec("endpoints must be finite");
    for (const auto& o : spec.offsets)
        if (!finite(o)) throw InvalidSpec("offsets must be finite");
    const double dx = spec.e2.x - spec.e1.x, dy = spec.e2.y - spec.e1.y;
    if (dx * dx + dy * dy < 1e-24)
        throw InvalidSpec("endpoints coincide");
}

std::vector<Vec2> control_points_from_offsets(const GeneratorSpec& spec) {
    validate(spec);
    return detail::control_points(spec.e1, spec.e2, spec.offsets);
}

Similarity similarity_from_segments(const Segment& src, const Segment& dst,
                                    bool reflect) {
    const auto t = detail::similarity_between(src.a, src.b, dst.a, dst.b, reflect);
    return {t.m00, t.m01, t.m10, t.m11, t.tx, t.ty, t.reflected};
}

Vec2 apply_similarity(const Similarity& t, const Vec2& p) {
    return {t.m00 * p.x + t.m01 * p.y + t.tx,
            t.m10 * p.x + t.m11 * p.y + t.ty};
}

Similarity inverse(const Similarity& t) {
    const double det = t.m00 * t.m11 - t.m01 * t.m10;
    if (std::abs(det) < 1e-24)
        throw DegenerateSegment("similarity is not invertible");
    const double i00 = t.m11 / det, i01 = -t.m01 / det;
    const double i10 = -t.m10 / det, i11 = t.m00 / det;
    return {i00, i01, i10, i11,
            -(i00 * t.tx + i01 * t.ty),
            -(i10 * t.tx + i11 * t.ty), t.reflected};
}

std::vector<Similarity> generator_transforms(const GeneratorSpec& spec) {
    validate(spec);
    const auto pts = detail::control_points(spec.e1, spec.e2, spec.offsets);
    const auto tr = detail::transforms_from_points(spec.e1, spec.e2, pts, spec.reflect);
    std::vector<Similarity> out;
    out.reserve(tr.size());
    for (const auto& t : tr)
        out.push_back({t.m00, t.m01, t.m10, t.m11, t.tx, t.ty, t.reflected});
    return out;
}

std::vector<Vec2> expand_chain_points(const GeneratorSpec& spec, int K,
                                      std::size_t budget) {
    validate(spec);
    if (K < 0) throw InvalidSpec("expansion depth must be nonnegative");
    return detail::expand_chain(spec.e1, spec.e2, spec.offsets, spec.reflect, K,
                                budget);
}

SegmentList expand_ifs(const GeneratorSpec& spec, int K, std::size_t budget) {
    const auto pts = expand_chain_points(spec, K, budget);
    SegmentList segs;
    segs.reserve(pts.size() - 1);
    for (std::size_t i = 0; i + 1 < pts.size(); ++i)
        segs.push_back({pts[i], pts[i + 1]});
    return segs;
}

double point_segment_distance(const Vec2& p, const Segment& s) {
    const double ex = s.b.x - s.a.x, ey = s.b.y - s.a.y;
    const double len2 = ex * ex + ey * ey;
    double t = 0.0;
    if (len2 > 0.0)
        t = std::clamp(((p.x - s.a.x) * ex + (p.y - s.a.y) * ey) / len2, 0.0, 1.0);
    const double rx = p.x - (s.a.x + t * ex), ry = p.y - (s.a.y + t * ey);
    return std::sqrt(rx * rx + ry * ry);
}

} // namespace difs
