#pragma once
// Points, segments, similarity transforms and IFS chain expansion.
//
// The expansion core is templated over the scalar type so the same code
// runs on plain doubles and on autodiff variables (difs::ad::Var).  Only
// +,-,*,/ are required of the scalar.

#include <cmath>
#include <cstdint>
#include <string>
#include <type_traits>
#include <vector>

#include "difs/error.hpp"

namespace difs {

template <class T>
struct TVec2 {
    T x{};
    T y{};
};

using Vec2 = TVec2<double>;

struct Segment {
    Vec2 a;
    Vec2 b;
};

using SegmentList = std::vector<Segment>;

// rotation+scale (+optional reflection) and translation; column-vector
// convention: T(p) = M p + t
struct Similarity {
    double m00 = 1, m01 = 0;
    double m10 = 0, m11 = 1;
    double tx = 0, ty = 0;
    bool reflected = false;
};

// Fixed endpoints, free offset vectors (the optimization parameters) and
// per-segment reflection flags.  Control points are the cumulative sum of
// the offsets re-anchored so p_1 = e1 and p_n = e2 exactly.
struct GeneratorSpec {
    Vec2 e1{0.0, 0.0};
    Vec2 e2{1.0, 0.0};
    std::vector<Vec2> offsets;
    std::vector<bool> reflect;
};

inline constexpr std::size_t kDefaultSegmentBudget = 65536;

namespace detail {

inline double scalar_value(double x) { return x; }
template <class T>
double scalar_value(const T& x) { return x.v; }

template <class T>
struct TSimilarity {
    T m00, m01, m10, m11, tx, ty;
    bool reflected;
};

template <class T>
TVec2<T> apply(const TSimilarity<T>& s, const TVec2<T>& p) {
    return {s.m00 * p.x + s.m01 * p.y + s.tx,
            s.m10 * p.x + s.m11 * p.y + s.ty};
}

// The unique similarity with T(sa)=da, T(sb)=db.  reflect=false gives the
// orientation-preserving one (complex w·z+t); reflect=true the
// orientation-reversing one (w·conj(z)+t).  Endpoint images are the same
// either way; the flag selects which of the two candidates is returned.
template <class T>
TSimilarity<T> similarity_between(const TVec2<T>& sa, const TVec2<T>& sb,
                                  const TVec2<T>& da, const TVec2<T>& db,
                                  bool reflect) {
    const T ex = sb.x - sa.x, ey = sb.y - sa.y;
    const T dx = db.x - da.x, dy = db.y - da.y;
    const T n = ex * ex + ey * ey;
    if (scalar_value(n) < 1e-24)
        throw DegenerateSegment("similarity source segment shorter than 1e-12");
    if (scalar_value(dx * dx + dy * dy) < 1e-24)
        throw DegenerateSegment("similarity destination segment shorter than 1e-12");
    if (!reflect) {
        // w = D / E
        const T wx = (dx * ex + dy * ey) / n;
        const T wy = (dy * ex - dx * ey) / n;
        return {wx, 0.0 - wy, wy, wx,
                da.x - (wx * sa.x - wy * sa.y),
                da.y - (wy * sa.x + wx * sa.y), false};
    }
    // w = D / conj(E); T(z) = w·conj(z) + t
    const T wx = (dx * ex - dy * ey) / n;
    const T wy = (dx * ey + dy * ex) / n;
    return {wx, wy, wy, 0.0 - wx,
            da.x - (wx * sa.x + wy * sa.y),
            da.y - (wy * sa.x - wx * sa.y), true};
}

// cumulative sum of offsets, then the similarity taking (q_1,q_n) to
// (e1,e2) re-anchors every point; ends are snapped exactly (their
// dependence on the offsets is identically zero after normalization)
template <class T>
std::vector<TVec2<T>> control_points(const TVec2<T>& e1, const TVec2<T>& e2,
                                     const std::vector<TVec2<T>>& offsets) {
    const std::size_t n = offsets.size() + 1;
    std::vector<TVec2<T>> q(n);
    q[0] = e1;
    for (std::size_t i = 1; i < n; ++i)
        q[i] = TVec2<T>{q[i - 1].x + offsets[i - 1].x,
                        q[i - 1].y + offsets[i - 1].y};

    const T sx = q[n - 1].x - q[0].x, sy = q[n - 1].y - q[0].y;
    const T s2 = sx * sx + sy * sy;
    if (scalar_value(s2) < 1e-24)
        throw ZeroSpan("offsets sum to (nearly) zero; normalization undefined");
    const T gx = e2.x - e1.x, gy = e2.y - e1.y;
    // W = (e2-e1) / (q_n-q_1)
    const T wx = (gx * sx + gy * sy) / s2;
    const T wy = (gy * sx - gx * sy) / s2;

    std::vector<TVec2<T>> p(n);
    p[0] = e1;
    for (std::size_t i = 1; i + 1 < n; ++i) {
        const T rx = q[i].x - q[0].x, ry = q[i].y - q[0].y;
        p[i] = TVec2<T>{e1.x + (wx * rx - wy * ry), e1.y + (wy * rx + wx * ry)};
    }
    p[n - 1] = e2;
    return p;
}

template <class T>
std::vector<TSimilarity<T>> transforms_from_points(
    const TVec2<T>& e1, const TVec2<T>& e2, const std::vector<TVec2<T>>& pts,
    const std::vector<bool>& reflect) {
    std::vector<TSimilarity<T>> out;
    out.reserve(pts.size() - 1);
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
        const double dx = scalar_value(pts[i + 1].x) - scalar_value(pts[i].x);
        const double dy = scalar_value(pts[i + 1].y) - scalar_value(pts[i].y);
        if (dx * dx + dy * dy < 1e-24)
            throw DegenerateSegment("consecutive control points coincide (index " +
                                    std::to_string(i) + ")");
        out.push_back(similarity_between(e1, e2, pts[i], pts[i + 1], reflect[i]));
    }
    return out;
}

inline std::size_t chain_segment_count(std::size_t branches, int K,
                                       std::size_t budget) {
    std::size_t count = 1;
    for (int k = 0; k < K; ++k) {
        if (count > budget / branches)
            throw BudgetExceeded("expansion would exceed the segment budget");
        count *= branches;
    }
    if (count > budget)
        throw BudgetExceeded("expansion would exceed the segment budget");
    return count;
}

// K levels of "replace every segment by the generator image of the whole
// chain".  The chain is kept as a point list so consecutive segments share
// endpoints exactly.  With T_i(e1)=p_i and T_i(e2)=p_{i+1} for every flag,
// each transformed sub-chain already runs forward from p_i to p_{i+1}, so
// sub-chains are concatenated in order with no reversal.
template <class T>
std::vector<TVec2<T>> expand_chain(const TVec2<T>& e1, const TVec2<T>& e2,
                                   const std::vector<TVec2<T>>& offsets,
                                   const std::vector<bool>& reflect, int K,
                                   std::size_t budget) {
    chain_segment_count(offsets.size(), K, budget);
    const auto pts = control_points(e1, e2, offsets);
    const auto tr = transforms_from_points(e1, e2, pts, reflect);

    std::vector<TVec2<T>> chain{e1, e2};
    for (int level = 0; level < K; ++level) {
        std::vector<TVec2<T>> next;
        next.reserve((chain.size() - 1) * tr.size() + 1);
        next.push_back(apply(tr[0], chain.front()));
        for (const auto& t : tr)
            for (std::size_t k = 1; k < chain.size(); ++k)
                next.push_back(apply(t, chain[k]));
        next.front() = e1;
        next.back() = e2;
        chain = std::move(next);
    }
    return chain;
}

} // namespace detail

// ---- public (double) API -------------------------------------------------

void validate(const GeneratorSpec& spec);

std::vector<Vec2> control_points_from_offsets(const GeneratorSpec& spec);

Similarity similarity_from_segments(const Segment& src, const Segment& dst,
                                    bool reflect);

Vec2 apply_similarity(const Similarity& t, const Vec2& p);

Similarity inverse(const Similarity& t);

std::vector<Similarity> generator_transforms(const GeneratorSpec& spec);

// chain as shared points; segment k runs pts[k] -> pts[k+1]
std::vector<Vec2> expand_chain_points(const GeneratorSpec& spec, int K,
                                      std::size_t budget = kDefaultSegmentBudget);

SegmentList expand_ifs(const GeneratorSpec& spec, int K,
                       std::size_t budget = kDefaultSegmentBudget);

double point_segment_distance(const Vec2& p, const Segment& s);

} // namespace difs
