#include "difs/render.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace difs {

namespace {

struct PxSeg {
    double ax, ay, ex, ey; // anchor and edge vector, pixel units
    double inv_len2;       // 0 for degenerate (point) segments
};

std::vector<PxSeg> to_pixel_space(const std::vector<Vec2>& pts,
                                  const Viewport& vp) {
    std::vector<PxSeg> out(pts.size() - 1);
    Vec2 prev = vp.to_pixel(pts[0]);
    for (std::size_t k = 0; k + 1 < pts.size(); ++k) {
        const Vec2 next = vp.to_pixel(pts[k + 1]);
        const double ex = next.x - prev.x, ey = next.y - prev.y;
        const double len2 = ex * ex + ey * ey;
        out[k] = {prev.x, prev.y, ex, ey, len2 > 0.0 ? 1.0 / len2 : 0.0};
        prev = next;
    }
    return out;
}

std::vector<PxSeg> to_pixel_space(const SegmentList& segments,
                                  const Viewport& vp) {
    std::vector<PxSeg> out(segments.size());
    for (std::size_t k = 0; k < segments.size(); ++k) {
        const Vec2 a = vp.to_pixel(segments[k].a);
        const Vec2 b = vp.to_pixel(segments[k].b);
        const double ex = b.x - a.x, ey = b.y - a.y;
        const double len2 = ex * ex + ey * ey;
        out[k] = {a.x, a.y, ex, ey, len2 > 0.0 ? 1.0 / len2 : 0.0};
    }
    return out;
}

inline double seg_dist2(const PxSeg& s, double px, double py, double* t_out) {
    double t = ((px - s.ax) * s.ex + (py - s.ay) * s.ey) * s.inv_len2;
    t = std::clamp(t, 0.0, 1.0);
    const double rx = px - (s.ax + t * s.ex), ry = py - (s.ay + t * s.ey);
    if (t_out) *t_out = t;
    return rx * rx + ry * ry;
}

ScanResult scan_pixel_segments(const std::vector<PxSeg>& segs,
                               const Viewport& vp) {
    constexpr double inf = std::numeric_limits<double>::infinity();
    const int W = vp.width, H = vp.height;
    const std::size_t n = static_cast<std::size_t>(W) * H;
    const int S = static_cast<int>(segs.size());

    ScanResult r;
    r.width = W;
    r.height = H;
    r.d1.assign(n, inf);
    r.d2.assign(n, inf);
    r.t1.assign(n, 0.0);
    r.t2.assign(n, 0.0);
    r.i1.assign(n, -1);
    r.i2.assign(n, -1);

    std::vector<double> dist2(segs.size());
    std::vector<double> ts(segs.size());
    for (int row = 0; row < H; ++row) {
        const double py = row + 0.5;
        for (int col = 0; col < W; ++col) {
            const double px = col + 0.5;
            const std::size_t at = static_cast<std::size_t>(row) * W + col;

            int best = 0;
            double bd = inf;
            for (int k = 0; k < S; ++k) {
                dist2[k] = seg_dist2(segs[k], px, py, &ts[k]);
                if (dist2[k] < bd) {
                    bd = dist2[k];
                    best = k;
                }
            }
            r.d1[at] = std::sqrt(bd);
            r.t1[at] = ts[best];
            r.i1[at] = best;

            int second = -1;
            double sd = inf;
            for (int k = 0; k < S; ++k) {
                if (k >= best - 1 && k <= best + 1) continue;
                if (dist2[k] < sd) {
                    sd = dist2[k];
                    second = k;
                }
            }
            if (second >= 0) {
                r.d2[at] = std::sqrt(sd);
                r.t2[at] = ts[second];
                r.i2[at] = second;
            }
        }
    }
    return r;
}

} // namespace

ScanResult scan_chain(const std::vector<Vec2>& pts, const Viewport& vp) {
    check(vp);
    if (pts.size() < 2) throw EmptySegmentList("chain has no segments");
    return scan_pixel_segments(to_pixel_space(pts, vp), vp);
}

RasterImage render_segments(const SegmentList& segments, const Viewport& vp,
                            double sigma) {
    check(vp);
    if (segments.empty()) throw EmptySegmentList("nothing to render");
    if (!(sigma > 0.0)) throw InvalidSpec("sigma must be positive");

    const auto segs = to_pixel_space(segments, vp);
    RasterImage img(vp);
    const double inv_s2 = 1.0 / (sigma * sigma);
    for (int row = 0; row < vp.height; ++row) {
        const double py = row + 0.5;
        for (int col = 0; col < vp.width; ++col) {
            const double px = col + 0.5;
            double best = std::numeric_limits<double>::infinity();
            for (const auto& s : segs) {
                const double d2 = seg_dist2(s, px, py, nullptr);
                if (d2 < best) best = d2;
            }
            // sqrt-then-square keeps this bitwise equal to the scan-based
            // loss path, which works with plain distances
            const double d = std::sqrt(best);
            img.at(row, col) = std::exp(-d * d * inv_s2);
        }
    }
    return img;
}

RasterImage crossing_heatmap(const SegmentList& segments, const Viewport& vp,
                             double sigma_cross) {
    check(vp);
    if (segments.size() < 2)
        throw TooFewSegments("crossing heatmap needs at least two segments");
    if (!(sigma_cross > 0.0)) throw InvalidSpec("sigma_cross must be positive");

    const auto scan = scan_pixel_segments(to_pixel_space(segments, vp), vp);
    RasterImage img(vp);
    const double inv_s2 = 1.0 / (sigma_cross * sigma_cross);
    for (std::size_t at = 0; at < img.size(); ++at) {
        const double prod = scan.d1[at] * scan.d2[at];
        img.values[at] = std::isfinite(prod) ? std::exp(-prod * inv_s2) : 0.0;
    }
    return img;
}

RasterImage warp_image(const RasterImage& img, const Similarity& t) {
    const Similarity inv = inverse(t);
    const Viewport& vp = img.viewport;
    RasterImage out(vp);
    for (int row = 0; row < vp.height; ++row) {
        for (int col = 0; col < vp.width; ++col) {
            const Vec2 w = vp.pixel_center_world(col, row);
            const Vec2 s = apply_similarity(inv, w);
            const Vec2 p = vp.to_pixel(s);
            // bilinear over pixel centers, zero outside
            const double fx = p.x - 0.5, fy = p.y - 0.5;
            const int c0 = static_cast<int>(std::floor(fx));
            const int r0 = static_cast<int>(std::floor(fy));
            const double wx = fx - c0, wy = fy - r0;
            double acc = 0.0;
            for (int dr = 0; dr <= 1; ++dr) {
                const int rr = r0 + dr;
                if (rr < 0 || rr >= vp.height) continue;
                const double wr = dr ? wy : 1.0 - wy;
                for (int dc = 0; dc <= 1; ++dc) {
                    const int cc = c0 + dc;
                    if (cc < 0 || cc >= vp.width) continue;
                    acc += wr * (dc ? wx : 1.0 - wx) * img.at(rr, cc);
                }
            }
            out.at(row, col) = acc;
        }
    }
    return out;
}

RasterImage deepen_image(const RasterImage& img,
                         const std::vector<Similarity>& transforms,
                         int iterations) {
    if (iterations < 1) throw InvalidSpec("iterations must be >= 1");
    RasterImage cur = img;
    for (int it = 0; it < iterations; ++it) {
        RasterImage next(cur.viewport);
        for (const auto& t : transforms) {
            const RasterImage w = warp_image(cur, t);
            for (std::size_t at = 0; at < next.size(); ++at)
                next.values[at] = std::max(next.values[at], w.values[at]);
        }
        cur = std::move(next);
    }
    return cur;
}

RasterImage resample(const RasterImage& img, int width, int height) {
    if (width < 1 || height < 1)
        throw InvalidSpec("resample size must be at least 1x1");
    const Viewport vp = img.viewport.with_size(width, height);
    RasterImage out(vp);
    for (int row = 0; row < height; ++row) {
        for (int col = 0; col < width; ++col) {
            // source pixel coords of this output center
            const double fx = (col + 0.5) * img.width / width - 0.5;
            const double fy = (row + 0.5) * img.height / height - 0.5;
            const int c0 = static_cast<int>(std::floor(fx));
            const int r0 = static_cast<int>(std::floor(fy));
            const double wx = fx - c0, wy = fy - r0;
            double acc = 0.0;
            for (int dr = 0; dr <= 1; ++dr) {
                const int rr = std::clamp(r0 + dr, 0, img.height - 1);
                const double wr = dr ? wy : 1.0 - wy;
                for (int dc = 0; dc <= 1; ++dc) {
                    const int cc = std::clamp(c0 + dc, 0, img.width - 1);
                    acc += wr * (dc ? wx : 1.0 - wx) * img.at(rr, cc);
                }
            }
            out.at(row, col) = acc;
        }
    }
    return out;
}

RasterImage refine_resolution(const RasterImage& img_low,
                              const SegmentList& segments, int factor,
                              double near_threshold, double sigma) {
    if (factor < 2) throw InvalidSpec("refinement factor must be >= 2");
    if (!(near_threshold > 0.0 && near_threshold < 1.0))
        throw InvalidSpec("near_threshold must lie in (0,1)");
    if (segments.empty()) throw EmptySegmentList("nothing to render");

    const Viewport hi = img_low.viewport.with_size(img_low.width * factor,
                                                   img_low.height * factor);
    const auto segs = to_pixel_space(segments, hi);
    RasterImage out(hi);
    const double inv_s2 = 1.0 / (sigma * sigma);
    for (int row = 0; row < hi.height; ++row) {
        const double py = row + 0.5;
        for (int col = 0; col < hi.width; ++col) {
            if (img_low.at(row / factor, col / factor) < near_threshold)
                continue;
            const double px = col + 0.5;
            double best = std::numeric_limits<double>::infinity();
            for (const auto& s : segs) {
                const double d2 = seg_dist2(s, px, py, nullptr);
                if (d2 < best) best = d2;
            }
            const double d = std::sqrt(best);
            out.at(row, col) = std::exp(-d * d * inv_s2);
        }
    }
    return out;
}

} // namespace difs
