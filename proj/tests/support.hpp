#pragma once
// Shared test helpers: independent distance recomputation plus a screen that
// rejects control-point configurations whose loss terms are non-smooth at a
// pixel that contributes materially, so comparisons against central finite
// differences are meaningful wherever the screen passes.

#include <cmath>
#include <cstdlib>
#include <limits>
#include <vector>

#include "difs/geometry.hpp"
#include "difs/raster.hpp"
#include "difs/render.hpp"

namespace difs::testsupport {

struct SegHit {
    double d;          // pixel-space distance to the clamped projection
    double qx, qy;     // the clamped projection itself, pixel space
};

// Recomputed from scratch so the screen does not depend on the scan being
// correct.
inline std::vector<SegHit> pixel_hits(const std::vector<Vec2>& pts,
                                      const Viewport& vp, int row, int col) {
    const double sx = vp.scale_x(), sy = vp.scale_y();
    const double px = col + 0.5, py = row + 0.5;
    std::vector<SegHit> hits(pts.size() - 1);
    for (std::size_t k = 0; k + 1 < pts.size(); ++k) {
        const double ax = (pts[k].x - vp.xmin) * sx;
        const double ay = (vp.ymax - pts[k].y) * sy;
        const double bx = (pts[k + 1].x - vp.xmin) * sx;
        const double by = (vp.ymax - pts[k + 1].y) * sy;
        const double ex = bx - ax, ey = by - ay;
        const double len2 = ex * ex + ey * ey;
        double t = len2 > 0.0 ? ((px - ax) * ex + (py - ay) * ey) / len2 : 0.0;
        t = std::min(1.0, std::max(0.0, t));
        const double qx = ax + t * ex, qy = ay + t * ey;
        const double dx = px - qx, dy = py - qy;
        hits[k] = {std::sqrt(dx * dx + dy * dy), qx, qy};
    }
    return hits;
}

// The loss is smooth in the control points except where a pixel's nearest
// segment switches identity between segments whose gradient rows differ.
// Two switch flavours are screened at every pixel whose image weight
// exp(-d1^2/sigma^2) or heat weight exp(-d1*d2/sigma_c^2) clears the floor
// (pixels below it cannot move a finite-difference comparison):
//   1. a non-adjacent segment nearly ties the nearest distance - besides the
//      kink, the flip relocates the heat term's exclusion window;
//   2. an adjacent segment nearly ties it with a projection point away from
//      the shared vertex (a hairpin approach).  Ties whose projections
//      coincide near the vertex feed back the same row and are benign.
inline bool tie_free(const std::vector<Vec2>& pts, const Viewport& vp,
                     double margin_px, double sigma = 0.5,
                     double sigma_c = 0.5) {
    constexpr double kWeightFloor = 1e-9;
    constexpr double kSameProjPx = 0.25;
    constexpr double inf = std::numeric_limits<double>::infinity();
    const double inv_s2 = 1.0 / (sigma * sigma);
    const double inv_sc2 = 1.0 / (sigma_c * sigma_c);
    const int n = static_cast<int>(pts.size()) - 1;

    for (int r = 0; r < vp.height; ++r)
        for (int c = 0; c < vp.width; ++c) {
            const std::vector<SegHit> hits = pixel_hits(pts, vp, r, c);
            int i1 = 0;
            for (int k = 1; k < n; ++k)
                if (hits[k].d < hits[i1].d) i1 = k;
            const double d1 = hits[i1].d;

            double skip1 = inf;
            for (int k = 0; k < n; ++k)
                if (std::abs(k - i1) > 1) skip1 = std::min(skip1, hits[k].d);

            const double w_img = std::exp(-d1 * d1 * inv_s2);
            const double w_heat =
                std::isfinite(skip1) ? std::exp(-d1 * skip1 * inv_sc2) : 0.0;
            if (std::max(w_img, w_heat) < kWeightFloor) continue;

            if (std::isfinite(skip1) && skip1 - d1 < margin_px) return false;

            for (int j : {i1 - 1, i1 + 1}) {
                if (j < 0 || j >= n) continue;
                if (hits[j].d - d1 >= margin_px) continue;
                const double gx = hits[j].qx - hits[i1].qx;
                const double gy = hits[j].qy - hits[i1].qy;
                if (gx * gx + gy * gy > kSameProjPx * kSameProjPx)
                    return false;
            }
        }
    return true;
}

// Central differences sample the loss at 2 * params shifted configurations.
// The comparison against the analytic gradient is meaningful only when every
// contributing pixel keeps the same nearest/second-nearest segment selection
// across that whole stencil; a selection flip inside it turns the finite
// difference into a sample of a jump or kink instead of a derivative.  This
// is the operational form of requiring the configuration to be in general
// position, and it subsumes the geometric near-tie cases above.
inline bool stencil_stable(const GeneratorSpec& spec, int K,
                           const Viewport& vp, double h, double sigma = 0.5,
                           double sigma_c = 0.5) {
    constexpr double kWeightFloor = 1e-9;
    const double inv_s2 = 1.0 / (sigma * sigma);
    const double inv_sc2 = 1.0 / (sigma_c * sigma_c);

    // the stencil can move a curve point past a pixel centre by roughly the
    // world step times the pixel scale; inside that range the closeness
    // product sits on the cone of d1 at zero, where no selection changes yet
    // central differences average the two cone slopes
    const double cone_px = 4.0 * h * std::max(vp.scale_x(), vp.scale_y());

    const ScanResult base = scan_chain(expand_chain_points(spec, K), vp);
    std::vector<char> relevant(base.d1.size(), 0);
    for (std::size_t at = 0; at < base.d1.size(); ++at) {
        const double w_img = std::exp(-base.d1[at] * base.d1[at] * inv_s2);
        const double w_heat = std::isfinite(base.d2[at])
                                  ? std::exp(-base.d1[at] * base.d2[at] * inv_sc2)
                                  : 0.0;
        relevant[at] = std::max(w_img, w_heat) >= kWeightFloor;
        if (relevant[at] && w_heat >= kWeightFloor && base.d1[at] < cone_px)
            return false;
    }

    for (std::size_t i = 0; i < spec.offsets.size(); ++i)
        for (int axis = 0; axis < 2; ++axis)
            for (double dir : {+1.0, -1.0}) {
                GeneratorSpec moved = spec;
                (axis ? moved.offsets[i].y : moved.offsets[i].x) += dir * h;
                const ScanResult scan =
                    scan_chain(expand_chain_points(moved, K), vp);
                for (std::size_t at = 0; at < base.d1.size(); ++at) {
                    if (!relevant[at]) continue;
                    if (scan.i1[at] != base.i1[at] ||
                        scan.i2[at] != base.i2[at])
                        return false;
                }
            }
    return true;
}

} // namespace difs::testsupport
