#pragma once

#include <cstdint>
#include <vector>

#include "difs/geometry.hpp"
#include "difs/raster.hpp"

namespace difs {

inline constexpr double kDefaultSigma = 0.5;        // line radius, px
inline constexpr double kDefaultSigmaCross = 0.5;   // heatmap falloff, px
inline constexpr double kDefaultNearThreshold = 1.1253517471925912e-7; // exp(-16)

// Per-pixel nearest / second-nearest segment data, everything in pixel
// units.  The second distance skips the argmin segment and its two chain
// neighbours (they share vertices with it, which is not a crossing).  When
// the exclusion empties the candidate set d2 = +inf and i2 = -1.
struct ScanResult {
    int width = 0, height = 0;
    std::vector<double> d1, d2; // distances
    std::vector<double> t1, t2; // clamped projection parameters
    std::vector<int32_t> i1, i2; // segment indices
};

// Chain given as points; segment k runs pts[k] -> pts[k+1].  Ties in the
// argmin go to the lowest segment index.
ScanResult scan_chain(const std::vector<Vec2>& pts, const Viewport& vp);

// intensity = exp(-dmin^2 / sigma^2), dmin in pixel units
RasterImage render_segments(const SegmentList& segments, const Viewport& vp,
                            double sigma = kDefaultSigma);

// heat = exp(-(d1*d2) / sigma_cross^2) with the adjacency exclusion above
RasterImage crossing_heatmap(const SegmentList& segments, const Viewport& vp,
                             double sigma_cross = kDefaultSigmaCross);

// Output pixel at world point w samples the input at T^-1(w), bilinear,
// zero outside the input viewport.  Output shares the input viewport.
RasterImage warp_image(const RasterImage& img, const Similarity& t);

// iterations rounds of img <- pixelwise max over i of warp_image(img, T_i)
RasterImage deepen_image(const RasterImage& img,
                         const std::vector<Similarity>& transforms,
                         int iterations);

// Bilinear resample onto a grid of the given size over the same world
// rectangle (used when a raster target must follow a resolution change).
RasterImage resample(const RasterImage& img, int width, int height);

// Upscale by an integer factor, re-shading only pixels whose parent
// low-res pixel is at least near_threshold; everything else is 0.
RasterImage refine_resolution(const RasterImage& img_low,
                              const SegmentList& segments, int factor,
                              double near_threshold = kDefaultNearThreshold,
                              double sigma = kDefaultSigma);

} // namespace difs
