#pragma once

#include <vector>

#include "difs/raster.hpp"

namespace difs {

// Truncated normalized Gaussian taps for radius ceil(3*sigma); empty for
// sigma <= 0 (callers treat that as "no blur").
std::vector<double> gaussian_kernel(double sigma);

// Separable blur, replicate padding at the borders; sigma_blur = 0 is a
// no-op copy.
RasterImage gaussian_blur(const RasterImage& img, double sigma_blur);

// The adjoint of gaussian_blur: <blur(x), y> == <x, blur_transpose(y)>.
RasterImage blur_transpose(const RasterImage& img, double sigma_blur);

namespace detail {

// 1-D pass along a strided line of `n` values; used by both the forward
// blur and its transpose (the gradient scatter).
void blur_line(const double* src, double* dst, int n, long stride,
               const std::vector<double>& kernel);
void blur_line_transpose(const double* src, double* dst, int n, long stride,
                         const std::vector<double>& kernel);

// Applies the transpose of the full separable blur; needed when a gradient
// flows backwards through gaussian_blur.
void blur_transpose(const std::vector<double>& src, std::vector<double>& dst,
                    int width, int height, const std::vector<double>& kernel);

} // namespace detail

} // namespace difs
