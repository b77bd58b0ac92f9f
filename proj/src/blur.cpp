#include "difs/blur.hpp"

#include <algorithm>
#include <cmath>

namespace difs {

std::vector<double> gaussian_kernel(double sigma) {
    if (sigma <= 0.0) return {};
    const int r = static_cast<int>(std::ceil(3.0 * sigma));
    std::vector<double> k(2 * r + 1);
    double sum = 0.0;
    for (int i = -r; i <= r; ++i) {
        k[i + r] = std::exp(-(double(i) * i) / (2.0 * sigma * sigma));
        sum += k[i + r];
    }
    for (double& w : k) w /= sum;
    return k;
}

namespace detail {

void blur_line(const double* src, double* dst, int n, long stride,
               const std::vector<double>& kernel) {
    const int r = static_cast<int>(kernel.size() / 2);
    for (int i = 0; i < n; ++i) {
        double acc = 0.0;
        for (int k = -r; k <= r; ++k) {
            const int j = std::clamp(i + k, 0, n - 1);
            acc += kernel[k + r] * src[j * stride];
        }
        dst[i * stride] = acc;
    }
}

void blur_line_transpose(const double* src, double* dst, int n, long stride,
                         const std::vector<double>& kernel) {
    const int r = static_cast<int>(kernel.size() / 2);
    for (int i = 0; i < n; ++i) dst[i * stride] = 0.0;
    for (int i = 0; i < n; ++i) {
        const double u = src[i * stride];
        for (int k = -r; k <= r; ++k) {
            const int j = std::clamp(i + k, 0, n - 1);
            dst[j * stride] += kernel[k + r] * u;
        }
    }
}

void blur_transpose(const std::vector<double>& src, std::vector<double>& dst,
                    int width, int height, const std::vector<double>& kernel) {
    // forward order is horizontal then vertical, so the transpose applies
    // the vertical pass' adjoint first
    std::vector<double> mid(src.size());
    for (int col = 0; col < width; ++col)
        blur_line_transpose(src.data() + col, mid.data() + col, height, width,
                            kernel);
    dst.assign(src.size(), 0.0);
    for (int row = 0; row < height; ++row)
        blur_line_transpose(mid.data() + static_cast<long>(row) * width,
                            dst.data() + static_cast<long>(row) * width, width,
                            1, kernel);
}

} // namespace detail

RasterImage gaussian_blur(const RasterImage& img, double sigma_blur) {
    if (sigma_blur <= 0.0) return img;
    const auto kernel = gaussian_kernel(sigma_blur);
    RasterImage mid = img, out = img;
    for (int row = 0; row < img.height; ++row)
        detail::blur_line(img.values.data() + static_cast<long>(row) * img.width,
                          mid.values.data() + static_cast<long>(row) * img.width,
                          img.width, 1, kernel);
    for (int col = 0; col < img.width; ++col)
        detail::blur_line(mid.values.data() + col, out.values.data() + col,
                          img.height, img.width, kernel);
    return out;
}

RasterImage blur_transpose(const RasterImage& img, double sigma_blur) {
    if (sigma_blur <= 0.0) return img;
    RasterImage out = img;
    detail::blur_transpose(img.values, out.values, img.width, img.height,
                           gaussian_kernel(sigma_blur));
    return out;
}

} // namespace difs
