#include "difs/raster.hpp"

namespace difs {

double image_mse(const RasterImage& a, const RasterImage& b) {
    require_same_shape(a, b);
    double acc = 0.0;
    for (std::size_t i = 0; i < a.values.size(); ++i) {
        const double d = a.values[i] - b.values[i];
        acc += d * d;
    }
    return acc / static_cast<double>(a.values.size());
}

} // namespace difs
