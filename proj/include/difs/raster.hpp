#pragma once

#include <cstddef>
#include <vector>

#include "difs/error.hpp"
#include "difs/geometry.hpp"

namespace difs {

// World rectangle mapped onto a W×H pixel grid, row 0 at ymax (image-up).
// Pixel (col,row) has its center at pixel coords (col+0.5, row+0.5).
struct Viewport {
    double xmin = -0.2, xmax = 1.2;
    double ymin = -0.2, ymax = 1.2;
    int width = 64;
    int height = 64;

    double scale_x() const { return width / (xmax - xmin); }
    double scale_y() const { return height / (ymax - ymin); }

    // world -> pixel coords (not rounded)
    Vec2 to_pixel(const Vec2& w) const {
        return {(w.x - xmin) * scale_x(), (ymax - w.y) * scale_y()};
    }
    Vec2 pixel_center_world(int col, int row) const {
        return {xmin + (col + 0.5) / scale_x(), ymax - (row + 0.5) / scale_y()};
    }

    Viewport with_size(int w, int h) const {
        Viewport v = *this;
        v.width = w;
        v.height = h;
        return v;
    }
};

inline void check(const Viewport& vp) {
    if (!(vp.xmax > vp.xmin) || !(vp.ymax > vp.ymin))
        throw InvalidSpec("viewport must have positive world extent");
    if (vp.width < 1 || vp.height < 1)
        throw InvalidSpec("viewport must be at least 1x1 pixels");
}

// Row-major grayscale buffer; public outputs keep values in [0,1].
struct RasterImage {
    int width = 0;
    int height = 0;
    std::vector<double> values; // size width*height, index row*width+col
    Viewport viewport;

    RasterImage() = default;
    explicit RasterImage(const Viewport& vp, double fill = 0.0)
        : width(vp.width), height(vp.height),
          values(static_cast<std::size_t>(vp.width) * vp.height, fill),
          viewport(vp) {}

    double& at(int row, int col) {
        return values[static_cast<std::size_t>(row) * width + col];
    }
    double at(int row, int col) const {
        return values[static_cast<std::size_t>(row) * width + col];
    }
    std::size_t size() const { return values.size(); }
};

inline void require_same_shape(const RasterImage& a, const RasterImage& b) {
    if (a.width != b.width || a.height != b.height)
        throw ShapeMismatch("images differ in size");
}

double image_mse(const RasterImage& a, const RasterImage& b);

} // namespace difs
