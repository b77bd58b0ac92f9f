#include "difs/image_io.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <vector>

#include <zlib.h>

namespace difs {

namespace {

std::vector<std::uint8_t> quantize(const RasterImage& img) {
    std::vector<std::uint8_t> bytes(img.size());
    for (std::size_t i = 0; i < img.size(); ++i) {
        const double v = std::clamp(img.values[i], 0.0, 1.0);
        bytes[i] = static_cast<std::uint8_t>(std::lround(v * 255.0));
    }
    return bytes;
}

void write_binary(const std::filesystem::path& path, const std::string& data) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write " + path.string());
    out.write(data.data(), static_cast<std::streamsize>(data.size()));
    if (!out) throw ConfigError("write failed: " + path.string());
}

void push_u32(std::string& s, std::uint32_t v) {
    s.push_back(static_cast<char>((v >> 24) & 0xff));
    s.push_back(static_cast<char>((v >> 16) & 0xff));
    s.push_back(static_cast<char>((v >> 8) & 0xff));
    s.push_back(static_cast<char>(v & 0xff));
}

void push_chunk(std::string& out, const char type[4], const std::string& body) {
    push_u32(out, static_cast<std::uint32_t>(body.size()));
    const std::size_t crc_from = out.size();
    out.append(type, 4);
    out += body;
    const auto crc = crc32(
        0, reinterpret_cast<const Bytef*>(out.data() + crc_from),
        static_cast<uInt>(out.size() - crc_from));
    push_u32(out, static_cast<std::uint32_t>(crc));
}

} // namespace

std::string encode_pgm(const RasterImage& img) {
    std::string out = "P5\n" + std::to_string(img.width) + " " +
                      std::to_string(img.height) + "\n255\n";
    const auto bytes = quantize(img);
    out.append(reinterpret_cast<const char*>(bytes.data()), bytes.size());
    return out;
}

void write_pgm(const std::filesystem::path& path, const RasterImage& img) {
    write_binary(path, encode_pgm(img));
}

void write_png(const std::filesystem::path& path, const RasterImage& img) {
    const auto bytes = quantize(img);

    // one filter byte (0 = none) per scanline
    std::vector<std::uint8_t> raw;
    raw.reserve((static_cast<std::size_t>(img.width) + 1) * img.height);
    for (int row = 0; row < img.height; ++row) {
        raw.push_back(0);
        raw.insert(raw.end(),
                   bytes.begin() + static_cast<std::size_t>(row) * img.width,
                   bytes.begin() + static_cast<std::size_t>(row + 1) * img.width);
    }
    uLongf zlen = compressBound(static_cast<uLong>(raw.size()));
    std::vector<std::uint8_t> z(zlen);
    if (compress2(z.data(), &zlen, raw.data(), static_cast<uLong>(raw.size()),
                  9) != Z_OK)
        throw ConfigError("png compression failed");
    z.resize(zlen);

    std::string out("\x89PNG\r\n\x1a\n", 8);
    std::string ihdr;
    push_u32(ihdr, static_cast<std::uint32_t>(img.width));
    push_u32(ihdr, static_cast<std::uint32_t>(img.height));
    ihdr.push_back(8);  // bit depth
    ihdr.push_back(0);  // grayscale
    ihdr.push_back(0);  // compression
    ihdr.push_back(0);  // filter
    ihdr.push_back(0);  // no interlace
    push_chunk(out, "IHDR", ihdr);
    push_chunk(out, "IDAT",
               std::string(reinterpret_cast<const char*>(z.data()), z.size()));
    push_chunk(out, "IEND", "");
    write_binary(path, out);
}

void write_image(const std::filesystem::path& path, const RasterImage& img) {
    const auto ext = path.extension().string();
    if (ext == ".pgm")
        write_pgm(path, img);
    else if (ext == ".png")
        write_png(path, img);
    else
        throw ConfigError("unsupported image extension: " + ext);
}

RasterImage read_pgm(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot read " + path.string());
    std::string magic;
    in >> magic;
    if (magic != "P5") throw ConfigError("not a binary PGM (P5): " + path.string());

    auto next_int = [&]() {
        // skip whitespace and '#' comment lines
        for (;;) {
            const int c = in.peek();
            if (c == EOF) break;
            if (c == '#') {
                std::string line;
                std::getline(in, line);
            } else if (std::isspace(c)) {
                in.get();
            } else {
                break;
            }
        }
        long v = -1;
        in >> v;
        if (!in || v < 0) throw ConfigError("malformed PGM header");
        return v;
    };

    const long w = next_int();
    const long h = next_int();
    const long maxval = next_int();
    if (w < 1 || h < 1 || maxval < 1 || maxval > 255)
        throw ConfigError("unsupported PGM geometry (need 8-bit)");
    in.get(); // single whitespace byte before the raster

    Viewport vp;
    vp.width = static_cast<int>(w);
    vp.height = static_cast<int>(h);
    RasterImage img(vp);
    std::vector<std::uint8_t> bytes(static_cast<std::size_t>(w) * h);
    in.read(reinterpret_cast<char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
    if (!in) throw ConfigError("truncated PGM raster: " + path.string());
    for (std::size_t i = 0; i < bytes.size(); ++i)
        img.values[i] = static_cast<double>(bytes[i]) / maxval;
    return img;
}

} // namespace difs
