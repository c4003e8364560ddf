#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace splatgen {

// Row-major single-channel float image.
struct ImageGray {
    int width = 0;
    int height = 0;
    std::vector<float> data;

    static ImageGray zeros(int w, int h) { return {w, h, std::vector<float>(static_cast<std::size_t>(w) * h, 0.0f)}; }
    static ImageGray constant(int w, int h, float v) {
        return {w, h, std::vector<float>(static_cast<std::size_t>(w) * h, v)};
    }

    float& at(int y, int x) { return data[static_cast<std::size_t>(y) * width + x]; }
    float at(int y, int x) const { return data[static_cast<std::size_t>(y) * width + x]; }
    std::size_t pixel_count() const { return static_cast<std::size_t>(width) * height; }
};

// Row-major interleaved RGB float image, values nominally in [0, 1].
struct ImageRgb {
    int width = 0;
    int height = 0;
    std::vector<float> data;  // H*W*3

    static ImageRgb zeros(int w, int h) {
        return {w, h, std::vector<float>(static_cast<std::size_t>(w) * h * 3, 0.0f)};
    }

    float* px(int y, int x) { return data.data() + 3 * (static_cast<std::size_t>(y) * width + x); }
    const float* px(int y, int x) const { return data.data() + 3 * (static_cast<std::size_t>(y) * width + x); }
    std::size_t pixel_count() const { return static_cast<std::size_t>(width) * height; }
};

// 8-bit PNG/JPEG decode into [0,1] floats (decided by file contents).
ImageRgb load_image_rgb(const std::filesystem::path& path);

// 8-bit PNG encode/write; float values are clamped and rounded.
std::vector<std::uint8_t> encode_png_rgb(const ImageRgb& image);
std::vector<std::uint8_t> encode_png_gray(const ImageGray& image);
void save_png_rgb(const ImageRgb& image, const std::filesystem::path& path);
void save_png_gray(const ImageGray& image, const std::filesystem::path& path);

// Grayscale PFM (float32, little-endian, bottom-up scanlines).
std::vector<std::uint8_t> encode_pfm(const ImageGray& image);
ImageGray decode_pfm(const std::uint8_t* bytes, std::size_t size);
void save_pfm(const ImageGray& image, const std::filesystem::path& path);
ImageGray load_pfm(const std::filesystem::path& path);

// Depth file dispatch: .pfm or 16-bit grayscale PNG (values used as-is).
ImageGray load_depth_file(const std::filesystem::path& path);

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path);
void write_file_bytes(const std::filesystem::path& path, const std::vector<std::uint8_t>& bytes);

// FNV-1a content hash; used as a cache key.
std::uint64_t fnv1a(const std::uint8_t* bytes, std::size_t size, std::uint64_t seed = 0xCBF29CE484222325ull);
std::uint64_t hash_file(const std::filesystem::path& path);

}  // namespace splatgen
