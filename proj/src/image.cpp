#include "splatgen/image.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

#include <opencv2/core.hpp>
#include <opencv2/imgcodecs.hpp>

#include "splatgen/common.hpp"

namespace splatgen {

namespace {

std::uint8_t to_byte(float v) {
    const float c = std::clamp(v, 0.0f, 1.0f);
    return static_cast<std::uint8_t>(std::lround(c * 255.0f));
}

}  // namespace

ImageRgb load_image_rgb(const std::filesystem::path& path) {
    cv::Mat bgr = cv::imread(path.string(), cv::IMREAD_COLOR);
    if (bgr.empty()) raise(ErrorCode::io_failure, "cannot decode image " + path.string());
    ImageRgb out = ImageRgb::zeros(bgr.cols, bgr.rows);
    for (int y = 0; y < bgr.rows; ++y) {
        const cv::Vec3b* row = bgr.ptr<cv::Vec3b>(y);
        for (int x = 0; x < bgr.cols; ++x) {
            float* p = out.px(y, x);
            p[0] = row[x][2] / 255.0f;
            p[1] = row[x][1] / 255.0f;
            p[2] = row[x][0] / 255.0f;
        }
    }
    return out;
}

std::vector<std::uint8_t> encode_png_rgb(const ImageRgb& image) {
    cv::Mat bgr(image.height, image.width, CV_8UC3);
    for (int y = 0; y < image.height; ++y) {
        cv::Vec3b* row = bgr.ptr<cv::Vec3b>(y);
        for (int x = 0; x < image.width; ++x) {
            const float* p = image.px(y, x);
            row[x] = cv::Vec3b(to_byte(p[2]), to_byte(p[1]), to_byte(p[0]));
        }
    }
    std::vector<std::uint8_t> bytes;
    if (!cv::imencode(".png", bgr, bytes)) raise(ErrorCode::io_failure, "png encode failed");
    return bytes;
}

std::vector<std::uint8_t> encode_png_gray(const ImageGray& image) {
    cv::Mat gray(image.height, image.width, CV_8UC1);
    for (int y = 0; y < image.height; ++y) {
        std::uint8_t* row = gray.ptr<std::uint8_t>(y);
        for (int x = 0; x < image.width; ++x) row[x] = to_byte(image.at(y, x));
    }
    std::vector<std::uint8_t> bytes;
    if (!cv::imencode(".png", gray, bytes)) raise(ErrorCode::io_failure, "png encode failed");
    return bytes;
}

void save_png_rgb(const ImageRgb& image, const std::filesystem::path& path) {
    write_file_bytes(path, encode_png_rgb(image));
}

void save_png_gray(const ImageGray& image, const std::filesystem::path& path) {
    write_file_bytes(path, encode_png_gray(image));
}

std::vector<std::uint8_t> encode_pfm(const ImageGray& image) {
    std::ostringstream header;
    header << "Pf\n" << image.width << " " << image.height << "\n-1.0\n";
    const std::string head = header.str();
    std::vector<std::uint8_t> bytes(head.size() + image.pixel_count() * sizeof(float));
    std::memcpy(bytes.data(), head.data(), head.size());
    // PFM scanlines run bottom-up.
    std::uint8_t* dst = bytes.data() + head.size();
    for (int y = image.height - 1; y >= 0; --y) {
        std::memcpy(dst, image.data.data() + static_cast<std::size_t>(y) * image.width,
                    static_cast<std::size_t>(image.width) * sizeof(float));
        dst += static_cast<std::size_t>(image.width) * sizeof(float);
    }
    return bytes;
}

ImageGray decode_pfm(const std::uint8_t* bytes, std::size_t size) {
    const std::string_view view(reinterpret_cast<const char*>(bytes), size);
    // Parse the three whitespace-delimited header tokens after the magic.
    if (size < 2 || view.substr(0, 2) != "Pf") raise(ErrorCode::malformed_response, "not a grayscale PFM");
    std::size_t pos = 2;
    auto next_token = [&]() -> std::string {
        while (pos < size && std::isspace(static_cast<unsigned char>(view[pos]))) ++pos;
        std::size_t start = pos;
        while (pos < size && !std::isspace(static_cast<unsigned char>(view[pos]))) ++pos;
        return std::string(view.substr(start, pos - start));
    };
    int width = 0, height = 0;
    double scale = 0.0;
    try {
        width = std::stoi(next_token());
        height = std::stoi(next_token());
        scale = std::stod(next_token());
    } catch (const std::exception&) {
        raise(ErrorCode::malformed_response, "bad PFM header");
    }
    if (width <= 0 || height <= 0) raise(ErrorCode::malformed_response, "bad PFM dimensions");
    if (scale >= 0) raise(ErrorCode::malformed_response, "big-endian PFM not supported");
    ++pos;  // single whitespace byte after the scale token
    const std::size_t need = static_cast<std::size_t>(width) * height * sizeof(float);
    if (pos + need > size) raise(ErrorCode::malformed_response, "truncated PFM body");
    ImageGray out = ImageGray::zeros(width, height);
    const std::uint8_t* src = bytes + pos;
    for (int y = height - 1; y >= 0; --y) {
        std::memcpy(out.data.data() + static_cast<std::size_t>(y) * width, src,
                    static_cast<std::size_t>(width) * sizeof(float));
        src += static_cast<std::size_t>(width) * sizeof(float);
    }
    return out;
}

void save_pfm(const ImageGray& image, const std::filesystem::path& path) {
    write_file_bytes(path, encode_pfm(image));
}

ImageGray load_pfm(const std::filesystem::path& path) {
    const auto bytes = read_file_bytes(path);
    try {
        return decode_pfm(bytes.data(), bytes.size());
    } catch (const Error&) {
        raise(ErrorCode::io_failure, "cannot parse PFM " + path.string());
    }
}

ImageGray load_depth_file(const std::filesystem::path& path) {
    const std::string ext = path.extension().string();
    if (ext == ".pfm" || ext == ".PFM") return load_pfm(path);
    cv::Mat raw = cv::imread(path.string(), cv::IMREAD_UNCHANGED);
    if (raw.empty()) raise(ErrorCode::io_failure, "cannot decode depth " + path.string());
    if (raw.channels() != 1) raise(ErrorCode::io_failure, "depth image must be single channel: " + path.string());
    ImageGray out = ImageGray::zeros(raw.cols, raw.rows);
    if (raw.depth() == CV_16U) {
        for (int y = 0; y < raw.rows; ++y)
            for (int x = 0; x < raw.cols; ++x) out.at(y, x) = static_cast<float>(raw.at<std::uint16_t>(y, x));
    } else if (raw.depth() == CV_8U) {
        for (int y = 0; y < raw.rows; ++y)
            for (int x = 0; x < raw.cols; ++x) out.at(y, x) = static_cast<float>(raw.at<std::uint8_t>(y, x));
    } else {
        raise(ErrorCode::io_failure, "unsupported depth image type: " + path.string());
    }
    return out;
}

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) raise(ErrorCode::io_failure, "cannot open " + path.string());
    in.seekg(0, std::ios::end);
    const std::streamsize size = in.tellg();
    in.seekg(0, std::ios::beg);
    std::vector<std::uint8_t> bytes(static_cast<std::size_t>(size));
    if (size > 0) in.read(reinterpret_cast<char*>(bytes.data()), size);
    if (!in) raise(ErrorCode::io_failure, "cannot read " + path.string());
    return bytes;
}

void write_file_bytes(const std::filesystem::path& path, const std::vector<std::uint8_t>& bytes) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) raise(ErrorCode::io_failure, "cannot open " + path.string() + " for writing");
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) raise(ErrorCode::io_failure, "cannot write " + path.string());
}

std::uint64_t fnv1a(const std::uint8_t* bytes, std::size_t size, std::uint64_t seed) {
    std::uint64_t h = seed;
    for (std::size_t i = 0; i < size; ++i) {
        h ^= bytes[i];
        h *= 0x100000001B3ull;
    }
    return h;
}

std::uint64_t hash_file(const std::filesystem::path& path) {
    const auto bytes = read_file_bytes(path);
    return fnv1a(bytes.data(), bytes.size());
}

}  // namespace splatgen
