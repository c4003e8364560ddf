#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace splatgen {

// Uncompressed COCO run-length encoding: column-major scan, counts alternate
// zeros/ones starting with zeros.
struct Rle {
    int height = 0;
    int width = 0;
    std::vector<int> counts;
};

Rle rle_encode(const std::vector<std::uint8_t>& mask, int height, int width);
std::vector<std::uint8_t> rle_decode(const Rle& rle);

struct AnnotationRecord {
    int id = 0;
    int image_id = 0;
    int category_id = 0;
    std::array<double, 4> bbox{};  // x, y, w, h
    Rle segmentation;
    double area = 0;
    int iscrowd = 0;
};

struct CocoImage {
    int id = 0;
    std::string file_name;
    int width = 0;
    int height = 0;
};

struct CocoCategory {
    int id = 0;
    std::string name;
};

AnnotationRecord mask_to_annotation(const std::vector<std::uint8_t>& mask, int height, int width,
                                    int category_id, int image_id, int annotation_id);

// COCO detection-format file with images/annotations/categories sorted by id.
// Referential integrity is validated before anything is written.
void write_coco(const std::vector<CocoImage>& images, const std::vector<AnnotationRecord>& annotations,
                const std::vector<CocoCategory>& categories, const std::filesystem::path& path);

struct CocoDataset {
    std::vector<CocoImage> images;
    std::vector<AnnotationRecord> annotations;
    std::vector<CocoCategory> categories;
};

CocoDataset read_coco(const std::filesystem::path& path);

}  // namespace splatgen
