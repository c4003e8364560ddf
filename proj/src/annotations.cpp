#include "splatgen/annotations.hpp"

#include <algorithm>
#include <fstream>
#include <set>

#include <json.hpp>

#include "splatgen/common.hpp"

namespace splatgen {

Rle rle_encode(const std::vector<std::uint8_t>& mask, int height, int width) {
    Rle rle;
    rle.height = height;
    rle.width = width;
    std::uint8_t current = 0;  // counts start with zeros
    int run = 0;
    for (int x = 0; x < width; ++x) {
        for (int y = 0; y < height; ++y) {
            const std::uint8_t v = mask[static_cast<std::size_t>(y) * width + x] ? 1 : 0;
            if (v == current) {
                ++run;
            } else {
                rle.counts.push_back(run);
                current = v;
                run = 1;
            }
        }
    }
    rle.counts.push_back(run);
    return rle;
}

std::vector<std::uint8_t> rle_decode(const Rle& rle) {
    std::vector<std::uint8_t> mask(static_cast<std::size_t>(rle.height) * rle.width, 0);
    std::size_t cursor = 0;
    std::uint8_t value = 0;
    for (int count : rle.counts) {
        for (int i = 0; i < count; ++i, ++cursor) {
            const std::size_t x = cursor / rle.height;
            const std::size_t y = cursor % rle.height;
            mask[y * rle.width + x] = value;
        }
        value = 1 - value;
    }
    return mask;
}

AnnotationRecord mask_to_annotation(const std::vector<std::uint8_t>& mask, int height, int width,
                                    int category_id, int image_id, int annotation_id) {
    int x0 = width, y0 = height, x1 = -1, y1 = -1;
    std::size_t area = 0;
    for (int y = 0; y < height; ++y) {
        for (int x = 0; x < width; ++x) {
            if (!mask[static_cast<std::size_t>(y) * width + x]) continue;
            ++area;
            x0 = std::min(x0, x);
            y0 = std::min(y0, y);
            x1 = std::max(x1, x);
            y1 = std::max(y1, y);
        }
    }
    if (area == 0) raise(ErrorCode::empty_mask, "mask has no set pixels");

    AnnotationRecord record;
    record.id = annotation_id;
    record.image_id = image_id;
    record.category_id = category_id;
    record.bbox = {static_cast<double>(x0), static_cast<double>(y0), static_cast<double>(x1 - x0 + 1),
                   static_cast<double>(y1 - y0 + 1)};
    record.segmentation = rle_encode(mask, height, width);
    record.area = static_cast<double>(area);
    return record;
}

namespace {

void validate_dataset(const std::vector<CocoImage>& images,
                      const std::vector<AnnotationRecord>& annotations,
                      const std::vector<CocoCategory>& categories) {
    std::set<int> image_ids, category_ids, annotation_ids;
    for (const auto& im : images) {
        if (!image_ids.insert(im.id).second) {
            raise(ErrorCode::duplicate_id, "image id " + std::to_string(im.id));
        }
    }
    for (const auto& cat : categories) {
        if (!category_ids.insert(cat.id).second) {
            raise(ErrorCode::duplicate_id, "category id " + std::to_string(cat.id));
        }
    }
    for (const auto& ann : annotations) {
        if (!annotation_ids.insert(ann.id).second) {
            raise(ErrorCode::duplicate_id, "annotation id " + std::to_string(ann.id));
        }
        if (!image_ids.count(ann.image_id)) {
            raise(ErrorCode::dangling_reference, "annotation " + std::to_string(ann.id) +
                                                     " references missing image " +
                                                     std::to_string(ann.image_id));
        }
        if (!category_ids.count(ann.category_id)) {
            raise(ErrorCode::dangling_reference, "annotation " + std::to_string(ann.id) +
                                                     " references missing category " +
                                                     std::to_string(ann.category_id));
        }
    }
}

}  // namespace

void write_coco(const std::vector<CocoImage>& images, const std::vector<AnnotationRecord>& annotations,
                const std::vector<CocoCategory>& categories, const std::filesystem::path& path) {
    validate_dataset(images, annotations, categories);

    auto sorted_images = images;
    std::sort(sorted_images.begin(), sorted_images.end(),
              [](const auto& a, const auto& b) { return a.id < b.id; });
    auto sorted_annotations = annotations;
    std::sort(sorted_annotations.begin(), sorted_annotations.end(),
              [](const auto& a, const auto& b) { return a.id < b.id; });
    auto sorted_categories = categories;
    std::sort(sorted_categories.begin(), sorted_categories.end(),
              [](const auto& a, const auto& b) { return a.id < b.id; });

    nlohmann::json doc;
    doc["images"] = nlohmann::json::array();
    for (const auto& im : sorted_images) {
        doc["images"].push_back(
            {{"id", im.id}, {"file_name", im.file_name}, {"width", im.width}, {"height", im.height}});
    }
    doc["annotations"] = nlohmann::json::array();
    for (const auto& ann : sorted_annotations) {
        doc["annotations"].push_back({{"id", ann.id},
                                      {"image_id", ann.image_id},
                                      {"category_id", ann.category_id},
                                      {"bbox", ann.bbox},
                                      {"segmentation",
                                       {{"size", {ann.segmentation.height, ann.segmentation.width}},
                                        {"counts", ann.segmentation.counts}}},
                                      {"area", ann.area},
                                      {"iscrowd", ann.iscrowd}});
    }
    doc["categories"] = nlohmann::json::array();
    for (const auto& cat : sorted_categories) {
        doc["categories"].push_back({{"id", cat.id}, {"name", cat.name}});
    }

    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::trunc);
    if (!out) raise(ErrorCode::io_failure, "cannot open " + path.string() + " for writing");
    out << doc.dump(2) << "\n";
    if (!out) raise(ErrorCode::io_failure, "write failed for " + path.string());
}

CocoDataset read_coco(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) raise(ErrorCode::io_failure, "cannot open " + path.string());
    nlohmann::json doc = nlohmann::json::parse(in);

    CocoDataset dataset;
    for (const auto& im : doc.at("images")) {
        dataset.images.push_back({im.at("id").get<int>(), im.at("file_name").get<std::string>(),
                                  im.at("width").get<int>(), im.at("height").get<int>()});
    }
    for (const auto& ann : doc.at("annotations")) {
        AnnotationRecord record;
        record.id = ann.at("id").get<int>();
        record.image_id = ann.at("image_id").get<int>();
        record.category_id = ann.at("category_id").get<int>();
        for (int i = 0; i < 4; ++i) record.bbox[i] = ann.at("bbox").at(i).get<double>();
        record.segmentation.height = ann.at("segmentation").at("size").at(0).get<int>();
        record.segmentation.width = ann.at("segmentation").at("size").at(1).get<int>();
        record.segmentation.counts = ann.at("segmentation").at("counts").get<std::vector<int>>();
        record.area = ann.at("area").get<double>();
        record.iscrowd = ann.at("iscrowd").get<int>();
        dataset.annotations.push_back(std::move(record));
    }
    for (const auto& cat : doc.at("categories")) {
        dataset.categories.push_back({cat.at("id").get<int>(), cat.at("name").get<std::string>()});
    }
    validate_dataset(dataset.images, dataset.annotations, dataset.categories);
    return dataset;
}

}  // namespace splatgen
