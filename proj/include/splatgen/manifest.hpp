#pragma once

#include <filesystem>
#include <vector>

#include "splatgen/background.hpp"

namespace splatgen {

struct ManifestEntry {
    std::filesystem::path image;
    std::filesystem::path depth;  // empty when the depth service should fill it in
    bool use_service = false;
    DepthConvention convention = DepthConvention::inverse_depth;
};

struct BackgroundManifest {
    std::vector<ManifestEntry> entries;
};

// JSON list of {image, depth ("service" to defer), convention}; relative
// paths resolve against the manifest's directory.
BackgroundManifest load_manifest(const std::filesystem::path& path);
void save_manifest(const BackgroundManifest& manifest, const std::filesystem::path& path);

}  // namespace splatgen
