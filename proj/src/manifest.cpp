#include "splatgen/manifest.hpp"

#include <fstream>

#include <json.hpp>

#include "splatgen/common.hpp"

namespace splatgen {

BackgroundManifest load_manifest(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) raise(ErrorCode::io_failure, "cannot open manifest " + path.string());
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        raise(ErrorCode::config_invalid, "manifest " + path.string() + ": " + e.what());
    }
    if (!doc.is_array() || doc.empty()) {
        raise(ErrorCode::config_invalid, "manifest must be a non-empty JSON array");
    }

    const std::filesystem::path base = path.has_parent_path() ? path.parent_path() : ".";
    auto resolve = [&](const std::string& p) {
        const std::filesystem::path candidate(p);
        return candidate.is_absolute() ? candidate : base / candidate;
    };

    BackgroundManifest manifest;
    for (const auto& item : doc) {
        ManifestEntry entry;
        entry.image = resolve(item.at("image").get<std::string>());
        const std::string depth = item.at("depth").get<std::string>();
        if (depth == "service") {
            entry.use_service = true;
        } else {
            entry.depth = resolve(depth);
        }
        const std::string convention = item.value("convention", "inverse_depth");
        if (convention == "depth") {
            entry.convention = DepthConvention::depth;
        } else if (convention == "inverse_depth") {
            entry.convention = DepthConvention::inverse_depth;
        } else {
            raise(ErrorCode::config_invalid, "unknown depth convention \"" + convention + "\"");
        }
        manifest.entries.push_back(std::move(entry));
    }
    return manifest;
}

void save_manifest(const BackgroundManifest& manifest, const std::filesystem::path& path) {
    const std::filesystem::path base = path.has_parent_path() ? path.parent_path() : ".";
    auto relativize = [&](const std::filesystem::path& p) {
        std::error_code ec;
        const std::filesystem::path rel = std::filesystem::relative(p, base, ec);
        return (ec || rel.empty()) ? p.string() : rel.string();
    };

    nlohmann::json doc = nlohmann::json::array();
    for (const auto& entry : manifest.entries) {
        doc.push_back({{"image", relativize(entry.image)},
                       {"depth", entry.use_service ? "service" : relativize(entry.depth)},
                       {"convention",
                        entry.convention == DepthConvention::depth ? "depth" : "inverse_depth"}});
    }
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::trunc);
    if (!out) raise(ErrorCode::io_failure, "cannot write manifest " + path.string());
    out << doc.dump(2) << "\n";
}

}  // namespace splatgen
