#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "splatgen/composer.hpp"
#include "splatgen/manifest.hpp"

namespace splatgen {

struct ObjectSpec {
    std::string name;
    std::filesystem::path splat_path;
};

struct GenerationConfig {
    std::vector<ObjectSpec> objects;
    std::filesystem::path backgrounds_manifest;
    std::filesystem::path output_dir;
    std::string split = "train";
    int image_count = 5000;
    int objects_min = 1;
    int objects_max = 3;
    std::uint64_t master_seed = 0;
    int workers = 0;     // 0 = hardware concurrency
    bool force = false;  // regenerate images that already exist
    ExtractionParams extraction;
    PlaneParams background_analysis;
    AugmentationConfig augmentation;
    ScaleParams scale;
    ComposerConfig composition;
};

GenerationConfig default_config();

// Pretty JSON of every setting (the --print-config output).
std::string dump_config(const GenerationConfig& config);

// Parses and validates; relative paths resolve against the config directory.
GenerationConfig load_config(const std::filesystem::path& path);
GenerationConfig parse_config(const std::string& text, const std::filesystem::path& base_dir);

struct GenerationSummary {
    int images = 0;
    int annotations = 0;
    std::map<std::string, int> per_category;
    int rejected_instances = 0;  // dropped after exhausting resample attempts
    int resample_events = 0;
    std::vector<std::string> excluded_backgrounds;  // zero usable planes
    double extract_seconds = 0;
    double analyze_seconds = 0;
    double generate_seconds = 0;
};

// End-to-end dataset generation: cached extraction and background analysis,
// per-image composition on a worker pool, COCO export, summary on disk.
// Identical config + seed produce byte-identical outputs for any worker count.
GenerationSummary run_generate(const GenerationConfig& config);

// Cached per-background analysis (used by generate, analyze-bg and previews).
// The analysis seed derives from content + parameters, so cache hits are
// indistinguishable from recomputation.
BackgroundScene analyze_background_cached(const ManifestEntry& entry, const PlaneParams& params,
                                          const std::filesystem::path& cache_dir);

// Cached extraction, canonicalized to the resting frame.
ForegroundObject extract_foreground_cached(const ObjectSpec& spec, const ExtractionParams& params,
                                           const std::filesystem::path& cache_dir);

int run_cli(int argc, const char* const* argv);

}  // namespace splatgen
