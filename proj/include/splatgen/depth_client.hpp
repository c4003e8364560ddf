#pragma once

#include <filesystem>
#include <string>

#include "splatgen/background.hpp"
#include "splatgen/image.hpp"
#include "splatgen/manifest.hpp"

namespace splatgen {

struct DepthServiceConfig {
    std::string base_url;
    double timeout_seconds = 10.0;
    int retry_count = 2;
    double backoff_base_seconds = 0.5;  // doubled per retry
    std::string bearer_token;           // optional Authorization header
};

// Applies the SPLATGEN_DEPTH_URL environment override when set.
DepthServiceConfig with_env_overrides(DepthServiceConfig cfg);

struct DepthResponse {
    ImageGray depth;
    DepthConvention convention = DepthConvention::inverse_depth;
};

// POSTs the image bytes to {base}/depth; expects a PFM body with an
// X-Depth-Convention header. Response dimensions are validated against the
// submitted image. Retries with exponential backoff.
DepthResponse fetch_depth(const std::filesystem::path& image_path, const DepthServiceConfig& cfg);

// Fetches depth for every `service` manifest entry (bounded concurrency) and
// rewrites the manifest only after all fetches validated.
void fetch_depth_for_manifest(const std::filesystem::path& manifest_path, const DepthServiceConfig& cfg,
                              int max_in_flight = 4);

}  // namespace splatgen
