#include "splatgen/depth_client.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <mutex>
#include <thread>

#include <httplib.h>

#include "splatgen/common.hpp"

namespace splatgen {

DepthServiceConfig with_env_overrides(DepthServiceConfig cfg) {
    if (const char* url = std::getenv("SPLATGEN_DEPTH_URL")) cfg.base_url = url;
    return cfg;
}

namespace {

std::string content_type_for(const std::filesystem::path& path) {
    std::string ext = path.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
    if (ext == ".png") return "image/png";
    if (ext == ".jpg" || ext == ".jpeg") return "image/jpeg";
    raise(ErrorCode::degenerate_input, "unsupported image type " + ext);
}

ErrorCode classify(httplib::Error err) {
    switch (err) {
        case httplib::Error::ConnectionTimeout:
        case httplib::Error::Read:
        case httplib::Error::Write:
            return ErrorCode::timeout;
        default:
            return ErrorCode::unreachable;
    }
}

}  // namespace

DepthResponse fetch_depth(const std::filesystem::path& image_path, const DepthServiceConfig& cfg) {
    const auto body = read_file_bytes(image_path);
    const std::string content_type = content_type_for(image_path);
    const ImageRgb submitted = load_image_rgb(image_path);

    httplib::Client client(cfg.base_url);
    const auto timeout = std::chrono::milliseconds(static_cast<long>(cfg.timeout_seconds * 1000.0));
    client.set_connection_timeout(timeout);
    client.set_read_timeout(timeout);
    client.set_write_timeout(timeout);

    httplib::Headers headers;
    if (!cfg.bearer_token.empty()) headers.emplace("Authorization", "Bearer " + cfg.bearer_token);

    ErrorCode last_code = ErrorCode::unreachable;
    std::string last_message = "no attempt made";
    const int attempts = std::max(0, cfg.retry_count) + 1;
    for (int attempt = 0; attempt < attempts; ++attempt) {
        if (attempt > 0) {
            const double delay = cfg.backoff_base_seconds * std::pow(2.0, attempt - 1);
            std::this_thread::sleep_for(std::chrono::duration<double>(delay));
        }
        auto res = client.Post("/depth", headers, reinterpret_cast<const char*>(body.data()),
                               body.size(), content_type);
        if (!res) {
            last_code = classify(res.error());
            last_message = "request failed (" + httplib::to_string(res.error()) + ")";
            continue;
        }
        if (res->status < 200 || res->status >= 300) {
            last_code = ErrorCode::bad_status;
            last_message = "HTTP " + std::to_string(res->status) + " from " + cfg.base_url;
            continue;
        }
        DepthResponse out;
        try {
            out.depth = decode_pfm(reinterpret_cast<const std::uint8_t*>(res->body.data()),
                                   res->body.size());
        } catch (const Error& e) {
            raise(ErrorCode::malformed_response, e.what());
        }
        const std::string convention = res->get_header_value("X-Depth-Convention");
        if (convention == "depth") {
            out.convention = DepthConvention::depth;
        } else if (convention == "inverse_depth") {
            out.convention = DepthConvention::inverse_depth;
        } else {
            raise(ErrorCode::malformed_response, "missing or unknown X-Depth-Convention header");
        }
        if (out.depth.width != submitted.width || out.depth.height != submitted.height) {
            raise(ErrorCode::malformed_response,
                  "depth dimensions " + std::to_string(out.depth.width) + "x" +
                      std::to_string(out.depth.height) + " do not match the submitted image");
        }
        return out;
    }
    raise(last_code, last_message + " after " + std::to_string(attempts) + " attempts");
}

void fetch_depth_for_manifest(const std::filesystem::path& manifest_path, const DepthServiceConfig& cfg,
                              int max_in_flight) {
    BackgroundManifest manifest = load_manifest(manifest_path);
    std::vector<std::size_t> todo;
    for (std::size_t i = 0; i < manifest.entries.size(); ++i) {
        if (manifest.entries[i].use_service) todo.push_back(i);
    }
    if (todo.empty()) return;

    std::mutex mutex;
    std::size_t cursor = 0;
    std::exception_ptr failure;
    auto worker = [&]() {
        while (true) {
            std::size_t job;
            {
                std::lock_guard lock(mutex);
                if (failure || cursor >= todo.size()) return;
                job = todo[cursor++];
            }
            try {
                ManifestEntry& entry = manifest.entries[job];
                const DepthResponse response = fetch_depth(entry.image, cfg);
                std::filesystem::path depth_path = entry.image;
                depth_path.replace_extension(".pfm");
                save_pfm(response.depth, depth_path);
                std::lock_guard lock(mutex);
                entry.depth = depth_path;
                entry.use_service = false;
                entry.convention = response.convention;
            } catch (...) {
                std::lock_guard lock(mutex);
                if (!failure) failure = std::current_exception();
                return;
            }
        }
    };

    const int pool_size = std::max(1, std::min<int>(max_in_flight, static_cast<int>(todo.size())));
    std::vector<std::thread> pool;
    for (int i = 0; i < pool_size; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();

    // Write-after-validate: any failure leaves the manifest untouched.
    if (failure) std::rethrow_exception(failure);
    save_manifest(manifest, manifest_path);
}

}  // namespace splatgen
