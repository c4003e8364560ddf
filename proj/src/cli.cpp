#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "splatgen/annotations.hpp"
#include "splatgen/common.hpp"
#include "splatgen/depth_client.hpp"
#include "splatgen/image.hpp"
#include "splatgen/pipeline.hpp"

namespace splatgen {

namespace {

Camera camera_from_json(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) raise(ErrorCode::config_invalid, "camera file not found: " + path.string());
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        raise(ErrorCode::config_invalid, std::string("camera file is not valid JSON: ") + e.what());
    }

    Camera cam;
    cam.width = doc.at("width").get<int>();
    cam.height = doc.at("height").get<int>();
    if (doc.contains("fx")) {
        cam.fx = doc.at("fx").get<double>();
        cam.fy = doc.at("fy").get<double>();
        cam.cx = doc.at("cx").get<double>();
        cam.cy = doc.at("cy").get<double>();
    } else {
        cam = intrinsics_from_fov(cam.width, cam.height, doc.value("fov_deg", 55.0));
    }
    if (doc.contains("rotation")) {
        for (int r = 0; r < 3; ++r) {
            for (int c = 0; c < 3; ++c) cam.rotation(r, c) = doc.at("rotation").at(r).at(c).get<double>();
        }
    } else if (doc.contains("quaternion_wxyz")) {
        const auto& q = doc.at("quaternion_wxyz");
        cam.rotation = Eigen::Quaterniond(q.at(0).get<double>(), q.at(1).get<double>(),
                                          q.at(2).get<double>(), q.at(3).get<double>())
                           .normalized()
                           .toRotationMatrix();
    }
    if (doc.contains("translation")) {
        for (int i = 0; i < 3; ++i) cam.translation[i] = doc.at("translation").at(i).get<double>();
    }
    return cam;
}

int cmd_extract(const std::filesystem::path& input, const std::filesystem::path& output_dir,
                std::string name, std::uint64_t seed, bool seed_given, const ExtractionParams& params) {
    if (name.empty()) name = input.stem().string();
    const SplatModel model = load_splat_ply(input);
    Rng rng(seed_given ? seed : derive_seed(hash_file(input), 0));
    const ForegroundObject obj = extract_foreground(model, params, rng, name);
    save_foreground(obj, output_dir / name);
    std::cout << "extracted \"" << name << "\": " << obj.stages.input << " -> "
              << obj.stages.after_plane << " (plane filter) -> " << obj.stages.after_statistical
              << " (statistical filter) -> " << obj.stages.after_cluster << " (cluster filter)\n"
              << "up (" << obj.up.transpose() << "), base (" << obj.base_point.transpose() << ")\n"
              << "wrote " << (output_dir / name).string() << ".ply\n";
    return 0;
}

int cmd_analyze(const std::filesystem::path& manifest_path, const std::filesystem::path& cache_dir,
                const PlaneParams& params) {
    const BackgroundManifest manifest = load_manifest(manifest_path);
    for (const auto& entry : manifest.entries) {
        const BackgroundScene scene = analyze_background_cached(entry, params, cache_dir);
        std::cout << entry.image.filename().string() << ": " << scene.planes.size()
                  << " support plane(s), up (" << scene.up_axis.transpose() << ")\n";
    }
    return 0;
}

int cmd_preview(const std::filesystem::path& manifest_path, const std::filesystem::path& cache_dir,
                const std::filesystem::path& output_dir, int samples, std::uint64_t seed,
                const PlaneParams& params) {
    static const float kPalette[8][3] = {{0.90f, 0.10f, 0.10f}, {0.10f, 0.80f, 0.10f},
                                         {0.15f, 0.35f, 0.95f}, {0.95f, 0.85f, 0.10f},
                                         {0.85f, 0.15f, 0.85f}, {0.10f, 0.85f, 0.85f},
                                         {0.95f, 0.55f, 0.10f}, {0.55f, 0.20f, 0.80f}};
    const BackgroundManifest manifest = load_manifest(manifest_path);
    for (std::size_t i = 0; i < manifest.entries.size(); ++i) {
        const auto& entry = manifest.entries[i];
        const BackgroundScene scene = analyze_background_cached(entry, params, cache_dir);
        if (scene.planes.empty()) {
            std::cerr << "warning: no support planes in " << entry.image.string() << "; skipped\n";
            continue;
        }
        ImageRgb overlay = scene.image;
        Rng rng(derive_seed(seed, i));
        for (int s = 0; s < samples; ++s) {
            const PlacementSample sample = sample_placement(scene.planes, rng);
            const Eigen::Vector2d px = scene.camera.project(sample.point);
            const int cx = static_cast<int>(std::lround(px.x()));
            const int cy = static_cast<int>(std::lround(px.y()));
            const float* color = kPalette[sample.plane_index % 8];
            for (int dy = -1; dy <= 1; ++dy) {
                for (int dx = -1; dx <= 1; ++dx) {
                    const int x = cx + dx, y = cy + dy;
                    if (x < 0 || y < 0 || x >= overlay.width || y >= overlay.height) continue;
                    float* p = overlay.px(y, x);
                    p[0] = color[0];
                    p[1] = color[1];
                    p[2] = color[2];
                }
            }
        }
        std::filesystem::path out = output_dir / (entry.image.stem().string() + "_placements.png");
        save_png_rgb(overlay, out);
        std::cout << "wrote " << out.string() << " (" << scene.planes.size() << " planes)\n";
    }
    return 0;
}

int cmd_render(const std::filesystem::path& input, const std::filesystem::path& camera_path,
               const std::filesystem::path& output_dir, bool white,
               const std::vector<double>& sh_dir) {
    const SplatModel model = load_splat_ply(input);
    const Camera cam = camera_from_json(camera_path);
    RenderOptions opts;
    opts.white_override = white;
    if (!sh_dir.empty()) {
        Eigen::Vector3f dir(static_cast<float>(sh_dir[0]), static_cast<float>(sh_dir[1]),
                            static_cast<float>(sh_dir[2]));
        opts.sh_dir_override = dir.normalized();
    }
    opts.threads = 0;
    const RenderOutput out = render(model, cam, opts);

    ImageRgb color = ImageRgb::zeros(cam.width, cam.height);
    ImageGray alpha = ImageGray::zeros(cam.width, cam.height);
    ImageGray depth = ImageGray::zeros(cam.width, cam.height);
    for (std::size_t p = 0; p < color.pixel_count(); ++p) {
        for (int c = 0; c < 3; ++c) color.data[3 * p + c] = out.color[3 * p + c];
        alpha.data[p] = out.alpha[p];
        depth.data[p] = out.depth[p];
    }
    std::filesystem::create_directories(output_dir);
    save_png_rgb(color, output_dir / "color.png");
    save_png_gray(alpha, output_dir / "alpha.png");
    save_pfm(depth, output_dir / "depth.pfm");
    std::cout << "wrote color.png, alpha.png, depth.pfm to " << output_dir.string() << "\n";
    return 0;
}

int cmd_generate(const std::filesystem::path& config_path, bool force, int workers) {
    GenerationConfig config = load_config(config_path);
    if (force) config.force = true;
    if (workers > 0) config.workers = workers;
    const GenerationSummary summary = run_generate(config);
    std::cout << "generated " << summary.images << " images, " << summary.annotations
              << " annotations (" << summary.rejected_instances << " instances rejected, "
              << summary.resample_events << " resamples)\n";
    for (const auto& [name, count] : summary.per_category) {
        std::cout << "  " << name << ": " << count << "\n";
    }
    std::cout << "timings: extract " << summary.extract_seconds << " s, analyze "
              << summary.analyze_seconds << " s, generate " << summary.generate_seconds << " s\n";
    return 0;
}

void add_extraction_options(CLI::App* cmd, ExtractionParams& params) {
    cmd->add_option("--ransac-iterations", params.ransac_iterations);
    cmd->add_option("--plane-threshold-rel", params.plane_threshold_rel);
    cmd->add_option("--sor-neighbors", params.sor_neighbors);
    cmd->add_option("--sor-ratio", params.sor_std_ratio);
    cmd->add_option("--dbscan-eps", params.dbscan_eps);
    cmd->add_option("--dbscan-min-points", params.dbscan_min_points);
}

void add_plane_options(CLI::App* cmd, PlaneParams& params) {
    cmd->add_option("--fov", params.fov_deg);
    cmd->add_option("--stride", params.unproject_stride);
    cmd->add_option("--max-planes", params.max_planes);
    cmd->add_option("--horizontal-tolerance", params.horizontal_tolerance_deg);
    cmd->add_option("--top-percentile", params.top_percentile);
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
    CLI::App app{"synthetic instance-segmentation data from gaussian splat models"};
    app.require_subcommand(0, 1);

    // extract
    auto* extract = app.add_subcommand("extract", "isolate the foreground object from a splat model");
    std::filesystem::path extract_input, extract_output = ".";
    std::string extract_name;
    std::uint64_t extract_seed = 0;
    ExtractionParams extract_params;
    extract->add_option("splat", extract_input, "input splat PLY")->required();
    extract->add_option("-o,--output", extract_output, "output directory");
    extract->add_option("--name", extract_name, "category name (default: input stem)");
    auto* seed_opt = extract->add_option("--seed", extract_seed, "extraction seed");
    add_extraction_options(extract, extract_params);

    // analyze-bg
    auto* analyze = app.add_subcommand("analyze-bg", "detect support planes in background images");
    std::filesystem::path analyze_manifest, analyze_cache;
    PlaneParams analyze_params;
    analyze->add_option("manifest", analyze_manifest, "background manifest JSON")->required();
    analyze->add_option("--cache", analyze_cache, "cache directory (default: <manifest dir>/cache)");
    add_plane_options(analyze, analyze_params);

    // preview-placements
    auto* preview = app.add_subcommand("preview-placements", "overlay sampled placement points");
    std::filesystem::path preview_manifest, preview_cache, preview_output;
    int preview_samples = 1000;
    std::uint64_t preview_seed = 0;
    PlaneParams preview_params;
    preview->add_option("manifest", preview_manifest, "background manifest JSON")->required();
    preview->add_option("-n,--samples", preview_samples, "placement samples per image");
    preview->add_option("-o,--output", preview_output, "output directory (default: <manifest dir>/placements)");
    preview->add_option("--cache", preview_cache, "cache directory");
    preview->add_option("--seed", preview_seed, "sampling seed");
    add_plane_options(preview, preview_params);

    // render
    auto* render_cmd = app.add_subcommand("render", "debug-render a splat model");
    std::filesystem::path render_input, render_camera, render_output = "render_out";
    bool render_white = false;
    std::vector<double> render_sh_dir;
    render_cmd->add_option("splat", render_input, "splat PLY to render")->required();
    render_cmd->add_option("--camera", render_camera, "camera JSON")->required();
    render_cmd->add_option("-o,--output", render_output, "output directory");
    render_cmd->add_flag("--white", render_white, "force splat colors to white");
    render_cmd->add_option("--sh-dir", render_sh_dir, "override SH direction (3 components)")
        ->expected(3);

    // generate
    auto* generate = app.add_subcommand("generate", "generate a dataset from a config file");
    std::filesystem::path generate_config;
    bool generate_force = false, generate_print = false;
    int generate_workers = 0;
    generate->add_option("config", generate_config, "generation config JSON");
    generate->add_flag("--force", generate_force, "regenerate existing images");
    generate->add_flag("--print-config", generate_print, "print the default config and exit");
    generate->add_option("--workers", generate_workers, "worker threads (0 = hardware)");

    // fetch-depth
    auto* fetch = app.add_subcommand("fetch-depth", "fill manifest depth entries from a depth service");
    std::filesystem::path fetch_manifest;
    DepthServiceConfig fetch_cfg;
    int fetch_parallel = 4;
    fetch->add_option("manifest", fetch_manifest, "background manifest JSON")->required();
    fetch->add_option("--url", fetch_cfg.base_url, "service base URL (or SPLATGEN_DEPTH_URL)");
    fetch->add_option("--timeout", fetch_cfg.timeout_seconds, "per-request timeout seconds");
    fetch->add_option("--retries", fetch_cfg.retry_count, "retry count");
    fetch->add_option("--token", fetch_cfg.bearer_token, "bearer token");
    fetch->add_option("--parallel", fetch_parallel, "max requests in flight");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (extract->parsed()) {
            return cmd_extract(extract_input, extract_output, extract_name, extract_seed,
                               seed_opt->count() > 0, extract_params);
        }
        if (analyze->parsed()) {
            if (analyze_cache.empty()) analyze_cache = analyze_manifest.parent_path() / "cache";
            return cmd_analyze(analyze_manifest, analyze_cache, analyze_params);
        }
        if (preview->parsed()) {
            if (preview_cache.empty()) preview_cache = preview_manifest.parent_path() / "cache";
            if (preview_output.empty()) preview_output = preview_manifest.parent_path() / "placements";
            return cmd_preview(preview_manifest, preview_cache, preview_output, preview_samples,
                               preview_seed, preview_params);
        }
        if (render_cmd->parsed()) {
            return cmd_render(render_input, render_camera, render_output, render_white, render_sh_dir);
        }
        if (generate->parsed()) {
            if (generate_print) {
                std::cout << dump_config(default_config());
                return 0;
            }
            if (generate_config.empty()) {
                std::cerr << "error: generate needs a config file (or --print-config)\n";
                return 1;
            }
            return cmd_generate(generate_config, generate_force, generate_workers);
        }
        if (fetch->parsed()) {
            fetch_cfg = with_env_overrides(fetch_cfg);
            if (fetch_cfg.base_url.empty()) {
                std::cerr << "error: fetch-depth needs --url or SPLATGEN_DEPTH_URL\n";
                return 1;
            }
            fetch_depth_for_manifest(fetch_manifest, fetch_cfg, fetch_parallel);
            std::cout << "manifest updated: " << fetch_manifest.string() << "\n";
            return 0;
        }
        std::cout << app.help();
        return 0;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return e.code() == ErrorCode::config_invalid ? 1 : 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}

}  // namespace splatgen
