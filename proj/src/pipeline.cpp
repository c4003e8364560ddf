#include "splatgen/pipeline.hpp"

#include <atomic>
#include <chrono>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "splatgen/annotations.hpp"
#include "splatgen/common.hpp"
#include "splatgen/image.hpp"

namespace splatgen {

using nlohmann::json;

namespace {

json extraction_to_json(const ExtractionParams& p) {
    return {{"ransac_iterations", p.ransac_iterations},
            {"plane_threshold_rel", p.plane_threshold_rel},
            {"sor_neighbors", p.sor_neighbors},
            {"sor_std_ratio", p.sor_std_ratio},
            {"dbscan_eps", p.dbscan_eps},
            {"dbscan_min_points", p.dbscan_min_points},
            {"sh_mode", p.sh_mode == ShTransformMode::rotate ? "rotate" : "truncate"}};
}

void extraction_from_json(const json& j, ExtractionParams& p) {
    p.ransac_iterations = j.value("ransac_iterations", p.ransac_iterations);
    p.plane_threshold_rel = j.value("plane_threshold_rel", p.plane_threshold_rel);
    p.sor_neighbors = j.value("sor_neighbors", p.sor_neighbors);
    p.sor_std_ratio = j.value("sor_std_ratio", p.sor_std_ratio);
    p.dbscan_eps = j.value("dbscan_eps", p.dbscan_eps);
    p.dbscan_min_points = j.value("dbscan_min_points", p.dbscan_min_points);
    if (j.contains("sh_mode")) {
        p.sh_mode = j.at("sh_mode").get<std::string>() == "truncate" ? ShTransformMode::truncate
                                                                     : ShTransformMode::rotate;
    }
}

json planes_to_json(const PlaneParams& p) {
    return {{"fov_deg", p.fov_deg},
            {"unproject_stride", p.unproject_stride},
            {"sor_neighbors", p.sor_neighbors},
            {"sor_std_ratio", p.sor_std_ratio},
            {"ransac_iterations", p.ransac_iterations},
            {"threshold_rel", p.threshold_rel},
            {"max_planes", p.max_planes},
            {"stop_fraction", p.stop_fraction},
            {"horizontal_tolerance_deg", p.horizontal_tolerance_deg},
            {"top_percentile", p.top_percentile}};
}

void planes_from_json(const json& j, PlaneParams& p) {
    p.fov_deg = j.value("fov_deg", p.fov_deg);
    p.unproject_stride = j.value("unproject_stride", p.unproject_stride);
    p.sor_neighbors = j.value("sor_neighbors", p.sor_neighbors);
    p.sor_std_ratio = j.value("sor_std_ratio", p.sor_std_ratio);
    p.ransac_iterations = j.value("ransac_iterations", p.ransac_iterations);
    p.threshold_rel = j.value("threshold_rel", p.threshold_rel);
    p.max_planes = j.value("max_planes", p.max_planes);
    p.stop_fraction = j.value("stop_fraction", p.stop_fraction);
    p.horizontal_tolerance_deg = j.value("horizontal_tolerance_deg", p.horizontal_tolerance_deg);
    p.top_percentile = j.value("top_percentile", p.top_percentile);
}

json augmentation_to_json(const AugmentationConfig& a) {
    return {{"sh_random", a.sh_random},
            {"p_blur", a.p_blur},
            {"blur_sigma", {a.blur_sigma_min, a.blur_sigma_max}},
            {"p_color", a.p_color},
            {"color_factor", {a.color_factor_min, a.color_factor_max}},
            {"p_noise", a.p_noise},
            {"noise_sigma_max", a.noise_sigma_max},
            {"p_tone", a.p_tone},
            {"tone_knot_jitter", a.tone_knot_jitter}};
}

void augmentation_from_json(const json& j, AugmentationConfig& a) {
    a.sh_random = j.value("sh_random", a.sh_random);
    a.p_blur = j.value("p_blur", a.p_blur);
    if (j.contains("blur_sigma")) {
        a.blur_sigma_min = j.at("blur_sigma").at(0).get<double>();
        a.blur_sigma_max = j.at("blur_sigma").at(1).get<double>();
    }
    a.p_color = j.value("p_color", a.p_color);
    if (j.contains("color_factor")) {
        a.color_factor_min = j.at("color_factor").at(0).get<double>();
        a.color_factor_max = j.at("color_factor").at(1).get<double>();
    }
    a.p_noise = j.value("p_noise", a.p_noise);
    a.noise_sigma_max = j.value("noise_sigma_max", a.noise_sigma_max);
    a.p_tone = j.value("p_tone", a.p_tone);
    a.tone_knot_jitter = j.value("tone_knot_jitter", a.tone_knot_jitter);
}

json scale_to_json(const ScaleParams& s) {
    return {{"height_ratio", s.height_ratio}, {"jitter", {s.jitter_min, s.jitter_max}}};
}

void scale_from_json(const json& j, ScaleParams& s) {
    s.height_ratio = j.value("height_ratio", s.height_ratio);
    if (j.contains("jitter")) {
        s.jitter_min = j.at("jitter").at(0).get<double>();
        s.jitter_max = j.at("jitter").at(1).get<double>();
    }
}

json composition_to_json(const ComposerConfig& c) {
    return {{"max_occlusion", c.max_occlusion},
            {"visibility_threshold", c.visibility_threshold},
            {"depth_margin_frac", c.depth_margin_frac},
            {"median_kernel", c.median_kernel},
            {"white_pass", c.white_pass},
            {"render_threads", c.render_threads}};
}

void composition_from_json(const json& j, ComposerConfig& c) {
    c.max_occlusion = j.value("max_occlusion", c.max_occlusion);
    c.visibility_threshold = j.value("visibility_threshold", c.visibility_threshold);
    c.depth_margin_frac = j.value("depth_margin_frac", c.depth_margin_frac);
    c.median_kernel = j.value("median_kernel", c.median_kernel);
    c.white_pass = j.value("white_pass", c.white_pass);
    c.render_threads = j.value("render_threads", c.render_threads);
}

std::string hex64(std::uint64_t value) {
    std::ostringstream ss;
    ss << std::hex << std::setw(16) << std::setfill('0') << value;
    return ss.str();
}

std::uint64_t hash_string(const std::string& s, std::uint64_t seed = 0xCBF29CE484222325ull) {
    return fnv1a(reinterpret_cast<const std::uint8_t*>(s.data()), s.size(), seed);
}

std::string index_name(int index) {
    std::ostringstream ss;
    ss << std::setw(6) << std::setfill('0') << index;
    return ss.str();
}

}  // namespace

GenerationConfig default_config() { return GenerationConfig{}; }

std::string dump_config(const GenerationConfig& config) {
    json doc;
    doc["objects"] = json::array();
    for (const auto& obj : config.objects) {
        doc["objects"].push_back({{"name", obj.name}, {"splat", obj.splat_path.string()}});
    }
    doc["backgrounds"] = config.backgrounds_manifest.string();
    doc["output_dir"] = config.output_dir.string();
    doc["split"] = config.split;
    doc["image_count"] = config.image_count;
    doc["objects_per_image"] = {config.objects_min, config.objects_max};
    doc["seed"] = config.master_seed;
    doc["workers"] = config.workers;
    doc["force"] = config.force;
    doc["extraction"] = extraction_to_json(config.extraction);
    doc["background_analysis"] = planes_to_json(config.background_analysis);
    doc["augmentation"] = augmentation_to_json(config.augmentation);
    doc["scale"] = scale_to_json(config.scale);
    doc["composition"] = composition_to_json(config.composition);
    return doc.dump(2) + "\n";
}

GenerationConfig parse_config(const std::string& text, const std::filesystem::path& base_dir) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::exception& e) {
        raise(ErrorCode::config_invalid, std::string("config is not valid JSON: ") + e.what());
    }
    auto resolve = [&](const std::string& p) {
        const std::filesystem::path candidate(p);
        return candidate.is_absolute() ? candidate : base_dir / candidate;
    };

    GenerationConfig config;
    try {
        for (const auto& obj : doc.at("objects")) {
            config.objects.push_back(
                {obj.at("name").get<std::string>(), resolve(obj.at("splat").get<std::string>())});
        }
        config.backgrounds_manifest = resolve(doc.at("backgrounds").get<std::string>());
        config.output_dir = resolve(doc.at("output_dir").get<std::string>());
        config.split = doc.value("split", config.split);
        config.image_count = doc.value("image_count", config.image_count);
        if (doc.contains("objects_per_image")) {
            config.objects_min = doc.at("objects_per_image").at(0).get<int>();
            config.objects_max = doc.at("objects_per_image").at(1).get<int>();
        }
        config.master_seed = doc.value("seed", config.master_seed);
        config.workers = doc.value("workers", config.workers);
        config.force = doc.value("force", config.force);
        if (doc.contains("extraction")) extraction_from_json(doc.at("extraction"), config.extraction);
        if (doc.contains("background_analysis")) {
            planes_from_json(doc.at("background_analysis"), config.background_analysis);
        }
        if (doc.contains("augmentation")) augmentation_from_json(doc.at("augmentation"), config.augmentation);
        if (doc.contains("scale")) scale_from_json(doc.at("scale"), config.scale);
        if (doc.contains("composition")) composition_from_json(doc.at("composition"), config.composition);
    } catch (const json::exception& e) {
        raise(ErrorCode::config_invalid, std::string("config field error: ") + e.what());
    }

    if (config.image_count < 1) raise(ErrorCode::config_invalid, "image_count must be >= 1");
    if (config.objects_min < 1 || config.objects_min > config.objects_max) {
        raise(ErrorCode::config_invalid, "objects_per_image range must satisfy 1 <= min <= max");
    }
    if (config.objects.empty()) raise(ErrorCode::config_invalid, "at least one object is required");
    for (const auto& obj : config.objects) {
        if (!std::filesystem::exists(obj.splat_path)) {
            raise(ErrorCode::config_invalid, "object splat not found: " + obj.splat_path.string());
        }
    }
    if (!std::filesystem::exists(config.backgrounds_manifest)) {
        raise(ErrorCode::config_invalid,
              "backgrounds manifest not found: " + config.backgrounds_manifest.string());
    }
    return config;
}

GenerationConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) raise(ErrorCode::config_invalid, "config file not found: " + path.string());
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_config(buffer.str(), path.has_parent_path() ? path.parent_path() : ".");
}

// ---------------------------------------------------------------------------
// Caches

ForegroundObject extract_foreground_cached(const ObjectSpec& spec, const ExtractionParams& params,
                                           const std::filesystem::path& cache_dir) {
    const std::uint64_t content = hash_file(spec.splat_path);
    const std::uint64_t key = hash_string(extraction_to_json(params).dump() + spec.name, content);
    const std::filesystem::path stem = cache_dir / "foregrounds" / (spec.name + "_" + hex64(key));

    std::filesystem::path ply = stem, meta = stem;
    ply += ".ply";
    meta += ".json";
    if (std::filesystem::exists(ply) && std::filesystem::exists(meta)) {
        return recenter(load_foreground(stem));
    }

    const SplatModel model = load_splat_ply(spec.splat_path);
    // Seeded from content + parameters so cache hits equal recomputation.
    Rng rng(derive_seed(content, key));
    ForegroundObject obj = extract_foreground(model, params, rng, spec.name);
    save_foreground(obj, stem);
    return recenter(obj);
}

namespace {

json support_plane_to_json(const SupportPlane& plane) {
    json points = json::array();
    for (const auto& p : plane.inlier_points) points.push_back({p.x(), p.y(), p.z()});
    return {{"normal", {plane.plane.normal.x(), plane.plane.normal.y(), plane.plane.normal.z()}},
            {"offset", plane.plane.offset},
            {"area", plane.area},
            {"up_alignment", plane.up_alignment},
            {"inlier_points", std::move(points)}};
}

SupportPlane support_plane_from_json(const json& j) {
    SupportPlane plane;
    for (int i = 0; i < 3; ++i) plane.plane.normal[i] = j.at("normal").at(i).get<double>();
    plane.plane.offset = j.at("offset").get<double>();
    plane.area = j.at("area").get<double>();
    plane.plane.area = plane.area;
    plane.up_alignment = j.at("up_alignment").get<double>();
    for (const auto& p : j.at("inlier_points")) {
        plane.inlier_points.emplace_back(p.at(0).get<double>(), p.at(1).get<double>(),
                                         p.at(2).get<double>());
    }
    return plane;
}

}  // namespace

BackgroundScene analyze_background_cached(const ManifestEntry& entry, const PlaneParams& params,
                                          const std::filesystem::path& cache_dir) {
    if (entry.use_service) {
        raise(ErrorCode::config_invalid,
              "background " + entry.image.string() + " still needs a depth fetch (run fetch-depth)");
    }
    const std::uint64_t key =
        hash_string(planes_to_json(params).dump() +
                        (entry.convention == DepthConvention::depth ? "depth" : "inverse_depth"),
                    mix64(hash_file(entry.image)) ^ hash_file(entry.depth));
    const std::filesystem::path cache_file = cache_dir / "backgrounds" / (hex64(key) + ".json");

    ImageRgb image = load_image_rgb(entry.image);
    const ImageGray raw_depth = load_depth_file(entry.depth);

    if (std::filesystem::exists(cache_file)) {
        std::ifstream in(cache_file);
        json doc = json::parse(in);
        BackgroundScene scene;
        scene.camera = intrinsics_from_fov(image.width, image.height, params.fov_deg);
        scene.depth = normalize_depth(raw_depth, entry.convention);
        scene.image = std::move(image);
        for (int i = 0; i < 3; ++i) scene.up_axis[i] = doc.at("up_axis").at(i).get<double>();
        scene.up_extent = doc.at("up_extent").get<double>();
        for (const auto& p : doc.at("planes")) scene.planes.push_back(support_plane_from_json(p));
        return scene;
    }

    Rng rng(key);
    BackgroundScene scene =
        analyze_background(std::move(image), raw_depth, entry.convention, params, rng);

    json doc;
    doc["up_axis"] = {scene.up_axis.x(), scene.up_axis.y(), scene.up_axis.z()};
    doc["up_extent"] = scene.up_extent;
    doc["planes"] = json::array();
    for (const auto& p : scene.planes) doc["planes"].push_back(support_plane_to_json(p));
    std::filesystem::create_directories(cache_file.parent_path());
    std::ofstream out(cache_file, std::ios::trunc);
    out << doc.dump() << "\n";
    return scene;
}

// ---------------------------------------------------------------------------
// Generation

namespace {

struct ImageJobResult {
    int index = 0;
    int width = 0, height = 0;
    // Annotation payloads in placement order; ids are assigned at aggregation.
    std::vector<AnnotationRecord> annotations;  // id/image_id filled later
    std::vector<int> category_ids;
    int rejected = 0;
    int resamples = 0;
};

struct Instance {
    int object_index;
    PlacementPose pose;
};

constexpr int kMaxResamples = 10;

ImageJobResult generate_image(int index, const GenerationConfig& config,
                              const std::vector<ForegroundObject>& objects,
                              const std::vector<BackgroundScene>& scenes,
                              const std::filesystem::path& image_path,
                              const std::filesystem::path& sidecar_path) {
    const std::uint64_t seed = derive_seed(config.master_seed, static_cast<std::uint64_t>(index));
    Rng rng(seed);

    const BackgroundScene& scene = scenes[rng.uniform_int(scenes.size())];
    const int count =
        config.objects_min + static_cast<int>(rng.uniform_int(
                                 static_cast<std::uint64_t>(config.objects_max - config.objects_min + 1)));

    auto draw_pose = [&](const ForegroundObject& obj) {
        const PlacementSample placement = sample_placement(scene.planes, rng);
        const double yaw = rng.uniform(0.0, 2.0 * M_PI);
        const double scale = choose_scale(obj, scene, rng, config.scale);
        return solve_pose(scene.planes[placement.plane_index].plane.normal, placement.point, yaw, scale);
    };

    std::vector<Instance> instances;
    for (int k = 0; k < count; ++k) {
        const int object_index = static_cast<int>(rng.uniform_int(objects.size()));
        instances.push_back({object_index, draw_pose(objects[object_index])});
    }

    ImageJobResult result;
    result.index = index;
    result.width = scene.image.width;
    result.height = scene.image.height;

    CompositionResult composed;
    std::vector<int> attempts(instances.size(), 0);
    std::uint64_t compose_call = 0;
    while (true) {
        if (instances.empty()) {
            composed.image = scene.image;
            composed.records.clear();
            break;
        }
        std::vector<Placement> placements;
        placements.reserve(instances.size());
        for (const Instance& inst : instances) {
            placements.emplace_back(&objects[inst.object_index], inst.pose);
        }
        Rng compose_rng(derive_seed(seed, 0x1000 + compose_call++));
        try {
            composed = compose(scene, placements, config.augmentation, config.composition, compose_rng);
            break;
        } catch (const AllOccludedError& e) {
            const std::size_t k = e.object_index();
            ++result.resamples;
            if (++attempts[k] > kMaxResamples) {
                instances.erase(instances.begin() + static_cast<std::ptrdiff_t>(k));
                attempts.erase(attempts.begin() + static_cast<std::ptrdiff_t>(k));
                ++result.rejected;
            } else {
                instances[k].pose = draw_pose(objects[instances[k].object_index]);
            }
        }
    }

    Rng augment_rng(derive_seed(seed, 0x2));
    const ImageRgb final_image = augment_pixels(composed.image, augment_rng, config.augmentation);
    write_file_bytes(image_path, encode_png_rgb(final_image));

    json sidecar = json::array();
    for (std::size_t k = 0; k < composed.records.size(); ++k) {
        const CompositionRecord& record = composed.records[k];
        const bool nonempty = std::any_of(record.visibility_mask.begin(), record.visibility_mask.end(),
                                          [](std::uint8_t v) { return v != 0; });
        if (!nonempty) continue;  // below-threshold survivor; nothing to annotate
        const int category = instances[k].object_index + 1;
        AnnotationRecord ann = mask_to_annotation(record.visibility_mask, result.height, result.width,
                                                  category, /*image_id=*/0, /*annotation_id=*/0);
        sidecar.push_back({{"category_id", category},
                           {"bbox", ann.bbox},
                           {"area", ann.area},
                           {"counts", ann.segmentation.counts}});
        result.category_ids.push_back(category);
        result.annotations.push_back(std::move(ann));
    }
    std::filesystem::create_directories(sidecar_path.parent_path());
    std::ofstream side(sidecar_path, std::ios::trunc);
    side << sidecar.dump() << "\n";
    return result;
}

ImageJobResult load_sidecar(int index, const std::filesystem::path& sidecar_path, int width, int height) {
    ImageJobResult result;
    result.index = index;
    result.width = width;
    result.height = height;
    std::ifstream in(sidecar_path);
    json doc = json::parse(in);
    for (const auto& item : doc) {
        AnnotationRecord ann;
        ann.category_id = item.at("category_id").get<int>();
        for (int i = 0; i < 4; ++i) ann.bbox[i] = item.at("bbox").at(i).get<double>();
        ann.area = item.at("area").get<double>();
        ann.segmentation.height = height;
        ann.segmentation.width = width;
        ann.segmentation.counts = item.at("counts").get<std::vector<int>>();
        result.category_ids.push_back(ann.category_id);
        result.annotations.push_back(std::move(ann));
    }
    return result;
}

}  // namespace

GenerationSummary run_generate(const GenerationConfig& config) {
    using clock = std::chrono::steady_clock;
    GenerationSummary summary;
    const std::filesystem::path cache_dir = config.output_dir / "cache";

    const auto t0 = clock::now();
    std::vector<ForegroundObject> objects;
    for (const auto& spec : config.objects) {
        try {
            objects.push_back(extract_foreground_cached(spec, config.extraction, cache_dir));
        } catch (const Error& e) {
            raise(e.code(), "object \"" + spec.name + "\": " + e.what());
        }
    }

    const auto t1 = clock::now();
    const BackgroundManifest manifest = load_manifest(config.backgrounds_manifest);
    std::vector<BackgroundScene> scenes;
    for (const auto& entry : manifest.entries) {
        BackgroundScene scene = analyze_background_cached(entry, config.background_analysis, cache_dir);
        if (scene.planes.empty()) {
            std::cerr << "warning: no usable support planes in " << entry.image.string()
                      << "; background excluded\n";
            summary.excluded_backgrounds.push_back(entry.image.string());
            continue;
        }
        scenes.push_back(std::move(scene));
    }
    if (scenes.empty()) {
        raise(ErrorCode::no_usable_background, "no background has a usable support plane");
    }

    const auto t2 = clock::now();
    const std::filesystem::path split_dir = config.output_dir / config.split;
    std::filesystem::create_directories(split_dir);

    std::vector<ImageJobResult> results(static_cast<std::size_t>(config.image_count));
    std::atomic<int> cursor{0};
    std::mutex failure_mutex;
    std::exception_ptr failure;

    auto worker = [&]() {
        while (true) {
            const int index = cursor.fetch_add(1);
            if (index >= config.image_count) return;
            {
                std::lock_guard lock(failure_mutex);
                if (failure) return;
            }
            const std::filesystem::path image_path = split_dir / (index_name(index) + ".png");
            const std::filesystem::path sidecar_path =
                cache_dir / "annotations" / (config.split + "_" + index_name(index) + ".json");
            try {
                if (!config.force && std::filesystem::exists(image_path) &&
                    std::filesystem::exists(sidecar_path)) {
                    // Per-image seeding makes the resumed result identical, so
                    // reuse the image and its cached annotations.
                    const std::uint64_t seed =
                        derive_seed(config.master_seed, static_cast<std::uint64_t>(index));
                    Rng rng(seed);
                    const BackgroundScene& scene = scenes[rng.uniform_int(scenes.size())];
                    results[index] =
                        load_sidecar(index, sidecar_path, scene.image.width, scene.image.height);
                } else {
                    results[index] =
                        generate_image(index, config, objects, scenes, image_path, sidecar_path);
                }
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) {
                    try {
                        std::rethrow_exception(std::current_exception());
                    } catch (const Error& e) {
                        failure = std::make_exception_ptr(
                            Error(e.code(), "image " + std::to_string(index) + ": " + e.what()));
                    } catch (...) {
                        failure = std::current_exception();
                    }
                }
                return;
            }
        }
    };

    int workers = config.workers;
    if (workers <= 0) workers = static_cast<int>(std::thread::hardware_concurrency());
    workers = std::max(1, std::min(workers, config.image_count));
    if (workers == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int i = 0; i < workers; ++i) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    if (failure) std::rethrow_exception(failure);

    // Deterministic aggregation ordered by image index.
    std::vector<CocoImage> images;
    std::vector<AnnotationRecord> annotations;
    std::vector<CocoCategory> categories;
    for (std::size_t i = 0; i < config.objects.size(); ++i) {
        categories.push_back({static_cast<int>(i) + 1, config.objects[i].name});
    }
    int next_annotation = 1;
    for (ImageJobResult& result : results) {
        const int image_id = result.index + 1;
        images.push_back({image_id, config.split + "/" + index_name(result.index) + ".png",
                          result.width, result.height});
        for (std::size_t k = 0; k < result.annotations.size(); ++k) {
            AnnotationRecord ann = std::move(result.annotations[k]);
            ann.id = next_annotation++;
            ann.image_id = image_id;
            summary.per_category[config.objects[static_cast<std::size_t>(ann.category_id) - 1].name]++;
            annotations.push_back(std::move(ann));
        }
        summary.rejected_instances += result.rejected;
        summary.resample_events += result.resamples;
    }
    write_coco(images, annotations, categories, config.output_dir / "annotations.json");

    const auto t3 = clock::now();
    summary.images = config.image_count;
    summary.annotations = static_cast<int>(annotations.size());
    const auto seconds = [](auto a, auto b) { return std::chrono::duration<double>(b - a).count(); };
    summary.extract_seconds = seconds(t0, t1);
    summary.analyze_seconds = seconds(t1, t2);
    summary.generate_seconds = seconds(t2, t3);

    // summary.json stays byte-stable across runs; timings go to stdout only.
    json doc;
    doc["images"] = summary.images;
    doc["annotations"] = summary.annotations;
    doc["per_category"] = summary.per_category;
    doc["rejected_instances"] = summary.rejected_instances;
    doc["resample_events"] = summary.resample_events;
    doc["excluded_backgrounds"] = summary.excluded_backgrounds;
    std::ofstream out(config.output_dir / "summary.json", std::ios::trunc);
    out << doc.dump(2) << "\n";
    return summary;
}

}  // namespace splatgen
