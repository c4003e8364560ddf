#include "splatgen/extraction.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <optional>

#include <json.hpp>

#include "splatgen/common.hpp"
#include "splatgen/sh.hpp"

namespace splatgen {

ForegroundObject extract_foreground(const SplatModel& model, const ExtractionParams& params, Rng& rng,
                                    const std::string& name) {
    if (model.empty()) raise(ErrorCode::empty_model, "cannot extract from an empty model");

    PointCloud cloud;
    cloud.points.reserve(model.size());
    for (const Gaussian& g : model.gaussians) cloud.points.push_back(g.position.cast<double>());

    StageCounts stages;
    stages.input = cloud.size();

    const double diag = bbox_diagonal(cloud.points);
    if (diag <= 0) raise(ErrorCode::no_plane_found, "model has zero spatial extent");
    const double threshold = params.plane_threshold_rel * diag;

    Plane plane;
    try {
        plane = ransac_plane(cloud, params.ransac_iterations, threshold, rng);
    } catch (const Error& e) {
        if (e.code() == ErrorCode::degenerate_cloud) raise(ErrorCode::no_plane_found, e.what());
        throw;
    }

    std::vector<char> on_plane(cloud.size(), 0);
    for (int i : plane.inliers) on_plane[i] = 1;
    std::vector<int> remaining;
    for (std::size_t i = 0; i < cloud.size(); ++i) {
        if (!on_plane[i]) remaining.push_back(static_cast<int>(i));
    }
    stages.after_plane = remaining.size();

    auto stage_report = [&stages]() {
        return "stage counts: input " + std::to_string(stages.input) + ", after plane filter " +
               std::to_string(stages.after_plane) + ", after statistical filter " +
               std::to_string(stages.after_statistical) + ", after cluster filter " +
               std::to_string(stages.after_cluster);
    };

    if (remaining.size() <= static_cast<std::size_t>(params.sor_neighbors)) {
        raise(ErrorCode::no_cluster_survives,
              "too few points remain after plane removal; " + stage_report());
    }
    const PointCloud off_plane = cloud.subset(remaining);
    const std::vector<int> kept = statistical_outlier_filter(off_plane, params.sor_neighbors,
                                                             params.sor_std_ratio);
    const PointCloud filtered = off_plane.subset(kept);
    stages.after_statistical = filtered.size();
    if (filtered.empty()) {
        raise(ErrorCode::no_cluster_survives, "statistical filter removed everything; " + stage_report());
    }

    const std::vector<int> labels = dbscan(filtered, params.dbscan_eps, params.dbscan_min_points);
    const int clusters = *std::max_element(labels.begin(), labels.end()) + 1;
    if (clusters <= 0) {
        raise(ErrorCode::no_cluster_survives, "all points labeled noise; " + stage_report());
    }

    // The middle is the average of all filtered points.
    Eigen::Vector3d middle = Eigen::Vector3d::Zero();
    for (const auto& p : filtered.points) middle += p;
    middle /= static_cast<double>(filtered.size());

    std::vector<Eigen::Vector3d> centroids(clusters, Eigen::Vector3d::Zero());
    std::vector<std::size_t> sizes(clusters, 0);
    for (std::size_t i = 0; i < filtered.size(); ++i) {
        if (labels[i] < 0) continue;
        centroids[labels[i]] += filtered.points[i];
        ++sizes[labels[i]];
    }
    int best = 0;
    double best_dist = std::numeric_limits<double>::infinity();
    for (int c = 0; c < clusters; ++c) {
        centroids[c] /= static_cast<double>(sizes[c]);
        const double dist = (centroids[c] - middle).norm();
        if (dist < best_dist) {
            best_dist = dist;
            best = c;
        }
    }

    ForegroundObject obj;
    obj.name = name;
    obj.params = params;
    obj.model.sh_degree = model.sh_degree;
    obj.model.source_path = model.source_path;
    for (std::size_t i = 0; i < filtered.size(); ++i) {
        if (labels[i] == best) obj.model.gaussians.push_back(model.gaussians[filtered.payload[i]]);
    }
    stages.after_cluster = obj.model.size();
    obj.stages = stages;

    // Ground normal oriented toward the surviving cluster.
    obj.up = plane.normal;
    if (plane.signed_distance(centroids[best]) < 0) obj.up = -obj.up;
    obj.base_point = plane.project(centroids[best]);
    return obj;
}

SplatModel transform_model(const SplatModel& model, const Eigen::Quaterniond& rotation,
                           const Eigen::Vector3d& translation, double uniform_scale,
                           ShTransformMode sh_mode) {
    SplatModel out;
    out.source_path = model.source_path;
    out.sh_degree = sh_mode == ShTransformMode::truncate ? 0 : model.sh_degree;
    out.gaussians.reserve(model.size());

    const Eigen::Quaternionf rot_f = rotation.cast<float>();
    const Eigen::Vector3f trans_f = translation.cast<float>();
    const float scale_f = static_cast<float>(uniform_scale);

    const bool rotate_sh = sh_mode == ShTransformMode::rotate && model.sh_degree >= 1;
    std::optional<ShRotation> sh_rotation;
    if (rotate_sh) sh_rotation.emplace(rotation.toRotationMatrix());

    for (const Gaussian& g : model.gaussians) {
        Gaussian t = g;
        t.position = rot_f * (scale_f * g.position) + trans_f;
        t.scale = scale_f * g.scale;
        t.rotation = (rot_f * g.rotation).normalized();
        if (rotate_sh) {
            sh_rotation->apply(t.sh, model.sh_degree);
        } else if (sh_mode == ShTransformMode::truncate) {
            t.sh.block<15, 3>(1, 0).setZero();
        }
        out.gaussians.push_back(std::move(t));
    }
    return out;
}

ForegroundObject recenter(const ForegroundObject& obj) {
    const Eigen::Quaterniond q = rotation_between(obj.up, Eigen::Vector3d::UnitY());
    const Eigen::Vector3d translation = -(q * obj.base_point);

    ForegroundObject out;
    out.model = transform_model(obj.model, q, translation, 1.0, obj.params.sh_mode);
    out.up = Eigen::Vector3d::UnitY();
    out.base_point = Eigen::Vector3d::Zero();
    out.name = obj.name;
    out.stages = obj.stages;
    out.params = obj.params;
    return out;
}

void save_foreground(const ForegroundObject& obj, const std::filesystem::path& stem) {
    std::filesystem::path ply = stem;
    ply += ".ply";
    save_splat_ply(obj.model, ply);

    nlohmann::json meta;
    meta["name"] = obj.name;
    meta["up"] = {obj.up.x(), obj.up.y(), obj.up.z()};
    meta["base_point"] = {obj.base_point.x(), obj.base_point.y(), obj.base_point.z()};
    meta["stages"] = {{"input", obj.stages.input},
                      {"after_plane", obj.stages.after_plane},
                      {"after_statistical", obj.stages.after_statistical},
                      {"after_cluster", obj.stages.after_cluster}};
    meta["params"] = {{"ransac_iterations", obj.params.ransac_iterations},
                      {"plane_threshold_rel", obj.params.plane_threshold_rel},
                      {"sor_neighbors", obj.params.sor_neighbors},
                      {"sor_std_ratio", obj.params.sor_std_ratio},
                      {"dbscan_eps", obj.params.dbscan_eps},
                      {"dbscan_min_points", obj.params.dbscan_min_points},
                      {"sh_mode", obj.params.sh_mode == ShTransformMode::rotate ? "rotate" : "truncate"}};

    std::filesystem::path side = stem;
    side += ".json";
    if (side.has_parent_path()) std::filesystem::create_directories(side.parent_path());
    std::ofstream out(side, std::ios::trunc);
    if (!out) raise(ErrorCode::io_failure, "cannot write " + side.string());
    out << meta.dump(2) << "\n";
}

ForegroundObject load_foreground(const std::filesystem::path& stem) {
    std::filesystem::path ply = stem;
    ply += ".ply";
    std::filesystem::path side = stem;
    side += ".json";

    ForegroundObject obj;
    obj.model = load_splat_ply(ply);

    std::ifstream in(side);
    if (!in) raise(ErrorCode::io_failure, "cannot open " + side.string());
    nlohmann::json meta = nlohmann::json::parse(in);
    obj.name = meta.at("name").get<std::string>();
    for (int i = 0; i < 3; ++i) {
        obj.up[i] = meta.at("up").at(i).get<double>();
        obj.base_point[i] = meta.at("base_point").at(i).get<double>();
    }
    const auto& stages = meta.at("stages");
    obj.stages.input = stages.at("input").get<std::size_t>();
    obj.stages.after_plane = stages.at("after_plane").get<std::size_t>();
    obj.stages.after_statistical = stages.at("after_statistical").get<std::size_t>();
    obj.stages.after_cluster = stages.at("after_cluster").get<std::size_t>();
    const auto& params = meta.at("params");
    obj.params.ransac_iterations = params.at("ransac_iterations").get<int>();
    obj.params.plane_threshold_rel = params.at("plane_threshold_rel").get<double>();
    obj.params.sor_neighbors = params.at("sor_neighbors").get<int>();
    obj.params.sor_std_ratio = params.at("sor_std_ratio").get<double>();
    obj.params.dbscan_eps = params.at("dbscan_eps").get<double>();
    obj.params.dbscan_min_points = params.at("dbscan_min_points").get<int>();
    obj.params.sh_mode = params.at("sh_mode").get<std::string>() == "truncate" ? ShTransformMode::truncate
                                                                               : ShTransformMode::rotate;
    return obj;
}

}  // namespace splatgen
