#pragma once

#include <filesystem>
#include <string>

#include "splatgen/geometry.hpp"
#include "splatgen/rng.hpp"
#include "splatgen/splat_io.hpp"

namespace splatgen {

// How higher SH bands follow a model rotation: rotated properly, or dropped
// to the view-independent DC band.
enum class ShTransformMode { rotate, truncate };

struct ExtractionParams {
    int ransac_iterations = 1000;
    double plane_threshold_rel = 0.01;  // fraction of the cloud bbox diagonal
    int sor_neighbors = 50;
    double sor_std_ratio = 0.1;
    double dbscan_eps = 0.5;
    int dbscan_min_points = 100;
    ShTransformMode sh_mode = ShTransformMode::rotate;
};

struct StageCounts {
    std::size_t input = 0;
    std::size_t after_plane = 0;
    std::size_t after_statistical = 0;
    std::size_t after_cluster = 0;
};

struct ForegroundObject {
    SplatModel model;
    Eigen::Vector3d up = Eigen::Vector3d::UnitY();          // unit, toward the object
    Eigen::Vector3d base_point = Eigen::Vector3d::Zero();   // centroid dropped onto the removed plane
    std::string name;
    StageCounts stages;
    ExtractionParams params;
};

// Plane filter -> statistical filter -> cluster filter; keeps the cluster
// whose centroid is nearest the mean of the filtered points.
ForegroundObject extract_foreground(const SplatModel& model, const ExtractionParams& params, Rng& rng,
                                    const std::string& name = "");

// Rigid + uniform-scale transform of every per-splat parameter (positions,
// orientations, and SH bands per sh_mode).
SplatModel transform_model(const SplatModel& model, const Eigen::Quaterniond& rotation,
                           const Eigen::Vector3d& translation, double uniform_scale = 1.0,
                           ShTransformMode sh_mode = ShTransformMode::rotate);

// Canonical frame: base_point at the origin, up along +Y.
ForegroundObject recenter(const ForegroundObject& obj);

// On-disk cache: <stem>.ply plus a <stem>.json sidecar with the frame,
// category name, parameters and per-stage counts.
void save_foreground(const ForegroundObject& obj, const std::filesystem::path& stem);
ForegroundObject load_foreground(const std::filesystem::path& stem);

}  // namespace splatgen
