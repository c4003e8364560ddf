#pragma once

#include <vector>

#include "splatgen/geometry.hpp"
#include "splatgen/image.hpp"
#include "splatgen/renderer.hpp"
#include "splatgen/rng.hpp"

namespace splatgen {

enum class DepthConvention { depth, inverse_depth };

// Scene-unit depth per pixel, larger = farther, normalized to [1, 10].
struct DepthMap {
    ImageGray values;
    DepthConvention convention = DepthConvention::depth;  // of the ingested raw map
};

struct SupportPlane {
    Plane plane;  // camera space; normal oriented toward the up hemisphere
    std::vector<Eigen::Vector3d> inlier_points;
    double area = 0.0;
    double up_alignment = 0.0;  // |normal . up|
};

struct PlaneParams {
    double fov_deg = 55.0;
    int unproject_stride = 4;
    int sor_neighbors = 50;
    double sor_std_ratio = 0.1;
    int ransac_iterations = 1000;
    double threshold_rel = 0.01;  // fraction of the cloud bbox diagonal
    int max_planes = 6;
    double stop_fraction = 0.05;          // stop when a plane holds less of the cloud
    double horizontal_tolerance_deg = 15;
    double top_percentile = 0.90;         // planes above this point-height quantile are dropped
};

struct BackgroundScene {
    ImageRgb image;
    DepthMap depth;
    Camera camera;  // intrinsics only, identity pose
    Eigen::Vector3d up_axis = Eigen::Vector3d::UnitY();
    std::vector<SupportPlane> planes;
    double up_extent = 0.0;  // range of point heights along up
};

// fx = fy = (width/2) / tan(fov/2) with a central principal point; fov is horizontal.
Camera intrinsics_from_fov(int width, int height, double fov_deg = 55.0);

// Maps raw (possibly inverse) depth into [1, 10] scene units.
DepthMap normalize_depth(const ImageGray& raw, DepthConvention convention);

// Back-projects every stride-th pixel through the pinhole and drops
// statistical outliers. Payload maps point -> pixel index (y * width + x).
PointCloud unproject(const DepthMap& depth, const Camera& cam, int stride);

// Smallest-variance axis of the convex-hull vertices, signed toward the
// camera's image-up direction (0, -1, 0).
Eigen::Vector3d estimate_up_axis(const PointCloud& cloud);

// Iterative RANSAC with least-squares refit; keeps near-horizontal planes
// below the top-height cut, ordered as discovered. Inlier sets are disjoint.
std::vector<SupportPlane> detect_planes(const PointCloud& cloud, const Eigen::Vector3d& up,
                                        const PlaneParams& params, Rng& rng);

struct PlacementSample {
    int plane_index = 0;
    Eigen::Vector3d point = Eigen::Vector3d::Zero();  // exactly on the plane
};

// Plane chosen proportionally to area; the point is a uniformly drawn inlier
// projected onto the plane.
PlacementSample sample_placement(const std::vector<SupportPlane>& planes, Rng& rng);

// Full per-background analysis from image + raw depth.
BackgroundScene analyze_background(ImageRgb image, const ImageGray& raw_depth,
                                   DepthConvention convention, const PlaneParams& params, Rng& rng);

}  // namespace splatgen
