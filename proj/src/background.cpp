#include "splatgen/background.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <Eigen/Eigenvalues>

#include "splatgen/common.hpp"

namespace splatgen {

Camera intrinsics_from_fov(int width, int height, double fov_deg) {
    if (width <= 0 || height <= 0) raise(ErrorCode::degenerate_input, "image dimensions must be positive");
    if (fov_deg <= 0 || fov_deg >= 180) raise(ErrorCode::degenerate_input, "fov must be in (0, 180)");
    Camera cam;
    cam.width = width;
    cam.height = height;
    cam.fx = cam.fy = (width / 2.0) / std::tan(fov_deg * M_PI / 360.0);
    cam.cx = width / 2.0;
    cam.cy = height / 2.0;
    return cam;
}

DepthMap normalize_depth(const ImageGray& raw, DepthConvention convention) {
    DepthMap out;
    out.convention = convention;
    out.values = raw;

    if (convention == DepthConvention::inverse_depth) {
        for (float& v : out.values.data) v = 1.0f / std::max(v, 1e-6f);
    }
    const auto [lo_it, hi_it] = std::minmax_element(out.values.data.begin(), out.values.data.end());
    const float lo = *lo_it, hi = *hi_it;
    if (!(hi > lo)) raise(ErrorCode::constant_depth, "depth map has zero dynamic range");
    const float scale = 9.0f / (hi - lo);
    for (float& v : out.values.data) v = 1.0f + (v - lo) * scale;
    return out;
}

PointCloud unproject(const DepthMap& depth, const Camera& cam, int stride) {
    if (stride < 1) raise(ErrorCode::degenerate_input, "stride must be >= 1");
    PointCloud cloud;
    const ImageGray& z = depth.values;
    for (int v = 0; v < z.height; v += stride) {
        for (int u = 0; u < z.width; u += stride) {
            const double d = z.at(v, u);
            cloud.points.emplace_back(d * (u - cam.cx) / cam.fx, d * (v - cam.cy) / cam.fy, d);
            cloud.payload.push_back(v * z.width + u);
        }
    }
    if (cloud.size() > 50) {
        const std::vector<int> kept = statistical_outlier_filter(cloud, 50, 0.1);
        cloud = cloud.subset(kept);
    }
    return cloud;
}

Eigen::Vector3d estimate_up_axis(const PointCloud& cloud) {
    const ConvexHull hull = convex_hull(cloud.points);
    std::vector<Eigen::Vector3d> vertices;
    vertices.reserve(hull.vertices.size());
    for (int i : hull.vertices) vertices.push_back(cloud.points[i]);
    const PcaResult pca = pca_axes(vertices);
    Eigen::Vector3d up = pca.axes[2];
    // Photographs are assumed roughly upright: image-up is -Y in camera space.
    if (up.dot(Eigen::Vector3d(0, -1, 0)) < 0) up = -up;
    return up;
}

namespace {

// Least-squares plane through the listed points (smallest covariance axis).
Plane refit_plane(const std::vector<Eigen::Vector3d>& points, const std::vector<int>& indices) {
    Eigen::Vector3d centroid = Eigen::Vector3d::Zero();
    for (int i : indices) centroid += points[i];
    centroid /= static_cast<double>(indices.size());
    Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
    for (int i : indices) {
        const Eigen::Vector3d d = points[i] - centroid;
        cov += d * d.transpose();
    }
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> solver(cov);
    Plane plane;
    plane.normal = solver.eigenvectors().col(0).normalized();
    plane.offset = -plane.normal.dot(centroid);
    return plane;
}

}  // namespace

std::vector<SupportPlane> detect_planes(const PointCloud& cloud, const Eigen::Vector3d& up,
                                        const PlaneParams& params, Rng& rng) {
    std::vector<SupportPlane> result;
    if (cloud.size() < 3) return result;

    // The top cut uses heights of the full cloud along up.
    std::vector<double> heights(cloud.size());
    for (std::size_t i = 0; i < cloud.size(); ++i) heights[i] = up.dot(cloud.points[i]);
    std::vector<double> sorted_heights = heights;
    std::sort(sorted_heights.begin(), sorted_heights.end());
    const std::size_t q_index = std::min(sorted_heights.size() - 1,
                                         static_cast<std::size_t>(params.top_percentile *
                                                                  (sorted_heights.size() - 1)));
    const double top_cut = sorted_heights[q_index];

    const double threshold = params.threshold_rel * bbox_diagonal(cloud.points);
    const double min_alignment = std::cos(params.horizontal_tolerance_deg * M_PI / 180.0);
    const std::size_t stop_count =
        static_cast<std::size_t>(params.stop_fraction * static_cast<double>(cloud.size()));

    // Working set shrinks as each detected plane's inliers are removed,
    // horizontal or not; only horizontal survivors are reported.
    PointCloud working = cloud;
    if (working.payload.empty()) {
        working.payload.resize(working.size());
        std::iota(working.payload.begin(), working.payload.end(), 0);
    }
    std::vector<int> to_original(working.size());
    std::iota(to_original.begin(), to_original.end(), 0);

    for (int round = 0; round < params.max_planes; ++round) {
        if (working.size() < 3) break;
        Plane candidate;
        try {
            candidate = ransac_plane(working, params.ransac_iterations, threshold, rng);
        } catch (const Error& e) {
            if (e.code() == ErrorCode::degenerate_cloud) break;
            throw;
        }
        if (candidate.inliers.size() < std::max<std::size_t>(3, stop_count)) break;

        // Least-squares refit on the consensus set, then recollect inliers.
        Plane refined = refit_plane(working.points, candidate.inliers);
        std::vector<int> inliers;
        for (std::size_t i = 0; i < working.size(); ++i) {
            if (std::abs(refined.signed_distance(working.points[i])) <= threshold) {
                inliers.push_back(static_cast<int>(i));
            }
        }
        if (inliers.size() < 3) break;

        const double alignment = std::abs(refined.normal.dot(up));
        Eigen::Vector3d centroid = Eigen::Vector3d::Zero();
        for (int i : inliers) centroid += working.points[i];
        centroid /= static_cast<double>(inliers.size());

        if (alignment >= min_alignment && up.dot(centroid) <= top_cut) {
            SupportPlane support;
            support.plane = refined;
            if (support.plane.normal.dot(up) < 0) {
                support.plane.normal = -support.plane.normal;
                support.plane.offset = -support.plane.offset;
            }
            support.up_alignment = alignment;
            support.inlier_points.reserve(inliers.size());
            for (int i : inliers) support.inlier_points.push_back(working.points[i]);
            // Inliers reported against the original cloud indexing.
            support.plane.inliers.reserve(inliers.size());
            for (int i : inliers) support.plane.inliers.push_back(to_original[i]);
            Plane area_probe = support.plane;
            area_probe.inliers.resize(inliers.size());
            std::iota(area_probe.inliers.begin(), area_probe.inliers.end(), 0);
            support.area = plane_hull_area(area_probe, support.inlier_points);
            support.plane.area = support.area;
            if (support.area > 0) result.push_back(std::move(support));
        }

        // Remove this plane's inliers from the working set.
        std::vector<char> drop(working.size(), 0);
        for (int i : inliers) drop[i] = 1;
        std::vector<int> keep;
        for (std::size_t i = 0; i < working.size(); ++i) {
            if (!drop[i]) keep.push_back(static_cast<int>(i));
        }
        std::vector<int> new_to_original;
        new_to_original.reserve(keep.size());
        for (int i : keep) new_to_original.push_back(to_original[i]);
        working = working.subset(keep);
        to_original = std::move(new_to_original);
    }
    return result;
}

PlacementSample sample_placement(const std::vector<SupportPlane>& planes, Rng& rng) {
    if (planes.empty()) raise(ErrorCode::no_planes, "no support planes to sample from");
    double total = 0.0;
    for (const auto& p : planes) total += p.area;
    if (total <= 0) raise(ErrorCode::no_planes, "support planes have zero total area");

    const double pick = rng.uniform() * total;
    double cumulative = 0.0;
    int index = static_cast<int>(planes.size()) - 1;
    for (std::size_t i = 0; i < planes.size(); ++i) {
        cumulative += planes[i].area;
        if (pick < cumulative) {
            index = static_cast<int>(i);
            break;
        }
    }
    const SupportPlane& chosen = planes[index];
    const std::size_t pi = rng.uniform_int(chosen.inlier_points.size());
    PlacementSample sample;
    sample.plane_index = index;
    sample.point = chosen.plane.project(chosen.inlier_points[pi]);
    return sample;
}

BackgroundScene analyze_background(ImageRgb image, const ImageGray& raw_depth,
                                   DepthConvention convention, const PlaneParams& params, Rng& rng) {
    if (image.width != raw_depth.width || image.height != raw_depth.height) {
        raise(ErrorCode::degenerate_input, "image and depth dimensions differ");
    }
    BackgroundScene scene;
    scene.camera = intrinsics_from_fov(image.width, image.height, params.fov_deg);
    scene.depth = normalize_depth(raw_depth, convention);
    scene.image = std::move(image);

    const PointCloud cloud = unproject(scene.depth, scene.camera, params.unproject_stride);
    scene.up_axis = estimate_up_axis(cloud);

    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (const auto& p : cloud.points) {
        const double h = scene.up_axis.dot(p);
        lo = std::min(lo, h);
        hi = std::max(hi, h);
    }
    scene.up_extent = hi - lo;
    scene.planes = detect_planes(cloud, scene.up_axis, params, rng);
    return scene;
}

}  // namespace splatgen
