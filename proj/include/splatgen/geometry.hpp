#pragma once

#include <array>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Geometry>

#include "splatgen/rng.hpp"

namespace splatgen {

struct PointCloud {
    std::vector<Eigen::Vector3d> points;
    // Optional mapping point -> source record (e.g. gaussian index or pixel id).
    // Either empty or the same length as points.
    std::vector<int> payload;

    std::size_t size() const { return points.size(); }
    bool empty() const { return points.empty(); }

    PointCloud subset(const std::vector<int>& indices) const;
};

// Plane {p : normal.p + offset = 0} with unit normal.
struct Plane {
    Eigen::Vector3d normal = Eigen::Vector3d::UnitZ();
    double offset = 0.0;
    std::vector<int> inliers;
    double area = 0.0;

    double signed_distance(const Eigen::Vector3d& p) const { return normal.dot(p) + offset; }
    Eigen::Vector3d project(const Eigen::Vector3d& p) const { return p - signed_distance(p) * normal; }
};

// Exact nearest-neighbor queries over a fixed point set. Ties on distance are
// broken toward the lower point index.
class KdTree {
public:
    explicit KdTree(const std::vector<Eigen::Vector3d>& points);

    // k nearest points to q, excluding index `exclude` when >= 0. Results are
    // sorted by (distance, index) ascending.
    void nearest(const Eigen::Vector3d& q, int k, int exclude, std::vector<int>& indices,
                 std::vector<double>& distances) const;

    // All indices with |p - q| <= radius, ascending.
    void radius_search(const Eigen::Vector3d& q, double radius, std::vector<int>& out) const;

private:
    struct Node {
        int point = -1;
        int axis = 0;
        int left = -1;
        int right = -1;
    };

    int build(std::vector<int>& order, int begin, int end);

    const std::vector<Eigen::Vector3d>& points_;
    std::vector<Node> nodes_;
    int root_ = -1;
};

struct KnnResult {
    std::vector<int> indices;
    std::vector<double> distances;
};

// k nearest other points for every point in the cloud.
std::vector<KnnResult> knn(const PointCloud& cloud, int k);

// Best 3-point-sample plane over `iterations` trials; inliers are all points
// within distance_threshold. Deterministic for a fixed rng state.
Plane ransac_plane(const PointCloud& cloud, int iterations, double distance_threshold, Rng& rng);

// Keeps points whose mean distance to their `neighbors` nearest neighbors is
// at most mean + std_ratio * stddev of that statistic over the cloud.
std::vector<int> statistical_outlier_filter(const PointCloud& cloud, int neighbors = 50,
                                            double std_ratio = 0.1);

// Density clustering; returns one label per point, -1 for noise. min_points
// counts the point itself. Labeling depends only on point order.
std::vector<int> dbscan(const PointCloud& cloud, double eps = 0.5, int min_points = 100);

struct PcaResult {
    std::array<Eigen::Vector3d, 3> axes;  // unit, mutually orthogonal
    Eigen::Vector3d eigenvalues;          // descending, matching axes
};

PcaResult pca_axes(const std::vector<Eigen::Vector3d>& points);

struct ConvexHull {
    std::vector<int> vertices;                // unique hull vertex indices
    std::vector<std::array<int, 3>> faces;    // outward-oriented triangles; empty when coplanar
    bool coplanar = false;
};

ConvexHull convex_hull(const std::vector<Eigen::Vector3d>& points);

// 2D monotone chain; returns hull vertex indices in counter-clockwise order.
std::vector<int> convex_hull_2d(const std::vector<Eigen::Vector2d>& points);

double polygon_area(const std::vector<Eigen::Vector2d>& ordered);

// Area of the 2D convex hull of `points[plane.inliers]` projected onto the plane.
double plane_hull_area(const Plane& plane, const std::vector<Eigen::Vector3d>& points);

// Minimal-angle rotation taking unit vector a onto unit vector b. The
// antiparallel case rotates pi about a deterministic axis orthogonal to a.
Eigen::Quaterniond rotation_between(const Eigen::Vector3d& a, const Eigen::Vector3d& b);

double bbox_diagonal(const std::vector<Eigen::Vector3d>& points);

}  // namespace splatgen
