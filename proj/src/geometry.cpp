#include "splatgen/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <map>
#include <numeric>

#include <Eigen/Eigenvalues>

#include "splatgen/common.hpp"

namespace splatgen {

PointCloud PointCloud::subset(const std::vector<int>& indices) const {
    PointCloud out;
    out.points.reserve(indices.size());
    out.payload.reserve(indices.size());
    for (int i : indices) {
        out.points.push_back(points[i]);
        out.payload.push_back(payload.empty() ? i : payload[i]);
    }
    return out;
}

double bbox_diagonal(const std::vector<Eigen::Vector3d>& points) {
    if (points.empty()) return 0.0;
    Eigen::Vector3d lo = points.front(), hi = points.front();
    for (const auto& p : points) {
        lo = lo.cwiseMin(p);
        hi = hi.cwiseMax(p);
    }
    return (hi - lo).norm();
}

// ---------------------------------------------------------------------------
// KdTree

KdTree::KdTree(const std::vector<Eigen::Vector3d>& points) : points_(points) {
    std::vector<int> order(points.size());
    std::iota(order.begin(), order.end(), 0);
    nodes_.reserve(points.size());
    root_ = build(order, 0, static_cast<int>(order.size()));
}

int KdTree::build(std::vector<int>& order, int begin, int end) {
    if (begin >= end) return -1;
    // Split on the widest axis of this range.
    Eigen::Vector3d lo = points_[order[begin]], hi = lo;
    for (int i = begin + 1; i < end; ++i) {
        lo = lo.cwiseMin(points_[order[i]]);
        hi = hi.cwiseMax(points_[order[i]]);
    }
    int axis = 0;
    (hi - lo).maxCoeff(&axis);

    const int mid = begin + (end - begin) / 2;
    std::nth_element(order.begin() + begin, order.begin() + mid, order.begin() + end,
                     [&](int a, int b) {
                         const double ca = points_[a][axis], cb = points_[b][axis];
                         return ca < cb || (ca == cb && a < b);
                     });
    const int id = static_cast<int>(nodes_.size());
    nodes_.push_back(Node{order[mid], axis, -1, -1});
    const int left = build(order, begin, mid);
    const int right = build(order, mid + 1, end);
    nodes_[id].left = left;
    nodes_[id].right = right;
    return id;
}

namespace {

struct HeapEntry {
    double d2;
    int index;
    // "less" == better; the heap keeps the worst entry on top.
    bool operator<(const HeapEntry& o) const { return d2 < o.d2 || (d2 == o.d2 && index < o.index); }
};

}  // namespace

void KdTree::nearest(const Eigen::Vector3d& q, int k, int exclude, std::vector<int>& indices,
                     std::vector<double>& distances) const {
    std::vector<HeapEntry> heap;
    heap.reserve(k);

    auto consider = [&](int point) {
        if (point == exclude) return;
        const double d2 = (points_[point] - q).squaredNorm();
        const HeapEntry e{d2, point};
        if (static_cast<int>(heap.size()) < k) {
            heap.push_back(e);
            std::push_heap(heap.begin(), heap.end());
        } else if (e < heap.front()) {
            std::pop_heap(heap.begin(), heap.end());
            heap.back() = e;
            std::push_heap(heap.begin(), heap.end());
        }
    };

    // Iterative descent; a far subtree is entered only while the splitting
    // plane is still within (or tied with) the current worst distance.
    std::vector<std::pair<int, double>> stack;
    stack.emplace_back(root_, 0.0);
    while (!stack.empty()) {
        const auto [id, bound] = stack.back();
        stack.pop_back();
        if (id < 0) continue;
        if (static_cast<int>(heap.size()) == k && bound > heap.front().d2) continue;
        const Node& node = nodes_[id];
        consider(node.point);
        const double delta = q[node.axis] - points_[node.point][node.axis];
        const int near_side = delta < 0 ? node.left : node.right;
        const int far_side = delta < 0 ? node.right : node.left;
        stack.emplace_back(far_side, delta * delta);
        stack.emplace_back(near_side, 0.0);
    }

    std::sort(heap.begin(), heap.end());
    indices.resize(heap.size());
    distances.resize(heap.size());
    for (std::size_t i = 0; i < heap.size(); ++i) {
        indices[i] = heap[i].index;
        distances[i] = std::sqrt(heap[i].d2);
    }
}

void KdTree::radius_search(const Eigen::Vector3d& q, double radius, std::vector<int>& out) const {
    out.clear();
    const double r2 = radius * radius;
    std::vector<int> stack;
    stack.push_back(root_);
    while (!stack.empty()) {
        const int id = stack.back();
        stack.pop_back();
        if (id < 0) continue;
        const Node& node = nodes_[id];
        if ((points_[node.point] - q).squaredNorm() <= r2) out.push_back(node.point);
        const double delta = q[node.axis] - points_[node.point][node.axis];
        if (delta <= radius) stack.push_back(node.left);
        if (-delta <= radius) stack.push_back(node.right);
    }
    std::sort(out.begin(), out.end());
}

// ---------------------------------------------------------------------------
// Cloud filters and fits

std::vector<KnnResult> knn(const PointCloud& cloud, int k) {
    const int n = static_cast<int>(cloud.size());
    if (k < 1 || k >= n) {
        raise(ErrorCode::k_too_large,
              "k = " + std::to_string(k) + " must be in [1, " + std::to_string(n - 1) + "]");
    }
    const KdTree tree(cloud.points);
    std::vector<KnnResult> results(n);
    for (int i = 0; i < n; ++i) {
        tree.nearest(cloud.points[i], k, i, results[i].indices, results[i].distances);
    }
    return results;
}

Plane ransac_plane(const PointCloud& cloud, int iterations, double distance_threshold, Rng& rng) {
    const std::size_t n = cloud.size();
    if (n < 3) raise(ErrorCode::degenerate_cloud, "need at least 3 points");
    if (distance_threshold <= 0) raise(ErrorCode::degenerate_input, "distance threshold must be > 0");

    Eigen::Vector3d best_normal = Eigen::Vector3d::Zero();
    double best_offset = 0.0;
    std::size_t best_count = 0;
    bool found = false;

    for (int it = 0; it < iterations; ++it) {
        std::size_t a = rng.uniform_int(n);
        std::size_t b = rng.uniform_int(n);
        while (b == a) b = rng.uniform_int(n);
        std::size_t c = rng.uniform_int(n);
        while (c == a || c == b) c = rng.uniform_int(n);

        const Eigen::Vector3d e1 = cloud.points[b] - cloud.points[a];
        const Eigen::Vector3d e2 = cloud.points[c] - cloud.points[a];
        Eigen::Vector3d normal = e1.cross(e2);
        const double norm = normal.norm();
        if (norm <= 1e-12 * e1.norm() * e2.norm()) continue;  // collinear sample
        normal /= norm;
        const double offset = -normal.dot(cloud.points[a]);

        std::size_t count = 0;
        for (const auto& p : cloud.points) {
            if (std::abs(normal.dot(p) + offset) <= distance_threshold) ++count;
        }
        if (!found || count > best_count) {
            found = true;
            best_count = count;
            best_normal = normal;
            best_offset = offset;
        }
    }
    if (!found) raise(ErrorCode::degenerate_cloud, "all samples collinear across all iterations");

    Plane plane;
    plane.normal = best_normal;
    plane.offset = best_offset;
    for (std::size_t i = 0; i < n; ++i) {
        if (std::abs(plane.signed_distance(cloud.points[i])) <= distance_threshold) {
            plane.inliers.push_back(static_cast<int>(i));
        }
    }
    plane.area = plane_hull_area(plane, cloud.points);
    return plane;
}

std::vector<int> statistical_outlier_filter(const PointCloud& cloud, int neighbors, double std_ratio) {
    const int n = static_cast<int>(cloud.size());
    if (neighbors < 1) raise(ErrorCode::degenerate_input, "neighbors must be >= 1");
    if (n <= neighbors) {
        raise(ErrorCode::cloud_too_small, "cloud of " + std::to_string(n) +
                                              " points cannot support " + std::to_string(neighbors) +
                                              " neighbors");
    }
    const KdTree tree(cloud.points);
    std::vector<double> mean_dist(n);
    std::vector<int> idx;
    std::vector<double> dist;
    for (int i = 0; i < n; ++i) {
        tree.nearest(cloud.points[i], neighbors, i, idx, dist);
        mean_dist[i] = std::accumulate(dist.begin(), dist.end(), 0.0) / neighbors;
    }
    const double mu = std::accumulate(mean_dist.begin(), mean_dist.end(), 0.0) / n;
    double var = 0.0;
    for (double d : mean_dist) var += (d - mu) * (d - mu);
    const double sigma = std::sqrt(var / (n - 1));
    const double cutoff = mu + std_ratio * sigma;

    std::vector<int> kept;
    for (int i = 0; i < n; ++i) {
        if (mean_dist[i] <= cutoff) kept.push_back(i);
    }
    return kept;
}

std::vector<int> dbscan(const PointCloud& cloud, double eps, int min_points) {
    const int n = static_cast<int>(cloud.size());
    std::vector<int> labels(n, -2);  // -2 unvisited, -1 noise
    if (n == 0) return labels;
    if (eps <= 0 || min_points < 1) raise(ErrorCode::degenerate_input, "eps > 0 and min_points >= 1 required");

    const KdTree tree(cloud.points);
    std::vector<int> neigh;
    std::deque<int> queue;
    int cluster = 0;
    for (int i = 0; i < n; ++i) {
        if (labels[i] != -2) continue;
        tree.radius_search(cloud.points[i], eps, neigh);
        if (static_cast<int>(neigh.size()) < min_points) {
            labels[i] = -1;
            continue;
        }
        labels[i] = cluster;
        queue.assign(neigh.begin(), neigh.end());
        while (!queue.empty()) {
            const int j = queue.front();
            queue.pop_front();
            if (labels[j] == -1) labels[j] = cluster;  // border point adoption
            if (labels[j] != -2) continue;
            labels[j] = cluster;
            tree.radius_search(cloud.points[j], eps, neigh);
            if (static_cast<int>(neigh.size()) >= min_points) {
                queue.insert(queue.end(), neigh.begin(), neigh.end());
            }
        }
        ++cluster;
    }
    return labels;
}

PcaResult pca_axes(const std::vector<Eigen::Vector3d>& points) {
    if (points.size() < 3) raise(ErrorCode::degenerate_spread, "need at least 3 points");
    Eigen::Vector3d mean = Eigen::Vector3d::Zero();
    for (const auto& p : points) mean += p;
    mean /= static_cast<double>(points.size());

    Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
    for (const auto& p : points) {
        const Eigen::Vector3d d = p - mean;
        cov += d * d.transpose();
    }
    cov /= static_cast<double>(points.size());
    if (!(cov.trace() > 0)) raise(ErrorCode::degenerate_spread, "zero spread");

    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> solver(cov);
    if (solver.info() != Eigen::Success) raise(ErrorCode::degenerate_spread, "eigensolver failed");

    PcaResult result;
    // Solver returns ascending eigenvalues; flip to descending.
    for (int i = 0; i < 3; ++i) {
        result.axes[i] = solver.eigenvectors().col(2 - i).normalized();
        result.eigenvalues[i] = solver.eigenvalues()[2 - i];
    }
    if (result.eigenvalues[1] <= 1e-12 * result.eigenvalues[0]) {
        raise(ErrorCode::degenerate_spread, "points are collinear");
    }
    return result;
}

// ---------------------------------------------------------------------------
// Convex hulls

std::vector<int> convex_hull_2d(const std::vector<Eigen::Vector2d>& points) {
    const int n = static_cast<int>(points.size());
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        if (points[a].x() != points[b].x()) return points[a].x() < points[b].x();
        if (points[a].y() != points[b].y()) return points[a].y() < points[b].y();
        return a < b;
    });
    auto cross = [&](int o, int a, int b) {
        const Eigen::Vector2d u = points[a] - points[o];
        const Eigen::Vector2d v = points[b] - points[o];
        return u.x() * v.y() - u.y() * v.x();
    };
    std::vector<int> hull(2 * n);
    int k = 0;
    for (int ii = 0; ii < n; ++ii) {  // lower chain
        const int i = order[ii];
        while (k >= 2 && cross(hull[k - 2], hull[k - 1], i) <= 0) --k;
        hull[k++] = i;
    }
    const int lower = k + 1;
    for (int ii = n - 2; ii >= 0; --ii) {  // upper chain
        const int i = order[ii];
        while (k >= lower && cross(hull[k - 2], hull[k - 1], i) <= 0) --k;
        hull[k++] = i;
    }
    hull.resize(std::max(0, k - 1));
    return hull;
}

double polygon_area(const std::vector<Eigen::Vector2d>& ordered) {
    double twice = 0.0;
    const int n = static_cast<int>(ordered.size());
    for (int i = 0; i < n; ++i) {
        const auto& a = ordered[i];
        const auto& b = ordered[(i + 1) % n];
        twice += a.x() * b.y() - b.x() * a.y();
    }
    return std::abs(twice) * 0.5;
}

double plane_hull_area(const Plane& plane, const std::vector<Eigen::Vector3d>& points) {
    if (plane.inliers.size() < 3) return 0.0;
    // Orthonormal in-plane basis.
    int t = 0;
    plane.normal.cwiseAbs().minCoeff(&t);
    const Eigen::Vector3d u = plane.normal.cross(Eigen::Vector3d::Unit(t)).normalized();
    const Eigen::Vector3d v = plane.normal.cross(u);

    std::vector<Eigen::Vector2d> flat;
    flat.reserve(plane.inliers.size());
    for (int i : plane.inliers) {
        const Eigen::Vector3d& p = points[i];
        flat.emplace_back(u.dot(p), v.dot(p));
    }
    const std::vector<int> hull = convex_hull_2d(flat);
    if (hull.size() < 3) return 0.0;
    std::vector<Eigen::Vector2d> ring;
    ring.reserve(hull.size());
    for (int i : hull) ring.push_back(flat[i]);
    return polygon_area(ring);
}

namespace {

struct QhFace {
    std::array<int, 3> v;
    std::array<int, 3> neighbor;  // across edge (v[i], v[(i+1)%3])
    Eigen::Vector3d normal;       // unit, outward
    double offset;                // normal.p + offset = 0
    std::vector<int> outside;
    int farthest = -1;
    double far_dist = 0.0;
    bool alive = true;

    double dist(const Eigen::Vector3d& p) const { return normal.dot(p) + offset; }
};

}  // namespace

ConvexHull convex_hull(const std::vector<Eigen::Vector3d>& points) {
    const int n = static_cast<int>(points.size());
    if (n < 3) raise(ErrorCode::degenerate_input, "need at least 3 points");
    const double diag = bbox_diagonal(points);
    if (diag <= 0) raise(ErrorCode::degenerate_input, "all points coincide");
    const double eps = 1e-10 * diag;

    // Initial simplex from axis extremes.
    std::array<int, 6> extremes{};
    for (int axis = 0; axis < 3; ++axis) {
        int lo = 0, hi = 0;
        for (int i = 1; i < n; ++i) {
            if (points[i][axis] < points[lo][axis]) lo = i;
            if (points[i][axis] > points[hi][axis]) hi = i;
        }
        extremes[2 * axis] = lo;
        extremes[2 * axis + 1] = hi;
    }
    int ia = extremes[0], ib = extremes[1];
    double best = 0;
    for (int x : extremes) {
        for (int y : extremes) {
            const double d = (points[x] - points[y]).squaredNorm();
            if (d > best) {
                best = d;
                ia = x;
                ib = y;
            }
        }
    }
    if (best <= eps * eps) raise(ErrorCode::degenerate_input, "all points coincide");

    const Eigen::Vector3d ab = (points[ib] - points[ia]).normalized();
    int ic = -1;
    best = eps;
    for (int i = 0; i < n; ++i) {
        const Eigen::Vector3d d = points[i] - points[ia];
        const double off = (d - d.dot(ab) * ab).norm();
        if (off > best) {
            best = off;
            ic = i;
        }
    }
    if (ic < 0) raise(ErrorCode::degenerate_input, "points are collinear");

    Eigen::Vector3d tri_normal =
        (points[ib] - points[ia]).cross(points[ic] - points[ia]).normalized();
    int id = -1;
    best = eps;
    for (int i = 0; i < n; ++i) {
        const double off = std::abs(tri_normal.dot(points[i] - points[ia]));
        if (off > best) {
            best = off;
            id = i;
        }
    }
    if (id < 0) {
        // Coplanar input: fall back to the 2D hull in the spanning plane.
        int t = 0;
        tri_normal.cwiseAbs().minCoeff(&t);
        const Eigen::Vector3d u = tri_normal.cross(Eigen::Vector3d::Unit(t)).normalized();
        const Eigen::Vector3d v = tri_normal.cross(u);
        std::vector<Eigen::Vector2d> flat;
        flat.reserve(n);
        for (const auto& p : points) flat.emplace_back(u.dot(p), v.dot(p));
        ConvexHull hull;
        hull.vertices = convex_hull_2d(flat);
        hull.coplanar = true;
        return hull;
    }

    std::vector<QhFace> faces;
    auto make_face = [&](int a, int b, int c, const Eigen::Vector3d& inside) {
        QhFace f;
        f.v = {a, b, c};
        f.normal = (points[b] - points[a]).cross(points[c] - points[a]);
        f.normal.normalize();
        f.offset = -f.normal.dot(points[a]);
        if (f.dist(inside) > 0) {
            std::swap(f.v[1], f.v[2]);
            f.normal = -f.normal;
            f.offset = -f.offset;
        }
        f.neighbor = {-1, -1, -1};
        faces.push_back(std::move(f));
    };

    const Eigen::Vector3d interior =
        (points[ia] + points[ib] + points[ic] + points[id]) / 4.0;
    make_face(ia, ib, ic, points[id]);
    make_face(ia, ib, id, points[ic]);
    make_face(ia, ic, id, points[ib]);
    make_face(ib, ic, id, points[ia]);

    auto link_neighbors = [&](const std::vector<int>& face_ids) {
        std::map<std::pair<int, int>, std::pair<int, int>> edge_owner;  // edge -> (face, slot)
        for (int fi : face_ids) {
            QhFace& f = faces[fi];
            for (int e = 0; e < 3; ++e) {
                const int u = f.v[e], w = f.v[(e + 1) % 3];
                const auto key = std::minmax(u, w);
                auto it = edge_owner.find(key);
                if (it == edge_owner.end()) {
                    edge_owner[key] = {fi, e};
                } else {
                    f.neighbor[e] = it->second.first;
                    faces[it->second.first].neighbor[it->second.second] = fi;
                }
            }
        }
    };
    link_neighbors({0, 1, 2, 3});

    auto assign_point = [&](int point, const std::vector<int>& candidates) {
        for (int fi : candidates) {
            QhFace& f = faces[fi];
            if (!f.alive) continue;
            const double d = f.dist(points[point]);
            if (d > eps) {
                f.outside.push_back(point);
                if (d > f.far_dist) {
                    f.far_dist = d;
                    f.farthest = point;
                }
                return;
            }
        }
    };
    for (int i = 0; i < n; ++i) {
        if (i == ia || i == ib || i == ic || i == id) continue;
        assign_point(i, {0, 1, 2, 3});
    }

    std::vector<int> pending{0, 1, 2, 3};
    std::vector<char> visited;
    while (!pending.empty()) {
        const int start = pending.back();
        pending.pop_back();
        if (!faces[start].alive || faces[start].outside.empty()) continue;
        const int apex = faces[start].farthest;

        // Flood fill the faces visible from the apex; edges into non-visible
        // faces form the horizon.
        visited.assign(faces.size(), 0);
        std::vector<int> visible{start};
        visited[start] = 1;
        struct HorizonEdge {
            int u, w;    // directed per the visible face's winding
            int outer;   // surviving face across the edge
        };
        std::vector<HorizonEdge> horizon;
        for (std::size_t qi = 0; qi < visible.size(); ++qi) {
            const int fi = visible[qi];
            for (int e = 0; e < 3; ++e) {
                const int nb = faces[fi].neighbor[e];
                if (nb < 0) continue;
                if (faces[nb].dist(points[apex]) > eps) {
                    if (!visited[nb]) {
                        visited[nb] = 1;
                        visible.push_back(nb);
                    }
                } else {
                    horizon.push_back({faces[fi].v[e], faces[fi].v[(e + 1) % 3], nb});
                }
            }
        }

        // Chain the horizon edges into a loop.
        std::map<int, std::size_t> by_start;
        for (std::size_t i = 0; i < horizon.size(); ++i) by_start[horizon[i].u] = i;
        std::vector<HorizonEdge> loop;
        loop.reserve(horizon.size());
        int cursor = horizon.front().u;
        for (std::size_t i = 0; i < horizon.size(); ++i) {
            const HorizonEdge& e = horizon[by_start.at(cursor)];
            loop.push_back(e);
            cursor = e.w;
        }

        std::vector<int> orphans;
        for (int fi : visible) {
            faces[fi].alive = false;
            for (int p : faces[fi].outside) {
                if (p != apex) orphans.push_back(p);
            }
            faces[fi].outside.clear();
        }

        const int base = static_cast<int>(faces.size());
        const int ring = static_cast<int>(loop.size());
        std::vector<int> fresh;
        for (int i = 0; i < ring; ++i) {
            make_face(loop[i].u, loop[i].w, apex, interior);
            QhFace& f = faces.back();
            f.neighbor[0] = loop[i].outer;
            f.neighbor[1] = base + (i + 1) % ring;
            f.neighbor[2] = base + (i - 1 + ring) % ring;
            // Point the surviving outer face back at us.
            QhFace& outer = faces[loop[i].outer];
            for (int e = 0; e < 3; ++e) {
                const auto key = std::minmax(outer.v[e], outer.v[(e + 1) % 3]);
                if (key == std::minmax(loop[i].u, loop[i].w)) outer.neighbor[e] = base + i;
            }
            fresh.push_back(base + i);
        }
        for (int p : orphans) assign_point(p, fresh);
        for (int fi : fresh) {
            if (!faces[fi].outside.empty()) pending.push_back(fi);
        }
    }

    ConvexHull hull;
    std::vector<char> used(n, 0);
    for (const QhFace& f : faces) {
        if (!f.alive) continue;
        hull.faces.push_back(f.v);
        for (int v : f.v) used[v] = 1;
    }
    for (int i = 0; i < n; ++i) {
        if (used[i]) hull.vertices.push_back(i);
    }
    return hull;
}

Eigen::Quaterniond rotation_between(const Eigen::Vector3d& a, const Eigen::Vector3d& b) {
    const double d = a.dot(b);
    if (d <= -1.0 + 1e-9) {
        // Antiparallel: rotate pi about the larger of the two cross candidates.
        const Eigen::Vector3d c1 = a.cross(Eigen::Vector3d::UnitX());
        const Eigen::Vector3d c2 = a.cross(Eigen::Vector3d::UnitY());
        const Eigen::Vector3d axis =
            (c1.squaredNorm() >= c2.squaredNorm() ? c1 : c2).normalized();
        return Eigen::Quaterniond(Eigen::AngleAxisd(M_PI, axis));
    }
    Eigen::Quaterniond q;
    q.w() = 1.0 + d;
    q.vec() = a.cross(b);
    q.normalize();
    return q;
}

}  // namespace splatgen
