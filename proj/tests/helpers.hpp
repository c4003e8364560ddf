#pragma once

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "splatgen/background.hpp"
#include "splatgen/composer.hpp"
#include "splatgen/extraction.hpp"
#include "splatgen/geometry.hpp"
#include "splatgen/image.hpp"
#include "splatgen/renderer.hpp"
#include "splatgen/rng.hpp"
#include "splatgen/sh.hpp"
#include "splatgen/splat_io.hpp"

namespace testutil {

using namespace splatgen;

inline std::filesystem::path make_temp_dir(const std::string& tag) {
    static int counter = 0;
    const auto dir = std::filesystem::temp_directory_path() /
                     ("splatgen_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::create_directories(dir);
    return dir;
}

// ---------------------------------------------------------------------------
// Model fixtures

inline Gaussian random_gaussian(Rng& rng, int sh_degree) {
    Gaussian g;
    g.position = Eigen::Vector3f(static_cast<float>(rng.uniform(-2, 2)),
                                 static_cast<float>(rng.uniform(-2, 2)),
                                 static_cast<float>(rng.uniform(-2, 2)));
    g.opacity = static_cast<float>(rng.uniform(0.05, 0.95));
    g.scale = Eigen::Vector3f(static_cast<float>(std::exp(rng.uniform(-3, 0))),
                              static_cast<float>(std::exp(rng.uniform(-3, 0))),
                              static_cast<float>(std::exp(rng.uniform(-3, 0))));
    const Eigen::Vector3d axis = rng.unit_vector();
    g.rotation =
        Eigen::Quaternionf(Eigen::AngleAxisf(static_cast<float>(rng.uniform(0, M_PI)), axis.cast<float>()));
    const int coeffs = sh_coeff_count(sh_degree);
    for (int i = 0; i < coeffs; ++i) {
        for (int c = 0; c < 3; ++c) g.sh(i, c) = static_cast<float>(rng.uniform(-0.5, 0.5));
    }
    return g;
}

inline SplatModel make_random_model(Rng& rng, std::size_t count, int sh_degree) {
    SplatModel model;
    model.sh_degree = sh_degree;
    for (std::size_t i = 0; i < count; ++i) model.gaussians.push_back(random_gaussian(rng, sh_degree));
    return model;
}

// Ball of small splats resting on y = 0, already in the canonical frame.
inline ForegroundObject make_canonical_ball(Rng& rng, std::size_t count = 400, int sh_degree = 1,
                                            double radius = 0.3, double center_y = 0.35) {
    ForegroundObject obj;
    obj.name = "ball";
    obj.model.sh_degree = sh_degree;
    for (std::size_t i = 0; i < count; ++i) {
        Gaussian g;
        const Eigen::Vector3d dir = rng.unit_vector();
        const double r = radius * std::cbrt(rng.uniform());
        g.position = Eigen::Vector3f(static_cast<float>(dir.x() * r),
                                     static_cast<float>(center_y + dir.y() * r),
                                     static_cast<float>(dir.z() * r));
        g.opacity = static_cast<float>(rng.uniform(0.6, 0.95));
        const float s = static_cast<float>(radius * rng.uniform(0.15, 0.3));
        g.scale = Eigen::Vector3f(s, s, s);
        g.rotation = Eigen::Quaternionf::Identity();
        g.sh(0, 0) = static_cast<float>(rng.uniform(0.2, 1.2));
        g.sh(0, 1) = static_cast<float>(rng.uniform(-0.8, 0.2));
        g.sh(0, 2) = static_cast<float>(rng.uniform(-0.8, 0.8));
        if (sh_degree >= 1) {
            for (int i2 = 1; i2 < sh_coeff_count(sh_degree); ++i2) {
                for (int c = 0; c < 3; ++c) g.sh(i2, c) = static_cast<float>(rng.uniform(-0.1, 0.1));
            }
        }
        obj.model.gaussians.push_back(g);
    }
    obj.up = Eigen::Vector3d::UnitY();
    obj.base_point = Eigen::Vector3d::Zero();
    return obj;
}

struct LabeledFixture {
    SplatModel model;
    std::vector<int> labels;  // 0 = plane, 1 = object, 2 = halo
};

// Plane disc + dense object ball + sparse halo shell; the labeled input for
// the extraction oracle.
inline LabeledFixture make_extraction_fixture(Rng& rng, std::size_t plane_n = 10000,
                                              std::size_t object_n = 2000, std::size_t halo_n = 500) {
    LabeledFixture fixture;
    fixture.model.sh_degree = 0;
    auto add = [&](const Eigen::Vector3d& p, int label) {
        Gaussian g;
        g.position = p.cast<float>();
        g.opacity = 0.8f;
        g.scale = Eigen::Vector3f(0.02f, 0.02f, 0.02f);
        g.rotation = Eigen::Quaternionf::Identity();
        g.sh(0, 0) = 0.5f;
        fixture.model.gaussians.push_back(g);
        fixture.labels.push_back(label);
    };
    for (std::size_t i = 0; i < plane_n; ++i) {
        const double r = 2.0 * std::sqrt(rng.uniform());
        const double a = rng.uniform(0, 2 * M_PI);
        add({r * std::cos(a), r * std::sin(a), 0.0}, 0);
    }
    for (std::size_t i = 0; i < object_n; ++i) {
        const Eigen::Vector3d dir = rng.unit_vector();
        const double r = 0.35 * std::cbrt(rng.uniform());
        add(Eigen::Vector3d(0, 0, 0.5) + r * dir, 1);
    }
    for (std::size_t i = 0; i < halo_n; ++i) add(3.0 * rng.unit_vector(), 2);
    return fixture;
}

// ---------------------------------------------------------------------------
// Brute-force oracles

inline std::vector<KnnResult> brute_knn(const PointCloud& cloud, int k) {
    const int n = static_cast<int>(cloud.size());
    std::vector<KnnResult> results(n);
    std::vector<std::pair<double, int>> order;
    for (int i = 0; i < n; ++i) {
        order.clear();
        for (int j = 0; j < n; ++j) {
            if (j == i) continue;
            order.emplace_back((cloud.points[j] - cloud.points[i]).norm(), j);
        }
        std::sort(order.begin(), order.end());
        for (int j = 0; j < k; ++j) {
            results[i].indices.push_back(order[j].second);
            results[i].distances.push_back(order[j].first);
        }
    }
    return results;
}

// Textbook DBSCAN over O(n^2) neighbor lists; shares nothing with the library
// implementation except the clustering definition.
inline std::vector<int> brute_dbscan(const PointCloud& cloud, double eps, int min_points) {
    const int n = static_cast<int>(cloud.size());
    std::vector<std::vector<int>> neighbors(n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            if ((cloud.points[i] - cloud.points[j]).norm() <= eps) neighbors[i].push_back(j);
        }
    }
    std::vector<int> labels(n, -2);
    int cluster = 0;
    for (int i = 0; i < n; ++i) {
        if (labels[i] != -2) continue;
        if (static_cast<int>(neighbors[i].size()) < min_points) {
            labels[i] = -1;
            continue;
        }
        labels[i] = cluster;
        std::vector<int> queue(neighbors[i]);
        for (std::size_t qi = 0; qi < queue.size(); ++qi) {
            const int j = queue[qi];
            if (labels[j] == -1) labels[j] = cluster;
            if (labels[j] != -2) continue;
            labels[j] = cluster;
            if (static_cast<int>(neighbors[j].size()) >= min_points) {
                queue.insert(queue.end(), neighbors[j].begin(), neighbors[j].end());
            }
        }
        ++cluster;
    }
    return labels;
}

// Same clustering up to a relabeling (noise must match exactly).
inline bool labels_equivalent(const std::vector<int>& a, const std::vector<int>& b) {
    if (a.size() != b.size()) return false;
    std::map<int, int> fwd, rev;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if ((a[i] < 0) != (b[i] < 0)) return false;
        if (a[i] < 0) continue;
        auto [fit, finserted] = fwd.emplace(a[i], b[i]);
        if (!finserted && fit->second != b[i]) return false;
        auto [rit, rinserted] = rev.emplace(b[i], a[i]);
        if (!rinserted && rit->second != a[i]) return false;
    }
    return true;
}

inline Camera test_camera(int width = 512, int height = 512, double f = 500.0) {
    Camera cam;
    cam.width = width;
    cam.height = height;
    cam.fx = cam.fy = f;
    cam.cx = width / 2.0;
    cam.cy = height / 2.0;
    return cam;
}

// Per-pixel compositing over every projected splat, no tiling; checks the
// binning machinery of the real renderer.
inline RenderOutput brute_render(const SplatModel& model, const Camera& cam,
                                 const RenderOptions& opts = {}) {
    RenderOutput out = RenderOutput::zeros(cam.width, cam.height);
    std::vector<Splat2D> splats;
    const Eigen::Vector3f cam_center = cam.center().cast<float>();
    for (std::size_t i = 0; i < model.size(); ++i) {
        auto projected = project_gaussian(model.gaussians[i], cam);
        if (!projected) continue;
        projected->index = static_cast<int>(i);
        if (opts.white_override) {
            projected->color = Eigen::Vector3f::Ones();
        } else if (opts.sh_dir_override) {
            projected->color = eval_sh(model.gaussians[i].sh, *opts.sh_dir_override, model.sh_degree);
        } else {
            const Eigen::Vector3f dir = (model.gaussians[i].position - cam_center).normalized();
            projected->color = eval_sh(model.gaussians[i].sh, dir, model.sh_degree);
        }
        splats.push_back(*projected);
    }
    std::sort(splats.begin(), splats.end(), [](const Splat2D& a, const Splat2D& b) {
        return a.depth < b.depth || (a.depth == b.depth && a.index < b.index);
    });
    for (int y = 0; y < cam.height; ++y) {
        for (int x = 0; x < cam.width; ++x) {
            float t = 1.0f, r = 0, g = 0, b = 0, a = 0, d = 0;
            for (const Splat2D& s : splats) {
                const float ddx = static_cast<float>(x) - s.mean.x();
                const float ddy = static_cast<float>(y) - s.mean.y();
                const float det = s.cov_xx * s.cov_yy - s.cov_xy * s.cov_xy;
                const float maha =
                    (s.cov_yy * ddx * ddx - 2.0f * s.cov_xy * ddx * ddy + s.cov_xx * ddy * ddy) / det;
                const float alpha = std::min(0.99f, s.opacity * std::exp(-0.5f * maha));
                if (alpha < 1.0f / 255.0f) continue;
                const float w = t * alpha;
                r += w * s.color.x();
                g += w * s.color.y();
                b += w * s.color.z();
                a += w;
                d += w * s.depth;
                t *= 1.0f - alpha;
                if (t < 1e-4f) break;
            }
            const std::size_t px = static_cast<std::size_t>(y) * cam.width + x;
            out.color[3 * px] = r;
            out.color[3 * px + 1] = g;
            out.color[3 * px + 2] = b;
            out.alpha[px] = a;
            out.depth[px] = a > 0.0f ? d / a : 0.0f;
        }
    }
    return out;
}

// Real SH basis written out from the textbook normalization constants with
// the (-1)^m fold the splat convention uses; independent of the table in the
// library.
inline double sh_basis_oracle(int index, const Eigen::Vector3d& d) {
    const double x = d.x(), y = d.y(), z = d.z();
    const double pi = M_PI;
    switch (index) {
        case 0: return 0.5 * std::sqrt(1.0 / pi);
        case 1: return -(std::sqrt(3.0 / (4.0 * pi)) * y);
        case 2: return std::sqrt(3.0 / (4.0 * pi)) * z;
        case 3: return -(std::sqrt(3.0 / (4.0 * pi)) * x);
        case 4: return 0.5 * std::sqrt(15.0 / pi) * x * y;
        case 5: return -(0.5 * std::sqrt(15.0 / pi) * y * z);
        case 6: return 0.25 * std::sqrt(5.0 / pi) * (3.0 * z * z - 1.0);
        case 7: return -(0.5 * std::sqrt(15.0 / pi) * x * z);
        case 8: return 0.25 * std::sqrt(15.0 / pi) * (x * x - y * y);
        case 9: return -(0.25 * std::sqrt(35.0 / (2.0 * pi)) * y * (3.0 * x * x - y * y));
        case 10: return 0.5 * std::sqrt(105.0 / pi) * x * y * z;
        case 11: return -(0.25 * std::sqrt(21.0 / (2.0 * pi)) * y * (5.0 * z * z - 1.0));
        case 12: return 0.25 * std::sqrt(7.0 / pi) * z * (5.0 * z * z - 3.0);
        case 13: return -(0.25 * std::sqrt(21.0 / (2.0 * pi)) * x * (5.0 * z * z - 1.0));
        case 14: return 0.25 * std::sqrt(105.0 / pi) * z * (x * x - y * y);
        case 15: return -(0.25 * std::sqrt(35.0 / (2.0 * pi)) * x * (x * x - 3.0 * y * y));
        default: return 0.0;
    }
}

// ---------------------------------------------------------------------------
// Background fixtures

// Analytic floor + back wall depth in plain depth convention spanning exactly
// [1, 10], so depth normalization is the identity and planted planes stay
// planar. The floor plane is y = floor_y in camera space.
inline ImageGray floor_wall_depth(int width, int height, double fov_deg = 55.0) {
    const Camera cam = intrinsics_from_fov(width, height, fov_deg);
    const double ry_max = (height - 1 - cam.cy) / cam.fy;
    const double floor_y = ry_max;  // bottom image row hits the floor at z = 1
    ImageGray depth = ImageGray::zeros(width, height);
    for (int v = 0; v < height; ++v) {
        const double ry = (v - cam.cy) / cam.fy;
        for (int u = 0; u < width; ++u) {
            double z = 10.0;  // back wall
            if (ry > 1e-9) z = std::min(10.0, floor_y / ry);
            depth.at(v, u) = static_cast<float>(z);
        }
    }
    return depth;
}

inline ImageRgb shaded_background(int width, int height) {
    ImageRgb image = ImageRgb::zeros(width, height);
    for (int y = 0; y < height; ++y) {
        for (int x = 0; x < width; ++x) {
            float* p = image.px(y, x);
            p[0] = 0.2f + 0.6f * static_cast<float>(x) / width;
            p[1] = 0.3f + 0.4f * static_cast<float>(y) / height;
            p[2] = 0.5f;
        }
    }
    return image;
}

inline BackgroundScene make_scene_fixture(int width = 320, int height = 240) {
    const ImageGray raw = floor_wall_depth(width, height);
    Rng rng(99);
    return analyze_background(shaded_background(width, height), raw, DepthConvention::depth,
                              PlaneParams{}, rng);
}

}  // namespace testutil
