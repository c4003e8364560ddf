#include "splatgen/renderer.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

#include "splatgen/sh.hpp"

namespace splatgen {

namespace {

constexpr double kZNear = 0.01;
constexpr float kCovFloor = 0.3f;        // low-pass regularization, px^2
constexpr float kAlphaClamp = 0.99f;
constexpr float kAlphaCutoff = 1.0f / 255.0f;
constexpr float kTransmittanceStop = 1e-4f;
constexpr int kTileSize = 16;

// Extent (in sigmas of the major axis) beyond which a splat's contribution
// drops below the 1/255 cutoff; never below the conventional 3 sigma.
float cutoff_sigmas(float opacity) {
    const float op = std::min(opacity, kAlphaClamp);
    if (op <= kAlphaCutoff) return 0.0f;
    return std::max(3.0f, std::sqrt(2.0f * std::log(op * 255.0f)));
}

}  // namespace

RenderOutput RenderOutput::zeros(int w, int h) {
    RenderOutput out;
    out.width = w;
    out.height = h;
    out.color.assign(static_cast<std::size_t>(w) * h * 3, 0.0f);
    out.alpha.assign(static_cast<std::size_t>(w) * h, 0.0f);
    out.depth.assign(static_cast<std::size_t>(w) * h, 0.0f);
    return out;
}

Eigen::Matrix3f cov3d(const Eigen::Vector3f& scale, const Eigen::Quaternionf& rotation) {
    const Eigen::Matrix3f r = rotation.toRotationMatrix();
    const Eigen::Matrix3f m = r * scale.asDiagonal();
    return m * m.transpose();
}

std::optional<Splat2D> project_gaussian(const Gaussian& g, const Camera& cam) {
    const Eigen::Vector3d p = cam.to_camera(g.position.cast<double>());
    if (p.z() <= kZNear) return std::nullopt;

    const Eigen::Vector2d mean = cam.project(p);

    // Local affine (EWA) covariance mapping: J W Sigma W^T J^T.
    const double inv_z = 1.0 / p.z();
    Eigen::Matrix<double, 2, 3> jacobian;
    jacobian << cam.fx * inv_z, 0.0, -cam.fx * p.x() * inv_z * inv_z,
                0.0, cam.fy * inv_z, -cam.fy * p.y() * inv_z * inv_z;
    const Eigen::Matrix<double, 2, 3> t = jacobian * cam.rotation;
    const Eigen::Matrix2d cov2 = t * cov3d(g.scale, g.rotation).cast<double>() * t.transpose();

    Splat2D splat;
    splat.mean = mean.cast<float>();
    splat.cov_xx = static_cast<float>(cov2(0, 0)) + kCovFloor;
    splat.cov_xy = static_cast<float>(cov2(0, 1));
    splat.cov_yy = static_cast<float>(cov2(1, 1)) + kCovFloor;
    splat.depth = static_cast<float>(p.z());
    splat.opacity = g.opacity;

    // Major-axis sigma of the regularized 2D covariance.
    const float half_trace = 0.5f * (splat.cov_xx + splat.cov_yy);
    const float half_diff = 0.5f * (splat.cov_xx - splat.cov_yy);
    const float lambda_max = half_trace + std::sqrt(half_diff * half_diff + splat.cov_xy * splat.cov_xy);
    splat.radius = std::sqrt(std::max(lambda_max, 0.0f)) * cutoff_sigmas(g.opacity);

    // Viewport cull: the nearest pixel sample is at least this far away.
    const float dx = std::max({0.0f, -splat.mean.x(), splat.mean.x() - static_cast<float>(cam.width - 1)});
    const float dy = std::max({0.0f, -splat.mean.y(), splat.mean.y() - static_cast<float>(cam.height - 1)});
    if (std::sqrt(dx * dx + dy * dy) > splat.radius) return std::nullopt;
    return splat;
}

namespace {

struct TileJob {
    int x0, y0, x1, y1;
    const std::vector<int>* splats;  // indices into the projected list, depth-ordered
};

void composite_tile(const TileJob& job, const std::vector<Splat2D>& splats, RenderOutput& out) {
    for (int y = job.y0; y < job.y1; ++y) {
        for (int x = job.x0; x < job.x1; ++x) {
            float t = 1.0f;
            float r = 0, g = 0, b = 0, a = 0, d = 0;
            for (const int si : *job.splats) {
                const Splat2D& s = splats[si];
                const float ddx = static_cast<float>(x) - s.mean.x();
                const float ddy = static_cast<float>(y) - s.mean.y();
                const float det = s.cov_xx * s.cov_yy - s.cov_xy * s.cov_xy;
                const float maha =
                    (s.cov_yy * ddx * ddx - 2.0f * s.cov_xy * ddx * ddy + s.cov_xx * ddy * ddy) / det;
                const float alpha = std::min(kAlphaClamp, s.opacity * std::exp(-0.5f * maha));
                if (alpha < kAlphaCutoff) continue;
                const float w = t * alpha;
                r += w * s.color.x();
                g += w * s.color.y();
                b += w * s.color.z();
                a += w;
                d += w * s.depth;
                t *= 1.0f - alpha;
                if (t < kTransmittanceStop) break;
            }
            const std::size_t px = static_cast<std::size_t>(y) * out.width + x;
            out.color[3 * px + 0] = r;
            out.color[3 * px + 1] = g;
            out.color[3 * px + 2] = b;
            out.alpha[px] = a;
            out.depth[px] = a > 0.0f ? d / a : 0.0f;
        }
    }
}

}  // namespace

RenderOutput render(const SplatModel& model, const Camera& cam, const RenderOptions& opts) {
    RenderOutput out = RenderOutput::zeros(cam.width, cam.height);

    std::vector<Splat2D> splats;
    splats.reserve(model.size());
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
    if (splats.empty()) return out;

    // Global front-to-back order; equal depths resolve by model index.
    std::sort(splats.begin(), splats.end(), [](const Splat2D& a, const Splat2D& b) {
        return a.depth < b.depth || (a.depth == b.depth && a.index < b.index);
    });

    const int tiles_x = (cam.width + kTileSize - 1) / kTileSize;
    const int tiles_y = (cam.height + kTileSize - 1) / kTileSize;
    std::vector<std::vector<int>> bins(static_cast<std::size_t>(tiles_x) * tiles_y);
    for (std::size_t si = 0; si < splats.size(); ++si) {
        const Splat2D& s = splats[si];
        const int x0 = std::clamp(static_cast<int>(std::floor(s.mean.x() - s.radius)) / kTileSize, 0, tiles_x - 1);
        const int x1 = std::clamp(static_cast<int>(std::floor(s.mean.x() + s.radius)) / kTileSize, 0, tiles_x - 1);
        const int y0 = std::clamp(static_cast<int>(std::floor(s.mean.y() - s.radius)) / kTileSize, 0, tiles_y - 1);
        const int y1 = std::clamp(static_cast<int>(std::floor(s.mean.y() + s.radius)) / kTileSize, 0, tiles_y - 1);
        for (int ty = y0; ty <= y1; ++ty) {
            for (int tx = x0; tx <= x1; ++tx) {
                bins[static_cast<std::size_t>(ty) * tiles_x + tx].push_back(static_cast<int>(si));
            }
        }
    }

    std::vector<TileJob> jobs;
    jobs.reserve(bins.size());
    for (int ty = 0; ty < tiles_y; ++ty) {
        for (int tx = 0; tx < tiles_x; ++tx) {
            const auto& bin = bins[static_cast<std::size_t>(ty) * tiles_x + tx];
            if (bin.empty()) continue;
            jobs.push_back(TileJob{tx * kTileSize, ty * kTileSize,
                                   std::min((tx + 1) * kTileSize, cam.width),
                                   std::min((ty + 1) * kTileSize, cam.height), &bin});
        }
    }

    int threads = opts.threads;
    if (threads <= 0) threads = static_cast<int>(std::thread::hardware_concurrency());
    threads = std::max(1, std::min<int>(threads, static_cast<int>(jobs.size())));
    if (threads == 1) {
        for (const TileJob& job : jobs) composite_tile(job, splats, out);
    } else {
        // Tiles own disjoint pixel rectangles, so output does not depend on
        // how jobs are distributed across workers.
        std::vector<std::thread> pool;
        std::atomic<std::size_t> cursor{0};
        for (int w = 0; w < threads; ++w) {
            pool.emplace_back([&]() {
                while (true) {
                    const std::size_t j = cursor.fetch_add(1);
                    if (j >= jobs.size()) break;
                    composite_tile(jobs[j], splats, out);
                }
            });
        }
        for (auto& th : pool) th.join();
    }
    return out;
}

}  // namespace splatgen
