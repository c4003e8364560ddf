#pragma once

#include <optional>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Geometry>

#include "splatgen/splat_io.hpp"

namespace splatgen {

// Pinhole camera with a rigid world-to-camera transform. Pixel (x, y) samples
// the ray through (x, y) in projection coordinates, i.e. u = fx*X/Z + cx.
struct Camera {
    double fx = 0, fy = 0, cx = 0, cy = 0;
    int width = 0, height = 0;
    Eigen::Matrix3d rotation = Eigen::Matrix3d::Identity();
    Eigen::Vector3d translation = Eigen::Vector3d::Zero();

    Eigen::Vector3d to_camera(const Eigen::Vector3d& world) const { return rotation * world + translation; }
    Eigen::Vector3d center() const { return -(rotation.transpose() * translation); }
    Eigen::Vector2d project(const Eigen::Vector3d& camera_point) const {
        return {fx * camera_point.x() / camera_point.z() + cx,
                fy * camera_point.y() / camera_point.z() + cy};
    }
};

struct Splat2D {
    Eigen::Vector2f mean = Eigen::Vector2f::Zero();  // pixels
    float cov_xx = 0, cov_xy = 0, cov_yy = 0;        // pixels^2, regularized
    float depth = 0;                                 // camera-space z
    Eigen::Vector3f color = Eigen::Vector3f::Zero();
    float opacity = 0;
    float radius = 0;  // extent in pixels beyond which alpha < 1/255
    int index = 0;     // model order; compositing tie-break
};

struct RenderOutput {
    int width = 0, height = 0;
    std::vector<float> color;  // H*W*3, premultiplied by alpha
    std::vector<float> alpha;  // H*W accumulated opacity
    std::vector<float> depth;  // H*W alpha-weighted mean z; 0 where alpha == 0

    static RenderOutput zeros(int w, int h);
    float* color_px(int y, int x) { return color.data() + 3 * (static_cast<std::size_t>(y) * width + x); }
    const float* color_px(int y, int x) const {
        return color.data() + 3 * (static_cast<std::size_t>(y) * width + x);
    }
    float alpha_at(int y, int x) const { return alpha[static_cast<std::size_t>(y) * width + x]; }
    float depth_at(int y, int x) const { return depth[static_cast<std::size_t>(y) * width + x]; }
};

struct RenderOptions {
    // One shared SH evaluation direction for all splats (appearance jitter);
    // default is the per-splat direction from the camera center.
    std::optional<Eigen::Vector3f> sh_dir_override;
    // Force splat colors to white; the color buffer then reproduces alpha.
    bool white_override = false;
    int threads = 1;  // tile-level parallelism; output is thread-count invariant
};

// 3D covariance R diag(s)^2 R^T.
Eigen::Matrix3f cov3d(const Eigen::Vector3f& scale, const Eigen::Quaternionf& rotation);

// EWA projection of one gaussian; nullopt when behind the near plane or too
// far outside the viewport to contribute a visible pixel.
std::optional<Splat2D> project_gaussian(const Gaussian& g, const Camera& cam);

RenderOutput render(const SplatModel& model, const Camera& cam, const RenderOptions& opts = {});

}  // namespace splatgen
