#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace splatgen {

// One splat with storage activations already applied: opacity through the
// sigmoid, scale through exp, rotation normalized. sh row 0 is the DC band,
// rows 1..15 the higher bands; columns are RGB.
struct Gaussian {
    Eigen::Vector3f position = Eigen::Vector3f::Zero();
    float opacity = 0.5f;                                   // (0, 1)
    Eigen::Vector3f scale = Eigen::Vector3f::Ones();        // per-axis std dev, > 0
    Eigen::Quaternionf rotation = Eigen::Quaternionf::Identity();
    Eigen::Matrix<float, 16, 3> sh = Eigen::Matrix<float, 16, 3>::Zero();
};

struct SplatModel {
    std::vector<Gaussian> gaussians;
    int sh_degree = 0;  // 0..3
    std::string source_path;

    std::size_t size() const { return gaussians.size(); }
    bool empty() const { return gaussians.empty(); }
};

// Binary little-endian PLY in the standard splat layout:
//   ply / format binary_little_endian 1.0 / element vertex N
//   float properties x y z nx ny nz f_dc_0..2 f_rest_* opacity scale_0..2 rot_0..3
// rot is stored (w, x, y, z); nx/ny/nz are parsed and ignored. The SH degree
// is inferred from the f_rest count (0/9/24/45 -> degree 0/1/2/3).
SplatModel load_splat_ply(const std::filesystem::path& path);

// Inverse activations (logit, log, raw quaternion) so load(save(m)) == m.
void save_splat_ply(const SplatModel& model, const std::filesystem::path& path);

}  // namespace splatgen
