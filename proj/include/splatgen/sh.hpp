#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace splatgen {

inline constexpr int sh_coeff_count(int degree) { return (degree + 1) * (degree + 1); }

// Real SH basis values in splat storage order (DC first, then bands 1..3 in
// m = -l..l order with the usual sign folds). Entries beyond the requested
// degree are left untouched.
void eval_sh_basis(const Eigen::Vector3d& dir, int degree, double* out);

// View-dependent color: 0.5 + sum_i basis_i * sh(i, channel), clamped to [0,1].
Eigen::Vector3f eval_sh(const Eigen::Matrix<float, 16, 3>& sh, const Eigen::Vector3f& dir, int degree);

// Rotates SH coefficients so the encoded directional function follows a rigid
// rotation of the object: if c encodes f, apply(c) encodes d -> f(R^T d).
// The per-band matrices are solved exactly from basis evaluations at fixed
// sample directions (each band is closed under rotation).
class ShRotation {
public:
    explicit ShRotation(const Eigen::Matrix3d& rotation);

    void apply(Eigen::Matrix<float, 16, 3>& sh, int degree) const;

private:
    Eigen::Matrix3d band1_;
    Eigen::Matrix<double, 5, 5> band2_;
    Eigen::Matrix<double, 7, 7> band3_;
};

}  // namespace splatgen
