#include "splatgen/sh.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/LU>

namespace splatgen {

namespace {

constexpr double kC0 = 0.28209479177387814;
constexpr double kC1 = 0.4886025119029199;
constexpr double kC2[5] = {1.0925484305920792, -1.0925484305920792, 0.31539156525252005,
                           -1.0925484305920792, 0.5462742152960396};
constexpr double kC3[7] = {-0.5900435899266435, 2.890611442640554, -0.4570457994644658,
                           0.3731763325901154,  -0.4570457994644658, 1.445305721320277,
                           -0.5900435899266435};

}  // namespace

void eval_sh_basis(const Eigen::Vector3d& dir, int degree, double* out) {
    const double x = dir.x(), y = dir.y(), z = dir.z();
    out[0] = kC0;
    if (degree < 1) return;
    out[1] = -kC1 * y;
    out[2] = kC1 * z;
    out[3] = -kC1 * x;
    if (degree < 2) return;
    const double xx = x * x, yy = y * y, zz = z * z;
    const double xy = x * y, yz = y * z, xz = x * z;
    out[4] = kC2[0] * xy;
    out[5] = kC2[1] * yz;
    out[6] = kC2[2] * (2.0 * zz - xx - yy);
    out[7] = kC2[3] * xz;
    out[8] = kC2[4] * (xx - yy);
    if (degree < 3) return;
    out[9] = kC3[0] * y * (3.0 * xx - yy);
    out[10] = kC3[1] * xy * z;
    out[11] = kC3[2] * y * (4.0 * zz - xx - yy);
    out[12] = kC3[3] * z * (2.0 * zz - 3.0 * xx - 3.0 * yy);
    out[13] = kC3[4] * x * (4.0 * zz - xx - yy);
    out[14] = kC3[5] * z * (xx - yy);
    out[15] = kC3[6] * x * (xx - 3.0 * yy);
}

Eigen::Vector3f eval_sh(const Eigen::Matrix<float, 16, 3>& sh, const Eigen::Vector3f& dir, int degree) {
    double basis[16];
    eval_sh_basis(dir.cast<double>(), degree, basis);
    const int count = sh_coeff_count(degree);
    Eigen::Vector3d color(0.5, 0.5, 0.5);
    for (int i = 0; i < count; ++i) {
        for (int c = 0; c < 3; ++c) color[c] += basis[i] * sh(i, c);
    }
    return color.cwiseMax(0.0).cwiseMin(1.0).cast<float>();
}

namespace {

// Fixed unisolvent sample directions; enough for the 7-dimensional band 3.
const Eigen::Vector3d kSampleDirs[7] = {
    Eigen::Vector3d(1, 2, 3).normalized(),   Eigen::Vector3d(3, 1, -1).normalized(),
    Eigen::Vector3d(-2, 3, 2).normalized(),  Eigen::Vector3d(2, -1, 3).normalized(),
    Eigen::Vector3d(-3, -2, 1).normalized(), Eigen::Vector3d(1, 3, -2).normalized(),
    Eigen::Vector3d(3, -3, 1).normalized(),
};

// Solves the band-l coefficient transform G^T from b(R^T d_k) = G b(d_k).
Eigen::MatrixXd band_transform(const Eigen::Matrix3d& rotation, int band) {
    const int dim = 2 * band + 1;
    const int offset = band * band;
    Eigen::MatrixXd basis_at(dim, dim);       // columns: b(d_k)
    Eigen::MatrixXd basis_rotated(dim, dim);  // columns: b(R^T d_k)
    double buf[16];
    for (int k = 0; k < dim; ++k) {
        eval_sh_basis(kSampleDirs[k], band, buf);
        for (int i = 0; i < dim; ++i) basis_at(i, k) = buf[offset + i];
        eval_sh_basis(rotation.transpose() * kSampleDirs[k], band, buf);
        for (int i = 0; i < dim; ++i) basis_rotated(i, k) = buf[offset + i];
    }
    // With G defined by b(R^T d) = G b(d), coefficients transform by G^T,
    // and G^T solves A^T G^T = B^T where A, B are the sample matrices above.
    return basis_at.transpose().fullPivLu().solve(basis_rotated.transpose());
}

}  // namespace

ShRotation::ShRotation(const Eigen::Matrix3d& rotation) {
    band1_ = band_transform(rotation, 1);
    band2_ = band_transform(rotation, 2);
    band3_ = band_transform(rotation, 3);
}

void ShRotation::apply(Eigen::Matrix<float, 16, 3>& sh, int degree) const {
    if (degree < 1) return;
    Eigen::Matrix<double, 16, 3> coeffs = sh.cast<double>();
    coeffs.block<3, 3>(1, 0) = band1_ * coeffs.block<3, 3>(1, 0);
    if (degree >= 2) coeffs.block<5, 3>(4, 0) = band2_ * coeffs.block<5, 3>(4, 0);
    if (degree >= 3) coeffs.block<7, 3>(9, 0) = band3_ * coeffs.block<7, 3>(9, 0);
    sh = coeffs.cast<float>();
}

}  // namespace splatgen
