#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "helpers.hpp"

using namespace splatgen;
using namespace testutil;

TEST_CASE("degree 0 is the constant band") {
    Eigen::Matrix<float, 16, 3> sh = Eigen::Matrix<float, 16, 3>::Zero();
    sh(0, 0) = 1.0f;
    sh(0, 1) = -0.5f;
    Rng rng(3);
    for (int i = 0; i < 20; ++i) {
        const Eigen::Vector3f dir = rng.unit_vector().cast<float>();
        const Eigen::Vector3f color = eval_sh(sh, dir, 0);
        CHECK(color.x() == doctest::Approx(0.28209479177387814 + 0.5).epsilon(1e-6));
        CHECK(color.y() == doctest::Approx(0.5 - 0.5 * 0.28209479177387814).epsilon(1e-6));
        CHECK(color.z() == doctest::Approx(0.5).epsilon(1e-6));
    }
}

TEST_CASE("odd bands negate under direction flip") {
    Rng rng(5);
    Eigen::Matrix<float, 16, 3> sh = Eigen::Matrix<float, 16, 3>::Zero();
    // Only odd-degree coefficients set (bands 1 and 3).
    for (int i = 1; i < 4; ++i) sh(i, 0) = static_cast<float>(rng.uniform(-0.2, 0.2));
    for (int i = 9; i < 16; ++i) sh(i, 0) = static_cast<float>(rng.uniform(-0.2, 0.2));
    for (int trial = 0; trial < 50; ++trial) {
        const Eigen::Vector3f dir = rng.unit_vector().cast<float>();
        const float a = eval_sh(sh, dir, 3).x();
        const float b = eval_sh(sh, -dir, 3).x();
        CHECK(a - 0.5f == doctest::Approx(-(b - 0.5f)).epsilon(1e-5));
    }
}

TEST_CASE("basis matches the independent table") {
    Rng rng(7);
    for (int trial = 0; trial < 200; ++trial) {
        const Eigen::Vector3d dir = rng.unit_vector();
        double basis[16];
        eval_sh_basis(dir, 3, basis);
        for (int i = 0; i < 16; ++i) {
            CHECK(basis[i] == doctest::Approx(sh_basis_oracle(i, dir)).epsilon(1e-9));
        }
    }
}

TEST_CASE("random coefficients match direct basis evaluation") {
    Rng rng(11);
    for (int trial = 0; trial < 50; ++trial) {
        Eigen::Matrix<float, 16, 3> sh;
        for (int i = 0; i < 16; ++i) {
            for (int c = 0; c < 3; ++c) sh(i, c) = static_cast<float>(rng.uniform(-0.3, 0.3));
        }
        const Eigen::Vector3d dir = rng.unit_vector();
        const Eigen::Vector3f color = eval_sh(sh, dir.cast<float>(), 3);
        for (int c = 0; c < 3; ++c) {
            double expect = 0.5;
            for (int i = 0; i < 16; ++i) expect += sh_basis_oracle(i, dir) * sh(i, c);
            expect = std::clamp(expect, 0.0, 1.0);
            CHECK(color[c] == doctest::Approx(expect).epsilon(1e-6));
        }
    }
}

TEST_CASE("rotation transports the encoded function") {
    Rng rng(13);
    for (int trial = 0; trial < 30; ++trial) {
        Eigen::Matrix<float, 16, 3> sh;
        for (int i = 0; i < 16; ++i) {
            for (int c = 0; c < 3; ++c) sh(i, c) = static_cast<float>(rng.uniform(-0.3, 0.3));
        }
        const Eigen::Quaterniond q(Eigen::AngleAxisd(rng.uniform(0, M_PI), rng.unit_vector()));
        const ShRotation rotation(q.toRotationMatrix());
        Eigen::Matrix<float, 16, 3> rotated = sh;
        rotation.apply(rotated, 3);

        for (int k = 0; k < 10; ++k) {
            const Eigen::Vector3d dir = rng.unit_vector();
            // f'(d) must equal f(R^T d).
            const Eigen::Vector3f lhs = eval_sh(rotated, dir.cast<float>(), 3);
            const Eigen::Vector3f rhs =
                eval_sh(sh, (q.toRotationMatrix().transpose() * dir).cast<float>(), 3);
            CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-5f);
        }
    }
}

TEST_CASE("rotation composition is multiplicative") {
    Rng rng(17);
    const Eigen::Quaterniond q1(Eigen::AngleAxisd(0.7, rng.unit_vector()));
    const Eigen::Quaterniond q2(Eigen::AngleAxisd(1.3, rng.unit_vector()));
    Eigen::Matrix<float, 16, 3> sh;
    for (int i = 0; i < 16; ++i) {
        for (int c = 0; c < 3; ++c) sh(i, c) = static_cast<float>(rng.uniform(-0.3, 0.3));
    }
    Eigen::Matrix<float, 16, 3> two_step = sh;
    ShRotation(q1.toRotationMatrix()).apply(two_step, 3);
    ShRotation(q2.toRotationMatrix()).apply(two_step, 3);
    Eigen::Matrix<float, 16, 3> one_step = sh;
    ShRotation((q2 * q1).toRotationMatrix()).apply(one_step, 3);
    CHECK((two_step - one_step).cwiseAbs().maxCoeff() < 1e-5f);
}

TEST_CASE("identity rotation leaves coefficients fixed") {
    Rng rng(19);
    Eigen::Matrix<float, 16, 3> sh;
    for (int i = 0; i < 16; ++i) {
        for (int c = 0; c < 3; ++c) sh(i, c) = static_cast<float>(rng.uniform(-0.3, 0.3));
    }
    Eigen::Matrix<float, 16, 3> rotated = sh;
    ShRotation(Eigen::Matrix3d::Identity()).apply(rotated, 3);
    CHECK((rotated - sh).cwiseAbs().maxCoeff() < 1e-6f);
}
