#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Eigenvalues>

#include "helpers.hpp"

using namespace splatgen;
using namespace testutil;

namespace {

Gaussian point_splat(const Eigen::Vector3f& position, float opacity, float scale = 1e-6f) {
    Gaussian g;
    g.position = position;
    g.opacity = opacity;
    g.scale = Eigen::Vector3f(scale, scale, scale);
    g.rotation = Eigen::Quaternionf::Identity();
    g.sh(0, 0) = 1.0f;
    return g;
}

SplatModel on_frustum_model(Rng& rng, std::size_t count) {
    SplatModel model;
    model.sh_degree = 1;
    for (std::size_t i = 0; i < count; ++i) {
        Gaussian g = random_gaussian(rng, 1);
        // Keep the mean comfortably inside a 512x512 f=500 frustum.
        const double z = rng.uniform(2.0, 12.0);
        g.position = Eigen::Vector3f(static_cast<float>(rng.uniform(-0.4, 0.4) * z),
                                     static_cast<float>(rng.uniform(-0.4, 0.4) * z),
                                     static_cast<float>(z));
        model.gaussians.push_back(g);
    }
    return model;
}

}  // namespace

TEST_CASE("cov3d") {
    SUBCASE("identity rotation squares the scales") {
        const Eigen::Matrix3f cov = cov3d({1, 2, 3}, Eigen::Quaternionf::Identity());
        CHECK(cov.isApprox(Eigen::Vector3f(1, 4, 9).asDiagonal().toDenseMatrix(), 1e-6f));
    }

    SUBCASE("90 degree z-rotation swaps x and y variance") {
        const Eigen::Quaternionf q(Eigen::AngleAxisf(static_cast<float>(M_PI / 2), Eigen::Vector3f::UnitZ()));
        const Eigen::Matrix3f cov = cov3d({1, 2, 1}, q);
        CHECK(cov(0, 0) == doctest::Approx(4.0).epsilon(1e-5));
        CHECK(cov(1, 1) == doctest::Approx(1.0).epsilon(1e-5));
        CHECK(cov(2, 2) == doctest::Approx(1.0).epsilon(1e-5));
    }

    SUBCASE("eigenvalues equal squared scales") {
        Rng rng(3);
        for (int trial = 0; trial < 100; ++trial) {
            const Eigen::Vector3f scale(static_cast<float>(rng.uniform(0.1, 2)),
                                        static_cast<float>(rng.uniform(0.1, 2)),
                                        static_cast<float>(rng.uniform(0.1, 2)));
            const Eigen::Quaternionf q(
                Eigen::AngleAxisf(static_cast<float>(rng.uniform(0, M_PI)), rng.unit_vector().cast<float>()));
            const Eigen::Matrix3d cov = cov3d(scale, q).cast<double>();
            Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> solver(cov);
            Eigen::Vector3d expected = scale.cast<double>().cwiseProduct(scale.cast<double>());
            std::sort(expected.data(), expected.data() + 3);
            CHECK((solver.eigenvalues() - expected).cwiseAbs().maxCoeff() < 1e-6);
        }
    }
}

TEST_CASE("projection hits the pinhole formula") {
    Camera cam = test_camera(512, 512, 500.0);
    cam.cx = cam.cy = 256.0;

    SUBCASE("on axis") {
        const auto splat = project_gaussian(point_splat({0, 0, 5}, 0.9f), cam);
        REQUIRE(splat.has_value());
        CHECK(splat->mean.x() == doctest::Approx(256.0).epsilon(0.25 / 256));
        CHECK(splat->mean.y() == doctest::Approx(256.0).epsilon(0.25 / 256));
        CHECK(splat->depth == doctest::Approx(5.0));
    }

    SUBCASE("off axis") {
        const auto splat = project_gaussian(point_splat({1, 0, 5}, 0.9f), cam);
        REQUIRE(splat.has_value());
        CHECK(std::abs(splat->mean.x() - 356.0f) < 0.25f);
        CHECK(std::abs(splat->mean.y() - 256.0f) < 0.25f);
    }

    SUBCASE("1000 random on-frustum gaussians within a quarter pixel") {
        Rng rng(5);
        SplatModel model = on_frustum_model(rng, 1000);
        for (const Gaussian& g : model.gaussians) {
            const auto splat = project_gaussian(g, cam);
            REQUIRE(splat.has_value());
            const Eigen::Vector3d p = g.position.cast<double>();
            CHECK(std::abs(splat->mean.x() - (cam.fx * p.x() / p.z() + cam.cx)) < 0.25);
            CHECK(std::abs(splat->mean.y() - (cam.fy * p.y() / p.z() + cam.cy)) < 0.25);
        }
    }

    SUBCASE("behind camera culled") {
        CHECK_FALSE(project_gaussian(point_splat({0, 0, -1}, 0.9f), cam).has_value());
        CHECK_FALSE(project_gaussian(point_splat({0, 0, 0.005f}, 0.9f), cam).has_value());
    }

    SUBCASE("isotropic small-angle covariance") {
        const float s = 0.05f;
        Gaussian g = point_splat({0, 0, 8}, 0.9f, s);
        const auto splat = project_gaussian(g, cam);
        REQUIRE(splat.has_value());
        const double expected = std::pow(500.0 * s / 8.0, 2);
        CHECK(splat->cov_xx == doctest::Approx(expected + 0.3).epsilon(0.02));
        CHECK(splat->cov_yy == doctest::Approx(expected + 0.3).epsilon(0.02));
        CHECK(std::abs(splat->cov_xy) < 0.02 * expected);
    }
}

TEST_CASE("culling soundness: culled splats are invisible") {
    Camera cam = test_camera(128, 128, 300.0);
    Rng rng(7);
    int culled = 0;
    for (int trial = 0; trial < 4000; ++trial) {
        Gaussian g = random_gaussian(rng, 0);
        const double z = rng.uniform(0.5, 6.0);
        g.position = Eigen::Vector3f(static_cast<float>(rng.uniform(-1.5, 1.5) * z),
                                     static_cast<float>(rng.uniform(-1.5, 1.5) * z),
                                     static_cast<float>(z));
        const auto splat = project_gaussian(g, cam);
        if (splat) continue;
        const Eigen::Vector3d p = g.position.cast<double>();
        if (p.z() <= 0.01) continue;  // near-plane cull, trivially invisible
        ++culled;
        // Force-render on the oracle path: max contribution over all pixels.
        const Eigen::Matrix<double, 2, 3> jac =
            (Eigen::Matrix<double, 2, 3>() << cam.fx / p.z(), 0, -cam.fx * p.x() / (p.z() * p.z()), 0,
             cam.fy / p.z(), -cam.fy * p.y() / (p.z() * p.z()))
                .finished();
        const Eigen::Matrix2d cov2 =
            jac * cov3d(g.scale, g.rotation).cast<double>() * jac.transpose() +
            0.3 * Eigen::Matrix2d::Identity();
        const Eigen::Vector2d mean(cam.fx * p.x() / p.z() + cam.cx, cam.fy * p.y() / p.z() + cam.cy);
        const Eigen::Matrix2d inv = cov2.inverse();
        float peak = 0;
        for (int y = 0; y < cam.height; ++y) {
            for (int x = 0; x < cam.width; ++x) {
                const Eigen::Vector2d d = Eigen::Vector2d(x, y) - mean;
                const double maha = d.dot(inv * d);
                peak = std::max(peak, std::min(0.99f, g.opacity * static_cast<float>(std::exp(-0.5 * maha))));
            }
        }
        CHECK(peak < 1.0f / 255.0f);
    }
    CHECK(culled > 50);  // the fixture must actually exercise culling
}

TEST_CASE("empty model renders zeros") {
    SplatModel model;
    model.gaussians.clear();
    const RenderOutput out = render(model, test_camera(64, 64));
    for (float v : out.alpha) CHECK(v == 0.0f);
    for (float v : out.color) CHECK(v == 0.0f);
    for (float v : out.depth) CHECK(v == 0.0f);
}

TEST_CASE("single splat peak alpha equals opacity") {
    Camera cam = test_camera(128, 128, 400.0);
    cam.cx = 64.0;
    cam.cy = 64.0;
    for (float opacity : {0.2f, 0.5f, 0.9f}) {
        SplatModel model;
        model.gaussians.push_back(point_splat({0, 0, 4}, opacity, 0.02f));
        const RenderOutput out = render(model, cam);
        CHECK(out.alpha_at(64, 64) == doctest::Approx(opacity).epsilon(1e-3));
        // Peak is at the projected mean.
        float best = 0;
        int bx = -1, by = -1;
        for (int y = 0; y < 128; ++y) {
            for (int x = 0; x < 128; ++x) {
                if (out.alpha_at(y, x) > best) {
                    best = out.alpha_at(y, x);
                    bx = x;
                    by = y;
                }
            }
        }
        CHECK(bx == 64);
        CHECK(by == 64);
        // Depth equals camera-space z wherever alpha is meaningful.
        for (int y = 0; y < 128; ++y) {
            for (int x = 0; x < 128; ++x) {
                if (out.alpha_at(y, x) > 0.01f) {
                    CHECK(out.depth_at(y, x) == doctest::Approx(4.0).epsilon(1e-5));
                }
            }
        }
    }
}

TEST_CASE("white override reproduces the alpha buffer") {
    Rng rng(11);
    SplatModel model = on_frustum_model(rng, 1000);
    RenderOptions opts;
    opts.white_override = true;
    const RenderOutput out = render(model, test_camera(256, 256, 300.0), opts);
    for (std::size_t p = 0; p < out.alpha.size(); ++p) {
        for (int c = 0; c < 3; ++c) {
            CHECK(std::abs(out.color[3 * p + c] - out.alpha[p]) < 1e-5f);
        }
    }
}

TEST_CASE("tiled render equals brute force per-pixel render") {
    Rng rng(13);
    for (int trial = 0; trial < 3; ++trial) {
        const SplatModel model = on_frustum_model(rng, 200);
        const Camera cam = test_camera(192, 160, 250.0);
        const RenderOutput tiled = render(model, cam);
        const RenderOutput brute = brute_render(model, cam);
        float worst = 0;
        for (std::size_t i = 0; i < tiled.alpha.size(); ++i) {
            worst = std::max(worst, std::abs(tiled.alpha[i] - brute.alpha[i]));
            worst = std::max(worst, std::abs(tiled.depth[i] - brute.depth[i]));
        }
        for (std::size_t i = 0; i < tiled.color.size(); ++i) {
            worst = std::max(worst, std::abs(tiled.color[i] - brute.color[i]));
        }
        CHECK(worst < 1e-6f);
    }
}

TEST_CASE("render is thread-count invariant") {
    Rng rng(17);
    const SplatModel model = on_frustum_model(rng, 500);
    const Camera cam = test_camera(160, 128, 220.0);
    RenderOptions one;
    one.threads = 1;
    RenderOptions many;
    many.threads = 8;
    const RenderOutput a = render(model, cam, one);
    const RenderOutput b = render(model, cam, many);
    CHECK(a.color == b.color);
    CHECK(a.alpha == b.alpha);
    CHECK(a.depth == b.depth);
}

TEST_CASE("two overlapping splats composite in depth order") {
    Camera cam = test_camera(64, 64, 300.0);
    cam.cx = cam.cy = 32.0;
    SplatModel model;
    Gaussian near = point_splat({0, 0, 2}, 0.6f, 0.02f);
    near.sh.setZero();
    near.sh(0, 0) = 1.0f;  // red-ish
    Gaussian far = point_splat({0, 0, 4}, 0.8f, 0.04f);
    far.sh.setZero();
    far.sh(0, 2) = 1.0f;  // blue-ish
    model.gaussians = {far, near};  // model order far, near; depth sort must fix it
    const RenderOutput out = render(model, cam);

    // Closed-form two-term over-composite at the shared center pixel.
    const float a1 = 0.6f, a2 = 0.8f;
    const Eigen::Vector3f c1 = eval_sh(near.sh, Eigen::Vector3f(0, 0, 1), 0);
    const Eigen::Vector3f c2 = eval_sh(far.sh, Eigen::Vector3f(0, 0, 1), 0);
    const float expect_alpha = a1 + (1 - a1) * a2;
    const Eigen::Vector3f expect_color = a1 * c1 + (1 - a1) * a2 * c2;
    CHECK(out.alpha_at(32, 32) == doctest::Approx(expect_alpha).epsilon(1e-3));
    for (int c = 0; c < 3; ++c) {
        CHECK(out.color_px(32, 32)[c] == doctest::Approx(expect_color[c]).epsilon(2e-3));
    }

    // Equal-depth ties break by model index; swapping insertion order of
    // equal-depth splats changes nothing beyond quantization.
    SplatModel tie_a, tie_b;
    Gaussian g1 = point_splat({0, 0, 3}, 0.5f, 0.03f);
    g1.sh(0, 0) = 1.0f;
    Gaussian g2 = point_splat({0.01f, 0, 3}, 0.5f, 0.03f);
    g2.sh(0, 2) = 1.0f;
    tie_a.gaussians = {g1, g2};
    tie_b.gaussians = {g2, g1};
    const RenderOutput ra = render(tie_a, cam);
    const RenderOutput rb = render(tie_b, cam);
    for (std::size_t i = 0; i < ra.color.size(); ++i) {
        CHECK(std::abs(ra.color[i] - rb.color[i]) <= 1.0f / 255.0f);
    }
}

TEST_CASE("alpha monotone in splat opacity") {
    Camera cam = test_camera(64, 64, 300.0);
    SplatModel model;
    model.gaussians.push_back(point_splat({0, 0, 3}, 0.3f, 0.05f));
    model.gaussians.push_back(point_splat({0.05f, 0, 3.5f}, 0.4f, 0.05f));
    const RenderOutput low = render(model, cam);
    model.gaussians[0].opacity = 0.6f;
    const RenderOutput high = render(model, cam);
    for (std::size_t i = 0; i < low.alpha.size(); ++i) {
        CHECK(high.alpha[i] >= low.alpha[i] - 1e-6f);
    }
}

TEST_CASE("sh direction override shifts view-dependent color") {
    Rng rng(23);
    SplatModel model;
    model.sh_degree = 1;
    Gaussian g = point_splat({0, 0, 5}, 0.9f, 0.05f);
    g.sh(1, 0) = 0.4f;  // directional red term
    model.gaussians.push_back(g);
    const Camera cam = test_camera(64, 64, 300.0);

    RenderOptions plain;
    RenderOptions overridden;
    overridden.sh_dir_override = Eigen::Vector3f(0, -1, 0);
    const RenderOutput a = render(model, cam, plain);
    const RenderOutput b = render(model, cam, overridden);
    CHECK(a.color_px(32, 32)[0] != b.color_px(32, 32)[0]);
    // Alpha is appearance-independent.
    for (std::size_t i = 0; i < a.alpha.size(); ++i) CHECK(a.alpha[i] == b.alpha[i]);
}
