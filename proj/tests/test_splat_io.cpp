#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>

#include "helpers.hpp"

using namespace splatgen;
using namespace testutil;

namespace {

// Independent fixture writer: assembles the 62-property record layout byte by
// byte, bypassing save_splat_ply entirely.
void write_reference_ply(const std::filesystem::path& path,
                         const std::vector<std::array<float, 62>>& records) {
    std::ofstream out(path, std::ios::binary);
    out << "ply\nformat binary_little_endian 1.0\nelement vertex " << records.size() << "\n";
    auto prop = [&](const std::string& name) { out << "property float " << name << "\n"; };
    for (const char* n : {"x", "y", "z", "nx", "ny", "nz", "f_dc_0", "f_dc_1", "f_dc_2"}) prop(n);
    for (int i = 0; i < 45; ++i) prop("f_rest_" + std::to_string(i));
    for (const char* n : {"opacity", "scale_0", "scale_1", "scale_2", "rot_0", "rot_1", "rot_2", "rot_3"}) {
        prop(n);
    }
    out << "end_header\n";
    for (const auto& record : records) {
        out.write(reinterpret_cast<const char*>(record.data()), record.size() * sizeof(float));
    }
}

std::array<float, 62> make_record(float x, float y, float z, float opacity_logit,
                                  const std::array<float, 3>& log_scale,
                                  const std::array<float, 4>& rot_wxyz) {
    std::array<float, 62> record{};
    record[0] = x;
    record[1] = y;
    record[2] = z;
    for (int c = 0; c < 3; ++c) record[6 + c] = 0.1f * static_cast<float>(c + 1);
    for (int i = 0; i < 45; ++i) record[9 + i] = 0.01f * static_cast<float>(i);
    record[54] = opacity_logit;
    for (int c = 0; c < 3; ++c) record[55 + c] = log_scale[c];
    for (int c = 0; c < 4; ++c) record[58 + c] = rot_wxyz[c];
    return record;
}

}  // namespace

TEST_CASE("load applies activations") {
    const auto dir = make_temp_dir("splatio");
    const auto path = dir / "three.ply";
    std::vector<std::array<float, 62>> records;
    records.push_back(make_record(1, 2, 3, 0.0f, {0, 0, 0}, {1, 0, 0, 0}));
    records.push_back(make_record(-1, 0.5f, 2, 2.0f, {-1, 0.5f, 1}, {0.5f, 0.5f, 0.5f, 0.5f}));
    records.push_back(make_record(0, 0, -4, -3.0f, {0.25f, -0.25f, 2}, {2, 0, 0, 0}));
    write_reference_ply(path, records);

    const SplatModel model = load_splat_ply(path);
    REQUIRE(model.size() == 3);
    CHECK(model.sh_degree == 3);

    // sigmoid(0) = 0.5, exp(0) = 1.
    CHECK(model.gaussians[0].opacity == doctest::Approx(0.5).epsilon(1e-6));
    CHECK(model.gaussians[0].scale.x() == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(model.gaussians[0].position.isApprox(Eigen::Vector3f(1, 2, 3)));

    CHECK(model.gaussians[1].opacity == doctest::Approx(1.0 / (1.0 + std::exp(-2.0))).epsilon(1e-6));
    CHECK(model.gaussians[1].scale.y() == doctest::Approx(std::exp(0.5)).epsilon(1e-6));
    // (0.5, 0.5, 0.5, 0.5) is already unit.
    CHECK(model.gaussians[1].rotation.norm() == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(model.gaussians[1].rotation.w() == doctest::Approx(0.5).epsilon(1e-6));

    // Unnormalized (2,0,0,0) must come back normalized.
    CHECK(model.gaussians[2].rotation.w() == doctest::Approx(1.0).epsilon(1e-6));

    // Field order: dc then channel-major rest.
    CHECK(model.gaussians[0].sh(0, 1) == doctest::Approx(0.2).epsilon(1e-6));
    CHECK(model.gaussians[0].sh(1, 0) == doctest::Approx(0.0).epsilon(1e-6));   // f_rest_0
    CHECK(model.gaussians[0].sh(1, 1) == doctest::Approx(0.15).epsilon(1e-6));  // f_rest_15
    CHECK(model.gaussians[0].sh(15, 2) == doctest::Approx(0.44).epsilon(1e-6));  // f_rest_44
}

TEST_CASE("fixture bytes match an independent raw-float scan") {
    const auto dir = make_temp_dir("splatio");
    const auto path = dir / "raw.ply";
    std::vector<std::array<float, 62>> records;
    records.push_back(make_record(0.25f, -0.5f, 4.75f, 1.25f, {-0.5f, 0, 0.5f}, {0.8f, 0.6f, 0, 0}));
    write_reference_ply(path, records);

    const auto bytes = read_file_bytes(path);
    const std::string text(reinterpret_cast<const char*>(bytes.data()), bytes.size());
    const std::size_t body = text.find("end_header\n") + std::strlen("end_header\n");
    float raw[62];
    std::memcpy(raw, bytes.data() + body, sizeof raw);

    const SplatModel model = load_splat_ply(path);
    CHECK(model.gaussians[0].position.x() == raw[0]);
    CHECK(model.gaussians[0].opacity == doctest::Approx(1.0 / (1.0 + std::exp(-raw[54]))));
    CHECK(model.gaussians[0].scale.z() == doctest::Approx(std::exp(raw[57])));
    CHECK(model.gaussians[0].sh(0, 0) == raw[6]);
}

TEST_CASE("save writes inverse activations") {
    const auto dir = make_temp_dir("splatio");
    Rng rng(7);
    SplatModel model = make_random_model(rng, 4, 2);
    model.gaussians[0].opacity = 0.5f;
    const auto path = dir / "inv.ply";
    save_splat_ply(model, path);

    const auto bytes = read_file_bytes(path);
    const std::string text(reinterpret_cast<const char*>(bytes.data()), bytes.size());
    const std::size_t body = text.find("end_header\n") + std::strlen("end_header\n");
    // degree-2 record: 9 header floats, 24 rest, opacity at offset 33
    float raw[41];
    std::memcpy(raw, bytes.data() + body, sizeof raw);
    CHECK(raw[33] == doctest::Approx(0.0).epsilon(1e-6));  // logit(0.5)
    CHECK(raw[3] == 0.0f);                                 // nx written as zero
}

TEST_CASE("round trip within 1e-6") {
    const auto dir = make_temp_dir("splatio");
    Rng rng(11);
    for (int degree : {0, 1, 2, 3}) {
        SplatModel model = make_random_model(rng, degree == 3 ? 10000 : 50, degree);
        const auto path = dir / ("rt" + std::to_string(degree) + ".ply");
        save_splat_ply(model, path);
        const SplatModel loaded = load_splat_ply(path);
        REQUIRE(loaded.size() == model.size());
        CHECK(loaded.sh_degree == degree);
        double worst = 0;
        for (std::size_t i = 0; i < model.size(); ++i) {
            const Gaussian& a = model.gaussians[i];
            const Gaussian& b = loaded.gaussians[i];
            worst = std::max<double>(worst, (a.position - b.position).cwiseAbs().maxCoeff());
            worst = std::max<double>(worst, std::abs(a.opacity - b.opacity));
            worst = std::max<double>(worst, ((a.scale - b.scale).cwiseQuotient(a.scale)).cwiseAbs().maxCoeff());
            const float qdot = std::abs(a.rotation.coeffs().dot(b.rotation.coeffs()));
            worst = std::max<double>(worst, std::abs(1.0f - qdot));
            worst = std::max<double>(worst, (a.sh - b.sh).cwiseAbs().maxCoeff());
        }
        CHECK(worst < 1e-6);
    }
}

TEST_CASE("order preserved") {
    const auto dir = make_temp_dir("splatio");
    Rng rng(3);
    SplatModel model = make_random_model(rng, 64, 0);
    for (std::size_t i = 0; i < model.size(); ++i) {
        model.gaussians[i].position.x() = static_cast<float>(i);
    }
    const auto path = dir / "order.ply";
    save_splat_ply(model, path);
    const SplatModel loaded = load_splat_ply(path);
    for (std::size_t i = 0; i < loaded.size(); ++i) {
        CHECK(loaded.gaussians[i].position.x() == doctest::Approx(static_cast<double>(i)));
    }
}

TEST_CASE("activation monotonicity") {
    const auto dir = make_temp_dir("splatio");
    std::vector<std::array<float, 62>> records;
    for (int i = 0; i < 9; ++i) {
        const float t = -4.0f + static_cast<float>(i);
        records.push_back(make_record(0, 0, 0, t, {t * 0.25f, 0, 0}, {1, 0, 0, 0}));
    }
    const auto path = dir / "mono.ply";
    write_reference_ply(path, records);
    const SplatModel model = load_splat_ply(path);
    for (std::size_t i = 1; i < model.size(); ++i) {
        CHECK(model.gaussians[i].opacity > model.gaussians[i - 1].opacity);
        CHECK(model.gaussians[i].scale.x() > model.gaussians[i - 1].scale.x());
    }
}

TEST_CASE("error paths") {
    const auto dir = make_temp_dir("splatio");

    SUBCASE("ascii ply rejected") {
        const auto path = dir / "ascii.ply";
        std::ofstream out(path);
        out << "ply\nformat ascii 1.0\nelement vertex 1\nproperty float x\nend_header\n0\n";
        out.close();
        try {
            load_splat_ply(path);
            FAIL("expected MalformedHeader");
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::malformed_header);
            CHECK(std::string(e.what()).find("binary_little_endian") != std::string::npos);
        }
    }

    SUBCASE("missing field named") {
        const auto path = dir / "missing.ply";
        std::ofstream out(path, std::ios::binary);
        out << "ply\nformat binary_little_endian 1.0\nelement vertex 1\n";
        for (const char* n : {"x", "y", "z", "f_dc_0", "f_dc_1", "f_dc_2", "scale_0", "scale_1",
                              "scale_2", "rot_0", "rot_1", "rot_2", "rot_3"}) {
            out << "property float " << n << "\n";
        }
        out << "end_header\n";
        const std::vector<float> zeros(13, 0.0f);
        out.write(reinterpret_cast<const char*>(zeros.data()), 13 * sizeof(float));
        out.close();
        try {
            load_splat_ply(path);
            FAIL("expected MissingField");
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::missing_field);
            CHECK(std::string(e.what()).find("opacity") != std::string::npos);
        }
    }

    SUBCASE("non-finite aborts with record index") {
        const auto path = dir / "nan.ply";
        std::vector<std::array<float, 62>> records;
        records.push_back(make_record(0, 0, 0, 0, {0, 0, 0}, {1, 0, 0, 0}));
        auto bad = make_record(1, 1, 1, 0, {0, 0, 0}, {1, 0, 0, 0});
        bad[2] = std::numeric_limits<float>::quiet_NaN();
        records.push_back(bad);
        write_reference_ply(path, records);
        try {
            load_splat_ply(path);
            FAIL("expected NonFiniteValue");
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::non_finite_value);
            CHECK(std::string(e.what()).find("record 1") != std::string::npos);
        }
    }

    SUBCASE("empty model") {
        const auto path = dir / "empty.ply";
        write_reference_ply(path, {});
        try {
            load_splat_ply(path);
            FAIL("expected EmptyModel");
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::empty_model);
        }
    }

    SUBCASE("unsupported f_rest count") {
        const auto path = dir / "badrest.ply";
        std::ofstream out(path, std::ios::binary);
        out << "ply\nformat binary_little_endian 1.0\nelement vertex 1\n";
        for (const char* n : {"x", "y", "z", "f_dc_0", "f_dc_1", "f_dc_2"}) {
            out << "property float " << n << "\n";
        }
        for (int i = 0; i < 12; ++i) out << "property float f_rest_" << i << "\n";
        for (const char* n : {"opacity", "scale_0", "scale_1", "scale_2", "rot_0", "rot_1", "rot_2", "rot_3"}) {
            out << "property float " << n << "\n";
        }
        out << "end_header\n";
        const std::vector<float> zeros(26, 0.0f);
        out.write(reinterpret_cast<const char*>(zeros.data()), 26 * sizeof(float));
        out.close();
        try {
            load_splat_ply(path);
            FAIL("expected MalformedHeader");
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::malformed_header);
        }
    }
}
