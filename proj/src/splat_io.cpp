#include "splatgen/splat_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <map>
#include <sstream>

#include "splatgen/common.hpp"

namespace splatgen {

namespace {

constexpr float kOpacityFloor = 1e-6f;
constexpr float kOpacityCeil = 1.0f - 1e-6f;

float sigmoid(float x) { return 1.0f / (1.0f + std::exp(-x)); }

float logit(float p) { return std::log(p / (1.0f - p)); }

int sh_degree_from_rest_count(int rest_count) {
    switch (rest_count) {
        case 0: return 0;
        case 9: return 1;
        case 24: return 2;
        case 45: return 3;
        default:
            raise(ErrorCode::malformed_header,
                  "unsupported f_rest property count " + std::to_string(rest_count) +
                      " (expected 0, 9, 24 or 45)");
    }
}

struct PlyHeader {
    std::size_t vertex_count = 0;
    std::vector<std::string> properties;  // in declaration order, all float32
    std::size_t body_offset = 0;
};

PlyHeader parse_header(const std::vector<char>& bytes, const std::string& path) {
    std::size_t pos = 0;
    auto next_line = [&]() -> std::string {
        std::size_t start = pos;
        while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
        if (pos >= bytes.size()) raise(ErrorCode::malformed_header, "unterminated header in " + path);
        std::string line(bytes.data() + start, pos - start);
        ++pos;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        return line;
    };

    PlyHeader header;
    if (next_line() != "ply") raise(ErrorCode::malformed_header, "missing ply magic in " + path);
    const std::string format = next_line();
    if (format != "format binary_little_endian 1.0") {
        raise(ErrorCode::malformed_header,
              "unsupported format line \"" + format + "\" (only binary_little_endian 1.0)");
    }

    bool have_vertex = false;
    while (true) {
        const std::string line = next_line();
        if (line == "end_header") break;
        std::istringstream ss(line);
        std::string keyword;
        ss >> keyword;
        if (keyword == "comment" || keyword.empty()) continue;
        if (keyword == "element") {
            std::string name;
            std::size_t count = 0;
            ss >> name >> count;
            if (name != "vertex" || have_vertex) {
                raise(ErrorCode::malformed_header, "only a single vertex element is supported");
            }
            have_vertex = true;
            header.vertex_count = count;
        } else if (keyword == "property") {
            if (!have_vertex) raise(ErrorCode::malformed_header, "property before vertex element");
            std::string type, name;
            ss >> type >> name;
            if (type != "float" && type != "float32") {
                raise(ErrorCode::malformed_header, "property " + name + " has non-float type " + type);
            }
            header.properties.push_back(name);
        } else {
            raise(ErrorCode::malformed_header, "unexpected header keyword \"" + keyword + "\"");
        }
    }
    if (!have_vertex) raise(ErrorCode::malformed_header, "no vertex element in " + path);
    header.body_offset = pos;
    return header;
}

}  // namespace

SplatModel load_splat_ply(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) raise(ErrorCode::io_failure, "cannot open " + path.string());
    std::vector<char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());

    const PlyHeader header = parse_header(bytes, path.string());
    if (header.vertex_count == 0) raise(ErrorCode::empty_model, "no vertices in " + path.string());

    std::map<std::string, int> column;
    for (std::size_t i = 0; i < header.properties.size(); ++i) {
        if (!column.emplace(header.properties[i], static_cast<int>(i)).second) {
            raise(ErrorCode::malformed_header, "duplicate property " + header.properties[i]);
        }
    }
    auto require = [&](const std::string& name) -> int {
        auto it = column.find(name);
        if (it == column.end()) raise(ErrorCode::missing_field, name);
        return it->second;
    };

    const int col_x = require("x"), col_y = require("y"), col_z = require("z");
    int col_dc[3];
    for (int c = 0; c < 3; ++c) col_dc[c] = require("f_dc_" + std::to_string(c));
    int rest_count = 0;
    while (column.count("f_rest_" + std::to_string(rest_count))) ++rest_count;
    const int sh_degree = sh_degree_from_rest_count(rest_count);
    std::vector<int> col_rest(rest_count);
    for (int i = 0; i < rest_count; ++i) col_rest[i] = column["f_rest_" + std::to_string(i)];
    const int col_opacity = require("opacity");
    int col_scale[3], col_rot[4];
    for (int c = 0; c < 3; ++c) col_scale[c] = require("scale_" + std::to_string(c));
    for (int c = 0; c < 4; ++c) col_rot[c] = require("rot_" + std::to_string(c));

    const std::size_t stride = header.properties.size();
    const std::size_t need = header.body_offset + header.vertex_count * stride * sizeof(float);
    if (bytes.size() < need) {
        raise(ErrorCode::io_failure, "truncated body in " + path.string() + " (expected " +
                                         std::to_string(need) + " bytes, have " + std::to_string(bytes.size()) + ")");
    }

    const int rest_per_channel = rest_count / 3;
    SplatModel model;
    model.sh_degree = sh_degree;
    model.source_path = path.string();
    model.gaussians.resize(header.vertex_count);

    const float* records = reinterpret_cast<const float*>(bytes.data() + header.body_offset);
    for (std::size_t i = 0; i < header.vertex_count; ++i) {
        const float* r = records + i * stride;
        auto finite = [&](float v) {
            if (!std::isfinite(v)) {
                raise(ErrorCode::non_finite_value, "record " + std::to_string(i) + " in " + path.string());
            }
            return v;
        };
        Gaussian& g = model.gaussians[i];
        g.position = {finite(r[col_x]), finite(r[col_y]), finite(r[col_z])};
        g.opacity = std::clamp(sigmoid(finite(r[col_opacity])), kOpacityFloor, kOpacityCeil);
        for (int c = 0; c < 3; ++c) {
            g.scale[c] = std::exp(std::clamp(finite(r[col_scale[c]]), -80.0f, 80.0f));
        }
        const float qw = finite(r[col_rot[0]]), qx = finite(r[col_rot[1]]);
        const float qy = finite(r[col_rot[2]]), qz = finite(r[col_rot[3]]);
        const float qn = std::sqrt(qw * qw + qx * qx + qy * qy + qz * qz);
        if (qn < 1e-12f) {
            raise(ErrorCode::non_finite_value,
                  "record " + std::to_string(i) + " has zero-norm rotation in " + path.string());
        }
        g.rotation = Eigen::Quaternionf(qw / qn, qx / qn, qy / qn, qz / qn);
        for (int c = 0; c < 3; ++c) g.sh(0, c) = finite(r[col_dc[c]]);
        for (int c = 0; c < 3; ++c) {
            for (int j = 0; j < rest_per_channel; ++j) {
                g.sh(1 + j, c) = finite(r[col_rest[c * rest_per_channel + j]]);
            }
        }
    }
    return model;
}

void save_splat_ply(const SplatModel& model, const std::filesystem::path& path) {
    if (model.empty()) raise(ErrorCode::empty_model, "refusing to write empty model");
    const int rest_per_channel = (model.sh_degree + 1) * (model.sh_degree + 1) - 1;
    const int rest_count = 3 * rest_per_channel;

    std::ostringstream header;
    header << "ply\nformat binary_little_endian 1.0\n"
           << "element vertex " << model.size() << "\n";
    for (const char* n : {"x", "y", "z", "nx", "ny", "nz", "f_dc_0", "f_dc_1", "f_dc_2"}) {
        header << "property float " << n << "\n";
    }
    for (int i = 0; i < rest_count; ++i) header << "property float f_rest_" << i << "\n";
    for (const char* n : {"opacity", "scale_0", "scale_1", "scale_2", "rot_0", "rot_1", "rot_2", "rot_3"}) {
        header << "property float " << n << "\n";
    }
    header << "end_header\n";

    const std::size_t stride = 9 + rest_count + 8;
    std::vector<float> record(stride);

    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) raise(ErrorCode::io_failure, "cannot open " + path.string() + " for writing");
    const std::string head = header.str();
    out.write(head.data(), static_cast<std::streamsize>(head.size()));

    for (const Gaussian& g : model.gaussians) {
        std::size_t k = 0;
        record[k++] = g.position.x();
        record[k++] = g.position.y();
        record[k++] = g.position.z();
        record[k++] = 0.0f;  // nx
        record[k++] = 0.0f;  // ny
        record[k++] = 0.0f;  // nz
        for (int c = 0; c < 3; ++c) record[k++] = g.sh(0, c);
        for (int c = 0; c < 3; ++c) {
            for (int j = 0; j < rest_per_channel; ++j) record[k++] = g.sh(1 + j, c);
        }
        record[k++] = logit(std::clamp(g.opacity, kOpacityFloor, kOpacityCeil));
        for (int c = 0; c < 3; ++c) record[k++] = std::log(std::max(g.scale[c], 1e-35f));
        Eigen::Quaternionf q = g.rotation;
        if (std::abs(q.norm() - 1.0f) > 1e-6f) q.normalize();
        record[k++] = q.w();
        record[k++] = q.x();
        record[k++] = q.y();
        record[k++] = q.z();
        for (float v : record) {
            if (!std::isfinite(v)) raise(ErrorCode::non_finite_value, "non-finite value while saving model");
        }
        out.write(reinterpret_cast<const char*>(record.data()),
                  static_cast<std::streamsize>(record.size() * sizeof(float)));
    }
    if (!out) raise(ErrorCode::io_failure, "write failed for " + path.string());
}

}  // namespace splatgen
