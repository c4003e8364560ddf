#include "splatgen/composer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "splatgen/common.hpp"
#include "splatgen/renderer.hpp"

namespace splatgen {

namespace {

constexpr float kAlphaFloor = 1.0f / 255.0f;  // below this an instance leaves no trace

}  // namespace

PlacementPose solve_pose(const Eigen::Vector3d& plane_normal, const Eigen::Vector3d& support_point,
                         double yaw, double scale) {
    const Eigen::Quaterniond align = rotation_between(Eigen::Vector3d::UnitY(), plane_normal);
    const Eigen::Quaterniond spin(Eigen::AngleAxisd(yaw, Eigen::Vector3d::UnitY()));
    PlacementPose pose;
    pose.rotation = (align * spin).normalized();
    pose.translation = support_point;
    pose.scale = scale;
    return pose;
}

double choose_scale(const ForegroundObject& canonical, const BackgroundScene& scene, Rng& rng,
                    const ScaleParams& params) {
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (const Gaussian& g : canonical.model.gaussians) {
        lo = std::min(lo, static_cast<double>(g.position.y()));
        hi = std::max(hi, static_cast<double>(g.position.y()));
    }
    const double height = hi - lo;
    if (!(height > 1e-12)) raise(ErrorCode::degenerate_object_extent, "object has no vertical extent");
    const double target = params.height_ratio * scene.up_extent;
    const double jitter = rng.uniform(params.jitter_min, params.jitter_max);
    return target / height * jitter;
}

ImageGray median_filter_depth(const ImageGray& depth, int kernel) {
    if (kernel < 1 || kernel % 2 == 0) raise(ErrorCode::degenerate_input, "kernel must be odd and >= 1");
    if (kernel == 1) return depth;
    const int r = kernel / 2;
    ImageGray out = ImageGray::zeros(depth.width, depth.height);
    std::vector<float> window;
    window.reserve(static_cast<std::size_t>(kernel) * kernel);
    for (int y = 0; y < depth.height; ++y) {
        for (int x = 0; x < depth.width; ++x) {
            window.clear();
            for (int dy = -r; dy <= r; ++dy) {
                const int sy = std::clamp(y + dy, 0, depth.height - 1);
                for (int dx = -r; dx <= r; ++dx) {
                    const int sx = std::clamp(x + dx, 0, depth.width - 1);
                    window.push_back(depth.at(sy, sx));
                }
            }
            auto mid = window.begin() + window.size() / 2;
            std::nth_element(window.begin(), mid, window.end());
            out.at(y, x) = *mid;
        }
    }
    return out;
}

CompositionResult compose(const BackgroundScene& scene, const std::vector<Placement>& placements,
                          const AugmentationConfig& aug, const ComposerConfig& cfg, Rng& rng) {
    if (placements.empty()) raise(ErrorCode::degenerate_input, "no placements to compose");

    const ImageGray bg_depth = median_filter_depth(scene.depth.values, cfg.median_kernel);
    const auto [lo_it, hi_it] = std::minmax_element(bg_depth.data.begin(), bg_depth.data.end());
    const float depth_margin = static_cast<float>(cfg.depth_margin_frac) * (*hi_it - *lo_it);

    const std::size_t pixels = scene.image.pixel_count();
    const int width = scene.image.width, height = scene.image.height;

    // Near-to-far over the placements; mutual occlusion follows this order.
    std::vector<std::size_t> order(placements.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return placements[a].second.translation.norm() < placements[b].second.translation.norm();
    });

    std::vector<float> accum_color(pixels * 3, 0.0f);
    std::vector<float> occupancy(pixels, 0.0f);
    CompositionResult result;
    result.records.resize(placements.size());

    for (const std::size_t oi : order) {
        const ForegroundObject& obj = *placements[oi].first;
        const PlacementPose& pose = placements[oi].second;

        RenderOptions opts;
        opts.threads = cfg.render_threads;
        if (aug.sh_random) opts.sh_dir_override = rng.unit_vector().cast<float>();

        const SplatModel posed =
            transform_model(obj.model, pose.rotation, pose.translation, pose.scale, obj.params.sh_mode);
        const RenderOutput rendered = render(posed, scene.camera, opts);

        CompositionRecord record;
        record.object_name = obj.name;
        record.pose = pose;
        record.raw_alpha = rendered.alpha;
        if (cfg.white_pass) {
            RenderOptions white = opts;
            white.sh_dir_override.reset();
            white.white_override = true;
            const RenderOutput white_out = render(posed, scene.camera, white);
            for (std::size_t p = 0; p < pixels; ++p) record.raw_alpha[p] = white_out.color[3 * p];
        }

        record.visibility_mask.assign(pixels, 0);
        std::size_t candidate = 0, visible = 0;
        for (std::size_t p = 0; p < pixels; ++p) {
            const float raw = record.raw_alpha[p];
            if (raw > cfg.visibility_threshold) ++candidate;
            if (raw <= 0.0f) continue;
            // Background occlusion: the scene wins where it is nearer.
            if (rendered.depth[p] > bg_depth.data[p] + depth_margin) continue;
            const float transmit = 1.0f - occupancy[p];
            const float effective = raw * transmit;
            if (effective < kAlphaFloor) continue;
            if (effective > static_cast<float>(cfg.visibility_threshold)) {
                record.visibility_mask[p] = 1;
                ++visible;
            }
            for (int c = 0; c < 3; ++c) accum_color[3 * p + c] += transmit * rendered.color[3 * p + c];
            occupancy[p] = std::min(1.0f, occupancy[p] + effective);
        }
        record.occluded_fraction =
            candidate == 0 ? 1.0 : 1.0 - static_cast<double>(visible) / static_cast<double>(candidate);
        if (record.occluded_fraction > cfg.max_occlusion) {
            throw AllOccludedError(oi, record.occluded_fraction,
                                   "instance " + std::to_string(oi) + " (" + obj.name + ") is " +
                                       std::to_string(record.occluded_fraction * 100.0) + "% occluded");
        }
        result.records[oi] = std::move(record);
    }

    result.image = ImageRgb::zeros(width, height);
    for (std::size_t p = 0; p < pixels; ++p) {
        const float transmit = 1.0f - occupancy[p];
        for (int c = 0; c < 3; ++c) {
            result.image.data[3 * p + c] = accum_color[3 * p + c] + transmit * scene.image.data[3 * p + c];
        }
    }
    return result;
}

namespace {

void gaussian_blur(ImageRgb& image, double sigma) {
    const int radius = static_cast<int>(std::ceil(3.0 * sigma));
    std::vector<float> weights(radius + 1);
    double total = 0;
    for (int i = 0; i <= radius; ++i) {
        weights[i] = static_cast<float>(std::exp(-0.5 * (i * i) / (sigma * sigma)));
        total += (i == 0 ? 1.0 : 2.0) * weights[i];
    }
    for (float& w : weights) w = static_cast<float>(w / total);

    ImageRgb tmp = image;
    // Horizontal pass into tmp, vertical pass back into image; edges clamp.
    for (int y = 0; y < image.height; ++y) {
        for (int x = 0; x < image.width; ++x) {
            float acc[3] = {0, 0, 0};
            for (int k = -radius; k <= radius; ++k) {
                const int sx = std::clamp(x + k, 0, image.width - 1);
                const float* p = image.px(y, sx);
                const float w = weights[std::abs(k)];
                for (int c = 0; c < 3; ++c) acc[c] += w * p[c];
            }
            float* q = tmp.px(y, x);
            for (int c = 0; c < 3; ++c) q[c] = acc[c];
        }
    }
    for (int y = 0; y < image.height; ++y) {
        for (int x = 0; x < image.width; ++x) {
            float acc[3] = {0, 0, 0};
            for (int k = -radius; k <= radius; ++k) {
                const int sy = std::clamp(y + k, 0, image.height - 1);
                const float* p = tmp.px(sy, x);
                const float w = weights[std::abs(k)];
                for (int c = 0; c < 3; ++c) acc[c] += w * p[c];
            }
            float* q = image.px(y, x);
            for (int c = 0; c < 3; ++c) q[c] = acc[c];
        }
    }
}

// Monotone cubic (Fritsch-Carlson) through fixed-x knots.
struct ToneCurve {
    std::array<double, 5> xs, ys, ms;

    static ToneCurve fit(const std::array<double, 5>& xs, const std::array<double, 5>& ys) {
        ToneCurve c;
        c.xs = xs;
        c.ys = ys;
        std::array<double, 4> d;
        for (int i = 0; i < 4; ++i) d[i] = (ys[i + 1] - ys[i]) / (xs[i + 1] - xs[i]);
        c.ms[0] = d[0];
        c.ms[4] = d[3];
        for (int i = 1; i < 4; ++i) {
            c.ms[i] = (d[i - 1] <= 0 || d[i] <= 0) ? 0.0 : 0.5 * (d[i - 1] + d[i]);
        }
        for (int i = 0; i < 4; ++i) {
            if (d[i] == 0) {
                c.ms[i] = c.ms[i + 1] = 0;
                continue;
            }
            const double a = c.ms[i] / d[i], b = c.ms[i + 1] / d[i];
            const double s = a * a + b * b;
            if (s > 9.0) {
                const double tau = 3.0 / std::sqrt(s);
                c.ms[i] = tau * a * d[i];
                c.ms[i + 1] = tau * b * d[i];
            }
        }
        return c;
    }

    double operator()(double x) const {
        x = std::clamp(x, 0.0, 1.0);
        int i = 0;
        while (i < 3 && x > xs[i + 1]) ++i;
        const double h = xs[i + 1] - xs[i];
        const double t = (x - xs[i]) / h;
        const double t2 = t * t, t3 = t2 * t;
        return (2 * t3 - 3 * t2 + 1) * ys[i] + (t3 - 2 * t2 + t) * h * ms[i] +
               (-2 * t3 + 3 * t2) * ys[i + 1] + (t3 - t2) * h * ms[i + 1];
    }
};

}  // namespace

ImageRgb augment_pixels(const ImageRgb& image, Rng& rng, const AugmentationConfig& aug) {
    ImageRgb out = image;

    if (rng.uniform() < aug.p_blur) {
        gaussian_blur(out, rng.uniform(aug.blur_sigma_min, aug.blur_sigma_max));
    }

    if (rng.uniform() < aug.p_color) {
        const float brightness = static_cast<float>(rng.uniform(aug.color_factor_min, aug.color_factor_max));
        const float contrast = static_cast<float>(rng.uniform(aug.color_factor_min, aug.color_factor_max));
        const float saturation = static_cast<float>(rng.uniform(aug.color_factor_min, aug.color_factor_max));
        for (std::size_t p = 0; p < out.pixel_count(); ++p) {
            float* px = out.data.data() + 3 * p;
            float v[3];
            for (int c = 0; c < 3; ++c) {
                v[c] = px[c] * brightness;
                v[c] = (v[c] - 0.5f) * contrast + 0.5f;
            }
            const float gray = 0.299f * v[0] + 0.587f * v[1] + 0.114f * v[2];
            for (int c = 0; c < 3; ++c) {
                px[c] = std::clamp(gray + (v[c] - gray) * saturation, 0.0f, 1.0f);
            }
        }
    }

    if (rng.uniform() < aug.p_noise) {
        const float sigma = static_cast<float>(rng.uniform(0.0, aug.noise_sigma_max) / 255.0);
        for (float& v : out.data) {
            v = std::clamp(v + sigma * static_cast<float>(rng.normal()), 0.0f, 1.0f);
        }
    }

    if (rng.uniform() < aug.p_tone) {
        std::array<double, 5> xs{0.0, 0.25, 0.5, 0.75, 1.0};
        std::array<double, 3> jittered;
        for (int i = 0; i < 3; ++i) {
            jittered[i] = std::clamp(xs[i + 1] + rng.uniform(-aug.tone_knot_jitter, aug.tone_knot_jitter),
                                     0.0, 1.0);
        }
        std::sort(jittered.begin(), jittered.end());  // keep the curve monotone
        const std::array<double, 5> ys{0.0, jittered[0], jittered[1], jittered[2], 1.0};
        const ToneCurve curve = ToneCurve::fit(xs, ys);
        for (float& v : out.data) v = static_cast<float>(curve(v));
    }
    return out;
}

}  // namespace splatgen
