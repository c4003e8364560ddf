#pragma once

#include <string>
#include <utility>
#include <vector>

#include "splatgen/background.hpp"
#include "splatgen/extraction.hpp"
#include "splatgen/image.hpp"
#include "splatgen/rng.hpp"

namespace splatgen {

// Pose of one placed object: canonical frame -> scene camera space.
struct PlacementPose {
    Eigen::Quaterniond rotation = Eigen::Quaterniond::Identity();
    Eigen::Vector3d translation = Eigen::Vector3d::Zero();  // support point
    double scale = 1.0;
};

struct CompositionRecord {
    std::string object_name;
    PlacementPose pose;
    std::vector<std::uint8_t> visibility_mask;  // H*W, post-occlusion
    std::vector<float> raw_alpha;               // H*W, straight from the render
    double occluded_fraction = 0.0;
};

struct AugmentationConfig {
    bool sh_random = true;  // one random SH direction per rendered object
    double p_blur = 0.5;
    double blur_sigma_min = 0.5, blur_sigma_max = 1.5;
    double p_color = 0.5;
    double color_factor_min = 0.8, color_factor_max = 1.2;
    double p_noise = 0.5;
    double noise_sigma_max = 8.0;  // in 8-bit levels
    double p_tone = 0.5;
    double tone_knot_jitter = 0.15;
};

struct ComposerConfig {
    double max_occlusion = 0.95;       // instances hidden beyond this are rejected
    double visibility_threshold = 0.5;
    double depth_margin_frac = 0.01;   // of the background depth range
    int median_kernel = 5;
    bool white_pass = false;  // debug: take alpha from a second white-splat render
    int render_threads = 1;
};

struct ScaleParams {
    double height_ratio = 0.15;  // object height relative to the scene up-extent
    double jitter_min = 0.8;
    double jitter_max = 1.25;
};

// Alignment of canonical up with the plane normal, composed with a yaw about
// canonical up; the yaw never moves the up image.
PlacementPose solve_pose(const Eigen::Vector3d& plane_normal, const Eigen::Vector3d& support_point,
                         double yaw, double scale);

// Uniform scale putting the object at height_ratio of the scene up-extent,
// jittered within [jitter_min, jitter_max].
double choose_scale(const ForegroundObject& canonical, const BackgroundScene& scene, Rng& rng,
                    const ScaleParams& params);

// Edge-clamped kernel x kernel median.
ImageGray median_filter_depth(const ImageGray& depth, int kernel = 5);

struct CompositionResult {
    ImageRgb image;
    std::vector<CompositionRecord> records;  // in input placement order
};

using Placement = std::pair<const ForegroundObject*, PlacementPose>;

// Renders each placed object through the scene camera, zeroes alpha where the
// median-filtered background depth is nearer, composites near-to-far, and
// blends over the background. Throws AllOccludedError naming the first
// instance hidden beyond cfg.max_occlusion.
CompositionResult compose(const BackgroundScene& scene, const std::vector<Placement>& placements,
                          const AugmentationConfig& aug, const ComposerConfig& cfg, Rng& rng);

// Pixel-level appearance jitter: blur, color scaling, noise, tone curve.
ImageRgb augment_pixels(const ImageRgb& image, Rng& rng, const AugmentationConfig& aug);

}  // namespace splatgen
