#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace splatgen {

enum class ErrorCode {
    // splat model I/O
    missing_field,
    malformed_header,
    non_finite_value,
    empty_model,
    io_failure,
    // point-cloud geometry
    k_too_large,
    degenerate_cloud,
    cloud_too_small,
    degenerate_spread,
    degenerate_input,
    // foreground extraction
    no_plane_found,
    no_cluster_survives,
    // background analysis
    constant_depth,
    no_planes,
    // composition
    degenerate_object_extent,
    all_occluded,
    // annotations
    empty_mask,
    dangling_reference,
    duplicate_id,
    // depth service client
    unreachable,
    bad_status,
    malformed_response,
    timeout,
    // pipeline
    config_invalid,
    no_usable_background,
};

const char* to_string(ErrorCode code);

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

// Thrown by compose() when one placed instance ends up hidden beyond the
// configured occlusion budget; carries which instance so the caller can
// resample just that one.
class AllOccludedError : public Error {
public:
    AllOccludedError(std::size_t object_index, double occluded_fraction, const std::string& message)
        : Error(ErrorCode::all_occluded, message),
          object_index_(object_index),
          occluded_fraction_(occluded_fraction) {}

    std::size_t object_index() const noexcept { return object_index_; }
    double occluded_fraction() const noexcept { return occluded_fraction_; }

private:
    std::size_t object_index_;
    double occluded_fraction_;
};

[[noreturn]] inline void raise(ErrorCode code, const std::string& message) {
    throw Error(code, message);
}

}  // namespace splatgen
