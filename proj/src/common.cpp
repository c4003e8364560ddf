#include "splatgen/common.hpp"

namespace splatgen {

const char* to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::missing_field: return "MissingField";
        case ErrorCode::malformed_header: return "MalformedHeader";
        case ErrorCode::non_finite_value: return "NonFiniteValue";
        case ErrorCode::empty_model: return "EmptyModel";
        case ErrorCode::io_failure: return "IoFailure";
        case ErrorCode::k_too_large: return "KTooLarge";
        case ErrorCode::degenerate_cloud: return "DegenerateCloud";
        case ErrorCode::cloud_too_small: return "CloudTooSmall";
        case ErrorCode::degenerate_spread: return "DegenerateSpread";
        case ErrorCode::degenerate_input: return "DegenerateInput";
        case ErrorCode::no_plane_found: return "NoPlaneFound";
        case ErrorCode::no_cluster_survives: return "NoClusterSurvives";
        case ErrorCode::constant_depth: return "ConstantDepth";
        case ErrorCode::no_planes: return "NoPlanes";
        case ErrorCode::degenerate_object_extent: return "DegenerateObjectExtent";
        case ErrorCode::all_occluded: return "AllOccluded";
        case ErrorCode::empty_mask: return "EmptyMask";
        case ErrorCode::dangling_reference: return "DanglingReference";
        case ErrorCode::duplicate_id: return "DuplicateId";
        case ErrorCode::unreachable: return "Unreachable";
        case ErrorCode::bad_status: return "BadStatus";
        case ErrorCode::malformed_response: return "MalformedResponse";
        case ErrorCode::timeout: return "Timeout";
        case ErrorCode::config_invalid: return "ConfigInvalid";
        case ErrorCode::no_usable_background: return "NoUsableBackground";
    }
    return "UnknownError";
}

}  // namespace splatgen
