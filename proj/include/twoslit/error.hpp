#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace twoslit {

/// Failure modes raised by the library. Every code belongs to one of two
/// categories: bad input (validation) or an input that is well formed but
/// numerically degenerate.
enum class Errc {
  // validation
  invalid_argument,
  invalid_config,
  parse_error,
  insufficient_correspondences,
  insufficient_constraints,
  shape_mismatch,
  unsupported_prior,
  // degeneracy
  zero_vector,
  invalid_line,
  coincident_points,
  line_in_plane,
  point_on_line,
  rank_deficient_frame,
  off_plane_point,
  base_point,
  point_on_slit,
  intersecting_slits,
  undefined_projection,
  degenerate_frame,
  non_transversal,
  invalid_camera,
  invalid_retinal_plane,
  not_parallel,
  zero_direction,
  non_orthogonal,
  singular_transform,
  rank_deficient_design,
  normalization_failure,
  no_real_candidates,
  degenerate_normalization,
  invalid_minor_matrix,
  transpose_renormalization,
  singular_calibration,
  degenerate_motion,
  rank_test_failure,
  indefinite_quadric,
};

enum class ErrorCategory { validation, degeneracy };

constexpr ErrorCategory category_of(Errc code) noexcept {
  switch (code) {
    case Errc::invalid_argument:
    case Errc::invalid_config:
    case Errc::parse_error:
    case Errc::insufficient_correspondences:
    case Errc::insufficient_constraints:
    case Errc::shape_mismatch:
    case Errc::unsupported_prior:
      return ErrorCategory::validation;
    default:
      return ErrorCategory::degeneracy;
  }
}

constexpr std::string_view to_string(Errc code) noexcept {
  switch (code) {
    case Errc::invalid_argument: return "invalid_argument";
    case Errc::invalid_config: return "invalid_config";
    case Errc::parse_error: return "parse_error";
    case Errc::insufficient_correspondences: return "insufficient_correspondences";
    case Errc::insufficient_constraints: return "insufficient_constraints";
    case Errc::shape_mismatch: return "shape_mismatch";
    case Errc::unsupported_prior: return "unsupported_prior";
    case Errc::zero_vector: return "zero_vector";
    case Errc::invalid_line: return "invalid_line";
    case Errc::coincident_points: return "coincident_points";
    case Errc::line_in_plane: return "line_in_plane";
    case Errc::point_on_line: return "point_on_line";
    case Errc::rank_deficient_frame: return "rank_deficient_frame";
    case Errc::off_plane_point: return "off_plane_point";
    case Errc::base_point: return "base_point";
    case Errc::point_on_slit: return "point_on_slit";
    case Errc::intersecting_slits: return "intersecting_slits";
    case Errc::undefined_projection: return "undefined_projection";
    case Errc::degenerate_frame: return "degenerate_frame";
    case Errc::non_transversal: return "non_transversal";
    case Errc::invalid_camera: return "invalid_camera";
    case Errc::invalid_retinal_plane: return "invalid_retinal_plane";
    case Errc::not_parallel: return "not_parallel";
    case Errc::zero_direction: return "zero_direction";
    case Errc::non_orthogonal: return "non_orthogonal";
    case Errc::singular_transform: return "singular_transform";
    case Errc::rank_deficient_design: return "rank_deficient_design";
    case Errc::normalization_failure: return "normalization_failure";
    case Errc::no_real_candidates: return "no_real_candidates";
    case Errc::degenerate_normalization: return "degenerate_normalization";
    case Errc::invalid_minor_matrix: return "invalid_minor_matrix";
    case Errc::transpose_renormalization: return "transpose_renormalization";
    case Errc::singular_calibration: return "singular_calibration";
    case Errc::degenerate_motion: return "degenerate_motion";
    case Errc::rank_test_failure: return "rank_test_failure";
    case Errc::indefinite_quadric: return "indefinite_quadric";
  }
  return "unknown";
}

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what),
        code_(code) {}

  Errc code() const noexcept { return code_; }
  ErrorCategory category() const noexcept { return category_of(code_); }

 private:
  Errc code_;
};

}  // namespace twoslit
