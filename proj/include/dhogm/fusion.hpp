/**
 * @file fusion.hpp
 * @brief AND-rule fusion of the 2D and 3D path decisions
 */
#pragma once

#include "dhogm/model.hpp"

#include <optional>
#include <string>
#include <string_view>

namespace dhogm {

enum class PathMode { TwoD, ThreeD, Fused };

std::string_view to_string(PathMode mode);
/// Accepts "2d", "3d" or "fused".
PathMode path_mode_from_string(std::string_view text);

enum class ConfidenceKind { P1, P2 };

struct QualityDecision {
  std::string subject_id;
  std::optional<PathDecision> c_2d;
  std::optional<PathDecision> c_3d;
  QualityLabel c_final = QualityLabel::Poor;
  /// Mean probability of c_final over the contributing paths; may be < 0.5
  /// when the paths disagree.
  double confidence = 0.0;
  ConfidenceKind confidence_kind = ConfidenceKind::P2;
  /// Set when only one path could score the subject and it said Good.
  bool degraded_evidence = false;
};

/// Good only if both paths say Good. With one path unscorable the other
/// decides alone with its own probabilities. Throws BothUnscorable.
QualityDecision fuse(const PathDecision &c2d, const PathDecision &c3d,
                     std::string subject_id = {});

/// Single-path (ablation) decision. Throws BothUnscorable if the path cannot
/// score the subject.
QualityDecision decide_single(PathMode mode, const PathDecision &path,
                              std::string subject_id = {});

} // namespace dhogm
