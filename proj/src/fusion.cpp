/**
 * @file fusion.cpp
 */

#include "dhogm/fusion.hpp"

#include "dhogm/error.hpp"

namespace dhogm {

std::string_view to_string(PathMode mode) {
  switch (mode) {
  case PathMode::TwoD: return "2d";
  case PathMode::ThreeD: return "3d";
  case PathMode::Fused: return "fused";
  }
  return "fused";
}

PathMode path_mode_from_string(std::string_view text) {
  if (text == "2d") {
    return PathMode::TwoD;
  }
  if (text == "3d") {
    return PathMode::ThreeD;
  }
  if (text == "fused") {
    return PathMode::Fused;
  }
  throw Error(ErrorCode::InvalidArgument,
              "path mode must be 2d, 3d or fused, got '" + std::string(text) + "'");
}

namespace {

ConfidenceKind kind_of(QualityLabel c) {
  return c == QualityLabel::Good ? ConfidenceKind::P1 : ConfidenceKind::P2;
}

} // namespace

QualityDecision fuse(const PathDecision &c2d, const PathDecision &c3d,
                     std::string subject_id) {
  QualityDecision q;
  q.subject_id = std::move(subject_id);
  q.c_2d = c2d;
  q.c_3d = c3d;
  if (!c2d.scorable() && !c3d.scorable()) {
    throw Error(ErrorCode::BothUnscorable,
                "neither path could score subject '" + q.subject_id + "'");
  }
  if (!c2d.scorable() || !c3d.scorable()) {
    const PathDecision &survivor = c2d.scorable() ? c2d : c3d;
    q.c_final = *survivor.label;
    q.confidence = survivor.probability_of(q.c_final);
    q.confidence_kind = kind_of(q.c_final);
    q.degraded_evidence = q.c_final == QualityLabel::Good;
    return q;
  }
  const bool both_good =
      *c2d.label == QualityLabel::Good && *c3d.label == QualityLabel::Good;
  q.c_final = both_good ? QualityLabel::Good : QualityLabel::Poor;
  q.confidence =
      0.5 * (c2d.probability_of(q.c_final) + c3d.probability_of(q.c_final));
  q.confidence_kind = kind_of(q.c_final);
  return q;
}

QualityDecision decide_single(PathMode mode, const PathDecision &path,
                              std::string subject_id) {
  if (mode == PathMode::Fused) {
    throw Error(ErrorCode::InvalidArgument, "decide_single needs a single path mode");
  }
  QualityDecision q;
  q.subject_id = std::move(subject_id);
  (mode == PathMode::TwoD ? q.c_2d : q.c_3d) = path;
  if (!path.scorable()) {
    throw Error(ErrorCode::BothUnscorable,
                "path " + std::string(to_string(mode)) +
                    " could not score subject '" + q.subject_id + "'");
  }
  q.c_final = *path.label;
  q.confidence = path.probability_of(q.c_final);
  q.confidence_kind = kind_of(q.c_final);
  return q;
}

} // namespace dhogm
