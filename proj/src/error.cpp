/**
 * @file error.cpp
 */

#include "dhogm/error.hpp"

namespace dhogm {

std::string_view to_string(ErrorCode code) {
  switch (code) {
  case ErrorCode::InvalidArgument: return "InvalidArgument";
  case ErrorCode::UnreadableFile: return "UnreadableFile";
  case ErrorCode::MalformedHeader: return "MalformedHeader";
  case ErrorCode::UnsupportedDatatype: return "UnsupportedDatatype";
  case ErrorCode::ShapeMismatch: return "ShapeMismatch";
  case ErrorCode::EmptyMask: return "EmptyMask";
  case ErrorCode::DegenerateIntensity: return "DegenerateIntensity";
  case ErrorCode::TooSmall: return "TooSmall";
  case ErrorCode::AllZeroGradient: return "AllZeroGradient";
  case ErrorCode::TooFewBins: return "TooFewBins";
  case ErrorCode::AllCuboidsDegenerate: return "AllCuboidsDegenerate";
  case ErrorCode::NonFiniteInput: return "NonFiniteInput";
  case ErrorCode::NonFiniteFeature: return "NonFiniteFeature";
  case ErrorCode::InsufficientData: return "InsufficientData";
  case ErrorCode::ClassMissing: return "ClassMissing";
  case ErrorCode::BothUnscorable: return "BothUnscorable";
  case ErrorCode::EmptyMatrix: return "EmptyMatrix";
  case ErrorCode::TooFewPerClass: return "TooFewPerClass";
  case ErrorCode::FeatureConfigMismatch: return "FeatureConfigMismatch";
  case ErrorCode::IdMismatch: return "IdMismatch";
  case ErrorCode::DuplicateSubject: return "DuplicateSubject";
  case ErrorCode::MalformedCsv: return "MalformedCsv";
  case ErrorCode::MalformedModel: return "MalformedModel";
  }
  return "Unknown";
}

} // namespace dhogm
