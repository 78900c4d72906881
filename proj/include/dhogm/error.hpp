/**
 * @file error.hpp
 * @brief Error codes and the exception type thrown across the library
 */
#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace dhogm {

enum class ErrorCode {
  InvalidArgument,
  UnreadableFile,
  MalformedHeader,
  UnsupportedDatatype,
  ShapeMismatch,
  EmptyMask,
  DegenerateIntensity,
  TooSmall,
  AllZeroGradient,
  TooFewBins,
  AllCuboidsDegenerate,
  NonFiniteInput,
  NonFiniteFeature,
  InsufficientData,
  ClassMissing,
  BothUnscorable,
  EmptyMatrix,
  TooFewPerClass,
  FeatureConfigMismatch,
  IdMismatch,
  DuplicateSubject,
  MalformedCsv,
  MalformedModel,
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
public:
  Error(ErrorCode code, const std::string &message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message),
        m_code(code) {}

  ErrorCode code() const noexcept { return m_code; }

private:
  ErrorCode m_code;
};

} // namespace dhogm
