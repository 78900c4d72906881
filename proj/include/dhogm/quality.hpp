/**
 * @file quality.hpp
 * @brief Binary quality classes shared by every module
 */
#pragma once

#include <optional>
#include <string>

namespace dhogm {

enum class QualityLabel : int { Good = 1, Poor = 2 };

inline int to_int(QualityLabel label) { return static_cast<int>(label); }

/// Accepts 1 or 2; anything else is nullopt.
std::optional<QualityLabel> label_from_int(int value);

} // namespace dhogm
