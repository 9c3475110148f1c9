#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "surgq/scene.hpp"

namespace surgq {

/// Raw pixel counts for one class; dice is derived from these so pooling
/// across frames is a plain sum.
struct DiceCounts {
  std::uint64_t pred = 0;
  std::uint64_t truth = 0;
  std::uint64_t overlap = 0;

  DiceCounts& operator+=(const DiceCounts& o) {
    pred += o.pred;
    truth += o.truth;
    overlap += o.overlap;
    return *this;
  }
  std::optional<double> dice() const;
};

std::array<DiceCounts, kClassCount> dice_counts(const ClassMap& pred, const ClassMap& truth);

/// Empty when the class occurs in neither map.
std::optional<double> dice(const ClassMap& pred, const ClassMap& truth, ClassId cls);

struct DiceReport {
  std::array<std::optional<double>, kClassCount> per_class{};
  /// Mean over classes with a value; 0 if no class is present at all.
  double mean = 0.0;
  std::size_t frames = 0;
  /// Classes absent from every prediction and truth map.
  std::vector<ClassId> excluded;
};

struct ReportOptions {
  bool include_background = true;
};

/// Pooled (micro) aggregation: counts are summed over all frame pairs first.
DiceReport dice_report(std::span<const ClassMap> pred, std::span<const ClassMap> truth,
                       const ReportOptions& options = {});

/// Plain-text table, one row per class in id order then "Mean"; values shown
/// with two decimals.
std::string format_report_table(const DiceReport& report);
nlohmann::json to_json(const DiceReport& report);

}  // namespace surgq
