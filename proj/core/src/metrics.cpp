#include "surgq/metrics.hpp"

#include <cstdio>

namespace surgq {

std::optional<double> DiceCounts::dice() const {
  const auto denom = pred + truth;
  if (denom == 0) return std::nullopt;
  return 2.0 * static_cast<double>(overlap) / static_cast<double>(denom);
}

std::array<DiceCounts, kClassCount> dice_counts(const ClassMap& pred, const ClassMap& truth) {
  if (pred.width() != truth.width() || pred.height() != truth.height()) {
    throw Error(Errc::dimension_mismatch, "prediction " + std::to_string(pred.width()) + "x" +
                                              std::to_string(pred.height()) + " vs truth " +
                                              std::to_string(truth.width()) + "x" + std::to_string(truth.height()));
  }
  std::array<DiceCounts, kClassCount> out{};
  const auto p = pred.labels();
  const auto t = truth.labels();
  for (std::size_t i = 0; i < p.size(); ++i) {
    ++out[p[i]].pred;
    ++out[t[i]].truth;
    if (p[i] == t[i]) ++out[p[i]].overlap;
  }
  return out;
}

std::optional<double> dice(const ClassMap& pred, const ClassMap& truth, ClassId cls) {
  return dice_counts(pred, truth)[to_int(cls)].dice();
}

DiceReport dice_report(std::span<const ClassMap> pred, std::span<const ClassMap> truth, const ReportOptions& options) {
  if (pred.size() != truth.size()) {
    throw Error(Errc::length_mismatch, std::to_string(pred.size()) + " predictions vs " +
                                           std::to_string(truth.size()) + " truth maps");
  }
  std::array<DiceCounts, kClassCount> pooled{};
  for (std::size_t f = 0; f < pred.size(); ++f) {
    const auto counts = dice_counts(pred[f], truth[f]);
    for (int c = 0; c < kClassCount; ++c) pooled[c] += counts[c];
  }

  DiceReport report;
  report.frames = pred.size();
  double sum = 0.0;
  int present = 0;
  for (int c = 0; c < kClassCount; ++c) {
    const auto cls = static_cast<ClassId>(c);
    if (!options.include_background && cls == ClassId::background) {
      report.excluded.push_back(cls);
      continue;
    }
    report.per_class[c] = pooled[c].dice();
    if (report.per_class[c]) {
      sum += *report.per_class[c];
      ++present;
    } else {
      report.excluded.push_back(cls);
    }
  }
  report.mean = present ? sum / present : 0.0;
  return report;
}

std::string format_report_table(const DiceReport& report) {
  std::string out = "Dice (pooled over " + std::to_string(report.frames) + " frames)\n";
  char line[64];
  for (int c = 0; c < kClassCount; ++c) {
    const auto& v = report.per_class[c];
    const auto name = class_name(static_cast<ClassId>(c));
    if (v) {
      std::snprintf(line, sizeof(line), "%-24.*s %.2f\n", static_cast<int>(name.size()), name.data(), *v);
    } else {
      std::snprintf(line, sizeof(line), "%-24.*s -\n", static_cast<int>(name.size()), name.data());
    }
    out += line;
  }
  std::snprintf(line, sizeof(line), "%-24s %.2f\n", "Mean", report.mean);
  out += line;
  return out;
}

nlohmann::json to_json(const DiceReport& report) {
  nlohmann::json per_class = nlohmann::json::array();
  for (int c = 0; c < kClassCount; ++c) {
    per_class.push_back({{"class", c},
                         {"name", std::string(class_name(static_cast<ClassId>(c)))},
                         {"dice", report.per_class[c] ? nlohmann::json(*report.per_class[c]) : nlohmann::json(nullptr)}});
  }
  nlohmann::json excluded = nlohmann::json::array();
  for (auto c : report.excluded) excluded.push_back(std::string(class_name(c)));
  return {{"aggregation", "pooled"},
          {"frames", report.frames},
          {"per_class", std::move(per_class)},
          {"mean", report.mean},
          {"excluded", std::move(excluded)}};
}

}  // namespace surgq
