#pragma once

#include <array>
#include <compare>
#include <map>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "cip/study.hpp"

namespace cip {

struct Summary {
  std::size_t count = 0;
  double max = 0;
  double median = 0;
  double stddev = 0;  // sample (n - 1)
};

/// Throws InsufficientData when fewer than two values are given.
Summary summarize(std::span<const double> values);

double median(std::span<const double> values);

/// Product-moment correlation. Throws LengthMismatch (also for fewer than
/// two points) or ZeroVariance.
double pearson(std::span<const double> xs, std::span<const double> ys);

/// Pearson correlation of average ranks.
double spearman(std::span<const double> xs, std::span<const double> ys);

enum class Transform { kLog, kSqrt, kReciprocal };

inline constexpr std::array<Transform, 3> kTransforms = {Transform::kLog, Transform::kSqrt, Transform::kReciprocal};

std::string_view transform_name(Transform t);

/// Elementwise log, sqrt or 1/v. Throws DomainError naming the first
/// offending index.
std::vector<double> transform(std::span<const double> values, Transform kind);

/// Max/min ratio of per-bin variances of y. Points are sorted by x and cut
/// into `bins` equal-count bins whose edges are moved forward so equal x
/// values share a bin; bins under 5 points are merged into a neighbour.
/// Returns infinity when some bin has zero variance.
/// Throws InsufficientData when fewer than two bins remain.
double variance_consistency(std::span<const double> xs, std::span<const double> ys, int bins = 10);

struct TransformSelection {
  Transform y = Transform::kSqrt;
  Transform x = Transform::kSqrt;
  double pearson_transformed = 0;
  // Indexed like kTransforms; empty when y is outside the domain.
  std::array<std::optional<double>, 3> variance_scores;
};

/// Picks the y transform with the lowest variance-consistency score, then
/// the x transform maximizing |pearson(T_x(x), T_y(y))|. Ties go to the
/// earlier of log, sqrt, reciprocal; transforms whose domain excludes the
/// data are skipped. Throws DomainError when none applies.
TransformSelection select_transforms(std::span<const double> xs, std::span<const double> ys, int bins = 10);

/// Grouping key for study records; total_cases is 0 when grouping by steps.
struct Cell {
  int steps = 0;
  int total_cases = 0;

  friend auto operator<=>(const Cell&, const Cell&) = default;
};

enum class GroupBy { kSteps, kStepsAndCases };

/// Median size_bytes per group.
std::map<Cell, double> grouped_median(std::span<const StudyRecord> records, GroupBy key);

struct GridPoint {
  double mean = 0;
  std::size_t count = 0;
};

/// Mean size_bytes per (steps, total_cases) cell with its point count.
std::map<Cell, GridPoint> weighted_mean_grid(std::span<const StudyRecord> records);

/// Empty fields mark analyses the data cannot support, such as a
/// correlation against a constant column.
struct PairAnalysis {
  std::optional<double> pearson_raw;
  std::optional<TransformSelection> selection;
};

struct AnalysisReport {
  std::size_t count = 0;
  Summary size;
  PairAnalysis size_vs_cases;
  PairAnalysis size_vs_steps;
  std::map<Cell, double> median_by_steps;
  std::map<Cell, double> median_by_steps_and_cases;
  std::map<Cell, GridPoint> grid;
};

/// Throws InsufficientData for fewer than two records.
AnalysisReport analyze(std::span<const StudyRecord> records);

nlohmann::json report_to_json(const AnalysisReport& report);

}  // namespace cip
