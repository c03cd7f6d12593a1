#include "cip/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "cip/error.hpp"

namespace cip {

double median(std::span<const double> values) {
  if (values.empty()) throw Error(ErrorCode::kInsufficientData, "median of no values");
  std::vector<double> v(values.begin(), values.end());
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : (v[n / 2 - 1] + v[n / 2]) / 2.0;
}

Summary summarize(std::span<const double> values) {
  if (values.size() < 2) throw Error(ErrorCode::kInsufficientData, "need at least 2 values");
  Summary s;
  s.count = values.size();
  s.max = *std::max_element(values.begin(), values.end());
  s.median = median(values);
  const double mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(s.count);
  double ss = 0;
  for (double v : values) ss += (v - mean) * (v - mean);
  s.stddev = std::sqrt(ss / static_cast<double>(s.count - 1));
  return s;
}

double pearson(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size()) {
    throw Error(ErrorCode::kLengthMismatch,
                std::to_string(xs.size()) + " x values vs " + std::to_string(ys.size()) + " y values");
  }
  if (xs.size() < 2) throw Error(ErrorCode::kLengthMismatch, "need at least 2 points");
  const auto n = static_cast<double>(xs.size());
  const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
  const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / n;
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double dx = xs[i] - mx, dy = ys[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0 || syy == 0) throw Error(ErrorCode::kZeroVariance, sxx == 0 ? "x is constant" : "y is constant");
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

namespace {

std::vector<double> ranks(std::span<const double> v) {
  std::vector<std::size_t> order(v.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> r(v.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j + 1 < order.size() && v[order[j + 1]] == v[order[i]]) ++j;
    const double avg = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (std::size_t t = i; t <= j; ++t) r[order[t]] = avg;
    i = j + 1;
  }
  return r;
}

}  // namespace

double spearman(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size()) throw Error(ErrorCode::kLengthMismatch, "x and y differ in length");
  return pearson(ranks(xs), ranks(ys));
}

std::string_view transform_name(Transform t) {
  switch (t) {
    case Transform::kLog: return "log";
    case Transform::kSqrt: return "sqrt";
    case Transform::kReciprocal: return "reciprocal";
  }
  return "?";
}

std::vector<double> transform(std::span<const double> values, Transform kind) {
  std::vector<double> out;
  out.reserve(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double v = values[i];
    const bool ok = kind == Transform::kLog    ? v > 0
                    : kind == Transform::kSqrt ? v >= 0
                                               : v != 0;
    if (!ok) {
      throw Error(ErrorCode::kDomainError, std::string(transform_name(kind)) + " undefined at index " +
                                               std::to_string(i) + " (value " + std::to_string(v) + ")");
    }
    out.push_back(kind == Transform::kLog ? std::log(v) : kind == Transform::kSqrt ? std::sqrt(v) : 1.0 / v);
  }
  return out;
}

double variance_consistency(std::span<const double> xs, std::span<const double> ys, int bins) {
  if (xs.size() != ys.size()) throw Error(ErrorCode::kLengthMismatch, "x and y differ in length");
  if (bins < 1) throw Error(ErrorCode::kPreconditionViolated, "bins must be >= 1");
  constexpr std::size_t kMinBin = 5;
  const std::size_t n = xs.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return xs[a] < xs[b]; });

  std::vector<std::size_t> ends;
  for (int b = 1; b <= bins; ++b) {
    std::size_t end = n * static_cast<std::size_t>(b) / static_cast<std::size_t>(bins);
    while (end > 0 && end < n && xs[order[end]] == xs[order[end - 1]]) ++end;
    if (end > (ends.empty() ? 0 : ends.back())) ends.push_back(end);
  }
  // Sweep left to right, closing a bin once it holds enough points; a
  // short tail joins the last closed bin.
  std::vector<std::pair<std::size_t, std::size_t>> ranges;
  std::size_t start = 0;
  for (std::size_t end : ends) {
    if (end - start >= kMinBin) {
      ranges.emplace_back(start, end);
      start = end;
    }
  }
  if (start < n) {
    if (ranges.empty()) throw Error(ErrorCode::kInsufficientData, "too few points for variance bins");
    ranges.back().second = n;
  }
  if (ranges.size() < 2) throw Error(ErrorCode::kInsufficientData, "fewer than 2 bins of 5 points");

  double lo = std::numeric_limits<double>::infinity(), hi = 0;
  for (auto [a, b] : ranges) {
    double mean = 0;
    for (std::size_t i = a; i < b; ++i) mean += ys[order[i]];
    mean /= static_cast<double>(b - a);
    double ss = 0;
    for (std::size_t i = a; i < b; ++i) ss += (ys[order[i]] - mean) * (ys[order[i]] - mean);
    const double var = ss / static_cast<double>(b - a);
    lo = std::min(lo, var);
    hi = std::max(hi, var);
  }
  if (lo == 0) return hi == 0 ? 1.0 : std::numeric_limits<double>::infinity();
  return hi / lo;
}

TransformSelection select_transforms(std::span<const double> xs, std::span<const double> ys, int bins) {
  TransformSelection sel;
  std::optional<std::vector<double>> best_y;
  for (std::size_t t = 0; t < kTransforms.size(); ++t) {
    std::vector<double> ty;
    try {
      ty = transform(ys, kTransforms[t]);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kDomainError) throw;
      continue;
    }
    const double score = variance_consistency(xs, ty, bins);
    sel.variance_scores[t] = score;
    if (!best_y || score < *sel.variance_scores[static_cast<std::size_t>(sel.y)]) {
      sel.y = kTransforms[t];
      best_y = std::move(ty);
    }
  }
  if (!best_y) throw Error(ErrorCode::kDomainError, "no y transform applies to the data");

  std::optional<double> best_r;
  for (Transform t : kTransforms) {
    std::vector<double> tx;
    try {
      tx = transform(xs, t);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kDomainError) throw;
      continue;
    }
    const double r = pearson(tx, *best_y);
    if (!best_r || std::abs(r) > std::abs(*best_r)) {
      best_r = r;
      sel.x = t;
    }
  }
  if (!best_r) throw Error(ErrorCode::kDomainError, "no x transform applies to the data");
  sel.pearson_transformed = *best_r;
  return sel;
}

std::map<Cell, double> grouped_median(std::span<const StudyRecord> records, GroupBy key) {
  std::map<Cell, std::vector<double>> groups;
  for (const StudyRecord& r : records) {
    groups[Cell{r.steps, key == GroupBy::kSteps ? 0 : r.total_cases}].push_back(static_cast<double>(r.size_bytes));
  }
  std::map<Cell, double> out;
  for (const auto& [cell, sizes] : groups) out[cell] = median(sizes);
  return out;
}

std::map<Cell, GridPoint> weighted_mean_grid(std::span<const StudyRecord> records) {
  std::map<Cell, GridPoint> grid;
  std::map<Cell, double> sums;
  for (const StudyRecord& r : records) {
    const Cell cell{r.steps, r.total_cases};
    sums[cell] += static_cast<double>(r.size_bytes);
    ++grid[cell].count;
  }
  for (auto& [cell, point] : grid) point.mean = sums[cell] / static_cast<double>(point.count);
  return grid;
}

namespace {

PairAnalysis analyze_pair(const std::vector<double>& xs, const std::vector<double>& ys) {
  PairAnalysis pair;
  try {
    pair.pearson_raw = pearson(xs, ys);
    pair.selection = select_transforms(xs, ys);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kZeroVariance && e.code() != ErrorCode::kDomainError &&
        e.code() != ErrorCode::kInsufficientData) {
      throw;
    }
  }
  return pair;
}

nlohmann::json number_or_null(std::optional<double> v) {
  if (!v || !std::isfinite(*v)) return nullptr;
  return *v;
}

nlohmann::json pair_json(const PairAnalysis& pair) {
  nlohmann::json j;
  j["pearson_raw"] = number_or_null(pair.pearson_raw);
  if (pair.selection) {
    const TransformSelection& s = *pair.selection;
    j["y_transform"] = transform_name(s.y);
    j["x_transform"] = transform_name(s.x);
    j["pearson_transformed"] = s.pearson_transformed;
    j["variance_scores"] = nlohmann::json::object();
    for (std::size_t t = 0; t < kTransforms.size(); ++t) {
      j["variance_scores"][std::string(transform_name(kTransforms[t]))] = number_or_null(s.variance_scores[t]);
    }
  } else {
    j["y_transform"] = nullptr;
    j["x_transform"] = nullptr;
    j["pearson_transformed"] = nullptr;
    j["variance_scores"] = nullptr;
  }
  return j;
}

}  // namespace

AnalysisReport analyze(std::span<const StudyRecord> records) {
  if (records.size() < 2) throw Error(ErrorCode::kInsufficientData, "need at least 2 records");
  std::vector<double> sizes, cases, steps;
  for (const StudyRecord& r : records) {
    sizes.push_back(static_cast<double>(r.size_bytes));
    cases.push_back(r.total_cases);
    steps.push_back(r.steps);
  }
  AnalysisReport report;
  report.count = records.size();
  report.size = summarize(sizes);
  report.size_vs_cases = analyze_pair(cases, sizes);
  report.size_vs_steps = analyze_pair(steps, sizes);
  report.median_by_steps = grouped_median(records, GroupBy::kSteps);
  report.median_by_steps_and_cases = grouped_median(records, GroupBy::kStepsAndCases);
  report.grid = weighted_mean_grid(records);
  return report;
}

nlohmann::json report_to_json(const AnalysisReport& report) {
  nlohmann::json j;
  j["counts"] = {{"records", report.count}};
  j["summary"] = {{"count", report.size.count},
                  {"max_size", report.size.max},
                  {"median_size", report.size.median},
                  {"stddev_size", report.size.stddev}};
  j["pairs"] = {{"size_vs_cases", pair_json(report.size_vs_cases)},
                {"size_vs_steps", pair_json(report.size_vs_steps)}};
  nlohmann::json by_steps = nlohmann::json::array(), by_cell = nlohmann::json::array();
  for (const auto& [cell, m] : report.median_by_steps) by_steps.push_back({{"steps", cell.steps}, {"median", m}});
  for (const auto& [cell, m] : report.median_by_steps_and_cases) {
    by_cell.push_back({{"steps", cell.steps}, {"total_cases", cell.total_cases}, {"median", m}});
  }
  j["grouped_medians"] = {{"by_steps", by_steps}, {"by_steps_and_cases", by_cell}};
  j["grid"] = nlohmann::json::array();
  for (const auto& [cell, p] : report.grid) {
    j["grid"].push_back({{"steps", cell.steps}, {"total_cases", cell.total_cases}, {"mean", p.mean}, {"count", p.count}});
  }
  return j;
}

}  // namespace cip
