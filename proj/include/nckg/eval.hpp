#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "nckg/clause.hpp"
#include "nckg/ontology.hpp"
#include "nckg/review.hpp"

namespace nckg {

class LengthMismatch : public Error {
 public:
  using Error::Error;
};

class MissingVerdict : public Error {
 public:
  explicit MissingVerdict(std::vector<std::string> clause_ids);
  const std::vector<std::string>& clause_ids() const { return ids_; }

 private:
  std::vector<std::string> ids_;
};

class GoldFormatError : public Error {
 public:
  using Error::Error;
};

using LabelSet = std::set<RiskCategory>;

struct AnnotatedClause {
  Clause clause;
  LabelSet gold_categories;
  RiskType gold_risk_type = RiskType::NoRisk;
  std::string gold_summary;
  /// Optional per-category override of gold_risk_type.
  std::map<RiskCategory, RiskType> category_types;
};

struct ConfusionCell {
  RiskCategory label = RiskCategory::Assignment;
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t tn = 0;
  std::size_t fn = 0;

  friend bool operator==(const ConfusionCell&, const ConfusionCell&) = default;
};

/// One cell per category, in category order.
std::vector<ConfusionCell> confusion(const std::vector<LabelSet>& gold, const std::vector<LabelSet>& pred);

struct LabelMetrics {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

/// Each ratio is 0 when its denominator is 0.
LabelMetrics metrics(const ConfusionCell& cell);

/// Unweighted mean of per-label f1 over the six categories.
double macro_f1(const std::vector<ConfusionCell>& cells);

struct Report {
  ReviewMode mode = ReviewMode::NCKG;
  std::size_t n = 0;
  std::vector<ConfusionCell> cells;
  std::map<RiskCategory, LabelMetrics> per_label;
  double macro_f1 = 0.0;
  std::optional<double> rs_mean;
  /// Auxiliary: share of clauses whose (category, risk type) pairs equal gold exactly.
  double exact_match = 0.0;
  /// Predicted labels outside the six categories; not part of the RE-score.
  std::size_t unknown_labels = 0;
  /// Labels with a zero precision or recall denominator.
  std::vector<std::string> degenerate;
};

std::vector<AnnotatedClause> read_gold(std::string_view jsonl);
std::map<std::string, double> read_rs_scores(std::string_view jsonl);
std::vector<RiskVerdict> read_verdicts(std::string_view jsonl);

/// Verdicts are matched to gold clauses by id, so their order does not matter.
Report evaluate_run(const std::vector<AnnotatedClause>& dataset, const std::vector<RiskVerdict>& verdicts,
                    const std::optional<std::map<std::string, double>>& rs_scores = std::nullopt);

std::string report_to_json(const Report& r);
/// Summary row (setting, n, RE-score, RS-score) followed by the per-label table.
std::string report_to_markdown(const Report& r);

}  // namespace nckg
