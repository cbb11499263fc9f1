#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace disimpact {

/// Item x annotator label matrix. Labels are opaque integers: category codes
/// for the impact task, 0/1 for the relevance task.
struct AgreementTable {
  std::vector<std::string> items;
  std::vector<std::string> annotator_ids;
  Eigen::MatrixXi labels;

  Eigen::Index item_count() const noexcept { return labels.rows(); }
  Eigen::Index rater_count() const noexcept { return labels.cols(); }

  /// Keeps only the named annotator columns, in the given order.
  AgreementTable select(const std::vector<std::string>& annotators) const;
};

struct AnnotationRow {
  std::string item;
  std::string annotator;
  int label{0};
};

/// Pivots long-form rows into a complete table. Item order follows first
/// appearance; annotator order is lexicographic. Throws Error(MalformedCsv)
/// on duplicate (item, annotator) pairs or when any cell is missing.
AgreementTable make_agreement_table(const std::vector<AnnotationRow>& rows);

/// Reads annotations.csv (header post_id,annotator_id,category_code).
AgreementTable load_annotations(const std::filesystem::path& path);

struct KappaResult {
  double kappa{0.0};
  /// Expected agreement was 1 and observed agreement perfect; kappa set to 1.
  bool degenerate{false};
};

/// Fraction of items on which every annotator gives the same label.
/// Throws Error(EmptyTable) without items or with fewer than two annotators.
double consistency(const AgreementTable& table);

/// Fleiss' kappa with pooled category proportions. Throws Error(EmptyTable)
/// for fewer than two items or raters.
KappaResult fleiss_kappa(const AgreementTable& table);

/// Cohen's kappa between two label vectors. Throws Error(LengthMismatch)
/// or Error(EmptyTable).
KappaResult cohen_kappa(const Eigen::Ref<const Eigen::VectorXi>& a, const Eigen::Ref<const Eigen::VectorXi>& b);

struct Consensus {
  std::string item;
  int label{0};
  bool resolved{false};
};

/// Strict-majority label per item. Items without a majority are returned
/// unresolved. Throws Error(EvenRaterCount) for an even number of raters.
std::vector<Consensus> human_consensus(const AgreementTable& table);

struct AgreementReport {
  double consistency{0.0};
  KappaResult fleiss;
  std::optional<double> human_model_consistency;
  std::optional<KappaResult> cohen;
  std::size_t n_items{0};
  std::size_t n_unresolved{0};
};

/// Human-human statistics over every column except `model_annotator`, and,
/// when that column exists, consensus-vs-model consistency and Cohen's kappa
/// over resolved items.
AgreementReport agreement_report(const AgreementTable& table, const std::string& model_annotator);

/// {consistency, fleiss_kappa, human_mllm_consistency, cohen_kappa, n_items, n_unresolved}
std::string agreement_report_json(const AgreementReport& report);

}  // namespace disimpact
