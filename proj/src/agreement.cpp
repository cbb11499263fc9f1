#include "disimpact/agreement.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <set>
#include <unordered_map>

#include <json.hpp>

#include "disimpact/csv.hpp"
#include "disimpact/error.hpp"

namespace disimpact {

namespace {

constexpr double kDegenerateTol = 1e-12;

// Relabels `labels` to 0..K-1 (ascending original label order) and returns K.
int densify(const Eigen::MatrixXi& labels, Eigen::MatrixXi& dense) {
  std::vector<int> alphabet(labels.data(), labels.data() + labels.size());
  std::sort(alphabet.begin(), alphabet.end());
  alphabet.erase(std::unique(alphabet.begin(), alphabet.end()), alphabet.end());
  dense = labels.unaryExpr([&](int v) {
    return static_cast<int>(std::lower_bound(alphabet.begin(), alphabet.end(), v) - alphabet.begin());
  });
  return static_cast<int>(alphabet.size());
}

KappaResult chance_corrected(double observed, double expected) {
  if (std::abs(1.0 - expected) <= kDegenerateTol) {
    if (std::abs(1.0 - observed) <= kDegenerateTol) return {1.0, true};
    throw Error(ErrorCode::DegenerateExpected, "expected agreement is 1 but observed agreement is not");
  }
  return {(observed - expected) / (1.0 - expected), false};
}

}  // namespace

AgreementTable AgreementTable::select(const std::vector<std::string>& annotators) const {
  AgreementTable out;
  out.items = items;
  out.annotator_ids = annotators;
  out.labels.resize(labels.rows(), static_cast<Eigen::Index>(annotators.size()));
  for (std::size_t k = 0; k < annotators.size(); ++k) {
    const auto it = std::find(annotator_ids.begin(), annotator_ids.end(), annotators[k]);
    if (it == annotator_ids.end()) {
      throw Error(ErrorCode::EmptyTable, "annotator '" + annotators[k] + "' not in table");
    }
    out.labels.col(static_cast<Eigen::Index>(k)) = labels.col(it - annotator_ids.begin());
  }
  return out;
}

AgreementTable make_agreement_table(const std::vector<AnnotationRow>& rows) {
  AgreementTable table;
  std::unordered_map<std::string, Eigen::Index> item_pos;
  std::set<std::string> annotators;
  for (const auto& r : rows) {
    if (item_pos.emplace(r.item, static_cast<Eigen::Index>(table.items.size())).second) {
      table.items.push_back(r.item);
    }
    annotators.insert(r.annotator);
  }
  table.annotator_ids.assign(annotators.begin(), annotators.end());
  std::map<std::string, Eigen::Index> rater_pos;
  for (std::size_t k = 0; k < table.annotator_ids.size(); ++k) {
    rater_pos.emplace(table.annotator_ids[k], static_cast<Eigen::Index>(k));
  }

  const auto n_items = static_cast<Eigen::Index>(table.items.size());
  const auto n_raters = static_cast<Eigen::Index>(table.annotator_ids.size());
  table.labels.resize(n_items, n_raters);
  Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> filled =
      Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>::Constant(n_items, n_raters, false);
  for (const auto& r : rows) {
    const auto i = item_pos.at(r.item);
    const auto k = rater_pos.at(r.annotator);
    if (filled(i, k)) {
      throw Error(ErrorCode::MalformedCsv, "duplicate label for item '" + r.item + "' by '" + r.annotator + "'");
    }
    filled(i, k) = true;
    table.labels(i, k) = r.label;
  }
  for (Eigen::Index i = 0; i < n_items; ++i) {
    for (Eigen::Index k = 0; k < n_raters; ++k) {
      if (!filled(i, k)) {
        throw Error(ErrorCode::MalformedCsv, "item '" + table.items[static_cast<std::size_t>(i)] +
                                                 "' has no label from '" +
                                                 table.annotator_ids[static_cast<std::size_t>(k)] + "'");
      }
    }
  }
  return table;
}

AgreementTable load_annotations(const std::filesystem::path& path) {
  const auto table = csv::read_file(path);
  csv::require_header(table, {"post_id", "annotator_id", "category_code"}, path.string());
  std::vector<AnnotationRow> rows;
  rows.reserve(table.rows.size());
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    int label = 0;
    const auto [ptr, ec] = std::from_chars(row[2].data(), row[2].data() + row[2].size(), label);
    if (ec != std::errc{} || ptr != row[2].data() + row[2].size()) {
      throw Error(ErrorCode::MalformedCsv,
                  path.string() + ":" + std::to_string(table.line_numbers[r]) + ": bad label '" + row[2] + "'");
    }
    rows.push_back({row[0], row[1], label});
  }
  return make_agreement_table(rows);
}

double consistency(const AgreementTable& table) {
  if (table.item_count() == 0 || table.rater_count() < 2) {
    throw Error(ErrorCode::EmptyTable, "consistency needs >= 1 item and >= 2 annotators");
  }
  Eigen::Index unanimous = 0;
  for (Eigen::Index i = 0; i < table.item_count(); ++i) {
    const auto row = table.labels.row(i);
    if ((row.array() == row(0)).all()) ++unanimous;
  }
  return static_cast<double>(unanimous) / static_cast<double>(table.item_count());
}

KappaResult fleiss_kappa(const AgreementTable& table) {
  if (table.item_count() < 2 || table.rater_count() < 2) {
    throw Error(ErrorCode::EmptyTable, "Fleiss' kappa needs >= 2 items and >= 2 raters");
  }
  Eigen::MatrixXi dense;
  const int k = densify(table.labels, dense);
  const auto n_items = table.item_count();
  const auto raters = static_cast<double>(table.rater_count());

  // n_ij: raters assigning item i to category j.
  Eigen::MatrixXd n_ij = Eigen::MatrixXd::Zero(n_items, k);
  for (Eigen::Index i = 0; i < n_items; ++i) {
    for (Eigen::Index r = 0; r < table.rater_count(); ++r) n_ij(i, dense(i, r)) += 1.0;
  }
  const Eigen::VectorXd p_i = (n_ij.array() * (n_ij.array() - 1.0)).rowwise().sum() / (raters * (raters - 1.0));
  const double p_bar = p_i.mean();
  const Eigen::RowVectorXd p_j = n_ij.colwise().sum() / (static_cast<double>(n_items) * raters);
  const double p_e = p_j.squaredNorm();
  return chance_corrected(p_bar, p_e);
}

KappaResult cohen_kappa(const Eigen::Ref<const Eigen::VectorXi>& a, const Eigen::Ref<const Eigen::VectorXi>& b) {
  if (a.size() != b.size()) {
    throw Error(ErrorCode::LengthMismatch, "Cohen's kappa on vectors of length " + std::to_string(a.size()) +
                                               " and " + std::to_string(b.size()));
  }
  if (a.size() == 0) throw Error(ErrorCode::EmptyTable, "Cohen's kappa on empty vectors");

  Eigen::MatrixXi both(a.size(), 2);
  both << a, b;
  Eigen::MatrixXi dense;
  const int k = densify(both, dense);
  const auto n = static_cast<double>(a.size());

  Eigen::VectorXd pa = Eigen::VectorXd::Zero(k);
  Eigen::VectorXd pb = Eigen::VectorXd::Zero(k);
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    pa(dense(i, 0)) += 1.0;
    pb(dense(i, 1)) += 1.0;
  }
  pa /= n;
  pb /= n;
  const double p_o = static_cast<double>((a.array() == b.array()).count()) / n;
  return chance_corrected(p_o, pa.dot(pb));
}

std::vector<Consensus> human_consensus(const AgreementTable& table) {
  const auto raters = table.rater_count();
  if (raters % 2 == 0) {
    throw Error(ErrorCode::EvenRaterCount,
                "consensus needs an odd number of raters, got " + std::to_string(raters));
  }
  std::vector<Consensus> out;
  out.reserve(static_cast<std::size_t>(table.item_count()));
  for (Eigen::Index i = 0; i < table.item_count(); ++i) {
    std::map<int, Eigen::Index> tally;
    for (Eigen::Index r = 0; r < raters; ++r) ++tally[table.labels(i, r)];
    const auto best = std::max_element(tally.begin(), tally.end(),
                                       [](const auto& x, const auto& y) { return x.second < y.second; });
    const bool majority = 2 * best->second > raters;
    out.push_back({table.items[static_cast<std::size_t>(i)], majority ? best->first : 0, majority});
  }
  return out;
}

AgreementReport agreement_report(const AgreementTable& table, const std::string& model_annotator) {
  std::vector<std::string> humans;
  for (const auto& id : table.annotator_ids) {
    if (id != model_annotator) humans.push_back(id);
  }
  const bool has_model = humans.size() != table.annotator_ids.size();
  const AgreementTable human_table = table.select(humans);

  AgreementReport report;
  report.n_items = static_cast<std::size_t>(table.item_count());
  report.consistency = consistency(human_table);
  report.fleiss = fleiss_kappa(human_table);
  if (!has_model) return report;

  const auto consensus = human_consensus(human_table);
  const auto model_col = std::find(table.annotator_ids.begin(), table.annotator_ids.end(), model_annotator) -
                         table.annotator_ids.begin();
  std::vector<int> human_labels;
  std::vector<int> model_labels;
  for (std::size_t i = 0; i < consensus.size(); ++i) {
    if (!consensus[i].resolved) {
      ++report.n_unresolved;
      continue;
    }
    human_labels.push_back(consensus[i].label);
    model_labels.push_back(table.labels(static_cast<Eigen::Index>(i), model_col));
  }
  if (human_labels.empty()) return report;

  const Eigen::Map<const Eigen::VectorXi> h(human_labels.data(), static_cast<Eigen::Index>(human_labels.size()));
  const Eigen::Map<const Eigen::VectorXi> m(model_labels.data(), static_cast<Eigen::Index>(model_labels.size()));
  report.human_model_consistency =
      static_cast<double>((h.array() == m.array()).count()) / static_cast<double>(h.size());
  report.cohen = cohen_kappa(h, m);
  return report;
}

std::string agreement_report_json(const AgreementReport& report) {
  nlohmann::ordered_json j;
  const auto real = [](double x) { return nlohmann::ordered_json::parse(csv::format_real(x)); };
  j["consistency"] = real(report.consistency);
  j["fleiss_kappa"] = real(report.fleiss.kappa);
  j["fleiss_degenerate"] = report.fleiss.degenerate;
  j["human_mllm_consistency"] =
      report.human_model_consistency ? real(*report.human_model_consistency) : nlohmann::ordered_json(nullptr);
  j["cohen_kappa"] = report.cohen ? real(report.cohen->kappa) : nlohmann::ordered_json(nullptr);
  j["cohen_degenerate"] = report.cohen ? nlohmann::ordered_json(report.cohen->degenerate) : nlohmann::ordered_json(nullptr);
  j["n_items"] = report.n_items;
  j["n_unresolved"] = report.n_unresolved;
  return j.dump(2);
}

}  // namespace disimpact
