#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>
#include <sstream>

#include "abcmc/error.hpp"
#include "abcmc/harness.hpp"
#include "abcmc/text.hpp"

namespace abcmc {
namespace {

std::string opt(const std::optional<double>& v) { return v ? format_double(*v) : ""; }

std::string quote(const std::string& s) {
  if (s.find_first_of(",\"") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + '"';
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << content;
  if (!out) throw IoError("failed while writing " + path.string());
}

std::string safe_name(std::string s) {
  for (char& ch : s)
    if (!std::isalnum(static_cast<unsigned char>(ch)) && ch != '.' && ch != '-') ch = '_';
  return s;
}

}  // namespace

std::string summary_csv(const ResultTable& table) {
  std::ostringstream out;
  out << "study,method,quantile,n,true_model,mae,mse,per,n_datasets,benchmark\n";
  for (const auto& r : table.rows) {
    out << study_name(table.study) << ',' << quote(r.method) << ',' << opt(r.quantile) << ',' << table.n << ','
        << r.true_model << ',' << opt(r.mae) << ',' << opt(r.mse) << ',' << opt(r.per) << ',' << r.n_datasets << ','
        << r.benchmark << '\n';
  }
  return out.str();
}

std::string estimates_csv(const ResultTable& table) {
  std::ostringstream out;
  out << "study,dataset,true_model,method,quantile";
  for (const auto& l : table.model_labels) out << ",prob_" << l;
  for (const auto& l : table.model_labels) out << ",truth_" << l;
  out << '\n';
  for (const auto& e : table.estimates) {
    out << study_name(table.study) << ',' << e.dataset << ','
        << (e.true_model < 0 ? std::string("NA") : table.model_labels.at(static_cast<std::size_t>(e.true_model)))
        << ',' << quote(e.method) << ',' << opt(e.quantile);
    for (std::size_t k = 0; k < table.model_labels.size(); ++k) out << ',' << format_double(e.probs.at(k));
    for (std::size_t k = 0; k < table.model_labels.size(); ++k) {
      out << ',';
      if (e.truth) out << format_double(e.truth->at(k));
    }
    out << '\n';
  }
  return out.str();
}

OutputFiles emit_outputs(const ResultTable& table, const std::filesystem::path& dir, bool plots) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory " + dir.string() + ": " + ec.message());
  OutputFiles files;
  const std::string stem = study_name(table.study);
  files.summary_csv = dir / (stem + "_summary.csv");
  files.estimates_csv = dir / (stem + "_estimates.csv");
  files.metadata_json = dir / (stem + "_metadata.json");
  write_file(files.summary_csv, summary_csv(table));
  write_file(files.estimates_csv, estimates_csv(table));
  const auto& meta = table.metadata.is_null() ? nlohmann::ordered_json::object() : table.metadata;
  write_file(files.metadata_json, meta.dump(2) + "\n");
  if (!plots) return files;

  // One plot per (true model, quantile) cell.
  std::set<std::pair<int, double>> cells;
  for (const auto& e : table.estimates)
    if (e.quantile && e.true_model >= 0) cells.insert({e.true_model, *e.quantile});
  const bool normal = table.study == Study::normal_known || table.study == Study::normal_unknown;
  for (const auto& [model, q] : cells) {
    // Normal-mean plots always show the null model, other studies the true one.
    const auto focus = normal ? std::size_t{0} : static_cast<std::size_t>(model);
    const std::string& label = table.model_labels.at(static_cast<std::size_t>(model));
    const std::string& focus_label = table.model_labels.at(focus);
    const std::string tag = label + "_q" + format_double(q);
    bool has_truth = false;
    std::vector<PlotSeries> series;
    std::vector<BoxGroup> boxes;
    for (const auto& e : table.estimates) {
      if (e.true_model != model || !e.quantile || *e.quantile != q) continue;
      auto s = std::find_if(series.begin(), series.end(), [&](const PlotSeries& p) { return p.name == e.method; });
      if (s == series.end()) {
        series.push_back({e.method, {}});
        boxes.push_back({e.method, {}});
        s = series.end() - 1;
      }
      const double est = e.probs.at(focus);
      boxes[static_cast<std::size_t>(s - series.begin())].values.push_back(est);
      if (e.truth) {
        has_truth = true;
        s->points.push_back({e.truth->at(focus), est});
      }
    }
    std::string svg;
    std::filesystem::path path;
    const std::string title = stem + ", data from " + label + ", q = " + format_double(q);
    if (has_truth) {
      path = dir / safe_name(stem + "_scatter_" + tag + ".svg");
      svg = scatter_svg(title, "true posterior probability of " + focus_label,
                        "ABC approximation of the probability of " + focus_label, series);
    } else {
      path = dir / safe_name(stem + "_boxplot_" + tag + ".svg");
      svg = boxplot_svg(title, "ABC posterior probability of " + focus_label, boxes);
    }
    write_file(path, svg);
    files.plots.push_back(path);
  }
  return files;
}

}  // namespace abcmc
