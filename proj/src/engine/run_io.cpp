#include <algorithm>
#include <fstream>

#include <json.hpp>

#include "abcmc/engine.hpp"
#include "abcmc/error.hpp"
#include "abcmc/text.hpp"

namespace abcmc {
namespace {

double parse_cell(std::string_view cell, const std::filesystem::path& path, std::size_t line) {
  double v = 0.0;
  const auto res = std::from_chars(cell.data(), cell.data() + cell.size(), v);
  if (res.ec != std::errc() || res.ptr != cell.data() + cell.size()) {
    throw IoError(path.string() + ":" + std::to_string(line) + ": bad number '" + std::string(cell) + "'");
  }
  return v;
}

}  // namespace

void write_run_csv(const std::filesystem::path& path, const AbcRun& run) {
  if (!run.draws) throw Error("run has no draw table");
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  const DrawTable& t = *run.draws;
  std::size_t n_theta = 0;
  for (std::size_t i = 0; i < t.size(); ++i) n_theta = std::max(n_theta, t.params(i).size());

  nlohmann::ordered_json header;
  header["format"] = "abcmc-run";
  header["version"] = kRunFormatVersion;
  header["method"] = method_label(run.method);
  header["master_seed"] = run.seed.master_seed;
  header["stream_id"] = run.seed.stream_id;
  header["n_draws"] = run.size();
  header["n_models"] = run.n_models;
  header["components"] = run.component_names;
  header["resampled_draws"] = t.resampled;
  auto& bw = header["bandwidths"] = nlohmann::ordered_json::object();
  for (const auto& [name, value] : run.meta.bandwidths) bw[name] = value;
  out << "# " << header.dump() << '\n';

  out << "draw,model";
  for (std::size_t j = 0; j < n_theta; ++j) out << ",theta_" << j + 1;
  for (const auto& c : run.component_names) out << ',' << c;
  out << ",distance\n";
  const std::size_t nc = run.component_names.size();
  for (std::size_t i = 0; i < run.size(); ++i) {
    out << i << ',' << t.model[i] + 1;
    const auto p = t.params(i);
    for (std::size_t j = 0; j < n_theta; ++j) {
      out << ',';
      if (j < p.size()) out << format_double(p[j]);
    }
    for (std::size_t c = 0; c < nc; ++c) out << ',' << format_double(run.components[i * nc + c]);
    out << ',' << format_double(run.distances[i]) << '\n';
  }
  if (!out) throw IoError("failed while writing " + path.string());
}

RunDump read_run_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  RunDump dump;
  std::string line;
  if (!std::getline(in, line) || line.rfind("# ", 0) != 0) throw IoError(path.string() + ": missing JSON header");
  dump.header_json = line.substr(2);
  const auto header = nlohmann::json::parse(dump.header_json, nullptr, false);
  if (header.is_discarded() || header.value("format", "") != "abcmc-run") {
    throw IoError(path.string() + ": not a run dump");
  }
  if (header.value("version", 0) != kRunFormatVersion) throw IoError(path.string() + ": unsupported version");
  if (!std::getline(in, line)) throw IoError(path.string() + ": missing column header");
  for (auto f : split_fields(line)) dump.columns.emplace_back(f);
  std::size_t n_theta = 0;
  for (const auto& c : dump.columns)
    if (c.rfind("theta_", 0) == 0) ++n_theta;
  const std::size_t cols = dump.columns.size();
  if (cols < 3 + n_theta) throw IoError(path.string() + ": malformed column header");
  const std::size_t n_comp = cols - 3 - n_theta;

  std::size_t line_no = 2;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto f = split_fields(line);
    if (f.size() != cols) throw IoError(path.string() + ":" + std::to_string(line_no) + ": wrong field count");
    dump.model.push_back(static_cast<int>(parse_cell(f[1], path, line_no)));
    std::vector<double> theta;
    for (std::size_t j = 0; j < n_theta; ++j)
      if (!f[2 + j].empty()) theta.push_back(parse_cell(f[2 + j], path, line_no));
    dump.theta.push_back(std::move(theta));
    std::vector<double> comp(n_comp);
    for (std::size_t c = 0; c < n_comp; ++c) comp[c] = parse_cell(f[2 + n_theta + c], path, line_no);
    dump.components.push_back(std::move(comp));
    dump.distances.push_back(parse_cell(f[cols - 1], path, line_no));
  }
  return dump;
}

}  // namespace abcmc
