#include "abcmc/engine.hpp"
#include "abcmc/error.hpp"

namespace abcmc {
namespace {

std::string discrepancy_label(const DiscrepancyMethod& d) {
  std::string s;
  switch (d.distance) {
    case DistanceKind::cvm: s = "ABC-CvM"; break;
    case DistanceKind::wasserstein1: s = "ABC-Wass"; break;
    case DistanceKind::mmd: s = d.kernel.kind == KernelSpec::Kind::energy ? "ABC-Energy" : "ABC-MMD"; break;
  }
  if (d.log_transform) s += " (log)";
  return s;
}

void validate_discrepancy(const DiscrepancyMethod& d) {
  if (d.distance == DistanceKind::mmd) d.kernel.validate();
}

}  // namespace

AbcMethod AbcMethod::summary(SummaryMetric metric) { return {SummaryMethod{std::move(metric), false, 0}, ""}; }

AbcMethod AbcMethod::summary_mad(std::size_t mad_draws) {
  return {SummaryMethod{SummaryMetric::euclidean(), true, mad_draws}, ""};
}

AbcMethod AbcMethod::discrepancy(DistanceKind distance, bool log_transform, KernelSpec kernel) {
  return {DiscrepancyMethod{distance, kernel, log_transform, TieRule::average}, ""};
}

AbcMethod AbcMethod::combined(DistanceKind distance, double omega, bool log_transform) {
  CombinedMethod c;
  c.statistic.distance = distance;
  c.statistic.log_transform = log_transform;
  c.omega = omega;
  return {c, ""};
}

void AbcMethod::validate() const {
  if (const auto* s = std::get_if<SummaryMethod>(&kind)) {
    if (s->mad_weighted && s->mad_draws < 100) throw DomainError("MAD weighting needs at least 100 prior draws");
    if (!s->mad_weighted && s->metric.kind == SummaryMetric::Kind::weighted_euclidean) {
      for (double w : s->metric.weights)
        if (!(w > 0.0)) throw DomainError("summary weights must be positive");
    }
  } else if (const auto* d = std::get_if<DiscrepancyMethod>(&kind)) {
    validate_discrepancy(*d);
  } else {
    const auto& c = std::get<CombinedMethod>(kind);
    if (!(c.omega >= 0.0 && c.omega <= 1.0)) throw DomainError("combine weight omega must lie in [0, 1]");
    validate_discrepancy(c.statistic);
  }
}

std::string method_label(const AbcMethod& method) {
  if (!method.label.empty()) return method.label;
  if (std::holds_alternative<SummaryMethod>(method.kind)) return "ABC-Stat";
  if (const auto* d = std::get_if<DiscrepancyMethod>(&method.kind)) return discrepancy_label(*d);
  return discrepancy_label(std::get<CombinedMethod>(method.kind).statistic);
}

}  // namespace abcmc
