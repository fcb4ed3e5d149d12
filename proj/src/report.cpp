#include "navierlab/report.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>

namespace navierlab::report {

std::string number(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void write_atomic(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  const fs::path tmp = target.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open '" + tmp.string() + "' for writing");
    out << content;
    out.flush();
    if (!out) throw std::runtime_error("write to '" + tmp.string() + "' failed");
  }
  fs::rename(tmp, target);
}

std::string branch_csv(const RadialGrid& grid, const Branch& branch,
                       const std::vector<double>& mu1) {
  std::string out = "m,lambda,u_center,max_u,mu1,residual_norm,newton_iters\n";
  const std::size_t amp = grid.amplitude_node();
  for (std::size_t i = 0; i < branch.points.size(); ++i) {
    const BranchPoint& p = branch.points[i];
    const double peak = *std::max_element(p.u.begin(), p.u.end());
    out += number(p.m) + ',' + number(p.lambda) + ',' + number(p.u[amp]) + ',' +
           number(peak) + ',' + (i < mu1.size() ? number(mu1[i]) : "nan") + ',' +
           number(p.residual_norm) + ',' + std::to_string(p.newton_iters) + '\n';
  }
  return out;
}

std::string field_csv(const RadialGrid& grid, const BranchPoint& point) {
  std::string out = "r,u,v\n";
  for (std::size_t i = 0; i < grid.node_count(); ++i) {
    out += number(grid.r(i)) + ',' + number(point.u[i]) + ',' + number(point.v[i]) + '\n';
  }
  return out;
}

std::string estimate_csv(const std::vector<EstimateReport>& rows) {
  std::string out = "estimate,m,lambda,lhs,rhs,margin,satisfied,low_confidence\n";
  for (const EstimateReport& r : rows) {
    out += r.name + ',' + number(r.meta.m) + ',' + number(r.meta.lambda) + ',' +
           number(r.lhs) + ',' + number(r.rhs) + ',' + number(r.margin) + ',' +
           (r.satisfied ? "true" : "false") + ',' +
           (r.low_confidence ? "LOW_CONFIDENCE" : "") + '\n';
  }
  return out;
}

nlohmann::ordered_json config_json(const RunConfig& config) {
  nlohmann::ordered_json j = nlohmann::ordered_json::object();
  for (const std::string& key : config_keys()) {
    const std::string text = get_config_key(config, key);
    // Numbers and booleans keep their JSON type; everything else is a string.
    auto typed = nlohmann::ordered_json::parse(text, nullptr, false);
    if (typed.is_number() || typed.is_boolean()) {
      j[key] = std::move(typed);
    } else {
      j[key] = text;
    }
  }
  return j;
}

nlohmann::ordered_json verdict_json(const RegularityVerdict& verdict) {
  return {{"family", verdict.family},
          {"N", verdict.N},
          {"verdict", to_string(verdict.verdict)},
          {"rule", verdict.rule}};
}

nlohmann::ordered_json bootstrap_json(const ExponentParams& params,
                                      const BootstrapTrace& trace) {
  nlohmann::ordered_json j;
  j["N"] = params.N;
  j["q"] = params.q;
  j["alpha"] = params.alpha;
  j["beta"] = params.beta;
  j["classification"] = to_string(trace.classification);
  j["steps"] = trace.steps;
  j["fixed_point"] = trace.fixed_point ? nlohmann::ordered_json(*trace.fixed_point)
                                       : nlohmann::ordered_json(nullptr);
  // Long traces keep their head and tail only.
  constexpr std::size_t kKeep = 32;
  const auto& seq = trace.sequence;
  nlohmann::ordered_json values = nlohmann::ordered_json::array();
  if (seq.size() <= 2 * kKeep) {
    for (double x : seq) values.push_back(x);
  } else {
    for (std::size_t i = 0; i < kKeep; ++i) values.push_back(seq[i]);
    for (std::size_t i = seq.size() - kKeep; i < seq.size(); ++i) values.push_back(seq[i]);
    j["trace_truncated"] = true;
  }
  j["trace"] = std::move(values);
  j["final"] = seq.empty() ? 0.0 : seq.back();
  return j;
}

nlohmann::ordered_json supremum_json(const BranchSupremum& sup) {
  return {{"estimate", sup.name},
          {"samples", sup.values.size()},
          {"sup", sup.sup},
          {"trend", sup.trend}};
}

std::string dump(const nlohmann::ordered_json& j) { return j.dump(2) + "\n"; }

}  // namespace navierlab::report
