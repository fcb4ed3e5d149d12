#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "navierlab/bootstrap.hpp"
#include "navierlab/branch.hpp"
#include "navierlab/config.hpp"
#include "navierlab/estimates.hpp"
#include "navierlab/radial.hpp"

namespace navierlab::report {

/// "%.17g": lossless for binary64, '.' decimal, no grouping.
std::string number(double x);

/// Writes to path + ".tmp" and renames over path. Creates parent
/// directories. Throws std::runtime_error on I/O failure.
void write_atomic(const std::string& path, const std::string& content);

/// m,lambda,u_center,max_u,mu1,residual_norm,newton_iters; mu1 may be
/// shorter than the branch (missing values are written as "nan").
std::string branch_csv(const RadialGrid& grid, const Branch& branch,
                       const std::vector<double>& mu1);

/// r,u,v for one point.
std::string field_csv(const RadialGrid& grid, const BranchPoint& point);

/// estimate,m,lambda,lhs,rhs,margin,satisfied[,low_confidence]
std::string estimate_csv(const std::vector<EstimateReport>& rows);

nlohmann::ordered_json config_json(const RunConfig& config);
nlohmann::ordered_json verdict_json(const RegularityVerdict& verdict);
nlohmann::ordered_json bootstrap_json(const ExponentParams& params,
                                      const BootstrapTrace& trace);
nlohmann::ordered_json supremum_json(const BranchSupremum& sup);

/// Deterministic text form (two-space indent, trailing newline).
std::string dump(const nlohmann::ordered_json& j);

}  // namespace navierlab::report
