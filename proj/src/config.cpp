#include "navierlab/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

#include "navierlab/errors.hpp"

namespace navierlab {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    parts.push_back(trim(s.substr(start, pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

[[noreturn]] void bad_value(std::string_view key, std::string_view value) {
  throw PreconditionError("config: invalid value '" + std::string(value) + "' for key '" +
                          std::string(key) + "'");
}

template <typename T>
T parse_number(std::string_view key, std::string_view value) {
  value = trim(value);
  T out{};
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc{} || ptr != value.data() + value.size() || value.empty()) {
    bad_value(key, value);
  }
  return out;
}

bool parse_bool(std::string_view key, std::string_view value) {
  value = trim(value);
  if (value == "true" || value == "1" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "no") return false;
  bad_value(key, value);
}

std::string join(const std::vector<std::string>& items) {
  std::string out;
  for (const auto& s : items) out += (out.empty() ? "" : ",") + s;
  return out;
}

}  // namespace

double RunConfig::m_max_for(const NonlinearityFamily& fam) const {
  if (!fam.singular()) return m_max;
  return std::min(m_max, fam.upper_limit() - 2.0 * mems_guard);
}

void RunConfig::validate(bool branch_run) const {
  const NonlinearityFamily fam = parsed_family();
  if (N < 2) throw PreconditionError("config: N must be >= 2");
  if (n < 3) throw PreconditionError("config: n must be >= 3");
  if (!(r_inner >= 0.0 && r_inner < 1.0)) {
    throw PreconditionError("config: r_inner must lie in [0, 1)");
  }
  if (!(m_max > 0.0)) throw PreconditionError("config: m_max must be positive");
  if (jobs < 1) throw PreconditionError("config: jobs must be >= 1");
  parsed_backend();
  solver().validate();
  if (branch_run && fam.singular() && !(m_max < fam.upper_limit() - mems_guard)) {
    throw PreconditionError("config: m_max must stay below 1 - mems_guard for " + fam.spec());
  }
  if (families.empty()) throw PreconditionError("config: families must not be empty");
  for (const auto& f : families) NonlinearityFamily::parse(f);
  if (dims.empty()) throw PreconditionError("config: dims must not be empty");
  for (int d : dims) {
    if (d < 2) throw PreconditionError("config: dims must be >= 2");
  }
  if (steps < 1) throw PreconditionError("config: steps must be >= 1");
}

kernels::Backend RunConfig::parsed_backend() const {
  if (backend == "omp") return kernels::Backend::OpenMP;
  if (backend == "serial") return kernels::Backend::Serial;
  throw PreconditionError("config: backend must be 'omp' or 'serial'");
}

SolverConfig RunConfig::solver() const {
  SolverConfig s;
  s.newton_tol = tol;
  s.max_newton = max_newton;
  s.amplitude_step = std::min(amplitude_step, max_step);
  s.max_step = max_step;
  s.min_step = std::min(s.min_step, s.amplitude_step);
  s.mems_guard = mems_guard;
  s.post_fold_points = post_fold_points;
  s.backend = parsed_backend();
  return s;
}

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys{
      "family", "N",       "n",        "r_inner",  "m_max", "tol",
      "max_newton", "amplitude_step", "max_step", "mems_guard", "post_fold_points",
      "out",    "jobs",    "backend",  "dump_fields", "q",  "alpha",
      "beta",   "steps",   "families", "dims"};
  return keys;
}

void set_config_key(RunConfig& c, std::string_view key, std::string_view value) {
  value = trim(value);
  if (key == "family") {
    c.family = std::string(value);
  } else if (key == "N") {
    c.N = parse_number<int>(key, value);
  } else if (key == "n") {
    c.n = parse_number<int>(key, value);
  } else if (key == "r_inner") {
    c.r_inner = parse_number<double>(key, value);
  } else if (key == "m_max") {
    c.m_max = parse_number<double>(key, value);
  } else if (key == "tol") {
    c.tol = parse_number<double>(key, value);
  } else if (key == "max_newton") {
    c.max_newton = parse_number<int>(key, value);
  } else if (key == "amplitude_step") {
    c.amplitude_step = parse_number<double>(key, value);
  } else if (key == "max_step") {
    c.max_step = parse_number<double>(key, value);
  } else if (key == "mems_guard") {
    c.mems_guard = parse_number<double>(key, value);
  } else if (key == "post_fold_points") {
    c.post_fold_points = parse_number<int>(key, value);
  } else if (key == "out") {
    if (value.empty()) bad_value(key, value);
    c.out = std::string(value);
  } else if (key == "jobs") {
    c.jobs = parse_number<int>(key, value);
  } else if (key == "backend") {
    c.backend = std::string(value);
  } else if (key == "dump_fields") {
    c.dump_fields = parse_bool(key, value);
  } else if (key == "q") {
    c.q = parse_number<double>(key, value);
  } else if (key == "alpha") {
    c.alpha = parse_number<double>(key, value);
  } else if (key == "beta") {
    c.beta = parse_number<double>(key, value);
  } else if (key == "steps") {
    c.steps = parse_number<long>(key, value);
  } else if (key == "families") {
    std::vector<std::string> fams;
    for (auto item : split(value, ',')) {
      if (!item.empty()) fams.emplace_back(item);
    }
    if (fams.empty()) bad_value(key, value);
    c.families = std::move(fams);
  } else if (key == "dims") {
    c.dims = parse_int_list(value);
  } else {
    throw PreconditionError("config: unknown key '" + std::string(key) + "'");
  }
}

std::string get_config_key(const RunConfig& c, std::string_view key) {
  if (key == "family") return c.family;
  if (key == "N") return std::to_string(c.N);
  if (key == "n") return std::to_string(c.n);
  if (key == "r_inner") return format_real(c.r_inner);
  if (key == "m_max") return format_real(c.m_max);
  if (key == "tol") return format_real(c.tol);
  if (key == "max_newton") return std::to_string(c.max_newton);
  if (key == "amplitude_step") return format_real(c.amplitude_step);
  if (key == "max_step") return format_real(c.max_step);
  if (key == "mems_guard") return format_real(c.mems_guard);
  if (key == "post_fold_points") return std::to_string(c.post_fold_points);
  if (key == "out") return c.out;
  if (key == "jobs") return std::to_string(c.jobs);
  if (key == "backend") return c.backend;
  if (key == "dump_fields") return c.dump_fields ? "true" : "false";
  if (key == "q") return format_real(c.q);
  if (key == "alpha") return format_real(c.alpha);
  if (key == "beta") return format_real(c.beta);
  if (key == "steps") return std::to_string(c.steps);
  if (key == "families") return join(c.families);
  if (key == "dims") {
    std::string out;
    for (int d : c.dims) out += (out.empty() ? "" : ",") + std::to_string(d);
    return out;
  }
  throw PreconditionError("config: unknown key '" + std::string(key) + "'");
}

std::map<std::string, std::string> parse_config_text(std::string_view text) {
  std::map<std::string, std::string> entries;
  std::size_t line_no = 0;
  for (auto raw : split(text, '\n')) {
    ++line_no;
    auto line = raw.substr(0, raw.find('#'));
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw PreconditionError("config: line " + std::to_string(line_no) +
                              ": expected key = value");
    }
    const std::string key(trim(line.substr(0, eq)));
    if (key.empty()) {
      throw PreconditionError("config: line " + std::to_string(line_no) + ": empty key");
    }
    if (!entries.emplace(key, std::string(trim(line.substr(eq + 1)))).second) {
      throw PreconditionError("config: line " + std::to_string(line_no) +
                              ": duplicate key '" + key + "'");
    }
  }
  return entries;
}

std::map<std::string, std::string> read_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw PreconditionError("config: cannot read '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str());
}

std::vector<int> parse_int_list(std::string_view text) {
  std::vector<int> out;
  for (auto item : split(text, ',')) {
    if (item.empty()) bad_value("dims", text);
    const auto dots = item.find("..");
    if (dots == std::string_view::npos) {
      out.push_back(parse_number<int>("dims", item));
      continue;
    }
    const int lo = parse_number<int>("dims", item.substr(0, dots));
    const int hi = parse_number<int>("dims", item.substr(dots + 2));
    if (hi < lo) bad_value("dims", item);
    for (int d = lo; d <= hi; ++d) out.push_back(d);
  }
  if (out.empty()) bad_value("dims", text);
  return out;
}

}  // namespace navierlab
