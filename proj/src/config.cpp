#include "mdev/config.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "mdev/model.hpp"

namespace mdev {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

double to_double(const std::string& key, const std::string& s) {
  try {
    size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (...) {
    throw schema_error("config: bad numeric value for '" + key + "': " + s);
  }
}

std::uint64_t to_u64(const std::string& key, const std::string& s) {
  try {
    size_t pos = 0;
    const unsigned long long v = std::stoull(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (...) {
    throw schema_error("config: bad integer value for '" + key + "': " + s);
  }
}

}  // namespace

std::vector<double> parse_double_list(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    out.push_back(to_double("list", item));
  }
  return out;
}

std::string format_double_list(const std::vector<double>& v) {
  std::string out;
  for (size_t i = 0; i < v.size(); ++i) {
    if (i) out += ",";
    out += fmt_double(v[i]);
  }
  return out;
}

std::vector<Theorem> parse_theorem_list(const std::string& s) {
  std::vector<Theorem> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    if (item == "T1") out.push_back(Theorem::T1);
    else if (item == "T2") out.push_back(Theorem::T2);
    else if (item == "T3") out.push_back(Theorem::T3);
    else if (item == "T4") out.push_back(Theorem::T4);
    else if (item == "T5") out.push_back(Theorem::T5);
    else throw schema_error("config: unknown theorem '" + item + "'");
  }
  return out;
}

std::string format_theorem_list(const std::vector<Theorem>& v) {
  std::string out;
  for (size_t i = 0; i < v.size(); ++i) {
    if (i) out += ",";
    out += theorem_name(v[i]);
  }
  return out;
}

std::map<std::string, std::string> ExperimentConfig::to_flat_map() const {
  std::map<std::string, std::string> kv;
  kv["model.name"] = model_name;
  kv["model.gamma"] = fmt_double(model_gamma);
  kv["theta0"] = format_double_list(theta0);
  kv["theorems"] = format_theorem_list(theorems);
  kv["schedule.eps"] = format_double_list(schedule.eps_list);
  kv["schedule.a"] = fmt_double(schedule.a);
  kv["schedule.delta"] = fmt_double(schedule.delta);
  kv["schedule.lambda"] = fmt_double(schedule.lambda);
  kv["alpha"] = fmt_double(alpha);
  kv["omega.kind"] = omega_kind;
  kv["mc.n_rep"] = std::to_string(n_rep);
  kv["mc.seed"] = std::to_string(seed);
  kv["mc.grid_n"] = std::to_string(grid_n);
  kv["output.dir"] = output_dir;
  return kv;
}

ExperimentConfig ExperimentConfig::from_flat_map(
    const std::map<std::string, std::string>& kv) {
  ExperimentConfig cfg;
  for (const auto& [key, value] : kv) {
    if (key == "model.name") cfg.model_name = value;
    else if (key == "model.gamma") cfg.model_gamma = to_double(key, value);
    else if (key == "theta0") cfg.theta0 = parse_double_list(value);
    else if (key == "theorems") cfg.theorems = parse_theorem_list(value);
    else if (key == "schedule.eps") cfg.schedule.eps_list = parse_double_list(value);
    else if (key == "schedule.a") cfg.schedule.a = to_double(key, value);
    else if (key == "schedule.delta") cfg.schedule.delta = to_double(key, value);
    else if (key == "schedule.lambda") cfg.schedule.lambda = to_double(key, value);
    else if (key == "alpha") cfg.alpha = to_double(key, value);
    else if (key == "omega.kind") cfg.omega_kind = value;
    else if (key == "mc.n_rep") cfg.n_rep = to_u64(key, value);
    else if (key == "mc.seed") cfg.seed = to_u64(key, value);
    else if (key == "mc.grid_n") cfg.grid_n = static_cast<int>(to_u64(key, value));
    else if (key == "output.dir") cfg.output_dir = value;
    else throw schema_error("config: unknown key '" + key + "'");
  }
  return cfg;
}

ExperimentConfig ExperimentConfig::parse(const std::string& text) {
  std::map<std::string, std::string> kv;
  std::stringstream ss(text);
  std::string line;
  int lineno = 0;
  while (std::getline(ss, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw schema_error("config: line " + std::to_string(lineno) +
                         " is not 'key = value'");
    kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  return from_flat_map(kv);
}

ExperimentConfig ExperimentConfig::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw schema_error("config: cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

void ExperimentConfig::validate() const {
  const auto names = registered_models();
  if (std::find(names.begin(), names.end(), model_name) == names.end())
    throw schema_error("config: unknown model '" + model_name + "'");
  const auto violations = validate_schedule(schedule);
  if (!violations.empty()) {
    std::string msg = "config: schedule violations:";
    for (const auto& v : violations) {
      msg += "\n  ";
      if (v.eps > 0.0) msg += "eps=" + fmt_double(v.eps) + ": ";
      msg += v.what;
    }
    throw schema_error(msg);
  }
  if (!(alpha > 0.0 && alpha < 1.0))
    throw schema_error("config: alpha must lie in (0,1)");
  if (n_rep < 100) throw schema_error("config: mc.n_rep must be >= 100");
  if (grid_n < 8) throw schema_error("config: mc.grid_n must be >= 8");
  if (omega_kind != "ball" && omega_kind.rfind("ellipsoid:", 0) != 0)
    throw schema_error("config: omega.kind must be 'ball' or 'ellipsoid:a1,...,ad'");
  if (omega_kind.rfind("ellipsoid:", 0) == 0) {
    const auto axes = parse_double_list(omega_kind.substr(10));
    if (axes.empty())
      throw schema_error("config: ellipsoid needs at least one semi-axis");
    for (double a : axes)
      if (!(a > 0.0)) throw schema_error("config: ellipsoid semi-axes must be > 0");
  }
}

std::vector<ScheduleViolation> validate_schedule(const Schedule& s) {
  std::vector<ScheduleViolation> out;
  if (!(s.a > 0.0)) out.push_back({0.0, "u-rule coefficient a must be > 0"});
  if (!(s.lambda > 0.0 && s.lambda <= 1.0))
    out.push_back({0.0, "lambda must lie in (0,1]"});
  const double lower = 2.0 / (2.0 + s.lambda);
  if (!(s.delta > lower))
    out.push_back({0.0, "delta must exceed 2/(2+lambda) = " + std::to_string(lower)});
  if (!(s.delta < 1.0)) out.push_back({0.0, "delta must be < 1"});
  if (s.eps_list.empty()) out.push_back({0.0, "eps list is empty"});
  for (size_t i = 0; i < s.eps_list.size(); ++i) {
    const double eps = s.eps_list[i];
    if (!(eps > 0.0)) {
      out.push_back({eps, "eps must be > 0"});
      continue;
    }
    if (i > 0 && !(eps < s.eps_list[i - 1]))
      out.push_back({eps, "eps list must be strictly decreasing"});
    if (i > 0 && s.eps_list[i - 1] > 0.0) {
      const double prev = s.eps_list[i - 1];
      const auto zone1 = [&](double e) { return s.u(e) / e; };
      const auto zone2 = [&](double e) {
        return std::pow(s.u(e), 2.0 + s.lambda) / (e * e);
      };
      if (!(zone1(eps) > zone1(prev)))
        out.push_back({eps, "eps^{-1} u_eps fails to increase along the schedule"});
      if (!(zone2(eps) < zone2(prev)))
        out.push_back(
            {eps, "eps^{-2} u_eps^{2+lambda} fails to decrease along the schedule"});
    }
  }
  return out;
}

std::string sha256_hex(const std::string& bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr);
  static const char* hex = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(hex[digest[i] >> 4]);
    out.push_back(hex[digest[i] & 0xf]);
  }
  return out;
}

}  // namespace mdev
