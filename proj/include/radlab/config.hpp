#pragma once

// Flat run configuration: one `key = value` per line, `#` starts a comment.

#include <charconv>
#include <cstdint>
#include <cstdio>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>

#include "radlab/lagrangian_solver.hpp"

namespace radlab {

class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::size_t line, std::string key, const std::string& what)
      : std::runtime_error(line ? "line " + std::to_string(line) + ": " + what : what),
        line_(line),
        key_(std::move(key)) {}
  std::size_t line() const { return line_; }
  const std::string& key() const { return key_; }

 private:
  std::size_t line_;
  std::string key_;
};

enum class ProfileFamily { Constant, PolynomialBump };

struct RunConfig {
  int N = 3;
  double R = 1.0;
  std::size_t J = 128;
  GasParams gas;
  ProfileFamily profile = ProfileFamily::Constant;
  double rho0 = 1.0;     // background density
  double rho_amp = 0.0;  // rho = rho0 (1 + rho_amp (1 - (r/R)^2)^2)
  double u_amp = 0.0;    // u = u_amp r (R - r) / R^2
  double t_end = 0.1;
  double output_interval = 0.0;  // 0 records every step
  double cfl = 0.4;
  std::uint64_t seed = 0;
  Splitting splitting = Splitting::FirstOrder;
  double dt = 0.0;  // fixed step when > 0
  double delta = 1e-3;
  std::size_t profile_grid = 2048;
  double repr_tol = 1e-3;
  double energy_tol = 1e-8;
  double volume_tol = 1e-8;
};

inline const char* to_string(ProfileFamily p) {
  return p == ProfileFamily::Constant ? "constant" : "polynomial-bump";
}

inline const char* to_string(Splitting s) {
  return s == Splitting::Strang ? "strang" : "first-order";
}

namespace detail {

inline std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

template <class T>
T parse_number(std::string_view text, std::size_t line, const std::string& key) {
  T out{};
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, out);
  if (ec != std::errc() || ptr != end)
    throw ConfigError(line, key, key + ": cannot parse '" + std::string(text) + "'");
  return out;
}

}  // namespace detail

/// Validates physical and numerical constraints; errors name the key.
inline void validate(const RunConfig& c) {
  auto fail = [](const char* key, const std::string& what) {
    throw ConfigError(0, key, std::string(key) + ": " + what);
  };
  if (c.N != 2 && c.N != 3) fail("N", "dimension must be 2 or 3");
  if (!(c.R > 0.0) || !std::isfinite(c.R)) fail("R", "radius must be > 0");
  if (c.J < 32) fail("J", "at least 32 cells are required");
  try {
    c.gas.validate(c.N);
  } catch (const std::invalid_argument& e) {
    const std::string msg = e.what();
    throw ConfigError(0, msg.substr(0, msg.find(':')), msg);
  }
  if (!(c.rho0 > 0.0)) fail("rho0", "background density must be > 0");
  if (!(c.rho_amp > -1.0) || !std::isfinite(c.rho_amp))
    fail("rho_amp", "amplitude must be > -1 to keep the density positive");
  if (!std::isfinite(c.u_amp)) fail("u_amp", "must be finite");
  if (!(c.t_end > 0.0) || !std::isfinite(c.t_end)) fail("t_end", "must be > 0");
  if (!(c.output_interval >= 0.0)) fail("output_interval", "must be >= 0");
  if (!(c.cfl > 0.0) || c.cfl > 1.0) fail("cfl", "must lie in (0, 1]");
  if (!(c.dt >= 0.0)) fail("dt", "must be >= 0");
  if (!(c.delta > -1.0) || !std::isfinite(c.delta)) fail("delta", "must be > -1");
  if (c.profile_grid < RadialGrid::min_intervals) fail("profile_grid", "must be >= 16");
  if (!(c.repr_tol > 0.0)) fail("repr_tol", "must be > 0");
  if (!(c.energy_tol >= 0.0)) fail("energy_tol", "must be >= 0");
  if (!(c.volume_tol > 0.0)) fail("volume_tol", "must be > 0");
}

inline RunConfig parse_config(std::string_view text) {
  static const std::set<std::string> required{"N", "R", "J", "a", "gamma", "mu", "lambda",
                                              "profile", "t_end"};
  RunConfig c;
  std::map<std::string, std::size_t> seen;
  std::size_t line_no = 0;
  while (!text.empty()) {
    ++line_no;
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos)
      throw ConfigError(line_no, "", "expected 'key = value', got '" + std::string(line) + "'");
    const std::string key(detail::trim(line.substr(0, eq)));
    const std::string_view val = detail::trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError(line_no, "", "missing key before '='");
    if (val.empty()) throw ConfigError(line_no, key, key + ": missing value");
    if (seen.count(key))
      throw ConfigError(line_no, key,
                        key + ": duplicate key (first set on line " + std::to_string(seen[key]) + ")");
    seen[key] = line_no;

    auto num = [&](auto& field) {
      field = detail::parse_number<std::remove_reference_t<decltype(field)>>(val, line_no, key);
    };
    if (key == "N") num(c.N);
    else if (key == "R") num(c.R);
    else if (key == "J") num(c.J);
    else if (key == "a") num(c.gas.a);
    else if (key == "gamma") num(c.gas.gamma);
    else if (key == "mu") num(c.gas.mu);
    else if (key == "lambda") num(c.gas.lambda);
    else if (key == "rho0") num(c.rho0);
    else if (key == "rho_amp") num(c.rho_amp);
    else if (key == "u_amp") num(c.u_amp);
    else if (key == "t_end") num(c.t_end);
    else if (key == "output_interval") num(c.output_interval);
    else if (key == "cfl") num(c.cfl);
    else if (key == "seed") num(c.seed);
    else if (key == "dt") num(c.dt);
    else if (key == "delta") num(c.delta);
    else if (key == "profile_grid") num(c.profile_grid);
    else if (key == "repr_tol") num(c.repr_tol);
    else if (key == "energy_tol") num(c.energy_tol);
    else if (key == "volume_tol") num(c.volume_tol);
    else if (key == "profile") {
      if (val == "constant") c.profile = ProfileFamily::Constant;
      else if (val == "polynomial-bump") c.profile = ProfileFamily::PolynomialBump;
      else
        throw ConfigError(line_no, key,
                          "profile: expected constant or polynomial-bump, got '" + std::string(val) + "'");
    } else if (key == "splitting") {
      if (val == "first-order") c.splitting = Splitting::FirstOrder;
      else if (val == "strang") c.splitting = Splitting::Strang;
      else
        throw ConfigError(line_no, key,
                          "splitting: expected first-order or strang, got '" + std::string(val) + "'");
    } else {
      throw ConfigError(line_no, key, "unknown key '" + key + "'");
    }
  }
  for (const auto& k : required)
    if (!seen.count(k)) throw ConfigError(0, k, k + ": required key is missing");
  validate(c);
  return c;
}

/// Serializes every key; parse_config(to_text(c)) reproduces c.
inline std::string to_text(const RunConfig& c) {
  std::string out;
  char buf[128];
  auto put = [&](const char* key, double x) {
    std::snprintf(buf, sizeof buf, "%s = %.17g\n", key, x);
    out += buf;
  };
  auto put_int = [&](const char* key, unsigned long long x) {
    std::snprintf(buf, sizeof buf, "%s = %llu\n", key, x);
    out += buf;
  };
  put_int("N", static_cast<unsigned long long>(c.N));
  put("R", c.R);
  put_int("J", c.J);
  put("a", c.gas.a);
  put("gamma", c.gas.gamma);
  put("mu", c.gas.mu);
  put("lambda", c.gas.lambda);
  out += std::string("profile = ") + to_string(c.profile) + "\n";
  put("rho0", c.rho0);
  put("rho_amp", c.rho_amp);
  put("u_amp", c.u_amp);
  put("t_end", c.t_end);
  put("output_interval", c.output_interval);
  put("cfl", c.cfl);
  put_int("seed", c.seed);
  out += std::string("splitting = ") + to_string(c.splitting) + "\n";
  put("dt", c.dt);
  put("delta", c.delta);
  put_int("profile_grid", c.profile_grid);
  put("repr_tol", c.repr_tol);
  put("energy_tol", c.energy_tol);
  put("volume_tol", c.volume_tol);
  return out;
}

}  // namespace radlab
