#include "mrkc/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace mrkc {

std::string method_name(Method m) {
  switch (m) {
    case Method::rkc: return "rkc";
    case Method::mrkc: return "mrkc";
    case Method::emrkc: return "emrkc";
    case Method::emrkc_progressive: return "emrkc-progressive";
    case Method::imex_rl: return "imex-rl";
    case Method::exex_rl: return "exex-rl";
  }
  return "?";
}

Method parse_method(const std::string& name) {
  if (name == "rkc") return Method::rkc;
  if (name == "mrkc") return Method::mrkc;
  if (name == "emrkc") return Method::emrkc;
  if (name == "emrkc-progressive") return Method::emrkc_progressive;
  if (name == "imex-rl") return Method::imex_rl;
  if (name == "exex-rl") return Method::exex_rl;
  throw ConfigError("unknown method: " + name);
}

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

std::vector<std::string> split_ws(const std::string& s) {
  std::istringstream iss(s);
  std::vector<std::string> out;
  std::string tok;
  while (iss >> tok) out.push_back(tok);
  return out;
}

double parse_num(const std::string& s, const std::string& where) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ConfigError(where + ": expected a number, got '" + s + "'");
  }
}

}  // namespace

RunConfig parse_config_text(const std::string& text,
                            const std::string& origin) {
  RunConfig cfg;
  std::istringstream in(text);
  std::string line, section;
  int lineno = 0;

  const auto fail = [&](const std::string& msg) -> void {
    throw ConfigError(origin + ":" + std::to_string(lineno) + ": " + msg);
  };

  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos)
      line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;

    if (line.front() == '[') {
      if (line.back() != ']') fail("unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }

    const auto eq = line.find('=');
    if (eq == std::string::npos) fail("expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    const std::vector<std::string> vals = split_ws(value);
    const std::string where = section + "." + key;

    const auto need = [&](std::size_t n) {
      if (vals.size() != n)
        fail(where + ": expected " + std::to_string(n) + " value(s)");
    };
    const auto fill_axes = [&](std::array<double, 3>& dst) {
      if (vals.empty() || vals.size() > 3) fail(where + ": expected 1-3 values");
      for (std::size_t i = 0; i < vals.size(); ++i)
        dst[i] = parse_num(vals[i], where);
    };

    if (section == "grid") {
      if (key == "dim") {
        need(1);
        cfg.dim = static_cast<int>(parse_num(vals[0], where));
      } else if (key == "extent") {
        fill_axes(cfg.extent);
      } else if (key == "dx") {
        fill_axes(cfg.dx);
      } else {
        fail("unknown key '" + key + "' in [grid]");
      }
    } else if (section == "model") {
      if (key == "name") {
        need(1);
        cfg.model = vals[0];
      } else {
        fail("unknown key '" + key + "' in [model]");
      }
    } else if (section == "run") {
      if (key == "method") {
        need(1);
        try {
          cfg.method = parse_method(vals[0]);
        } catch (const ConfigError& e) {
          fail(e.what());
        }
      } else if (key == "dt") {
        need(1);
        cfg.dt = parse_num(vals[0], where);
      } else if (key == "t_end") {
        need(1);
        cfg.t_end = parse_num(vals[0], where);
      } else if (key == "epsilon") {
        need(1);
        cfg.epsilon = parse_num(vals[0], where);
      } else {
        fail("unknown key '" + key + "' in [run]");
      }
    } else if (section == "stimulus") {
      if (key == "amplitude") {
        need(1);
        cfg.stim_amplitude = parse_num(vals[0], where);
      } else if (key == "box") {
        if (vals.size() % 2 != 0 || vals.empty() || vals.size() > 6)
          fail(where + ": expected lo hi per axis");
        for (std::size_t a = 0; a < vals.size() / 2; ++a) {
          cfg.stim_lo[a] = parse_num(vals[2 * a], where);
          cfg.stim_hi[a] = parse_num(vals[2 * a + 1], where);
        }
      } else if (key == "window") {
        need(2);
        cfg.stim_t0 = parse_num(vals[0], where);
        cfg.stim_t1 = parse_num(vals[1], where);
      } else {
        fail("unknown key '" + key + "' in [stimulus]");
      }
    } else if (section == "experiment") {
      if (key == "dts") {
        cfg.dts.clear();
        for (const auto& v : vals) cfg.dts.push_back(parse_num(v, where));
      } else if (key == "methods") {
        cfg.methods.clear();
        for (const auto& v : vals) {
          try {
            cfg.methods.push_back(parse_method(v));
          } catch (const ConfigError& e) {
            fail(e.what());
          }
        }
      } else if (key == "reference_dt") {
        need(1);
        cfg.reference_dt = parse_num(vals[0], where);
      } else {
        fail("unknown key '" + key + "' in [experiment]");
      }
    } else if (section == "output") {
      if (key == "dir") {
        need(1);
        cfg.out_dir = vals[0];
      } else if (key == "snapshot") {
        need(1);
        cfg.snapshot = vals[0];
      } else {
        fail("unknown key '" + key + "' in [output]");
      }
    } else if (section.empty()) {
      fail("key '" + key + "' outside any [section]");
    } else {
      fail("unknown section [" + section + "]");
    }
  }
  return cfg;
}

RunConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str(), path);
}

long step_count(double t_end, double dt) {
  if (!(dt > 0.0)) throw ConfigError("dt must be > 0");
  if (!(t_end > 0.0)) throw ConfigError("t_end must be > 0");
  const double ratio = t_end / dt;
  const long n = std::lround(ratio);
  if (n < 1 || std::abs(ratio - static_cast<double>(n)) > 1e-9 * ratio)
    throw ConfigError("t_end must be an integer multiple of dt");
  return n;
}

double snap_dt(double t_end, double dt) {
  const long n = std::max(1l, std::lround(t_end / dt));
  return t_end / static_cast<double>(n);
}

void validate(const RunConfig& cfg) {
  if (cfg.dim < 1 || cfg.dim > 3) throw ConfigError("dim must be 1, 2, or 3");
  for (int a = 0; a < cfg.dim; ++a) {
    if (!(cfg.extent[a] > 0.0)) throw ConfigError("extent must be positive");
    if (!(cfg.dx[a] > 0.0)) throw ConfigError("dx must be positive");
  }
  if (cfg.epsilon < 0.0 || cfg.epsilon >= 1.5)
    throw ConfigError("epsilon must be in [0, 1.5)");
  if (cfg.stim_t1 < cfg.stim_t0)
    throw ConfigError("stimulus window must have start <= end");
  if (cfg.stim_amplitude < 0.0)
    throw ConfigError("stimulus amplitude must be >= 0");
  step_count(cfg.t_end, cfg.dt);
}

}  // namespace mrkc
