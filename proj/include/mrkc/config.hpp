#pragma once

// Run configuration and its flat key=value file format. The grammar is
// documented in the README: [section] headers, one key = value pair per
// line, '#' comments, values whitespace-separated.

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "mrkc/cheb.hpp"
#include "mrkc/core.hpp"

namespace mrkc {

enum class Method { rkc, mrkc, emrkc, emrkc_progressive, imex_rl, exex_rl };

std::string method_name(Method m);
Method parse_method(const std::string& name);  // throws ConfigError

struct RunConfig {
  // [grid]
  int dim = 1;
  std::array<double, 3> extent{20.0, 0.0, 0.0};
  std::array<double, 3> dx{0.1, 0.0, 0.0};

  // [model]
  std::string model = "hh";

  // [run]
  Method method = Method::emrkc;
  double dt = 0.1;
  double t_end = 30.0;
  double epsilon = kDefaultDamping;

  // [stimulus]
  double stim_amplitude = 50.0;  // chi*I_stim [uA/mm^3]
  std::array<double, 3> stim_lo{0.0, 0.0, 0.0};
  std::array<double, 3> stim_hi{1.5, 1.5, 1.5};
  double stim_t0 = 0.0;
  double stim_t1 = 2.0;

  // [experiment]
  std::vector<double> dts;
  std::vector<Method> methods;
  std::optional<double> reference_dt;

  // [output]
  std::string out_dir = "out";
  std::string snapshot;  // optional snapshot CSV filename

  int threads = 1;  // CLI-level; not part of the file format
};

RunConfig parse_config_text(const std::string& text,
                            const std::string& origin = "<config>");
RunConfig parse_config_file(const std::string& path);

// Structural validation (throws ConfigError): positive steps, t_end an
// integer multiple of dt, known method/model names.
void validate(const RunConfig& cfg);

// Number of steps for a dt that divides t_end; throws ConfigError if the
// division leaves a partial step.
long step_count(double t_end, double dt);

// Nearest dt that divides t_end (used by scan drivers to keep the
// integer-multiple rule while scanning arbitrary values).
double snap_dt(double t_end, double dt);

}  // namespace mrkc
