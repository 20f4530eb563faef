#pragma once

#include <string>
#include <vector>

#include "pvi/numerics.hpp"

namespace pvi {

// Parameters are kept as strings and parsed at the requested precision. Real values accept
// products and quotients of decimals and "pi" ("pi/3", "2*pi/3"); complex values are "re" or "re,im".
struct RunConfig {
  std::string command;  // moments, compute, verify, app
  std::string model = "generalized";  // generalized, cue-gap, cue-charpoly, ising-low, ising-high
  std::string mu = "0";
  std::string omega1 = "0";
  std::string omega2 = "0";
  std::string xi = "0";
  std::string t_re = "1";
  std::string t_im = "0";
  std::string phi;  // generalized model: t = e^{i phi} when given
  std::string k = "1";
  std::string u = "0";
  int n_max = 10;
  std::vector<std::string> routes{"oracle", "TwoTwoA"};
  int bits = 256;
  double tol = 1e-30;
  std::string format = "csv";
  std::string out;  // empty: stdout
  unsigned seed = 1;
  int samples = 8;

  void validate() const;
};

enum ExitCode { kExitOk = 0, kExitUsage = 1, kExitAgreement = 2, kExitDomain = 3 };

struct CommandOutput {
  std::string text;
  int exit_code = kExitOk;
};

std::string cmd_moments(const RunConfig& cfg, int& exit_code);
std::string cmd_compute(const RunConfig& cfg, int& exit_code);
std::string cmd_verify(const RunConfig& cfg, int& exit_code);
std::string cmd_app(const RunConfig& cfg, int& exit_code);

// Dispatches on cfg.command. Library errors become kExitDomain with the message on the text.
CommandOutput run_command(const RunConfig& cfg);

// Numeric arguments: decimals, pi and inf combined with * and /, e.g. "pi/3". Complex values are "re" or
// "re,im". Parsed at the current working precision.
Real parse_real(const std::string& s);
Complex parse_complex(const std::string& s);

// Default precision: PVI_DEFAULT_BITS when set and valid, otherwise 256.
int default_bits();

// Writes to a temporary file in the target directory and renames it over the target.
void write_atomic(const std::string& path, const std::string& content);

int cli_main(int argc, char** argv);

}  // namespace pvi
