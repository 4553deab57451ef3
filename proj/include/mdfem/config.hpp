#ifndef MDFEM_CONFIG_HPP
#define MDFEM_CONFIG_HPP

#include <string>
#include <vector>

#include "mdfem/allocate.hpp"
#include "mdfem/driver.hpp"

namespace mdfem {

// Flat key-value run configuration with sections; see parse_config.
struct RunConfig {
  // [field]
  std::string family = "sine";  // sine | haar
  double c = 0.25;
  double sigma = 3.0;
  std::string b_family = "power";  // power | geometric
  double b_exponent = 3.0;
  int jmax = 64;
  // [pde]
  std::string f = "one";  // one | x | sinpi | pi2sinpi
  std::string g = "one";
  int r = 1;
  double tau = 2.0;
  // [rates]
  double pstar = 0.38;
  double delta_prime = 0.0;     // d' = 1 + delta' (d = 1)
  std::string constants = "practical";  // practical | theoretical
  double c_practical = 1.0;
  // [experiment]
  std::vector<double> epsilons = {0.5, 0.25, 0.125, 0.0625, 0.03125, 0.015625};
  int s_ref = 5;
  int n_ref = 16;
  double h_ref = 1.0 / 256;
  std::string ref_method = "auto";  // auto | gh | qmc
  double ref_tol = 1e-4;
  // [output]
  std::string out_csv;  // empty = stdout

  double dprime() const { return 1.0 + delta_prime; }
  Problem make_problem() const;       // validates
  ConstantsMode constants_mode() const;
  RefMethod reference_method() const;
};

// Parse the "key = value" format with [section] headers, '#' comments.
// Unknown keys are an error; cross-constraints are checked.
RunConfig parse_config(const std::string& text);
std::string serialize_config(const RunConfig& cfg);

RunConfig load_config_file(const std::string& path);

// Named closed-form functions used for f and g.
std::function<double(double)> named_function(const std::string& name);

}  // namespace mdfem

#endif
