#include "mdfem/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace mdfem {

std::function<double(double)> named_function(const std::string& name) {
  if (name == "one") return [](double) { return 1.0; };
  if (name == "x") return [](double x) { return x; };
  if (name == "sinpi") return [](double x) { return std::sin(M_PI * x); };
  if (name == "pi2sinpi") return [](double x) { return M_PI * M_PI * std::sin(M_PI * x); };
  throw std::invalid_argument("named_function: unknown name '" + name + "'");
}

Problem RunConfig::make_problem() const {
  Problem p;
  if (family == "sine")
    p.field.family = PhiFamily::Sine;
  else if (family == "haar")
    p.field.family = PhiFamily::HaarLike;
  else
    throw std::invalid_argument("config: unknown field family '" + family + "'");
  p.field.c = c;
  p.field.sigma = sigma;
  if (b_family == "power")
    p.field.b_family = BFamily::PowerLaw;
  else if (b_family == "geometric")
    p.field.b_family = BFamily::Geometric;
  else
    throw std::invalid_argument("config: unknown b family '" + b_family + "'");
  p.field.b_exponent = b_exponent;
  p.field.jmax = jmax;
  p.source = named_function(f);
  p.functional = named_function(g);
  p.degree = r;
  p.tau = tau;
  p.dprime = dprime();
  p.pstar = pstar;
  p.validate();
  derive_rates(pstar, tau, p.dprime);  // rejects the wrong branch at load time
  return p;
}

ConstantsMode RunConfig::constants_mode() const {
  if (constants == "practical") return ConstantsMode::Practical;
  if (constants == "theoretical") return ConstantsMode::Theoretical;
  throw std::invalid_argument("config: constants must be practical|theoretical");
}

RefMethod RunConfig::reference_method() const {
  if (ref_method == "auto") return RefMethod::Auto;
  if (ref_method == "gh") return RefMethod::GaussHermite;
  if (ref_method == "qmc") return RefMethod::Qmc;
  throw std::invalid_argument("config: ref_method must be auto|gh|qmc");
}

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

std::vector<double> parse_list(const std::string& v) {
  std::vector<double> out;
  std::istringstream is(v);
  std::string item;
  while (std::getline(is, item, ',')) out.push_back(std::stod(trim(item)));
  if (out.empty()) throw std::invalid_argument("config: empty list");
  return out;
}

}  // namespace

RunConfig parse_config(const std::string& text) {
  RunConfig cfg;
  std::istringstream is(text);
  std::string line, section;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw std::invalid_argument("config: bad section at line " + std::to_string(lineno));
      section = line.substr(1, line.size() - 2);
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config: expected key = value at line " + std::to_string(lineno));
    const std::string key = trim(line.substr(0, eq));
    const std::string val = trim(line.substr(eq + 1));
    const std::string qual = section + "." + key;
    try {
      if (qual == "field.family") cfg.family = val;
      else if (qual == "field.c") cfg.c = std::stod(val);
      else if (qual == "field.sigma") cfg.sigma = std::stod(val);
      else if (qual == "field.b_family") cfg.b_family = val;
      else if (qual == "field.b_exponent") cfg.b_exponent = std::stod(val);
      else if (qual == "field.jmax") cfg.jmax = std::stoi(val);
      else if (qual == "pde.f") cfg.f = val;
      else if (qual == "pde.g") cfg.g = val;
      else if (qual == "pde.r") cfg.r = std::stoi(val);
      else if (qual == "pde.tau") cfg.tau = std::stod(val);
      else if (qual == "rates.pstar") cfg.pstar = std::stod(val);
      else if (qual == "rates.delta_prime") cfg.delta_prime = std::stod(val);
      else if (qual == "rates.constants") cfg.constants = val;
      else if (qual == "rates.c_practical") cfg.c_practical = std::stod(val);
      else if (qual == "experiment.epsilons") cfg.epsilons = parse_list(val);
      else if (qual == "experiment.s_ref") cfg.s_ref = std::stoi(val);
      else if (qual == "experiment.n_ref") cfg.n_ref = std::stoi(val);
      else if (qual == "experiment.h_ref") cfg.h_ref = std::stod(val);
      else if (qual == "experiment.ref_method") cfg.ref_method = val;
      else if (qual == "experiment.ref_tol") cfg.ref_tol = std::stod(val);
      else if (qual == "output.csv") cfg.out_csv = val;
      else throw std::invalid_argument("unknown key");
    } catch (const std::exception& e) {
      throw std::invalid_argument("config: bad entry '" + qual + "' at line " +
                                  std::to_string(lineno) + ": " + e.what());
    }
  }
  cfg.make_problem();  // validate cross-constraints now
  cfg.constants_mode();
  cfg.reference_method();
  return cfg;
}

std::string serialize_config(const RunConfig& cfg) {
  std::ostringstream os;
  os.precision(17);
  os << "[field]\n";
  os << "family = " << cfg.family << "\n";
  os << "c = " << cfg.c << "\n";
  os << "sigma = " << cfg.sigma << "\n";
  os << "b_family = " << cfg.b_family << "\n";
  os << "b_exponent = " << cfg.b_exponent << "\n";
  os << "jmax = " << cfg.jmax << "\n";
  os << "[pde]\n";
  os << "f = " << cfg.f << "\n";
  os << "g = " << cfg.g << "\n";
  os << "r = " << cfg.r << "\n";
  os << "tau = " << cfg.tau << "\n";
  os << "[rates]\n";
  os << "pstar = " << cfg.pstar << "\n";
  os << "delta_prime = " << cfg.delta_prime << "\n";
  os << "constants = " << cfg.constants << "\n";
  os << "c_practical = " << cfg.c_practical << "\n";
  os << "[experiment]\n";
  os << "epsilons = ";
  for (std::size_t i = 0; i < cfg.epsilons.size(); ++i)
    os << (i ? "," : "") << cfg.epsilons[i];
  os << "\n";
  os << "s_ref = " << cfg.s_ref << "\n";
  os << "n_ref = " << cfg.n_ref << "\n";
  os << "h_ref = " << cfg.h_ref << "\n";
  os << "ref_method = " << cfg.ref_method << "\n";
  os << "ref_tol = " << cfg.ref_tol << "\n";
  if (!cfg.out_csv.empty()) {
    os << "[output]\n";
    os << "csv = " << cfg.out_csv << "\n";
  }
  return os.str();
}

RunConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

}  // namespace mdfem
