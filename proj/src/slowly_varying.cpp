#include "mbpi/slowly_varying.hpp"

#include <cmath>
#include <regex>
#include <sstream>

#include "mbpi/errors.hpp"

namespace mbpi {

namespace {

std::string format_number(double x) {
  std::ostringstream os;
  os.precision(17);
  os << x;
  return os.str();
}

}  // namespace

SlowlyVaryingSpec SlowlyVaryingSpec::constant(double c) {
  if (!(c > 0.0)) throw DomainError("constant slowly varying spec needs c > 0");
  SlowlyVaryingSpec spec;
  spec.name = "constant(" + format_number(c) + ")";
  spec.value = [c](double) { return c; };
  spec.limit = c;
  spec.remainder = [](double x) { return 1.0 / x; };
  return spec;
}

SlowlyVaryingSpec SlowlyVaryingSpec::perturbed(double c, double kappa, double exponent) {
  if (!(c > 0.0) || kappa < 0.0 || !(exponent > 0.0)) {
    throw DomainError("perturbed slowly varying spec needs c > 0, kappa >= 0, exponent > 0");
  }
  SlowlyVaryingSpec spec;
  spec.name = "perturbed(" + format_number(c) + "," + format_number(kappa) + "," + format_number(exponent) + ")";
  spec.value = [c, kappa, exponent](double x) { return c * (1.0 + kappa * std::pow(x, -exponent)); };
  spec.limit = c;
  spec.remainder = [exponent](double x) { return std::pow(x, -exponent); };
  return spec;
}

SlowlyVaryingSpec SlowlyVaryingSpec::logarithmic(double declared_exponent) {
  SlowlyVaryingSpec spec;
  spec.name = "log";
  spec.value = [](double x) { return 1.0 + std::log(x); };
  spec.remainder = [declared_exponent](double x) { return std::pow(x, -declared_exponent); };
  return spec;
}

SlowlyVaryingSpec SlowlyVaryingSpec::parse(const std::string& text) {
  static const std::regex kCall(R"(\s*(\w+)\s*(?:\(([^)]*)\))?\s*)");
  std::smatch m;
  if (!std::regex_match(text, m, kCall)) throw ConfigError("cannot parse slowly varying spec '" + text + "'");
  const std::string head = m[1];
  std::vector<double> args;
  if (m[2].matched) {
    std::stringstream ss(m[2].str());
    std::string item;
    while (std::getline(ss, item, ',')) {
      try {
        size_t used = 0;
        args.push_back(std::stod(item, &used));
        if (item.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument(item);
      } catch (const std::exception&) {
        throw ConfigError("bad argument '" + item + "' in slowly varying spec '" + text + "'");
      }
    }
  }
  if (head == "constant" && args.size() == 1) return constant(args[0]);
  if (head == "perturbed" && args.size() == 3) return perturbed(args[0], args[1], args[2]);
  if (head == "log" && args.empty()) return logarithmic();
  throw ConfigError("unknown slowly varying spec '" + text + "'");
}

}  // namespace mbpi
