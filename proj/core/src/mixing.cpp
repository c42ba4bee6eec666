#include "meanfield/mixing.hpp"

#include <cmath>
#include <sstream>

#include "meanfield/error.hpp"

namespace mf {

MixingPolynomial::MixingPolynomial(std::vector<double> coefficients) : coeffs_(std::move(coefficients)) {
  while (!coeffs_.empty() && coeffs_.back() == 0.0) coeffs_.pop_back();
  require(coeffs_.size() >= 3, ErrorKind::invalid_input, "mixing polynomial has no active degree k >= 2");
  for (std::size_t k = 0; k < coeffs_.size(); ++k) {
    const double c = coeffs_[k];
    require(std::isfinite(c) && c >= 0.0, ErrorKind::invalid_input, "mixing coefficients must be finite and >= 0");
    require(k >= 2 || c == 0.0, ErrorKind::invalid_input, "mixing degrees must be >= 2");
  }
}

MixingPolynomial MixingPolynomial::parse(const std::string& text) {
  std::vector<double> coeffs;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto colon = item.find(':');
    require(colon != std::string::npos, ErrorKind::usage, "mixing term '" + item + "' is not coeff:degree");
    double c = 0.0;
    int k = 0;
    try {
      std::size_t used = 0;
      c = std::stod(item.substr(0, colon), &used);
      require(used == colon, ErrorKind::usage, "bad coefficient in '" + item + "'");
      const std::string deg = item.substr(colon + 1);
      k = std::stoi(deg, &used);
      require(used == deg.size(), ErrorKind::usage, "bad degree in '" + item + "'");
    } catch (const std::logic_error&) {
      fail(ErrorKind::usage, "cannot parse mixing term '" + item + "'");
    }
    require(k >= 2 && k <= 64, ErrorKind::usage, "mixing degree out of range in '" + item + "'");
    if (static_cast<int>(coeffs.size()) <= k) coeffs.resize(k + 1, 0.0);
    coeffs[k] += c;
  }
  return MixingPolynomial(std::move(coeffs));
}

std::string MixingPolynomial::to_string() const {
  std::ostringstream out;
  out.precision(17);
  bool first = true;
  for (std::size_t k = 2; k < coeffs_.size(); ++k) {
    if (coeffs_[k] == 0.0) continue;
    if (!first) out << ',';
    out << coeffs_[k] << ':' << k;
    first = false;
  }
  return out.str();
}

double MixingPolynomial::coefficient(int k) const {
  return (k >= 0 && k < static_cast<int>(coeffs_.size())) ? coeffs_[k] : 0.0;
}

std::vector<int> MixingPolynomial::active_degrees() const {
  std::vector<int> out;
  for (std::size_t k = 2; k < coeffs_.size(); ++k)
    if (coeffs_[k] > 0.0) out.push_back(static_cast<int>(k));
  return out;
}

double MixingPolynomial::eval(double t, int derivative) const {
  // Horner on the differentiated coefficients.
  double acc = 0.0;
  for (int k = max_degree(); k >= derivative; --k) {
    double c = coeffs_[k];
    for (int d = 0; d < derivative; ++d) c *= (k - d);
    acc = acc * t + c;
  }
  return acc;
}

namespace {
void check_unit(double t) {
  require(t >= -1e-12 && t <= 1.0 + 1e-12, ErrorKind::domain, "mixing argument t must lie in [0, 1]");
}
}  // namespace

double MixingPolynomial::xi(double t) const { check_unit(t); return eval(t, 0); }
double MixingPolynomial::xi_prime(double t) const { check_unit(t); return eval(t, 1); }
double MixingPolynomial::xi_second(double t) const { check_unit(t); return eval(t, 2); }
double MixingPolynomial::xi_third(double t) const { check_unit(t); return eval(t, 3); }

}  // namespace mf
