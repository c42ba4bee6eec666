#include "meanfield/prior.hpp"

#include <cmath>
#include <sstream>

#include "meanfield/error.hpp"

namespace mf {

PriorSpec PriorSpec::rademacher() { return PriorSpec{}; }

PriorSpec PriorSpec::gaussian() {
  PriorSpec s;
  s.kind = Kind::gaussian;
  return s;
}

PriorSpec PriorSpec::sparse_rademacher(double epsilon) {
  PriorSpec s;
  s.kind = Kind::sparse_rademacher;
  s.epsilon = epsilon;
  s.validate();
  return s;
}

PriorSpec PriorSpec::two_point(double a, double b, double p) {
  PriorSpec s;
  s.kind = Kind::two_point;
  s.a = a;
  s.b = b;
  s.p = p;
  s.validate();
  return s;
}

PriorSpec PriorSpec::parse(const std::string& text) {
  auto numbers = [&](const std::string& body) {
    std::vector<double> out;
    std::stringstream ss(body);
    std::string item;
    while (std::getline(ss, item, ',')) {
      try {
        std::size_t used = 0;
        out.push_back(std::stod(item, &used));
        require(used == item.size(), ErrorKind::usage, "bad number '" + item + "' in prior");
      } catch (const std::logic_error&) {
        fail(ErrorKind::usage, "bad number '" + item + "' in prior");
      }
    }
    return out;
  };
  if (text == "rademacher") return rademacher();
  if (text == "gaussian") return gaussian();
  const auto colon = text.find(':');
  const std::string head = text.substr(0, colon);
  const std::string body = colon == std::string::npos ? "" : text.substr(colon + 1);
  if (head == "sparse") {
    const auto v = numbers(body);
    require(v.size() == 1, ErrorKind::usage, "sparse prior takes one parameter");
    return sparse_rademacher(v[0]);
  }
  if (head == "twopoint") {
    const auto v = numbers(body);
    require(v.size() == 3, ErrorKind::usage, "twopoint prior takes a,b,p");
    return two_point(v[0], v[1], v[2]);
  }
  fail(ErrorKind::usage, "unknown prior '" + text + "'");
}

std::string PriorSpec::to_string() const {
  std::ostringstream out;
  out.precision(17);
  switch (kind) {
    case Kind::rademacher: out << "rademacher"; break;
    case Kind::gaussian: out << "gaussian"; break;
    case Kind::sparse_rademacher: out << "sparse:" << epsilon; break;
    case Kind::two_point: out << "twopoint:" << a << ',' << b << ',' << p; break;
  }
  return out.str();
}

std::vector<std::pair<double, double>> PriorSpec::atoms() const {
  switch (kind) {
    case Kind::rademacher: return {{-1.0, 0.5}, {1.0, 0.5}};
    case Kind::gaussian: return {};
    case Kind::sparse_rademacher: {
      const double v = 1.0 / std::sqrt(epsilon);
      std::vector<std::pair<double, double>> out{{-v, 0.5 * epsilon}};
      if (epsilon < 1.0) out.emplace_back(0.0, 1.0 - epsilon);
      out.emplace_back(v, 0.5 * epsilon);
      return out;
    }
    case Kind::two_point: {
      std::vector<std::pair<double, double>> out;
      if (p > 0.0) out.emplace_back(a, p);
      if (p < 1.0) out.emplace_back(b, 1.0 - p);
      return out;
    }
  }
  return {};
}

double PriorSpec::mean() const {
  if (kind == Kind::gaussian) return 0.0;
  double m = 0.0;
  for (auto [v, w] : atoms()) m += v * w;
  return m;
}

double PriorSpec::second_moment() const {
  if (kind == Kind::gaussian) return 1.0;
  double m = 0.0;
  for (auto [v, w] : atoms()) m += v * v * w;
  return m;
}

bool PriorSpec::centered() const { return std::abs(mean()) < 1e-12; }

void PriorSpec::validate() const {
  if (kind == Kind::sparse_rademacher) {
    require(epsilon > 0.0 && epsilon <= 1.0, ErrorKind::invalid_input, "sparse prior needs epsilon in (0, 1]");
  }
  if (kind == Kind::two_point) {
    require(std::isfinite(a) && std::isfinite(b) && p >= 0.0 && p <= 1.0, ErrorKind::invalid_input,
            "two-point prior needs finite a, b and p in [0, 1]");
  }
  require(std::abs(second_moment() - 1.0) <= 1e-12, ErrorKind::invalid_input,
          "prior " + to_string() + " does not have unit second moment");
}

std::vector<PriorSpec> shipped_priors() {
  // The biased two-point law has mean 0.6 and exercises the non-centered code paths.
  return {PriorSpec::rademacher(), PriorSpec::gaussian(), PriorSpec::sparse_rademacher(0.1),
          PriorSpec::two_point(1.0, -1.0, 0.8)};
}

}  // namespace mf
