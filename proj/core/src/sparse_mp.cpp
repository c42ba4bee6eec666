#include "meanfield/sparse_mp.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <set>
#include <sstream>

#include "meanfield/error.hpp"

namespace mf {

GraphicalModel::GraphicalModel(int n, int alphabet, std::vector<std::pair<int, int>> edges,
                               std::vector<Eigen::MatrixXd> potentials)
    : n_(n), q_(alphabet), edges_(std::move(edges)), psi_(std::move(potentials)) {
  require(n >= 0, ErrorKind::invalid_dimension, "vertex count must be >= 0");
  require(alphabet >= 1, ErrorKind::invalid_input, "alphabet size must be >= 1");
  require(edges_.size() == psi_.size(), ErrorKind::invalid_input, "one potential table per edge is required");
  std::set<std::pair<int, int>> seen;
  incoming_.assign(n, {});
  for (std::size_t e = 0; e < edges_.size(); ++e) {
    const auto [i, j] = edges_[e];
    require(i >= 0 && i < n && j >= 0 && j < n, ErrorKind::invalid_input,
            "edge " + std::to_string(e) + " has an endpoint out of range");
    require(i != j, ErrorKind::invalid_input, "self-loops are not allowed");
    require(seen.insert({std::min(i, j), std::max(i, j)}).second, ErrorKind::invalid_input,
            "duplicate edge " + std::to_string(i) + "-" + std::to_string(j));
    const Eigen::MatrixXd& p = psi_[e];
    require(p.rows() == alphabet && p.cols() == alphabet, ErrorKind::invalid_dimension,
            "potential table " + std::to_string(e) + " is not q x q");
    require(p.allFinite() && p.minCoeff() > 0.0, ErrorKind::invalid_input,
            "potential table " + std::to_string(e) + " must be finite and strictly positive");
    incoming_[j].push_back(static_cast<int>(2 * e));      // i→j
    incoming_[i].push_back(static_cast<int>(2 * e + 1));  // j→i
  }
}

GraphicalModel GraphicalModel::from_graph(const Graph& graph, int alphabet, std::vector<Eigen::MatrixXd> potentials) {
  return GraphicalModel(graph.n, alphabet, graph.edges, std::move(potentials));
}

MessageSet MessageSet::uniform(const GraphicalModel& model) {
  MessageSet m;
  m.nu.assign(model.directed_count(), Eigen::VectorXd::Constant(model.alphabet(), 1.0 / model.alphabet()));
  return m;
}

double MessageSet::max_change(const MessageSet& other) const {
  require(nu.size() == other.nu.size(), ErrorKind::invalid_dimension, "message sets differ in size");
  double d = 0.0;
  for (std::size_t e = 0; e < nu.size(); ++e) d = std::max(d, (nu[e] - other.nu[e]).cwiseAbs().maxCoeff());
  return d;
}

void BeliefPropagation::update(const GraphicalModel& model, const MessageSet& previous, int d,
                               Eigen::VectorXd& out) const {
  const int i = model.source(d);
  const int q = model.alphabet();
  out.setOnes(q);
  for (int in : model.incoming(i)) {
    if (in == GraphicalModel::reverse(d)) continue;
    const Eigen::VectorXd& nu = previous.nu[in];
    // in is k→i; psi(in, x_k, x_i).
    for (int a = 0; a < q; ++a) {
      double s = 0.0;
      for (int b = 0; b < q; ++b) s += model.psi(in, b, a) * nu(b);
      out(a) *= s;
    }
    // Rescale inside the product so long products stay representable.
    const double m = out.maxCoeff();
    if (m > 0.0) out /= m;
  }
}

MessageSet mp_step(const GraphicalModel& model, const MessageSet& messages, const MessageUpdate& rule, double damping) {
  require(damping >= 0.0 && damping < 1.0, ErrorKind::invalid_input, "damping must lie in [0, 1)");
  require(static_cast<int>(messages.nu.size()) == model.directed_count(), ErrorKind::invalid_dimension,
          "message set does not match the model");
  MessageSet next;
  next.nu.resize(messages.nu.size());
  next.iteration = messages.iteration + 1;
  const int count = model.directed_count();
  bool bad = false;
#pragma omp parallel for schedule(static) reduction(|| : bad)
  for (int d = 0; d < count; ++d) {
    Eigen::VectorXd v;
    rule.update(model, messages, d, v);
    if (rule.normalized()) {
      const double z = v.sum();
      if (!(z > 0.0) || !std::isfinite(z)) {
        bad = true;
        continue;
      }
      v /= z;
    }
    if (damping > 0.0) v = (1.0 - damping) * v + damping * messages.nu[d];
    next.nu[d] = std::move(v);
  }
  if (bad) fail(ErrorKind::internal, "message normalizer vanished");
  return next;
}

MessageSet bp_step(const GraphicalModel& model, const MessageSet& messages, double damping) {
  return mp_step(model, messages, BeliefPropagation{}, damping);
}

BpResult run_bp(const GraphicalModel& model, int max_iters, double tol, double damping) {
  require(max_iters >= 1, ErrorKind::invalid_input, "max_iters must be >= 1");
  require(tol >= 0.0, ErrorKind::invalid_input, "tol must be >= 0");
  BpResult r;
  r.messages = MessageSet::uniform(model);
  for (int t = 0; t < max_iters; ++t) {
    MessageSet next = bp_step(model, r.messages, damping);
    r.last_change = next.max_change(r.messages);
    r.messages = std::move(next);
    r.iterations = t + 1;
    if (r.last_change < tol || r.last_change == 0.0) {
      r.converged = true;
      break;
    }
  }
  return r;
}

std::vector<Eigen::VectorXd> bp_marginals(const GraphicalModel& model, const MessageSet& messages) {
  const int q = model.alphabet();
  std::vector<Eigen::VectorXd> out(model.n());
  for (int i = 0; i < model.n(); ++i) {
    Eigen::VectorXd b = Eigen::VectorXd::Ones(q);
    for (int in : model.incoming(i)) {
      for (int a = 0; a < q; ++a) {
        double s = 0.0;
        for (int c = 0; c < q; ++c) s += model.psi(in, c, a) * messages.nu[in](c);
        b(a) *= s;
      }
      b /= b.maxCoeff();
    }
    out[i] = b / b.sum();
  }
  return out;
}

std::vector<Eigen::VectorXd> exact_marginals(const GraphicalModel& model) {
  const int n = model.n();
  const int q = model.alphabet();
  const double states = std::pow(static_cast<double>(q), n);
  require(states <= kMaxEnumerationStates, ErrorKind::resource_limit,
          "enumeration of " + std::to_string(q) + "^" + std::to_string(n) + " states exceeds the 1e7 limit");
  const long long total = std::llround(states);
  std::vector<Eigen::MatrixXd> log_psi;
  for (std::size_t e = 0; e < model.edges().size(); ++e) log_psi.push_back(model.potential(static_cast<int>(e)).array().log());
  const auto& edges = model.edges();

  std::vector<int> x(n, 0);
  auto log_weight = [&] {
    double s = 0.0;
    for (std::size_t e = 0; e < edges.size(); ++e) s += log_psi[e](x[edges[e].first], x[edges[e].second]);
    return s;
  };
  auto advance = [&] {
    for (int i = 0; i < n; ++i) {
      if (++x[i] < q) return;
      x[i] = 0;
    }
  };
  double top = -std::numeric_limits<double>::infinity();
  for (long long s = 0; s < total; ++s, advance()) top = std::max(top, log_weight());
  std::fill(x.begin(), x.end(), 0);
  std::vector<Eigen::VectorXd> out(n, Eigen::VectorXd::Zero(q));
  double z = 0.0;
  for (long long s = 0; s < total; ++s, advance()) {
    const double w = std::exp(log_weight() - top);
    z += w;
    for (int i = 0; i < n; ++i) out[i](x[i]) += w;
  }
  for (auto& v : out) v /= z;
  return out;
}

double max_marginal_error(const std::vector<Eigen::VectorXd>& a, const std::vector<Eigen::VectorXd>& b) {
  require(a.size() == b.size(), ErrorKind::invalid_dimension, "marginal lists differ in length");
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, (a[i] - b[i]).cwiseAbs().maxCoeff());
  return d;
}

GraphicalModel read_edge_list(std::istream& in) {
  std::string line;
  int line_no = 0;
  auto next_line = [&](std::string& out) {
    while (std::getline(in, line)) {
      ++line_no;
      const auto hash = line.find('#');
      if (hash != std::string::npos) line.erase(hash);
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      out = line;
      return true;
    }
    return false;
  };
  std::string text;
  require(next_line(text), ErrorKind::invalid_input, "edge list is empty");
  int n = 0, q = 0;
  {
    std::istringstream hs(text);
    require(static_cast<bool>(hs >> n >> q), ErrorKind::invalid_input, "edge list header must be 'n q'");
  }
  std::vector<std::pair<int, int>> edges;
  std::vector<Eigen::MatrixXd> psi;
  while (next_line(text)) {
    std::istringstream ls(text);
    int i = 0, j = 0;
    require(static_cast<bool>(ls >> i >> j), ErrorKind::invalid_input,
            "line " + std::to_string(line_no) + ": expected 'i j' followed by the table");
    Eigen::MatrixXd p(q, q);
    for (int a = 0; a < q; ++a)
      for (int b = 0; b < q; ++b)
        require(static_cast<bool>(ls >> p(a, b)), ErrorKind::invalid_input,
                "line " + std::to_string(line_no) + ": expected " + std::to_string(q * q) + " potential entries");
    std::string extra;
    require(!(ls >> extra), ErrorKind::invalid_input, "line " + std::to_string(line_no) + ": trailing tokens");
    edges.emplace_back(i, j);
    psi.push_back(std::move(p));
  }
  return GraphicalModel(n, q, std::move(edges), std::move(psi));
}

void write_edge_list(std::ostream& out, const GraphicalModel& model) {
  out << model.n() << ' ' << model.alphabet() << '\n';
  out << std::setprecision(17);
  for (std::size_t e = 0; e < model.edges().size(); ++e) {
    out << model.edges()[e].first << ' ' << model.edges()[e].second;
    const Eigen::MatrixXd& p = model.potential(static_cast<int>(e));
    for (int a = 0; a < model.alphabet(); ++a)
      for (int b = 0; b < model.alphabet(); ++b) out << ' ' << p(a, b);
    out << '\n';
  }
}

void write_beliefs_csv(std::ostream& out, const std::vector<Eigen::VectorXd>& beliefs) {
  const int q = beliefs.empty() ? 0 : static_cast<int>(beliefs.front().size());
  out << "vertex";
  for (int a = 0; a < q; ++a) out << ",p" << a;
  out << '\n' << std::setprecision(17);
  for (std::size_t i = 0; i < beliefs.size(); ++i) {
    out << i;
    for (int a = 0; a < q; ++a) out << ',' << beliefs[i](a);
    out << '\n';
  }
}

}  // namespace mf
