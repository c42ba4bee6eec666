#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "meanfield/ensembles.hpp"

namespace mf {

/// Pairwise model μ(x) ∝ Π_{(i,j)∈E} ψ_ij(x_i, x_j) on a simple graph.
///
/// Edge e = (i, j) yields directed edges 2e (i→j) and 2e+1 (j→i).
class GraphicalModel {
 public:
  GraphicalModel() = default;
  /// potentials[e](a, b) = ψ_ij(x_i = a, x_j = b) for edges[e] = (i, j).
  GraphicalModel(int n, int alphabet, std::vector<std::pair<int, int>> edges, std::vector<Eigen::MatrixXd> potentials);
  static GraphicalModel from_graph(const Graph& graph, int alphabet, std::vector<Eigen::MatrixXd> potentials);

  int n() const { return n_; }
  int alphabet() const { return q_; }
  const std::vector<std::pair<int, int>>& edges() const { return edges_; }
  const Eigen::MatrixXd& potential(int e) const { return psi_[e]; }

  int directed_count() const { return 2 * static_cast<int>(edges_.size()); }
  int source(int d) const { return d % 2 == 0 ? edges_[d / 2].first : edges_[d / 2].second; }
  int target(int d) const { return d % 2 == 0 ? edges_[d / 2].second : edges_[d / 2].first; }
  static int reverse(int d) { return d ^ 1; }
  /// ψ seen from the directed edge: ψ(x_source = a, x_target = b).
  double psi(int d, int a, int b) const { return d % 2 == 0 ? psi_[d / 2](a, b) : psi_[d / 2](b, a); }
  /// Directed edges k→v.
  const std::vector<int>& incoming(int v) const { return incoming_[v]; }

 private:
  int n_ = 0;
  int q_ = 0;
  std::vector<std::pair<int, int>> edges_;
  std::vector<Eigen::MatrixXd> psi_;
  std::vector<std::vector<int>> incoming_;
};

/// ν_{i→j} over x_i, indexed by directed edge.
struct MessageSet {
  std::vector<Eigen::VectorXd> nu;
  int iteration = 0;

  static MessageSet uniform(const GraphicalModel& model);
  /// max over directed edges of ‖ν − ν′‖_∞.
  double max_change(const MessageSet& other) const;
};

/// One directed-edge update of a generic message-passing scheme.
class MessageUpdate {
 public:
  virtual ~MessageUpdate() = default;
  /// Writes the new message on directed edge d from the previous set.
  virtual void update(const GraphicalModel& model, const MessageSet& previous, int d, Eigen::VectorXd& out) const = 0;
  /// Whether outputs are renormalized to probability vectors.
  virtual bool normalized() const { return true; }
  virtual std::string name() const = 0;
};

class BeliefPropagation final : public MessageUpdate {
 public:
  void update(const GraphicalModel& model, const MessageSet& previous, int d, Eigen::VectorXd& out) const override;
  std::string name() const override { return "bp"; }
};

/// Synchronous sweep of an arbitrary update; new = (1 − damping)·update + damping·old.
MessageSet mp_step(const GraphicalModel& model, const MessageSet& messages, const MessageUpdate& rule,
                   double damping = 0.0);
MessageSet bp_step(const GraphicalModel& model, const MessageSet& messages, double damping = 0.0);

struct BpResult {
  MessageSet messages;
  bool converged = false;
  int iterations = 0;
  double last_change = 0.0;
};

BpResult run_bp(const GraphicalModel& model, int max_iters, double tol, double damping = 0.0);

/// belief_i ∝ Π_{k∈∂i} Σ_{x_k} ψ_ik(x_i, x_k) ν_{k→i}(x_k).
std::vector<Eigen::VectorXd> bp_marginals(const GraphicalModel& model, const MessageSet& messages);

inline constexpr double kMaxEnumerationStates = 1e7;

/// Exact marginals by enumeration of all q^n states.
std::vector<Eigen::VectorXd> exact_marginals(const GraphicalModel& model);

double max_marginal_error(const std::vector<Eigen::VectorXd>& a, const std::vector<Eigen::VectorXd>& b);

/// Header "n q", then one line per edge "i j ψ(0,0) ψ(0,1) … ψ(q−1,q−1)" (row-major). '#' starts a comment.
GraphicalModel read_edge_list(std::istream& in);
void write_edge_list(std::ostream& out, const GraphicalModel& model);
/// Columns: vertex, p0, …, p{q−1}.
void write_beliefs_csv(std::ostream& out, const std::vector<Eigen::VectorXd>& beliefs);

}  // namespace mf
