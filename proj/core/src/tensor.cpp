#include "meanfield/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "meanfield/error.hpp"

namespace mf {

std::uint64_t SymmetricTensor::entry_count(int order, int n) {
  std::uint64_t total = 1;
  for (int d = 0; d < order; ++d) {
    if (n != 0 && total > std::numeric_limits<std::uint64_t>::max() / static_cast<std::uint64_t>(n))
      return std::numeric_limits<std::uint64_t>::max();
    total *= static_cast<std::uint64_t>(n);
  }
  return total;
}

SymmetricTensor SymmetricTensor::symmetrize(int order, int n, const std::vector<double>& raw) {
  require(order >= 1 && n >= 1, ErrorKind::invalid_dimension, "tensor needs order >= 1 and n >= 1");
  const std::uint64_t count = entry_count(order, n);
  require(raw.size() == count, ErrorKind::invalid_dimension, "raw tensor has the wrong number of entries");

  std::vector<std::uint64_t> stride(order, 1);
  for (int d = 1; d < order; ++d) stride[d] = stride[d - 1] * static_cast<std::uint64_t>(n);

  std::vector<int> perm(order);
  double factorial = 1.0;
  for (int d = 2; d <= order; ++d) factorial *= d;

  SymmetricTensor t;
  t.order_ = order;
  t.n_ = n;
  t.data_.assign(count, 0.0);
  std::vector<int> idx(order, 0);
  for (std::uint64_t flat = 0; flat < count; ++flat) {
    std::uint64_t rem = flat;
    for (int d = 0; d < order; ++d) {
      idx[d] = static_cast<int>(rem % static_cast<std::uint64_t>(n));
      rem /= static_cast<std::uint64_t>(n);
    }
    // Only the sorted representative of each orbit is computed, then copied.
    if (!std::is_sorted(idx.begin(), idx.end())) continue;
    std::iota(perm.begin(), perm.end(), 0);
    double sum = 0.0;
    do {
      std::uint64_t src = 0;
      for (int d = 0; d < order; ++d) src += static_cast<std::uint64_t>(idx[perm[d]]) * stride[d];
      sum += raw[src];
    } while (std::next_permutation(perm.begin(), perm.end()));
    const double value = sum / factorial;
    std::vector<int> p = idx;
    do {
      std::uint64_t dst = 0;
      for (int d = 0; d < order; ++d) dst += static_cast<std::uint64_t>(p[d]) * stride[d];
      t.data_[dst] = value;
    } while (std::next_permutation(p.begin(), p.end()));
  }
  return t;
}

SymmetricTensor SymmetricTensor::from_symmetric(int order, int n, std::vector<double> data) {
  require(order >= 1 && n >= 1, ErrorKind::invalid_dimension, "tensor needs order >= 1 and n >= 1");
  require(data.size() == entry_count(order, n), ErrorKind::invalid_dimension,
          "tensor has the wrong number of entries");
  SymmetricTensor t;
  t.order_ = order;
  t.n_ = n;
  t.data_ = std::move(data);
  if (order == 2) {
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < j; ++i)
        require(t.data_[i + static_cast<std::size_t>(j) * n] == t.data_[j + static_cast<std::size_t>(i) * n],
                ErrorKind::invalid_input, "order-2 tensor is not symmetric");
  }
  return t;
}

double SymmetricTensor::at(const std::vector<int>& index) const {
  require(static_cast<int>(index.size()) == order_, ErrorKind::invalid_dimension, "index has the wrong order");
  std::uint64_t flat = 0;
  std::uint64_t stride = 1;
  for (int d = 0; d < order_; ++d) {
    require(index[d] >= 0 && index[d] < n_, ErrorKind::invalid_dimension, "tensor index out of range");
    flat += static_cast<std::uint64_t>(index[d]) * stride;
    stride *= static_cast<std::uint64_t>(n_);
  }
  return data_[flat];
}

Eigen::VectorXd SymmetricTensor::contract_all_but_one(const Eigen::VectorXd& m) const {
  require(m.size() == n_, ErrorKind::invalid_dimension, "tensor contraction size mismatch");
  // Contract the fastest index repeatedly: view the data as n × n^{r-1} and multiply by mᵀ.
  Eigen::VectorXd current;
  const double* src = data_.data();
  Eigen::Index cols = static_cast<Eigen::Index>(data_.size() / static_cast<std::size_t>(n_));
  for (int r = order_; r > 1; --r) {
    Eigen::Map<const Eigen::MatrixXd> view(src, n_, cols);
    Eigen::VectorXd next(cols);
#pragma omp parallel for schedule(static)
    for (Eigen::Index c = 0; c < cols; ++c) next(c) = view.col(c).dot(m);
    current = std::move(next);
    src = current.data();
    cols /= n_;
  }
  if (order_ == 1) current = Eigen::Map<const Eigen::VectorXd>(data_.data(), n_);
  return current;
}

double SymmetricTensor::contract_all(const Eigen::VectorXd& m) const { return contract_all_but_one(m).dot(m); }

SymmetricTensor SymmetricTensor::scaled(double factor) const {
  SymmetricTensor t = *this;
  for (double& v : t.data_) v *= factor;
  return t;
}

}  // namespace mf
