#include <algorithm>
#include <cmath>
#include <vector>

#include "ias/errors.hpp"
#include "ias/estimator.hpp"

namespace ias {
namespace {

double soft_threshold(double z, double gamma) {
  if (z > gamma) return z - gamma;
  if (z < -gamma) return z + gamma;
  return 0.0;
}

}  // namespace

ScreeningResult screen_markov_boundary_path(const Dataset& data, int k, int path_length, double min_ratio,
                                            double tolerance) {
  const int d = data.d();
  if (k < 0 || k > d) throw ArgumentError("screening size k must lie in [0, d]");
  if (path_length < 2 || !(min_ratio > 0.0 && min_ratio < 1.0)) throw ArgumentError("invalid lasso path");
  const auto n = static_cast<Eigen::Index>(data.n());
  if (n < 2) throw ArgumentError("screening needs at least two samples");

  ScreeningResult result;
  std::vector<int> usable;
  Eigen::MatrixXd xs(n, d);
  for (int j = 0; j < d; ++j) {
    const auto col = data.x.col(j);
    const double mean = col.mean();
    const double sd = std::sqrt((col.array() - mean).square().mean());
    if (!(sd > 1e-12 * std::max(1.0, std::abs(mean)))) {
      result.dropped.push_back(j + 1);
      continue;
    }
    xs.col(static_cast<Eigen::Index>(usable.size())) = (col.array() - mean) / sd;
    usable.push_back(j + 1);
  }
  const auto p = static_cast<Eigen::Index>(usable.size());
  if (k >= p) {
    result.selected = VarSet::from_indices(usable);
    result.order = usable;
    return result;
  }
  if (k == 0) return result;

  const auto x = xs.leftCols(p);
  const Eigen::VectorXd y = data.y.array() - data.y.mean();
  const double inv_n = 1.0 / static_cast<double>(n);
  Eigen::MatrixXd gram(p, p);
  gram.setZero();
  gram.selfadjointView<Eigen::Lower>().rankUpdate(x.transpose(), inv_n);
  gram.triangularView<Eigen::StrictlyUpper>() = gram.transpose();
  const Eigen::VectorXd c = x.transpose() * y * inv_n;
  const double yy = y.squaredNorm() * inv_n;

  const double lambda_max = c.cwiseAbs().maxCoeff();
  Eigen::VectorXd beta = Eigen::VectorXd::Zero(p);
  Eigen::VectorXd grad = c;  // c - G beta
  std::vector<bool> entered(static_cast<std::size_t>(p), false);
  auto objective = [&](double lambda) {
    return 0.5 * (yy - 2.0 * beta.dot(c) + beta.dot(c - grad)) + lambda * beta.cwiseAbs().sum();
  };

  for (int t = 0; t < path_length; ++t) {
    const double lambda = lambda_max * std::pow(min_ratio, static_cast<double>(t) / (path_length - 1));
    double previous = objective(lambda);
    for (int sweep = 0; sweep < 10000; ++sweep) {
      for (Eigen::Index j = 0; j < p; ++j) {
        const double g = gram(j, j);
        const double updated = soft_threshold(grad(j) + g * beta(j), lambda) / g;
        const double delta = updated - beta(j);
        if (delta != 0.0) {
          grad -= gram.col(j) * delta;
          beta(j) = updated;
        }
      }
      const double current = objective(lambda);
      if (std::abs(previous - current) <= tolerance * std::max(1.0, std::abs(previous))) break;
      previous = current;
    }

    std::vector<Eigen::Index> active;
    for (Eigen::Index j = 0; j < p; ++j) {
      if (beta(j) != 0.0) active.push_back(j);
    }
    if (static_cast<int>(active.size()) > k) break;

    std::vector<Eigen::Index> fresh;
    for (auto j : active) {
      if (!entered[static_cast<std::size_t>(j)]) fresh.push_back(j);
    }
    std::stable_sort(fresh.begin(), fresh.end(),
                     [&](Eigen::Index a, Eigen::Index b) { return std::abs(beta(a)) > std::abs(beta(b)); });
    for (auto j : fresh) {
      entered[static_cast<std::size_t>(j)] = true;
      result.order.push_back(usable[static_cast<std::size_t>(j)]);
    }
    result.selected = VarSet{};
    for (auto j : active) result.selected.insert(usable[static_cast<std::size_t>(j)]);
    result.lambda = lambda;
  }
  // Variables that entered and later left are not part of the final set.
  std::erase_if(result.order, [&](int v) { return !result.selected.contains(v); });
  return result;
}

VarSet screen_markov_boundary(const Dataset& data, int k) { return screen_markov_boundary_path(data, k).selected; }

}  // namespace ias
