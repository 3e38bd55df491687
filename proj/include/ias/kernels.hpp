#pragma once

#include <array>
#include <cstddef>

#include <Eigen/Dense>

#include "ias/oracle.hpp"
#include "ias/scm.hpp"

namespace ias {

/// Second moments of Z = [1, X - xbar, Y - ybar] split by environment, where
/// the centering uses pooled column means. Index 0 is the intercept, 1..d the
/// predictors, d + 1 the response.
struct EnvMoments {
  std::array<Eigen::MatrixXd, 2> gram;
  std::array<std::size_t, 2> count{0, 0};
  Eigen::VectorXd column_mean;  // pooled means of X1..Xd, Y

  int d() const { return static_cast<int>(column_mean.size()) - 1; }
  Eigen::MatrixXd pooled() const { return gram[0] + gram[1]; }
};

/// Row-at-a-time accumulation. Kept as the reference for the blocked kernel.
EnvMoments env_moments_serial(const Dataset& data);

/// Fixed-size row blocks reduced in block order, so the result does not
/// depend on the number of threads.
EnvMoments env_moments_parallel(const Dataset& data);

EnvMoments env_moments(const Dataset& data, ExecutionPolicy policy);

inline constexpr std::size_t kMomentBlockRows = 2048;

}  // namespace ias
