#include "ias/kernels.hpp"

#include <vector>

#include "ias/errors.hpp"

namespace ias {
namespace {

EnvMoments prepare(const Dataset& data) {
  if (static_cast<std::size_t>(data.x.rows()) != data.n() || static_cast<std::size_t>(data.y.size()) != data.n()) {
    throw ArgumentError("dataset columns have inconsistent lengths");
  }
  const int d = data.d();
  EnvMoments m;
  m.column_mean.resize(d + 1);
  if (data.n() > 0) {
    m.column_mean.head(d) = data.x.colwise().mean().transpose();
    m.column_mean(d) = data.y.mean();
  } else {
    m.column_mean.setZero();
  }
  for (auto& g : m.gram) g = Eigen::MatrixXd::Zero(d + 2, d + 2);
  for (auto e : data.env) {
    if (e > 1) throw ArgumentError("environment labels must be 0 or 1");
    ++m.count[e];
  }
  return m;
}

// Centered, augmented rows [lo, hi) of one environment, packed row-major-ish
// into a (rows x (d + 2)) matrix.
Eigen::MatrixXd gather(const Dataset& data, const EnvMoments& m, std::uint8_t env, std::size_t lo, std::size_t hi) {
  const int d = data.d();
  std::size_t rows = 0;
  for (std::size_t i = lo; i < hi; ++i) rows += data.env[i] == env ? 1 : 0;
  Eigen::MatrixXd z(static_cast<Eigen::Index>(rows), d + 2);
  Eigen::Index r = 0;
  for (std::size_t i = lo; i < hi; ++i) {
    if (data.env[i] != env) continue;
    const auto row = static_cast<Eigen::Index>(i);
    z(r, 0) = 1.0;
    for (int k = 0; k < d; ++k) z(r, k + 1) = data.x(row, k) - m.column_mean(k);
    z(r, d + 1) = data.y(row) - m.column_mean(d);
    ++r;
  }
  return z;
}

}  // namespace

EnvMoments env_moments_serial(const Dataset& data) {
  EnvMoments m = prepare(data);
  const int d = data.d();
  const int w = d + 2;
  std::vector<double> z(static_cast<std::size_t>(w));
  for (std::size_t i = 0; i < data.n(); ++i) {
    const auto row = static_cast<Eigen::Index>(i);
    z[0] = 1.0;
    for (int k = 0; k < d; ++k) z[static_cast<std::size_t>(k + 1)] = data.x(row, k) - m.column_mean(k);
    z[static_cast<std::size_t>(d + 1)] = data.y(row) - m.column_mean(d);
    auto& g = m.gram[data.env[i]];
    for (int a = 0; a < w; ++a) {
      for (int b = 0; b <= a; ++b) g(a, b) += z[static_cast<std::size_t>(a)] * z[static_cast<std::size_t>(b)];
    }
  }
  for (auto& g : m.gram) g.triangularView<Eigen::StrictlyUpper>() = g.transpose();
  return m;
}

EnvMoments env_moments_parallel(const Dataset& data) {
  EnvMoments m = prepare(data);
  const int w = data.d() + 2;
  const std::size_t n = data.n();
  const std::size_t blocks = (n + kMomentBlockRows - 1) / kMomentBlockRows;
  std::vector<std::array<Eigen::MatrixXd, 2>> partial(blocks);

#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t b = 0; b < static_cast<std::ptrdiff_t>(blocks); ++b) {
    const std::size_t lo = static_cast<std::size_t>(b) * kMomentBlockRows;
    const std::size_t hi = std::min(n, lo + kMomentBlockRows);
    for (std::uint8_t e = 0; e < 2; ++e) {
      const Eigen::MatrixXd z = gather(data, m, e, lo, hi);
      Eigen::MatrixXd g = Eigen::MatrixXd::Zero(w, w);
      g.selfadjointView<Eigen::Lower>().rankUpdate(z.transpose());
      partial[static_cast<std::size_t>(b)][e] = std::move(g);
    }
  }
  for (const auto& p : partial) {
    for (int e = 0; e < 2; ++e) m.gram[e] += p[e];
  }
  for (auto& g : m.gram) g.triangularView<Eigen::StrictlyUpper>() = g.transpose();
  return m;
}

EnvMoments env_moments(const Dataset& data, ExecutionPolicy policy) {
  return policy == ExecutionPolicy::Parallel ? env_moments_parallel(data) : env_moments_serial(data);
}

}  // namespace ias
