#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "sparsescan/wdpp.hpp"

namespace sparsescan {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
// Steps between full re-orthonormalizations of the shrinking basis.
constexpr int kReorthogonalizeEvery = 16;

double log_add_exp(double a, double b) {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  const double hi = std::max(a, b);
  return hi + std::log1p(std::exp(std::min(a, b) - hi));
}

void modified_gram_schmidt(Eigen::MatrixXd& v) {
  for (Eigen::Index c = 0; c < v.cols(); ++c) {
    for (Eigen::Index p = 0; p < c; ++p) v.col(c) -= v.col(p).dot(v.col(c)) * v.col(p);
    v.col(c).normalize();
  }
}

// Item index drawn with probability proportional to the row norms of v.
Eigen::Index draw_item(const Eigen::VectorXd& weights, Rng& rng) {
  const double total = weights.sum();
  const double target = uniform01(rng) * total;
  double acc = 0.0;
  Eigen::Index last_positive = 0;
  for (Eigen::Index i = 0; i < weights.size(); ++i) {
    if (weights(i) <= 0.0) continue;
    acc += weights(i);
    last_positive = i;
    if (target < acc) return i;
  }
  return last_positive;
}

}  // namespace

IndexSet sample_projection(Eigen::MatrixXd v, Rng& rng) {
  IndexSet items;
  items.reserve(static_cast<std::size_t>(v.cols()));
  int steps = 0;
  while (v.cols() > 0) {
    const Eigen::VectorXd weights = v.rowwise().squaredNorm();
    const Eigen::Index item = draw_item(weights, rng);
    items.push_back(static_cast<std::size_t>(item));
    const Eigen::Index m = v.cols();
    if (m == 1) break;

    // Householder reflector H with H w = alpha e_1, w = row `item` of v. The
    // trailing m-1 columns of v H span the part of span(v) orthogonal to e_item.
    Eigen::VectorXd h = v.row(item).transpose();
    const double norm_w = h.norm();
    const double alpha = h(0) >= 0.0 ? -norm_w : norm_w;
    h(0) -= alpha;
    const double hh = h.squaredNorm();
    if (hh > 0.0) v.noalias() -= (2.0 / hh) * (v * h) * h.transpose();
    Eigen::MatrixXd next = v.rightCols(m - 1);
    next.row(item).setZero();
    v = std::move(next);

    if (++steps % kReorthogonalizeEvery == 0) modified_gram_schmidt(v);
  }
  std::sort(items.begin(), items.end());
  return items;
}

IndexSet dpp_sample(const EigenBasis& basis, Rng& rng) {
  std::vector<Eigen::Index> kept;
  for (Eigen::Index n = 0; n < basis.eigenvalues.size(); ++n) {
    const double lambda = basis.eigenvalues(n);
    if (uniform01(rng) < lambda / (lambda + 1.0)) kept.push_back(n);
  }
  Eigen::MatrixXd v(basis.eigenvectors.rows(), static_cast<Eigen::Index>(kept.size()));
  for (std::size_t c = 0; c < kept.size(); ++c) v.col(static_cast<Eigen::Index>(c)) = basis.eigenvectors.col(kept[c]);
  return sample_projection(std::move(v), rng);
}

IndexSet kdpp_sample(const EigenBasis& basis, std::size_t k, Rng& rng) {
  std::vector<Eigen::Index> positive;
  for (Eigen::Index n = 0; n < basis.eigenvalues.size(); ++n) {
    if (basis.eigenvalues(n) > 0.0) positive.push_back(n);
  }
  const std::size_t rank = positive.size();
  if (k > rank) {
    throw ValidationError("kdpp_sample: k = " + std::to_string(k) + " exceeds kernel rank " +
                          std::to_string(rank));
  }
  if (k == 0) return {};

  // log e_l(lambda_1..lambda_n) for l <= k, n <= rank, column-major by n.
  const std::size_t rows = k + 1;
  std::vector<double> log_e(rows * (rank + 1), kNegInf);
  const auto at = [&](std::size_t l, std::size_t n) -> double& { return log_e[n * rows + l]; };
  for (std::size_t n = 0; n <= rank; ++n) at(0, n) = 0.0;
  std::vector<double> log_lambda(rank);
  for (std::size_t n = 0; n < rank; ++n) log_lambda[n] = std::log(basis.eigenvalues(positive[n]));
  for (std::size_t n = 1; n <= rank; ++n) {
    const std::size_t top = std::min(n, k);
    for (std::size_t l = 1; l <= top; ++l) {
      at(l, n) = log_add_exp(at(l, n - 1), log_lambda[n - 1] + at(l - 1, n - 1));
    }
  }

  // Walk the recursion backwards, keeping eigenvector n with its conditional
  // probability lambda_n e_{l-1}(first n-1) / e_l(first n).
  std::vector<Eigen::Index> kept;
  kept.reserve(k);
  std::size_t remaining = k;
  for (std::size_t n = rank; n >= 1 && remaining > 0; --n) {
    bool take = n == remaining;
    if (!take) {
      const double log_p = log_lambda[n - 1] + at(remaining - 1, n - 1) - at(remaining, n);
      take = uniform01(rng) < std::exp(log_p);
    }
    if (take) {
      kept.push_back(positive[n - 1]);
      --remaining;
    }
  }

  Eigen::MatrixXd v(basis.eigenvectors.rows(), static_cast<Eigen::Index>(k));
  for (std::size_t c = 0; c < kept.size(); ++c) v.col(static_cast<Eigen::Index>(c)) = basis.eigenvectors.col(kept[c]);
  return sample_projection(std::move(v), rng);
}

}  // namespace sparsescan
