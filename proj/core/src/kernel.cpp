#include <Eigen/Eigenvalues>

#include <cmath>
#include <string>

#include "sparsescan/wdpp.hpp"

namespace sparsescan {

KernelMatrix::KernelMatrix(Eigen::MatrixXd entries, std::vector<PixelCoord> coords, WdppParams params)
    : entries_(std::move(entries)), coords_(std::move(coords)), params_(params) {
  const auto n = static_cast<Eigen::Index>(coords_.size());
  if (entries_.rows() != n || entries_.cols() != n) {
    throw ValidationError("kernel matrix must be " + std::to_string(n) + "x" + std::to_string(n));
  }
}

KernelMatrix build_kernel(std::span<const double> saliency, std::span<const PixelCoord> coords,
                          double gamma, double sigma_s) {
  if (!(sigma_s > 0.0) || !std::isfinite(sigma_s)) {
    throw ValidationError("build_kernel: sigma_s must be positive, got " + std::to_string(sigma_s));
  }
  if (!(gamma >= 0.0) || !std::isfinite(gamma)) {
    throw ValidationError("build_kernel: gamma must be non-negative, got " + std::to_string(gamma));
  }
  if (saliency.size() != coords.size()) {
    throw ValidationError("build_kernel: saliency and coordinate counts differ");
  }
  const auto n = static_cast<Eigen::Index>(saliency.size());
  Eigen::VectorXd quality(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double u = saliency[i];
    if (!std::isfinite(u) || u < 0.0) {
      throw ValidationError("build_kernel: saliency must be finite and non-negative, got " +
                            std::to_string(u) + " at item " + std::to_string(i));
    }
    quality(i) = std::pow(u, gamma);
  }
  const double inv_sigma2 = 1.0 / (sigma_s * sigma_s);
  Eigen::MatrixXd L(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = 0; i < n; ++i) {
      const double dx = coords[i].x - coords[j].x;
      const double dy = coords[i].y - coords[j].y;
      L(i, j) = quality(i) * std::exp(-(dx * dx + dy * dy) * inv_sigma2) * quality(j);
    }
  }
  Eigen::MatrixXd symmetric = 0.5 * (L + L.transpose());
  return KernelMatrix(std::move(symmetric), std::vector<PixelCoord>(coords.begin(), coords.end()),
                      WdppParams{gamma, sigma_s});
}

std::size_t EigenBasis::rank() const noexcept {
  return static_cast<std::size_t>((eigenvalues.array() > 0.0).count());
}

EigenBasis eigendecompose(const Eigen::MatrixXd& symmetric) {
  if (symmetric.rows() != symmetric.cols()) throw ValidationError("eigendecompose: matrix is not square");
  if (!symmetric.allFinite()) {
    throw ValidationError("eigendecompose: decomposition failure, kernel has non-finite entries");
  }
  EigenBasis basis;
  if (symmetric.rows() == 0) return basis;
  // Reads the lower triangle; ascending eigenvalues.
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(symmetric);
  if (solver.info() != Eigen::Success) {
    throw Error("eigendecompose: decomposition failure, solver did not converge");
  }
  basis.eigenvalues = solver.eigenvalues();
  basis.eigenvectors = solver.eigenvectors();
  for (Eigen::Index i = 0; i < basis.eigenvalues.size(); ++i) {
    if (basis.eigenvalues(i) < kEigenvalueFloor) basis.eigenvalues(i) = 0.0;
  }
  return basis;
}

EigenBasis eigendecompose(const KernelMatrix& kernel) { return eigendecompose(kernel.entries()); }

}  // namespace sparsescan
