#include "kauri/kernels.hpp"

#include "kauri/errors.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <string>

namespace kauri {

namespace {

bool is_chi2_family(KernelKind kind) {
  return kind == KernelKind::Chi2 || kind == KernelKind::AdditiveChi2;
}

double additive_chi2_term_sum(const double* x, const double* y, Index d) {
  double total = 0.0;
  for (Index f = 0; f < d; ++f) {
    const double s = x[f] + y[f];
    if (s > 0.0) total += 2.0 * x[f] * y[f] / s;
  }
  return total;
}

double chi2_distance(const double* x, const double* y, Index d) {
  double total = 0.0;
  for (Index f = 0; f < d; ++f) {
    const double s = x[f] + y[f];
    if (s > 0.0) {
      const double diff = x[f] - y[f];
      total += diff * diff / s;
    }
  }
  return total;
}

double squared_distance(const double* x, const double* y, Index d) {
  double total = 0.0;
  for (Index f = 0; f < d; ++f) {
    const double diff = x[f] - y[f];
    total += diff * diff;
  }
  return total;
}

double manhattan_distance(const double* x, const double* y, Index d) {
  double total = 0.0;
  for (Index f = 0; f < d; ++f) total += std::abs(x[f] - y[f]);
  return total;
}

double dot(const double* x, const double* y, Index d) {
  double total = 0.0;
  for (Index f = 0; f < d; ++f) total += x[f] * y[f];
  return total;
}

template <class PairFn>
Matrix fill_symmetric(const RowMatrix& rows, PairFn&& fn) {
  const Index n = rows.rows();
  const Index d = rows.cols();
  Matrix gram(n, n);
  for (Index j = 0; j < n; ++j) {
    const double* yj = rows.row(j).data();
    for (Index i = j; i < n; ++i) {
      const double v = fn(rows.row(i).data(), yj, d);
      gram(i, j) = v;
      gram(j, i) = v;
    }
  }
  return gram;
}

double power_iteration(const Matrix& m, double shift, int iterations) {
  const Index n = m.rows();
  Vector v = Vector::Ones(n) / std::sqrt(static_cast<double>(n));
  double lambda = 0.0;
  for (int it = 0; it < iterations; ++it) {
    Vector w = m * v - shift * v;
    const double norm = w.norm();
    if (norm == 0.0) return 0.0;
    lambda = v.dot(w);
    v = w / norm;
  }
  return lambda;
}

}  // namespace

double KernelSpec::resolved_gamma(Index n_features) const {
  if (gamma) return *gamma;
  if (kind == KernelKind::Chi2) return 1.0;
  return 1.0 / static_cast<double>(n_features);
}

KernelKind parse_kernel_kind(std::string_view name) {
  if (name == "linear") return KernelKind::Linear;
  if (name == "rbf") return KernelKind::Rbf;
  if (name == "laplacian") return KernelKind::Laplacian;
  if (name == "chi2") return KernelKind::Chi2;
  if (name == "additive_chi2" || name == "additive-chi2") return KernelKind::AdditiveChi2;
  if (name == "polynomial" || name == "poly") return KernelKind::Polynomial;
  throw Error(ErrorCode::ConfigInvalid, "unknown kernel '" + std::string(name) + "'");
}

std::string_view to_string(KernelKind kind) {
  switch (kind) {
    case KernelKind::Linear: return "linear";
    case KernelKind::Rbf: return "rbf";
    case KernelKind::Laplacian: return "laplacian";
    case KernelKind::Chi2: return "chi2";
    case KernelKind::AdditiveChi2: return "additive_chi2";
    case KernelKind::Polynomial: return "polynomial";
  }
  return "unknown";
}

void check_finite(const Matrix& data) {
  if (data.rows() < 1 || data.cols() < 1)
    throw Error(ErrorCode::NonFiniteInput, "dataset must have at least one row and one column");
  if (!data.allFinite()) throw Error(ErrorCode::NonFiniteInput, "dataset contains NaN or Inf");
}

Matrix compute_kernel(const Matrix& data, const KernelSpec& spec) {
  check_finite(data);
  if (is_chi2_family(spec.kind) && (data.array() < 0.0).any())
    throw Error(ErrorCode::NegativeInputForChi2, "chi2 kernels require nonnegative features");

  const double g = spec.resolved_gamma(data.cols());
  if (spec.kind != KernelKind::Linear && spec.kind != KernelKind::AdditiveChi2 && !(g > 0.0))
    throw Error(ErrorCode::NonPositiveGamma, "gamma must be positive, got " + std::to_string(g));
  if (spec.kind == KernelKind::Polynomial && spec.degree < 1)
    throw Error(ErrorCode::ConfigInvalid, "polynomial degree must be >= 1");

  const RowMatrix rows = data;
  switch (spec.kind) {
    case KernelKind::Linear: {
      const Index n = data.rows();
      Matrix gram = Matrix::Zero(n, n);
      gram.selfadjointView<Eigen::Lower>().rankUpdate(data);
      gram.triangularView<Eigen::StrictlyUpper>() = gram.transpose();
      return gram;
    }
    case KernelKind::Rbf:
      return fill_symmetric(rows, [g](const double* x, const double* y, Index d) {
        return std::exp(-g * squared_distance(x, y, d));
      });
    case KernelKind::Laplacian:
      return fill_symmetric(rows, [g](const double* x, const double* y, Index d) {
        return std::exp(-g * manhattan_distance(x, y, d));
      });
    case KernelKind::AdditiveChi2:
      return fill_symmetric(rows, [](const double* x, const double* y, Index d) {
        return additive_chi2_term_sum(x, y, d);
      });
    case KernelKind::Chi2:
      return fill_symmetric(rows, [g](const double* x, const double* y, Index d) {
        return std::exp(-g * chi2_distance(x, y, d));
      });
    case KernelKind::Polynomial: {
      const double c0 = spec.coef0;
      const int degree = spec.degree;
      return fill_symmetric(rows, [g, c0, degree](const double* x, const double* y, Index d) {
        return std::pow(g * dot(x, y, d) + c0, degree);
      });
    }
  }
  throw Error(ErrorCode::ConfigInvalid, "unhandled kernel kind");
}

KernelDiagnostics validate_kernel(const Matrix& gram) {
  KernelDiagnostics diag;
  if (gram.rows() == 0 || gram.rows() != gram.cols()) return diag;
  diag.max_asymmetry = (gram - gram.transpose()).cwiseAbs().maxCoeff();

  const Matrix sym = 0.5 * (gram + gram.transpose());
  if (sym.rows() <= 1500) {
    Eigen::SelfAdjointEigenSolver<Matrix> solver(sym, Eigen::EigenvaluesOnly);
    diag.min_eigenvalue = solver.eigenvalues().minCoeff();
  } else {
    // Largest-magnitude eigenvalue first, then the bottom of the spectrum via a shift.
    const double top = std::abs(power_iteration(sym, 0.0, 200));
    diag.min_eigenvalue = power_iteration(sym, top, 500) + top;
  }
  return diag;
}

}  // namespace kauri
