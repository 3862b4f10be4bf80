#pragma once

#include "kauri/types.hpp"

#include <optional>
#include <string_view>

namespace kauri {

enum class KernelKind { Linear, Rbf, Laplacian, Chi2, AdditiveChi2, Polynomial };

/// Kernel choice plus parameters. An unset gamma means "auto": 1/d for rbf,
/// laplacian and polynomial, 1 for chi2.
struct KernelSpec {
  KernelKind kind = KernelKind::Linear;
  std::optional<double> gamma;
  int degree = 3;
  double coef0 = 1.0;

  double resolved_gamma(Index n_features) const;
};

/// Accepts "linear", "rbf", "laplacian", "chi2", "additive_chi2" (or
/// "additive-chi2") and "polynomial". Throws ConfigInvalid otherwise.
KernelKind parse_kernel_kind(std::string_view name);
std::string_view to_string(KernelKind kind);

/// Throws NonFiniteInput if any entry is NaN or infinite, or if the matrix is empty.
void check_finite(const Matrix& data);

/// Full n x n Gram matrix over the rows of `data`.
///
///   linear         <x, y>
///   rbf            exp(-g |x - y|^2)
///   laplacian      exp(-g |x - y|_1)
///   additive_chi2  sum_f 2 x_f y_f / (x_f + y_f)
///   chi2           exp(-g sum_f (x_f - y_f)^2 / (x_f + y_f))
///   polynomial     (g <x, y> + coef0)^degree
///
/// Terms with x_f + y_f == 0 contribute 0 to both chi2 forms. The result is
/// exactly symmetric: only the lower triangle is computed and then mirrored.
Matrix compute_kernel(const Matrix& data, const KernelSpec& spec);

struct KernelDiagnostics {
  double max_asymmetry = 0.0;
  double min_eigenvalue = 0.0;
};

// Dense eigen-decomposition up to 1500 rows, shifted power iteration above.
KernelDiagnostics validate_kernel(const Matrix& gram);

}  // namespace kauri
