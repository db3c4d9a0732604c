#pragma once

#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "anys/dataio.hpp"

namespace anys {

enum class KernelFamily { gaussian, multiquadric, sigmoid, thinplate };

KernelFamily parse_kernel_family(std::string_view name);
std::string_view to_string(KernelFamily family);

/// One of the four built-in kernels with bandwidth sigma:
///   gaussian      exp(-|x-y|^2 / sigma^2)
///   multiquadric  sqrt(|x-y|^2 / sigma^2 + 1)
///   sigmoid       tanh(x.y / sigma + 1)
///   thinplate     (|x-y|^2 / sigma^2) ln(|x-y|^2 / sigma^2), 0 at x = y
struct KernelSpec {
  KernelFamily family = KernelFamily::gaussian;
  double sigma = 1.0;

  double operator()(Point x, Point y) const;
  /// Only the gaussian family is positive semi-definite.
  bool is_spsd() const { return family == KernelFamily::gaussian; }
};

/// A symmetric kernel: either a KernelSpec or an arbitrary callable. The
/// custom form exists for analytic test kernels (x.y, |x-y|^2, ...).
class Kernel {
 public:
  using Function = std::function<double(Point, Point)>;

  Kernel(KernelSpec spec);  // NOLINT: implicit on purpose
  Kernel(std::string name, Function fn, bool spsd = false);

  double operator()(Point x, Point y) const {
    if (spec_) return (*spec_)(x, y);
    return fn_(x, y);
  }

  bool is_spsd() const { return spsd_; }
  const std::string& name() const { return name_; }
  const std::optional<KernelSpec>& spec() const { return spec_; }

 private:
  std::optional<KernelSpec> spec_;
  Function fn_;
  std::string name_;
  bool spsd_ = false;
};

struct GramBlock {
  Eigen::MatrixXd values;
  std::vector<Index> rows;
  std::vector<Index> cols;
};

/// Throws std::invalid_argument on dimension mismatch.
double eval(const Kernel& kernel, Point x, Point y);

GramBlock gram(const Kernel& kernel, const Dataset& ds, const std::vector<Index>& rows,
               const std::vector<Index>& cols);

/// Full n x n Gram matrix.
Eigen::MatrixXd gram_full(const Kernel& kernel, const Dataset& ds);

/// [kappa(a_i, b_j)] for two arbitrary point sets.
Eigen::MatrixXd cross_gram(const Kernel& kernel, const PointMatrix& a, const PointMatrix& b);

/// Adds beta to the diagonal of a square block.
GramBlock regularize(GramBlock block, double beta);

std::vector<Index> all_indices(Index n);

}  // namespace anys
