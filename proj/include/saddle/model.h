#pragma once

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <string>
#include <vector>

namespace saddle {

enum class NonlinearityKind { Cubic, Tabulated };

/// Odd bistable nonlinearity f with double-well anti-primitive F(t) = int_t^M f,
/// together with the coupling strength and exponent of the two-component system.
///
/// Cubic is f(t) = t - t^3 with M = 1. Tabulated models are sampled on
/// [0, t_max] with t_max >= M + 1, linearly interpolated and extended oddly.
class BistableModel {
 public:
  static BistableModel cubic(double lambda, double p = 1.0);

  /// `t` ascending starting at 0, `f` the sampled values. When `validate` is
  /// false the double-well checks are skipped (degenerate test models).
  static BistableModel tabulated(double M, std::vector<double> t,
                                 std::vector<double> f, double lambda,
                                 double p = 1.0, bool validate = true);

  /// Reads "M <value>" followed by "t f(t)" lines.
  static BistableModel from_file(const std::filesystem::path& path,
                                 double lambda, double p = 1.0);

  NonlinearityKind kind() const { return kind_; }
  double M() const { return M_; }
  double lambda() const { return lambda_; }
  double p() const { return p_; }
  /// Lipschitz constant of the truncated nonlinearity.
  double lipschitz_bound() const { return lipschitz_; }

  BistableModel with_coupling(double lambda, double p) const;

  double f(double t) const;
  /// Globally Lipschitz odd extension: equals f on [-M-1, M+1], constant beyond.
  double f_trunc(double t) const {
    if (kind_ == NonlinearityKind::Cubic) {
      const double a = std::min(std::abs(t), 2.0);
      const double r = a - a * a * a;
      return t < 0.0 ? -r : r;
    }
    return f_trunc_tabulated(t);
  }
  double F(double t) const;

  /// Right-hand side of the u-equation: f~(a) - lambda |a|^{p-1} a |b|^{p+1}.
  double reaction(double a, double b) const {
    return f_trunc(a) - lambda_ * coupling_factor(a, b);
  }

  std::string kind_name() const;

 private:
  BistableModel() = default;

  double coupling_factor(double a, double b) const {
    if (p_ == 1.0) return a * b * b;
    return std::pow(std::abs(a), p_ - 1.0) * a * std::pow(std::abs(b), p_ + 1.0);
  }
  double f_trunc_tabulated(double t) const;
  double f_positive(double a) const;
  double antiderivative(double a) const;
  void validate_double_well() const;

  NonlinearityKind kind_ = NonlinearityKind::Cubic;
  double M_ = 1.0;
  double lambda_ = 0.0;
  double p_ = 1.0;
  double lipschitz_ = 0.0;

  // tabulated data, t >= 0 half only
  std::vector<double> t_;
  std::vector<double> f_;
  std::vector<double> cumulative_;  // int_0^{t_i} f
  double integral_to_M_ = 0.0;
};

struct ThresholdResult {
  bool holds = false;
  double inf_value = 0.0;
  double argmin = 0.0;
  /// Value found by the dense scan + refinement, kept as a cross-check
  /// when a closed form is available.
  double scan_value = 0.0;
};

/// W(s,t) = F(s) + F(t) + lambda/(p+1) |s|^{p+1} |t|^{p+1}.
class InteractionPotential {
 public:
  explicit InteractionPotential(const BistableModel& model) : model_(&model) {}

  const BistableModel& model() const { return *model_; }
  double operator()(double s, double t) const;

 private:
  const BistableModel* model_;
};

/// Tests inf_{s in [0,M]} W(s,s) > F(0).
ThresholdResult segregation_threshold_holds(const InteractionPotential& pot);

}  // namespace saddle
