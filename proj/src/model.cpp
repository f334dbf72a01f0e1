#include "saddle/model.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "saddle/errors.h"

namespace saddle {

namespace {

constexpr int kThresholdScanPoints = 10000;
constexpr double kThresholdTol = 1e-10;

}  // namespace

BistableModel BistableModel::cubic(double lambda, double p) {
  if (lambda < 0.0) throw ConfigError("coupling lambda must be nonnegative");
  if (p < 1.0) throw ConfigError("coupling exponent p must be >= 1");
  BistableModel m;
  m.kind_ = NonlinearityKind::Cubic;
  m.M_ = 1.0;
  m.lambda_ = lambda;
  m.p_ = p;
  // max |1 - 3t^2| on [-2, 2]
  m.lipschitz_ = 11.0;
  return m;
}

BistableModel BistableModel::tabulated(double M, std::vector<double> t,
                                       std::vector<double> f, double lambda,
                                       double p, bool validate) {
  if (!(M > 0.0)) throw ConfigError("well location M must be positive");
  if (lambda < 0.0) throw ConfigError("coupling lambda must be nonnegative");
  if (p < 1.0) throw ConfigError("coupling exponent p must be >= 1");
  if (t.size() != f.size() || t.size() < 3)
    throw ConfigError("tabulated nonlinearity needs at least 3 samples");
  if (t.front() != 0.0)
    throw ConfigError("tabulated nonlinearity must start at t = 0");
  for (std::size_t i = 1; i < t.size(); ++i) {
    if (!(t[i] > t[i - 1]))
      throw ConfigError("tabulated abscissae must be strictly ascending");
  }
  if (t.back() < M + 1.0)
    throw ConfigError("tabulated nonlinearity must cover [0, M+1]");

  BistableModel m;
  m.kind_ = NonlinearityKind::Tabulated;
  m.M_ = M;
  m.lambda_ = lambda;
  m.p_ = p;
  m.t_ = std::move(t);
  m.f_ = std::move(f);

  // Simpson on each panel; exact for the piecewise-linear interpolant.
  m.cumulative_.assign(m.t_.size(), 0.0);
  for (std::size_t i = 1; i < m.t_.size(); ++i) {
    const double a = m.t_[i - 1], b = m.t_[i];
    const double fm = 0.5 * (m.f_[i - 1] + m.f_[i]);
    m.cumulative_[i] =
        m.cumulative_[i - 1] + (b - a) / 6.0 * (m.f_[i - 1] + 4.0 * fm + m.f_[i]);
  }
  m.integral_to_M_ = m.antiderivative(M);

  double lip = 0.0;
  for (std::size_t i = 1; i < m.t_.size(); ++i) {
    if (m.t_[i - 1] >= M + 1.0) break;
    lip = std::max(lip, std::abs((m.f_[i] - m.f_[i - 1]) / (m.t_[i] - m.t_[i - 1])));
  }
  m.lipschitz_ = lip;

  if (validate) m.validate_double_well();
  return m;
}

BistableModel BistableModel::from_file(const std::filesystem::path& path,
                                       double lambda, double p) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open nonlinearity file " + path.string());
  std::string line;
  double M = 0.0;
  bool have_M = false;
  std::vector<double> t, f;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    if (!have_M) {
      std::string key;
      if (!(ls >> key >> M) || key != "M")
        throw ConfigError("nonlinearity file must start with 'M <value>'");
      have_M = true;
      continue;
    }
    double a = 0.0, b = 0.0;
    if (!(ls >> a >> b))
      throw ConfigError("malformed line in nonlinearity file: " + line);
    t.push_back(a);
    f.push_back(b);
  }
  if (!have_M) throw ConfigError("nonlinearity file is empty");
  return tabulated(M, std::move(t), std::move(f), lambda, p);
}

BistableModel BistableModel::with_coupling(double lambda, double p) const {
  if (lambda < 0.0) throw ConfigError("coupling lambda must be nonnegative");
  if (p < 1.0) throw ConfigError("coupling exponent p must be >= 1");
  BistableModel m = *this;
  m.lambda_ = lambda;
  m.p_ = p;
  return m;
}

std::string BistableModel::kind_name() const {
  return kind_ == NonlinearityKind::Cubic ? "cubic" : "tabulated";
}

double BistableModel::f_positive(double a) const {
  if (kind_ == NonlinearityKind::Cubic) return a - a * a * a;
  if (a > t_.back()) throw RangeError("tabulated nonlinearity queried outside its range");
  const auto it = std::upper_bound(t_.begin(), t_.end(), a);
  const std::size_t hi = std::min<std::size_t>(it - t_.begin(), t_.size() - 1);
  const std::size_t lo = hi - 1;
  const double s = (a - t_[lo]) / (t_[hi] - t_[lo]);
  return f_[lo] + s * (f_[hi] - f_[lo]);
}

double BistableModel::antiderivative(double a) const {
  // int_0^a f for a >= 0, tabulated only
  const auto it = std::upper_bound(t_.begin(), t_.end(), a);
  const std::size_t hi = std::min<std::size_t>(it - t_.begin(), t_.size() - 1);
  const std::size_t lo = hi - 1;
  const double fa = f_positive(a);
  return cumulative_[lo] + 0.5 * (a - t_[lo]) * (f_[lo] + fa);
}

double BistableModel::f(double t) const {
  const double a = std::abs(t);
  const double r = f_positive(a);
  return t < 0.0 ? -r : r;
}

double BistableModel::f_trunc_tabulated(double t) const {
  const double a = std::min(std::abs(t), M_ + 1.0);
  const double r = f_positive(a);
  return t < 0.0 ? -r : r;
}

double BistableModel::F(double t) const {
  const double a = std::abs(t);
  if (!(a <= M_ + 1.0)) throw RangeError("F evaluated outside [-M-1, M+1]");
  if (kind_ == NonlinearityKind::Cubic) {
    const double q = 1.0 - a * a;
    return 0.25 * q * q;
  }
  return integral_to_M_ - antiderivative(a);
}

void BistableModel::validate_double_well() const {
  const double scale = std::max(1.0, std::abs(F(0.0)));
  if (std::abs(f(M_)) > 1e-12 * scale) throw ConfigError("bistable model requires f(M) = 0");
  if (std::abs(f_[0]) > 0.0) throw ConfigError("bistable model requires f(0) = 0");
  constexpr int samples = 4096;
  for (int i = 1; i < samples; ++i) {
    const double s = M_ * i / samples;
    if (!(F(s) > 0.0))
      throw ConfigError("double-well condition F > 0 on (-M, M) violated");
  }
  for (int i = 0; i <= samples; ++i) {
    const double s = (M_ + 1.0) * i / samples;
    if (F(s) < -1e-12 * scale)
      throw ConfigError("double-well condition F >= 0 violated");
  }
}

double InteractionPotential::operator()(double s, double t) const {
  const double p = model_->p();
  const double a = std::abs(s), b = std::abs(t);
  const double coupling = p == 1.0 ? a * a * b * b : std::pow(a * b, p + 1.0);
  return model_->F(s) + model_->F(t) + model_->lambda() / (p + 1.0) * coupling;
}

ThresholdResult segregation_threshold_holds(const InteractionPotential& pot) {
  const BistableModel& model = pot.model();
  const double M = model.M();
  auto diag = [&](double s) { return pot(s, s); };

  int best = 0;
  double best_val = diag(0.0);
  for (int i = 1; i <= kThresholdScanPoints; ++i) {
    const double v = diag(M * i / kThresholdScanPoints);
    if (v < best_val) {
      best_val = v;
      best = i;
    }
  }
  // golden-section on the bracketing cells
  double a = M * std::max(best - 1, 0) / kThresholdScanPoints;
  double b = M * std::min(best + 1, kThresholdScanPoints) / kThresholdScanPoints;
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  double c = b - g * (b - a), d = a + g * (b - a);
  double fc = diag(c), fd = diag(d);
  while (b - a > kThresholdTol) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - g * (b - a);
      fc = diag(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + g * (b - a);
      fd = diag(d);
    }
  }
  double argmin = 0.5 * (a + b);
  double scan_value = diag(argmin);
  if (best_val < scan_value) {
    scan_value = best_val;
    argmin = M * best / kThresholdScanPoints;
  }

  ThresholdResult r;
  r.scan_value = scan_value;
  if (model.kind() == NonlinearityKind::Cubic && model.p() == 1.0) {
    const double lambda = model.lambda();
    r.argmin = 1.0 / std::sqrt(1.0 + lambda);
    r.inf_value = lambda / (2.0 * (1.0 + lambda));
  } else {
    r.argmin = argmin;
    r.inf_value = scan_value;
  }
  r.holds = r.inf_value > model.F(0.0);
  return r;
}

}  // namespace saddle
