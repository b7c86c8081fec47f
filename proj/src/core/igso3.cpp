#include "se3grasp/igso3.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <ostream>
#include <stdexcept>

namespace sg {

namespace {

constexpr double kAsymptoticEps = 1e-3;
constexpr int kMaxTruncation = 2000;
constexpr int kGridSize = 4096;

void require_positive_eps(double eps) {
  if (!(eps > 0.0)) throw std::invalid_argument("igso3: eps must be > 0");
}

// (w/2)/sin(w/2), the curvature factor of the small-eps closed form.
double curvature_factor(double w) {
  if (w < 1e-6) return 1.0 + w * w / 24.0;
  return (0.5 * w) / std::sin(0.5 * w);
}

double asymptotic_density(double w, double eps) {
  return std::sqrt(M_PI) * std::pow(eps, -1.5) * std::exp(0.25 * eps) *
         std::exp(-w * w / (4.0 * eps)) * curvature_factor(w);
}

double asymptotic_dlogf(double w, double eps) {
  double dlogg;
  if (w < 1e-4) {
    dlogg = w / 12.0;
  } else {
    dlogg = 1.0 / w - 0.5 / std::tan(0.5 * w);
  }
  return -w / (2.0 * eps) + dlogg;
}

double series_density(double w, double eps, int trunc) {
  double acc = 0.0;
  if (w < 1e-7) {
    for (int l = 0; l <= trunc; ++l) {
      const double n = 2.0 * l + 1.0;
      acc += n * n * std::exp(-l * (l + 1.0) * eps) *
             (1.0 - l * (l + 1.0) * w * w / 6.0);
    }
    return acc;
  }
  const double s = std::sin(0.5 * w);
  for (int l = 0; l <= trunc; ++l) {
    const double a = l + 0.5;
    acc += (2.0 * l + 1.0) * std::exp(-l * (l + 1.0) * eps) *
           std::sin(a * w) / s;
  }
  return acc;
}

// d/dw of the series and the series itself, evaluated together so the
// log-derivative shares one pass.
void series_f_and_df(double w, double eps, int trunc, double* f, double* df) {
  double facc = 0.0, dacc = 0.0;
  const double s = std::sin(0.5 * w);
  const double c = std::cos(0.5 * w);
  for (int l = 0; l <= trunc; ++l) {
    const double a = l + 0.5;
    const double weight = std::exp(-l * (l + 1.0) * eps);
    const double n = 2.0 * l + 1.0;
    if (a * w < 1e-2) {
      // Taylor form; the direct expression cancels catastrophically here.
      facc += weight * n * (1.0 - l * (l + 1.0) * w * w / 6.0);
      dacc += weight * (-n * l * (l + 1.0) * w / 3.0);
    } else {
      facc += weight * n * std::sin(a * w) / s;
      dacc += weight * n *
              (a * std::cos(a * w) * s - 0.5 * std::sin(a * w) * c) / (s * s);
    }
  }
  *f = facc;
  *df = dacc;
}

class TableCache {
 public:
  const IgSo3Table& get(double eps) {
    std::lock_guard<std::mutex> lock(mutex_);
    auto it = tables_.find(eps);
    if (it == tables_.end()) {
      it = tables_.emplace(eps, build(eps)).first;
    }
    return *it->second;
  }

 private:
  static std::unique_ptr<IgSo3Table> build(double eps) {
    require_positive_eps(eps);
    auto t = std::make_unique<IgSo3Table>();
    t->epsilon = eps;
    t->omega.resize(kGridSize);
    t->f.resize(kGridSize);
    t->dlogf.resize(kGridSize);
    t->cdf.resize(kGridSize);
    const double h = M_PI / (kGridSize - 1);
    for (int i = 0; i < kGridSize; ++i) {
      const double w = i * h;
      t->omega[i] = w;
      t->f[i] = igso3_density(w, eps);
      t->dlogf[i] = igso3_dlogf(w, eps);
    }
    // Cumulative trapezoid of the angle marginal f(w)(1-cos w)/pi,
    // normalized to end exactly at 1.
    auto marginal = [&](int i) {
      return t->f[i] * (1.0 - std::cos(t->omega[i])) / M_PI;
    };
    t->cdf[0] = 0.0;
    for (int i = 1; i < kGridSize; ++i) {
      t->cdf[i] = t->cdf[i - 1] + 0.5 * h * (marginal(i - 1) + marginal(i));
    }
    const double total = t->cdf.back();
    for (auto& c : t->cdf) c /= total;
    return t;
  }

  std::mutex mutex_;
  std::map<double, std::unique_ptr<IgSo3Table>> tables_;
};

TableCache& cache() {
  static TableCache instance;
  return instance;
}

double interp(const std::vector<double>& grid, const std::vector<double>& val,
              double x) {
  if (x <= grid.front()) return val.front();
  if (x >= grid.back()) return val.back();
  const double h = grid[1] - grid[0];
  const int i = std::min<int>(static_cast<int>(x / h),
                              static_cast<int>(grid.size()) - 2);
  const double s = (x - grid[i]) / h;
  return (1.0 - s) * val[i] + s * val[i + 1];
}

}  // namespace

int igso3_truncation(double eps) {
  require_positive_eps(eps);
  for (int l = 1; l <= kMaxTruncation; ++l) {
    if ((2.0 * l + 1.0) * std::exp(-l * (l + 1.0) * eps) < 1e-12) return l;
  }
  return kMaxTruncation;
}

double igso3_density(double omega, double eps, int trunc) {
  require_positive_eps(eps);
  if (eps < kAsymptoticEps) return asymptotic_density(omega, eps);
  if (trunc <= 0) trunc = igso3_truncation(eps);
  const double v = series_density(omega, eps, trunc);
  // Deep in the tail the alternating series drowns in rounding noise; the
  // heat-kernel closed form is the accurate continuation there.
  const double f0 = series_density(0.0, eps, trunc);
  if (v < f0 * 1e-12) return asymptotic_density(omega, eps);
  return v;
}

double igso3_dlogf(double omega, double eps, int trunc) {
  require_positive_eps(eps);
  if (eps < kAsymptoticEps) return asymptotic_dlogf(omega, eps);
  if (trunc <= 0) trunc = igso3_truncation(eps);
  double f, df;
  series_f_and_df(omega, eps, trunc, &f, &df);
  const double f0 = series_density(0.0, eps, trunc);
  if (f < f0 * 1e-12) return asymptotic_dlogf(omega, eps);
  return df / f;
}

const IgSo3Table& igso3_table(double eps) { return cache().get(eps); }

double igso3_quantize_eps(double eps) {
  static constexpr double kLo = 1e-6;
  static constexpr double kHi = 16.0;
  static constexpr int kBins = 512;
  if (eps <= kLo) return kLo;
  if (eps >= kHi) return kHi;
  const double step = std::log(kHi / kLo) / (kBins - 1);
  const double idx = std::round(std::log(eps / kLo) / step);
  return kLo * std::exp(idx * step);
}

double igso3_sample_angle(double eps, Rng& rng) {
  const IgSo3Table& t = igso3_table(eps);
  const double u = rng.uniform();
  const auto it = std::upper_bound(t.cdf.begin(), t.cdf.end(), u);
  const int hi = std::min<int>(
      static_cast<int>(it - t.cdf.begin()), static_cast<int>(t.cdf.size()) - 1);
  const int lo = std::max(hi - 1, 0);
  const double c0 = t.cdf[lo], c1 = t.cdf[hi];
  const double s = (c1 > c0) ? (u - c0) / (c1 - c0) : 0.0;
  return t.omega[lo] + s * (t.omega[hi] - t.omega[lo]);
}

Quat igso3_sample(double eps, Rng& rng) {
  const double angle = igso3_sample_angle(eps, rng);
  return exp_so3(angle * rng.unit_vector());
}

Vec3 igso3_score(const Quat& q, double eps) {
  const Vec3 phi = log_so3(q);
  const double w = phi.norm();
  if (w < 1e-9) return Vec3::Zero();
  const IgSo3Table& t = igso3_table(eps);
  const double d = interp(t.omega, t.dlogf, w);
  return (d / w) * phi;
}

Vec3 gauss_score(const Vec3& dp, double sigma) {
  if (!(sigma > 0.0)) throw std::invalid_argument("gauss_score: sigma <= 0");
  return -dp / (sigma * sigma);
}

void igso3_dump_csv(const IgSo3Table& table, std::ostream& out) {
  out << "omega,f,cdf,dlogf\n";
  char buf[160];
  for (size_t i = 0; i < table.omega.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g,%.17g\n",
                  table.omega[i], table.f[i], table.cdf[i], table.dlogf[i]);
    out << buf;
  }
}

}  // namespace sg
