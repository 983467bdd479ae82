#include "ppl/simulators.hpp"

#include <fftw3.h>

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "ppl/error.hpp"

namespace ppl {
namespace {

Point uniform_point(Rng& rng, double x0, double x1, double y0, double y1) {
  const double x = rng.uniform(x0, x1);
  const double y = rng.uniform(y0, y1);
  return {x, y};
}

void check_intensity_value(double v, Point u) {
  if (!std::isfinite(v) || v < 0.0) {
    std::ostringstream msg;
    msg << "intensity must be finite and nonnegative, got " << v << " at (" << u.x << ", " << u.y
        << ")";
    throw ValidationError(msg.str());
  }
}

}  // namespace

PointPattern simulate_poisson(double intensity, const Window& w, RngSeed seed) {
  check_intensity_value(intensity, {w.x_min(), w.y_min()});
  Rng rng(seed);
  const auto n = rng.poisson(intensity * w.area());
  std::vector<Point> pts;
  pts.reserve(n);
  for (std::uint64_t i = 0; i < n; ++i) {
    pts.push_back(uniform_point(rng, w.x_min(), w.x_max(), w.y_min(), w.y_max()));
  }
  return PointPattern(std::move(pts), w);
}

PointPattern simulate_poisson(const Field& intensity, const Window& w, RngSeed seed,
                              std::optional<double> bound, std::size_t bound_grid) {
  double m = 0.0;
  if (bound) {
    m = *bound;
    if (!std::isfinite(m) || m < 0.0) throw ValidationError("intensity bound must be finite");
  } else {
    const QuadratureGrid grid(w, bound_grid);
    for (const auto& c : grid.centers()) {
      const double v = intensity(c);
      check_intensity_value(v, c);
      m = std::max(m, v);
    }
    m *= 1.01;
  }
  Rng rng(seed);
  const auto n = rng.poisson(m * w.area());
  std::vector<Point> pts;
  for (std::uint64_t i = 0; i < n; ++i) {
    const Point u = uniform_point(rng, w.x_min(), w.x_max(), w.y_min(), w.y_max());
    const double v = intensity(u);
    check_intensity_value(v, u);
    if (v > m) throw ValidationError("intensity exceeds its bound; supply a larger bound");
    if (rng.uniform() * m < v) pts.push_back(u);
  }
  return PointPattern(std::move(pts), w);
}

// ---------------------------------------------------------------------------
// Log-Gaussian Cox process

struct LgcpSimulator::Impl {
  GaussianFieldSpec spec;
  Window window;
  QuadratureGrid lattice;
  std::vector<double> mean;

  // circulant embedding
  std::size_t embed = 0;  // torus size per axis
  std::vector<double> spectral_scale;
  fftw_plan plan = nullptr;

  // Cholesky fallback
  Eigen::MatrixXd factor;

  Impl(GaussianFieldSpec s, const Window& w)
      : spec(std::move(s)), window(w), lattice(w, spec.grid_resolution) {}

  ~Impl() {
    if (plan) fftw_destroy_plan(plan);
  }

  double covariance(double dx, double dy) const {
    return spec.variance * std::exp(-spec.decay * std::sqrt(dx * dx + dy * dy));
  }

  bool try_circulant(std::size_t m) {
    const auto n = m * m;
    auto* buf = fftw_alloc_complex(n);
    auto* out = fftw_alloc_complex(n);
    auto* p = fftw_plan_dft_2d(static_cast<int>(m), static_cast<int>(m), buf, out, FFTW_FORWARD,
                               FFTW_ESTIMATE);
    const double hx = lattice.cell_width();
    const double hy = lattice.cell_height();
    for (std::size_t r = 0; r < m; ++r) {
      const double ly = static_cast<double>(std::min(r, m - r)) * hy;
      for (std::size_t c = 0; c < m; ++c) {
        const double lx = static_cast<double>(std::min(c, m - c)) * hx;
        buf[r * m + c][0] = covariance(lx, ly);
        buf[r * m + c][1] = 0.0;
      }
    }
    fftw_execute(p);
    double max_ev = 0.0;
    double min_ev = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      max_ev = std::max(max_ev, out[i][0]);
      min_ev = std::min(min_ev, out[i][0]);
    }
    const bool ok = min_ev >= -1e-8 * max_ev;
    if (ok) {
      embed = m;
      spectral_scale.resize(n);
      for (std::size_t i = 0; i < n; ++i) {
        spectral_scale[i] = std::sqrt(std::max(out[i][0], 0.0) / static_cast<double>(n));
      }
      plan = p;
    } else {
      fftw_destroy_plan(p);
    }
    fftw_free(buf);
    fftw_free(out);
    return ok;
  }

  void cholesky() {
    const auto n = lattice.cell_count();
    if (n > 4096) {
      throw ComputationError(
          "circulant embedding failed and the lattice is too large for a dense Cholesky factor");
    }
    Eigen::MatrixXd cov(n, n);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j <= i; ++j) {
        const auto a = lattice.center(i);
        const auto b = lattice.center(j);
        cov(i, j) = cov(j, i) = covariance(a.x - b.x, a.y - b.y);
      }
    }
    for (double jitter = 1e-10; jitter <= 1e-2; jitter *= 10.0) {
      Eigen::MatrixXd m = cov;
      m.diagonal().array() += jitter * spec.variance;
      Eigen::LLT<Eigen::MatrixXd> llt(m);
      if (llt.info() == Eigen::Success) {
        factor = llt.matrixL();
        return;
      }
    }
    throw ComputationError("covariance factorization failed after maximal jitter");
  }
};

LgcpSimulator::LgcpSimulator(GaussianFieldSpec spec, const Window& w) {
  if (!spec.mean) throw ValidationError("gaussian field requires a mean function");
  if (!(spec.variance > 0.0) || !std::isfinite(spec.variance)) {
    throw ValidationError("field variance must be positive");
  }
  if (!(spec.decay > 0.0) || !std::isfinite(spec.decay)) {
    throw ValidationError("field decay must be positive");
  }
  if (spec.grid_resolution == 0) throw ValidationError("field grid resolution must be positive");
  impl_ = std::make_unique<Impl>(std::move(spec), w);
  for (const auto& c : impl_->lattice.centers()) {
    const double m = impl_->spec.mean(c);
    if (!std::isfinite(m)) throw ValidationError("field mean must be finite");
    impl_->mean.push_back(m);
  }
  const auto g = impl_->spec.grid_resolution;
  bool ok = false;
  for (std::size_t pad = 2; pad <= 8 && !ok; pad *= 2) {
    if (pad * g > 2048) break;
    ok = impl_->try_circulant(pad * g);
  }
  if (!ok) impl_->cholesky();
}

LgcpSimulator::~LgcpSimulator() = default;
LgcpSimulator::LgcpSimulator(LgcpSimulator&&) noexcept = default;
LgcpSimulator& LgcpSimulator::operator=(LgcpSimulator&&) noexcept = default;

const QuadratureGrid& LgcpSimulator::lattice() const { return impl_->lattice; }

bool LgcpSimulator::uses_circulant_embedding() const { return impl_->embed > 0; }

std::vector<double> LgcpSimulator::sample_field(Rng& rng) const {
  const auto& im = *impl_;
  const auto g = im.spec.grid_resolution;
  std::vector<double> z(g * g);
  if (im.embed > 0) {
    const auto m = im.embed;
    const auto n = m * m;
    auto* in = fftw_alloc_complex(n);
    auto* out = fftw_alloc_complex(n);
    for (std::size_t i = 0; i < n; ++i) {
      in[i][0] = im.spectral_scale[i] * rng.normal();
      in[i][1] = im.spectral_scale[i] * rng.normal();
    }
    fftw_execute_dft(im.plan, in, out);
    for (std::size_t r = 0; r < g; ++r) {
      for (std::size_t c = 0; c < g; ++c) z[r * g + c] = out[r * m + c][0];
    }
    fftw_free(in);
    fftw_free(out);
  } else {
    Eigen::VectorXd e(static_cast<Eigen::Index>(g * g));
    for (Eigen::Index i = 0; i < e.size(); ++i) e[i] = rng.normal();
    const Eigen::VectorXd f = im.factor.triangularView<Eigen::Lower>() * e;
    for (std::size_t i = 0; i < z.size(); ++i) z[i] = f[static_cast<Eigen::Index>(i)];
  }
  for (std::size_t i = 0; i < z.size(); ++i) z[i] += im.mean[i];
  return z;
}

PointPattern LgcpSimulator::operator()(RngSeed seed) const {
  Rng rng(seed);
  const auto field = sample_field(rng);
  const auto& lat = impl_->lattice;
  std::vector<Point> pts;
  for (std::size_t i = 0; i < field.size(); ++i) {
    const double mean_count = std::exp(field[i]) * lat.cell_area();
    if (!std::isfinite(mean_count)) throw ComputationError("LGCP intensity overflow");
    const auto n = rng.poisson(mean_count);
    const double x0 = lat.cell_x0(i);
    const double y0 = lat.cell_y0(i);
    for (std::uint64_t j = 0; j < n; ++j) {
      pts.push_back(uniform_point(rng, x0, x0 + lat.cell_width(), y0, y0 + lat.cell_height()));
    }
  }
  return PointPattern(std::move(pts), impl_->window);
}

PointPattern simulate_lgcp(const GaussianFieldSpec& spec, const Window& w, RngSeed seed) {
  return LgcpSimulator(spec, w)(seed);
}

// ---------------------------------------------------------------------------
// Hard-core process

PointPattern simulate_hardcore(const HardCoreSpec& spec, const Window& w, RngSeed seed) {
  if (!(spec.beta > 0.0) || !std::isfinite(spec.beta)) {
    throw ValidationError("hard-core activity must be positive");
  }
  if (!(spec.range >= 0.0) || !std::isfinite(spec.range)) {
    throw ValidationError("hard-core range must be nonnegative");
  }
  if (spec.burn_in < 1) throw ValidationError("burn_in must be at least 1");
  Rng rng(seed);
  const double mass = spec.beta * w.area();
  std::vector<Point> pts;
  for (std::size_t it = 0; it < spec.burn_in; ++it) {
    if (rng.uniform() < 0.5) {
      const Point u = uniform_point(rng, w.x_min(), w.x_max(), w.y_min(), w.y_max());
      const double accept = mass / static_cast<double>(pts.size() + 1);
      if (rng.uniform() >= accept) continue;
      const bool blocked = std::any_of(pts.begin(), pts.end(),
                                       [&](const Point& p) { return distance(p, u) < spec.range; });
      if (!blocked) pts.push_back(u);
    } else {
      if (pts.empty()) continue;
      const auto j = rng.uniform_index(pts.size());
      const double accept = static_cast<double>(pts.size()) / mass;
      if (rng.uniform() < accept) {
        pts[j] = pts.back();
        pts.pop_back();
      }
    }
  }
  return PointPattern(std::move(pts), w);
}

// ---------------------------------------------------------------------------
// Determinantal point process

namespace {

double exponential_spectral_density(double variance, double decay, double fx, double fy) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  const double w2 = (fx * fx + fy * fy) * two_pi * two_pi;
  return variance * two_pi * decay / std::pow(decay * decay + w2, 1.5);
}

}  // namespace

DppSimulator::DppSimulator(DppSpec spec, const Window& w) : window_(w) {
  if (!(spec.variance > 0.0) || !std::isfinite(spec.variance)) {
    throw ValidationError("DPP kernel variance must be positive");
  }
  if (!(spec.decay > 0.0) || !std::isfinite(spec.decay)) {
    throw ValidationError("DPP kernel decay must be positive");
  }
  const double lx = w.width();
  const double ly = w.height();
  const double total = spec.variance * w.area();
  auto eigenvalue = [&](long k1, long k2) {
    return exponential_spectral_density(spec.variance, spec.decay, static_cast<double>(k1) / lx,
                                        static_cast<double>(k2) / ly);
  };
  // Mass of the square |k1|, |k2| <= K, grown ring by ring.
  constexpr std::size_t max_truncation = 4096;
  double mass = eigenvalue(0, 0);
  std::size_t k = 0;
  const std::size_t target = spec.truncation;
  while (true) {
    const bool done = target > 0 ? k >= target : mass >= 0.99 * total;
    if (done) break;
    if (k >= max_truncation) {
      throw ValidationError("DPP spectral truncation would exceed the supported mode count");
    }
    ++k;
    const auto kk = static_cast<long>(k);
    for (long j = -kk; j <= kk; ++j) {
      mass += eigenvalue(j, kk) + eigenvalue(j, -kk);
    }
    for (long j = -kk + 1; j <= kk - 1; ++j) {
      mass += eigenvalue(kk, j) + eigenvalue(-kk, j);
    }
  }
  if (mass < 0.99 * total) {
    std::ostringstream msg;
    msg << "DPP truncation K=" << k << " retains only " << mass / total
        << " of the kernel mass (needs 0.99)";
    throw ValidationError(msg.str());
  }
  truncation_ = k;
  retained_mass_ = mass / total;
  const auto kk = static_cast<long>(k);
  modes_.reserve(static_cast<std::size_t>((2 * kk + 1) * (2 * kk + 1)));
  double expected = 0.0;
  for (long k2 = -kk; k2 <= kk; ++k2) {
    for (long k1 = -kk; k1 <= kk; ++k1) {
      double ev = eigenvalue(k1, k2);
      if (ev > 1.0 + 1e-6) throw ValidationError("kernel not valid: spectral eigenvalue exceeds 1");
      ev = std::clamp(ev, 0.0, 1.0);
      expected += ev;
      count_variance_ += ev * (1.0 - ev);
      modes_.push_back({static_cast<double>(k1) / lx, static_cast<double>(k2) / ly, ev});
    }
  }
  expected_count_ = expected;
}

PointPattern DppSimulator::operator()(RngSeed seed) const {
  using cplx = std::complex<double>;
  Rng rng(seed);
  std::vector<double> fx;
  std::vector<double> fy;
  for (const auto& m : modes_) {
    if (rng.uniform() < m.eigenvalue) {
      fx.push_back(m.frequency_x);
      fy.push_back(m.frequency_y);
    }
  }
  const auto n = fx.size();
  const auto& w = window_;
  constexpr double two_pi = 2.0 * std::numbers::pi;

  // Projection DPP sampling: each new point is drawn from the normalized
  // squared distance of v(x) to the span of the previously drawn v's.
  std::vector<std::vector<cplx>> basis;
  basis.reserve(n);
  std::vector<cplx> v(n);
  std::vector<cplx> coef;
  std::vector<Point> pts;
  pts.reserve(n);
  const double dn = static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) {
    while (true) {
      const Point u = uniform_point(rng, w.x_min(), w.x_max(), w.y_min(), w.y_max());
      const double ux = u.x - w.x_min();
      const double uy = u.y - w.y_min();
      for (std::size_t j = 0; j < n; ++j) {
        v[j] = std::polar(1.0, two_pi * (fx[j] * ux + fy[j] * uy));
      }
      coef.assign(basis.size(), cplx{});
      double projected = 0.0;
      for (std::size_t b = 0; b < basis.size(); ++b) {
        cplx c{};
        const auto& e = basis[b];
        for (std::size_t j = 0; j < n; ++j) c += std::conj(e[j]) * v[j];
        coef[b] = c;
        projected += std::norm(c);
      }
      const double residual = dn - projected;
      if (rng.uniform() * dn >= residual) continue;
      std::vector<cplx> e = v;
      for (std::size_t b = 0; b < basis.size(); ++b) {
        const auto& eb = basis[b];
        for (std::size_t j = 0; j < n; ++j) e[j] -= coef[b] * eb[j];
      }
      double norm2 = 0.0;
      for (const auto& c : e) norm2 += std::norm(c);
      const double inv = 1.0 / std::sqrt(norm2);
      for (auto& c : e) c *= inv;
      basis.push_back(std::move(e));
      pts.push_back(u);
      break;
    }
  }
  return PointPattern(std::move(pts), w);
}

PointPattern simulate_dpp(const DppSpec& spec, const Window& w, RngSeed seed) {
  return DppSimulator(spec, w)(seed);
}

// ---------------------------------------------------------------------------
// Thinning

ThinningResult thin_independent(const PointPattern& x, const Field& retention, RngSeed seed) {
  Rng rng(seed);
  ThinningResult out{PointPattern(x.window()), PointPattern(x.window()), {}, {}};
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = retention(x[i]);
    if (!(r >= 0.0 && r <= 1.0)) {
      std::ostringstream msg;
      msg << "retention probability " << r << " outside [0, 1]";
      throw ValidationError(msg.str());
    }
    if (rng.uniform() < r) {
      out.retained_index.push_back(i);
    } else {
      out.removed_index.push_back(i);
    }
  }
  out.retained = x.subset(out.retained_index);
  out.removed = x.subset(out.removed_index);
  return out;
}

ThinningResult thin_independent(const PointPattern& x, double retention, RngSeed seed) {
  return thin_independent(x, [retention](Point) { return retention; }, seed);
}

}  // namespace ppl
