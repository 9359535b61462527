#include "spectral.hpp"

#include <fftw3.h>

#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <mutex>

#include <json.hpp>

#include "errors.hpp"

namespace qdnls::spectral {

namespace {

// FFTW's planner is not re-entrant.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

constexpr Complex kI{0.0, 1.0};

}  // namespace

bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

int default_cutoff(int grid) { return grid / 3; }

Field make_field(int cutoff, int grid) {
  if (cutoff < 1) throw ValidationError("cutoff must be positive, got " + std::to_string(cutoff));
  if (!is_power_of_two(grid)) {
    throw ValidationError("grid size must be a power of two, got " + std::to_string(grid));
  }
  if (grid < 2 * cutoff + 2) {
    throw ValidationError("grid " + std::to_string(grid) + " too small for cutoff " +
                          std::to_string(cutoff) + " (need n >= 2 Xi + 2)");
  }
  Field f;
  f.cutoff = cutoff;
  f.grid = grid;
  f.coeff.assign(static_cast<std::size_t>(2 * cutoff + 1), Complex{});
  return f;
}

Field synthesize_field(const resonance::ResonantQuad& quad, double K0,
                       const std::array<double, 4>& phases, int cutoff, int grid) {
  if (!(K0 > 0.0 && K0 < 1.0)) {
    throw ValidationError("K0 must lie in the open interval (0,1), got " + std::to_string(K0));
  }
  const auto modes = quad.modes();
  for (auto xi : modes) {
    if (std::abs(xi) > cutoff) {
      throw ValidationError("cutoff " + std::to_string(cutoff) + " does not contain cluster mode " +
                            std::to_string(xi));
    }
  }
  Field f = make_field(cutoff, grid);
  const std::array<double, 4> I{K0, K0 / 2.0, 1.0 - K0, (1.0 - K0) / 2.0};
  for (int j = 0; j < 4; ++j) f.at(modes[j]) = std::polar(std::sqrt(I[j]), phases[j]);
  return f;
}

Transform::Transform(int cutoff, int grid, int padding) : cutoff_(cutoff) {
  if (padding < 1) throw ValidationError("padding factor must be >= 1");
  points_ = padding * grid;
  if (points_ < 6 * cutoff + 1) {
    throw ValidationError("padded grid of " + std::to_string(points_) +
                          " points aliases quintic products at cutoff " + std::to_string(cutoff) +
                          " (need >= 6 Xi + 1)");
  }
  std::lock_guard<std::mutex> lock(planner_mutex());
  auto* buf = fftw_alloc_complex(static_cast<std::size_t>(points_));
  buf_ = buf;
  fwd_ = fftw_plan_dft_1d(points_, buf, buf, FFTW_FORWARD, FFTW_ESTIMATE);
  bwd_ = fftw_plan_dft_1d(points_, buf, buf, FFTW_BACKWARD, FFTW_ESTIMATE);
}

Transform::~Transform() {
  std::lock_guard<std::mutex> lock(planner_mutex());
  fftw_destroy_plan(static_cast<fftw_plan>(fwd_));
  fftw_destroy_plan(static_cast<fftw_plan>(bwd_));
  fftw_free(buf_);
}

void Transform::to_grid(const std::vector<Complex>& c, std::vector<Complex>& values,
                        const std::function<Complex(long)>& weight) {
  auto* buf = reinterpret_cast<Complex*>(buf_);
  std::fill(buf, buf + points_, Complex{});
  for (long xi = -cutoff_; xi <= cutoff_; ++xi) {
    const Complex v = c[static_cast<std::size_t>(xi + cutoff_)];
    buf[(xi + points_) % points_] = weight ? weight(xi) * v : v;
  }
  fftw_execute(static_cast<fftw_plan>(bwd_));
  values.assign(buf, buf + points_);
}

void Transform::from_grid(const std::vector<Complex>& values, std::vector<Complex>& c) {
  auto* buf = reinterpret_cast<Complex*>(buf_);
  std::copy(values.begin(), values.end(), buf);
  fftw_execute(static_cast<fftw_plan>(fwd_));
  c.resize(static_cast<std::size_t>(2 * cutoff_ + 1));
  const double scale = 1.0 / points_;
  for (long xi = -cutoff_; xi <= cutoff_; ++xi) {
    c[static_cast<std::size_t>(xi + cutoff_)] = buf[(xi + points_) % points_] * scale;
  }
}

Solver::Solver(int cutoff, int grid, double lambda, double mu, int padding)
    : cutoff_(cutoff), grid_(grid), padding_(padding), lambda_(lambda), mu_(mu),
      tr_(cutoff, grid, padding) {
  make_field(cutoff, grid);  // validation only
}

void Solver::nonlinear(const std::vector<Complex>& c, std::vector<Complex>& out) {
  tr_.to_grid(c, u_);
  tr_.to_grid(c, ux_, [](long xi) { return Complex(0.0, static_cast<double>(xi)); });
  for (std::size_t j = 0; j < u_.size(); ++j) {
    const Complex u = u_[j];
    const double a2 = std::norm(u);
    ux_[j] = -kI * lambda_ * u * u * std::conj(ux_[j]) + mu_ * a2 * a2 * u;
  }
  tr_.from_grid(ux_, out);
  for (auto& z : out) z *= -kI;
}

void Solver::step(Field& f, double dt) {
  const std::size_t n = f.coeff.size();
  if (half_.size() != n || cached_dt_ != dt) {
    half_.resize(n);
    for (long xi = -cutoff_; xi <= cutoff_; ++xi) {
      half_[static_cast<std::size_t>(xi + cutoff_)] =
          std::polar(1.0, -static_cast<double>(xi * xi) * dt / 2.0);
    }
    cached_dt_ = dt;
  }
  const std::vector<Complex>& E = half_;
  std::vector<Complex>& y = tmp_;
  y.resize(n);

  nonlinear(f.coeff, k1_);
  for (std::size_t i = 0; i < n; ++i) y[i] = E[i] * (f.coeff[i] + 0.5 * dt * k1_[i]);
  nonlinear(y, k2_);
  for (std::size_t i = 0; i < n; ++i) y[i] = E[i] * f.coeff[i] + 0.5 * dt * k2_[i];
  nonlinear(y, k3_);
  for (std::size_t i = 0; i < n; ++i) y[i] = E[i] * E[i] * f.coeff[i] + dt * E[i] * k3_[i];
  nonlinear(y, k4_);
  for (std::size_t i = 0; i < n; ++i) {
    const Complex E2 = E[i] * E[i];
    f.coeff[i] = E2 * f.coeff[i] +
                 dt / 6.0 * (E2 * k1_[i] + 2.0 * E[i] * (k2_[i] + k3_[i]) + k4_[i]);
  }
  f.t += dt;
}

void Solver::evolve(Field& f, double dt, long steps, long stride,
                    const std::function<void(const Field&, long)>& observe) {
  if (!(dt > 0.0)) throw ValidationError("dt must be positive");
  if (steps < 0) throw ValidationError("steps must be non-negative");
  if (observe) observe(f, 0);
  for (long s = 1; s <= steps; ++s) {
    step(f, dt);
    for (const auto& z : f.coeff) {
      if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) {
        throw NumericalError("spectral field became non-finite at step " + std::to_string(s) +
                             " (last healthy step " + std::to_string(s - 1) + ", t=" +
                             std::to_string(f.t) + ")");
      }
    }
    if (observe && ((stride > 0 && s % stride == 0) || s == steps)) observe(f, s);
  }
}

Conserved Solver::conserved(const Field& f) {
  Conserved c;
  double kinetic = 0.0, drift = 0.0;
  for (long xi = -f.cutoff; xi <= f.cutoff; ++xi) {
    const double a = std::norm(f.at(xi));
    c.mass += a;
    kinetic += 0.5 * static_cast<double>(xi * xi) * a;
    drift += static_cast<double>(xi) * a;
  }
  tr_.to_grid(f.coeff, u_);
  tr_.to_grid(f.coeff, ux_, [](long xi) { return Complex(0.0, static_cast<double>(xi)); });
  double cubic = 0.0, sextic = 0.0, quartic = 0.0;
  for (std::size_t j = 0; j < u_.size(); ++j) {
    const double a2 = std::norm(u_[j]);
    cubic += a2 * std::imag(std::conj(u_[j]) * ux_[j]);
    quartic += a2 * a2;
    sextic += a2 * a2 * a2;
  }
  const double P = static_cast<double>(u_.size());
  c.energy = kinetic + lambda_ / 4.0 * cubic / P +
             (lambda_ * lambda_ + 2.0 * mu_) / 12.0 * sextic / P;
  c.momentum = -0.5 * drift - lambda_ / 4.0 * quartic / P;
  return c;
}

double Solver::max_abs2(const Field& f) {
  tr_.to_grid(f.coeff, u_);
  double m = 0.0;
  for (const auto& z : u_) m = std::max(m, std::norm(z));
  return m;
}

Conserved conserved_triple(const Field& f, double lambda, double mu, int padding) {
  Solver s(f.cutoff, f.grid, lambda, mu, padding);
  return s.conserved(f);
}

std::vector<Complex> interaction_coefficients(const Field& f) {
  std::vector<Complex> a(f.coeff.size());
  for (long xi = -f.cutoff; xi <= f.cutoff; ++xi) {
    a[static_cast<std::size_t>(xi + f.cutoff)] =
        f.at(xi) * std::polar(1.0, static_cast<double>(xi * xi) * f.t);
  }
  return a;
}

double momentum_fourier_identity(const Field& f, double lambda, double P0) {
  const long X = f.cutoff;
  std::vector<long> support;
  for (long xi = -X; xi <= X; ++xi) {
    if (f.at(xi) != Complex{}) support.push_back(xi);
  }
  double first = 0.0;
  for (long xi : support) first += static_cast<double>(xi) * std::norm(f.at(xi));
  // Q_k = sum_{xi1} uhat(xi1) uhat(k - xi1), k in [-2X, 2X].
  std::vector<Complex> Q(static_cast<std::size_t>(4 * X + 1));
  for (long x1 : support) {
    for (long x2 : support) Q[static_cast<std::size_t>(x1 + x2 + 2 * X)] += f.at(x1) * f.at(x2);
  }
  double second = 0.0;
  for (const auto& q : Q) second += std::norm(q);
  return std::abs(first + lambda / 2.0 * second + 2.0 * P0);
}

double weighted_l2(const Field& f) {
  double s = 0.0;
  for (long xi = -f.cutoff; xi <= f.cutoff; ++xi) {
    s += (1.0 + static_cast<double>(xi * xi)) * std::norm(f.at(xi));
  }
  return std::sqrt(s);
}

double apriori_ratio(const Field& f, resonance::Freq m_star) {
  return weighted_l2(f) / static_cast<double>(m_star);
}

double dt_heuristic(const Field& f, double lambda, double mu, int padding) {
  Solver s(f.cutoff, f.grid, lambda, mu, padding);
  const double m2 = s.max_abs2(f);
  return 0.5 / (std::abs(lambda) * m2 * f.cutoff + std::abs(mu) * m2 * m2 + 1.0);
}

void save_checkpoint(const Field& f, double lambda, double mu,
                     const resonance::ResonantQuad& quad, const std::string& path) {
  std::ofstream bin(path, std::ios::binary);
  if (!bin) throw IoError("cannot open checkpoint for writing: " + path);
  for (const auto& z : f.coeff) {
    const double parts[2] = {z.real(), z.imag()};
    bin.write(reinterpret_cast<const char*>(parts), sizeof(parts));
  }
  if (!bin) throw IoError("failed writing checkpoint: " + path);

  nlohmann::json meta = {{"t", f.t},           {"cutoff", f.cutoff}, {"grid", f.grid},
                         {"lambda", lambda},   {"mu", mu},
                         {"quad", {{"M", quad.m}, {"N", quad.n}}},
                         {"layout", "little-endian float64 (re, im) pairs for xi = -cutoff..cutoff"}};
  std::ofstream js(path + ".json");
  if (!js) throw IoError("cannot open checkpoint sidecar for writing: " + path + ".json");
  js << meta.dump(2) << "\n";
  if (!js) throw IoError("failed writing checkpoint sidecar: " + path + ".json");
}

Field load_checkpoint(const std::string& path) {
  std::ifstream js(path + ".json");
  if (!js) throw IoError("cannot open checkpoint sidecar: " + path + ".json");
  nlohmann::json meta;
  try {
    js >> meta;
  } catch (const nlohmann::json::exception& e) {
    throw IoError("malformed checkpoint sidecar " + path + ".json: " + e.what());
  }
  Field f = make_field(meta.at("cutoff").get<int>(), meta.at("grid").get<int>());
  f.t = meta.at("t").get<double>();
  std::ifstream bin(path, std::ios::binary);
  if (!bin) throw IoError("cannot open checkpoint: " + path);
  for (auto& z : f.coeff) {
    double parts[2];
    bin.read(reinterpret_cast<char*>(parts), sizeof(parts));
    if (!bin) throw IoError("checkpoint truncated: " + path);
    z = {parts[0], parts[1]};
  }
  return f;
}

}  // namespace qdnls::spectral
