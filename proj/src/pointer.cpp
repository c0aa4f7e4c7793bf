#include "obsent/pointer.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "obsent/errors.hpp"
#include "pointer_kernel.hpp"

namespace obsent::pointer {

using linalg::Complex;
using Index = Eigen::Index;

namespace {

constexpr double kPrunePathAmplitude = 1e-14;
constexpr double kPi = std::numbers::pi;

/// Operators expressed in the eigenbasis of M (eigenvalues ascending).
struct EigenFrame {
  linalg::RealVector mu;
  ComplexMatrix rho;
  ComplexMatrix h;
  std::size_t dim = 0;
};

EigenFrame make_frame(const ComplexMatrix& m, const ComplexMatrix& h, const DensityMatrix& rho) {
  if (rho.dim() != static_cast<std::size_t>(m.rows()))
    throw ShapeError("pointer: state dimension differs from the observable");
  const auto eig = linalg::herm_eigen(m);
  const ComplexMatrix& v = eig.eigenvectors;
  EigenFrame f;
  f.mu = eig.eigenvalues;
  f.rho = v.adjoint() * rho.matrix() * v;
  f.h = v.adjoint() * (0.5 * (h + h.adjoint())) * v;
  f.h = 0.5 * (f.h + f.h.adjoint());
  f.dim = rho.dim();
  return f;
}

double gaussian(double x, double omega) {
  return std::exp(-x * x / (2.0 * omega * omega)) / std::sqrt(2.0 * kPi * omega * omega);
}

double sqrt_gaussian(double x, double omega) {
  return std::exp(-x * x / (4.0 * omega * omega)) / std::pow(2.0 * kPi * omega * omega, 0.25);
}

void validate_pair(const ComplexMatrix& m, const ComplexMatrix& h, const char* what) {
  if (m.rows() == 0 || m.rows() != m.cols()) throw ShapeError(std::string(what) + ": M must be square");
  if (h.rows() != m.rows() || h.cols() != m.cols())
    throw ShapeError(std::string(what) + ": H and M must have the same dimension");
  if (!linalg::is_hermitian(m)) throw ValidationError(std::string(what) + ": M is not Hermitian");
  if (!linalg::is_hermitian(h)) throw ValidationError(std::string(what) + ": H is not Hermitian");
}

Axis axis_spanning(double lo_peak, double hi_peak, const PointerConfig& pc) {
  const double lo = std::min(lo_peak, hi_peak) - pc.buffer * pc.omega;
  const double hi = std::max(lo_peak, hi_peak) + pc.buffer * pc.omega;
  if (!(hi - lo > 0.0))
    throw ValidationError("make_grid: zero-width grid (degenerate spectrum and zero buffer)");
  const double steps = std::ceil((hi - lo) / pc.dx - 1e-9);
  return Axis{lo, pc.dx, static_cast<std::size_t>(steps) + 1};
}

std::pair<double, double> spectral_extremes(const ComplexMatrix& m) {
  const auto mu = linalg::herm_eigen(m).eigenvalues;
  return {mu(0), mu(mu.size() - 1)};
}

double tail_mass(double buffer) { return 0.5 * std::erfc(buffer / std::numbers::sqrt2); }

void check_normalization(double norm_p, double norm_v, std::size_t dim, const PointerConfig& pc,
                         std::size_t axes, const char* what) {
  const double allowance = normalization_allowance(pc, axes);
  const auto d = static_cast<double>(dim);
  if (std::abs(norm_p - 1.0) > allowance || std::abs(norm_v - d) > allowance * d) {
    std::ostringstream os;
    os << what << ": normalization failed (int p = " << norm_p << ", int V = " << norm_v << ", dim " << dim
       << "); increase the grid buffer or reduce dx";
    throw ValidationError(os.str());
  }
}

/// p(x) and V(x) of one interaction; free evolution afterwards leaves traces unchanged.
GridPair single_interaction(const EigenFrame& f, const Axis& axis, double kappa, double omega) {
  std::vector<double> p(axis.count);
  std::vector<double> v(axis.count);
  for (std::size_t j = 0; j < axis.count; ++j) {
    const double x = axis.at(j);
    double pj = 0.0;
    double vj = 0.0;
    for (std::size_t m = 0; m < f.dim; ++m) {
      const double g = gaussian(x - kappa * f.mu(static_cast<Index>(m)), omega);
      pj += std::max(0.0, f.rho(static_cast<Index>(m), static_cast<Index>(m)).real()) * g;
      vj += g;
    }
    p[j] = pj;
    v[j] = vj;
  }
  return {GridFunction({axis}, std::move(p)), GridFunction({axis}, std::move(v))};
}

GridPair checked(GridPair pair, std::size_t dim, const PointerConfig& pc, const char* what) {
  check_normalization(pair.p.integral(), pair.volume.integral(), dim, pc, pair.p.rank(), what);
  return pair;
}

void require_capacity(const SchemeConfig& cfg, Scheme scheme, const Execution& exec) {
  const double cost = cost_estimate(cfg, scheme);
  if (cost > exec.capacity) {
    std::ostringstream os;
    os << to_string(scheme) << " with N=" << cfg.N << ", dx=" << cfg.pointer.dx << ": estimated cost "
       << cost << " exceeds the capacity budget " << exec.capacity;
    throw CapacityError(os.str(), cost);
  }
}

// ---------------------------------------------------------------------------
// Repeated measurements: the unnormalized state after k outcomes is
// U_f K_{x_k} ... U_f K_{x_1} X (...)^dagger, built axis by axis so each prefix
// (x_1..x_k) is shared by all its continuations. The last axis only needs the
// diagonal, because U_f preserves the trace and K_x is diagonal.

struct RmTables {
  std::size_t dim;
  std::size_t n;                  // nodes per axis
  std::vector<double> sqrt_g;     // [m * n + j]
  std::vector<double> g;          // [m * n + j]
  std::vector<double> weight;     // trapezoid weights
  ComplexMatrix uf;
};

RmTables rm_tables(const EigenFrame& f, const Axis& axis, const SchemeConfig& cfg) {
  RmTables t;
  t.dim = f.dim;
  t.n = axis.count;
  t.sqrt_g.resize(t.dim * t.n);
  t.g.resize(t.dim * t.n);
  t.weight.resize(t.n);
  for (std::size_t j = 0; j < t.n; ++j) {
    const double x = axis.at(j);
    t.weight[j] = axis.weight(j);
    for (std::size_t m = 0; m < t.dim; ++m) {
      const double shift = x - cfg.pointer.kappa * f.mu(static_cast<Index>(m));
      t.sqrt_g[m * t.n + j] = sqrt_gaussian(shift, cfg.pointer.omega);
      t.g[m * t.n + j] = gaussian(shift, cfg.pointer.omega);
    }
  }
  t.uf = linalg::herm_expm(f.h, Complex(0.0, -cfg.dt));
  return t;
}

/// out = U_f D_j in D_j U_f^dagger, with D_j = diag(sqrt_g[., j]); matrices row-major d*d.
void step_state(const RmTables& t, std::size_t j, const Complex* in, Complex* scratch, Complex* out) {
  const std::size_t d = t.dim;
  for (std::size_t a = 0; a < d; ++a)
    for (std::size_t b = 0; b < d; ++b)
      scratch[a * d + b] = in[a * d + b] * (t.sqrt_g[a * t.n + j] * t.sqrt_g[b * t.n + j]);
  // out = U (scratch) U^dagger, through `in`-independent temporaries.
  Complex tmp[64];
  Complex* row = d * d <= 64 ? tmp : new Complex[d * d];
  for (std::size_t a = 0; a < d; ++a)
    for (std::size_t b = 0; b < d; ++b) {
      Complex acc = 0.0;
      for (std::size_t k = 0; k < d; ++k) acc += t.uf(static_cast<Index>(a), static_cast<Index>(k)) * scratch[k * d + b];
      row[a * d + b] = acc;
    }
  for (std::size_t a = 0; a < d; ++a)
    for (std::size_t b = 0; b < d; ++b) {
      Complex acc = 0.0;
      for (std::size_t k = 0; k < d; ++k) acc += row[a * d + k] * std::conj(t.uf(static_cast<Index>(b), static_cast<Index>(k)));
      out[a * d + b] = acc;
    }
  if (row != tmp) delete[] row;
}

struct RmPartial {
  double entropy = 0.0;
  double norm_p = 0.0;
  double norm_v = 0.0;
};

/// Visits every prefix (x_1..x_{N-1}) below a fixed x_1 and hands the diagonal of
/// the propagated rho- and identity-branches to `leaf`.
template <class Leaf>
void rm_walk(const RmTables& t, std::size_t levels, std::size_t j1, const ComplexMatrix& rho, Leaf&& leaf) {
  const std::size_t d = t.dim;
  const std::size_t dd = d * d;
  // states[k] holds the rho branch then the identity branch after k+1 interactions.
  std::vector<Complex> states(2 * dd * levels);
  std::vector<Complex> scratch(dd);
  std::vector<Complex> start(2 * dd, Complex(0.0));
  for (std::size_t a = 0; a < d; ++a) {
    for (std::size_t b = 0; b < d; ++b) start[a * d + b] = rho(static_cast<Index>(a), static_cast<Index>(b));
    start[dd + a * d + a] = 1.0;
  }
  step_state(t, j1, start.data(), scratch.data(), states.data());
  step_state(t, j1, start.data() + dd, scratch.data(), states.data() + dd);

  std::vector<double> diag_rho(d);
  std::vector<double> diag_unit(d);
  // Depth-first over axes 2..N-1 (0-based 1..levels-1); index[k] is the node on axis k+1.
  std::vector<std::size_t> index(levels, 0);
  index[0] = j1;
  auto emit = [&](std::size_t depth, double wprefix, std::size_t flat) {
    const Complex* s = states.data() + 2 * dd * depth;
    for (std::size_t m = 0; m < d; ++m) {
      diag_rho[m] = std::max(0.0, s[m * d + m].real());
      diag_unit[m] = std::max(0.0, s[dd + m * d + m].real());
    }
    leaf(flat, wprefix, diag_rho.data(), diag_unit.data());
  };

  // Iterative descent.
  const double w1 = t.weight[j1];
  if (levels == 1) {
    emit(0, w1, j1);
    return;
  }
  std::vector<double> wprefix(levels);
  std::vector<std::size_t> flat(levels);
  wprefix[0] = w1;
  flat[0] = j1;
  std::size_t depth = 1;
  index[1] = 0;
  while (depth >= 1) {
    if (index[depth] == t.n) {
      --depth;
      if (depth >= 1) ++index[depth];
      continue;
    }
    const std::size_t j = index[depth];
    const Complex* prev = states.data() + 2 * dd * (depth - 1);
    Complex* cur = states.data() + 2 * dd * depth;
    step_state(t, j, prev, scratch.data(), cur);
    step_state(t, j, prev + dd, scratch.data(), cur + dd);
    wprefix[depth] = wprefix[depth - 1] * t.weight[j];
    flat[depth] = flat[depth - 1] * t.n + j;
    if (depth + 1 == levels) {
      emit(depth, wprefix[depth], flat[depth]);
      ++index[depth];
    } else {
      ++depth;
      index[depth] = 0;
    }
  }
}

}  // namespace

void PointerConfig::validate() const {
  if (!(omega > 0.0)) throw ValidationError("omega must be > 0");
  if (!(dx > 0.0)) throw ValidationError("dx must be > 0");
  if (!(buffer >= 0.0)) throw ValidationError("buffer must be >= 0");
  if (!std::isfinite(kappa)) throw ValidationError("kappa must be finite");
}

void SchemeConfig::validate() const {
  validate_pair(M, H, "SchemeConfig");
  if (!(dt >= 0.0)) throw ValidationError("dt must be >= 0");
  if (N < 1) throw ValidationError("N must be >= 1");
  pointer.validate();
}

void LimitConfig::validate() const {
  validate_pair(M, H, "LimitConfig");
  if (!(T >= 0.0)) throw ValidationError("T must be >= 0");
  if (!std::isfinite(R)) throw ValidationError("R must be finite");
  pointer.validate();
  if (pointer.omega * kPi / pointer.dx < 6.0) {
    std::ostringstream os;
    os << "dx = " << pointer.dx << " is too coarse for the pointer momentum spread (limit scheme needs dx <= "
       << pointer.omega * kPi / 6.0 << ")";
    throw ValidationError(os.str());
  }
}

LimitConfig limit_config(const SchemeConfig& cfg) {
  if (!(cfg.dt > 0.0)) throw PreconditionError("limit_config: dt must be > 0 to define R = kappa / dt");
  return LimitConfig{cfg.M, cfg.H, static_cast<double>(cfg.N) * cfg.dt, cfg.pointer.kappa / cfg.dt, cfg.pointer};
}

std::string_view to_string(Scheme s) noexcept {
  switch (s) {
    case Scheme::Projective: return "pm";
    case Scheme::Single: return "sm";
    case Scheme::RepeatedMeasurements: return "rm";
    case Scheme::RepeatedContacts: return "rc";
    case Scheme::Limit: return "limit";
  }
  return "?";
}

Scheme scheme_from_string(std::string_view name) {
  if (name == "pm") return Scheme::Projective;
  if (name == "sm") return Scheme::Single;
  if (name == "rm") return Scheme::RepeatedMeasurements;
  if (name == "rc") return Scheme::RepeatedContacts;
  if (name == "limit") return Scheme::Limit;
  throw ValidationError("unknown scheme '" + std::string(name) + "'");
}

double cost_estimate(const SchemeConfig& cfg, Scheme scheme) {
  const auto [mu_min, mu_max] = spectral_extremes(cfg.M);
  const double d = static_cast<double>(cfg.M.rows());
  const double n = static_cast<double>(cfg.N);
  const auto& pc = cfg.pointer;
  const double spread = std::abs(pc.kappa) * (mu_max - mu_min);
  const double margin = 2.0 * pc.buffer * pc.omega;
  switch (scheme) {
    case Scheme::RepeatedMeasurements:
      return n * n * std::pow(d * (spread + margin) / pc.dx, n);
    case Scheme::RepeatedContacts:
      return (spread * n + margin) / pc.dx * n * n * std::pow(d, n);
    case Scheme::Limit: {
      const LimitConfig lc = limit_config(cfg);
      return (std::abs(lc.R) * lc.T * (mu_max - mu_min) + margin) / pc.dx * d * d * d;
    }
    case Scheme::Single:
    case Scheme::Projective:
      return (spread + margin) / pc.dx * d * d * d;
  }
  return 0.0;
}

Axis make_grid(const SchemeConfig& cfg, Scheme scheme) {
  cfg.validate();
  const auto [mu_min, mu_max] = spectral_extremes(cfg.M);
  const double n_eff = scheme == Scheme::RepeatedContacts ? static_cast<double>(cfg.N) : 1.0;
  const double k = cfg.pointer.kappa * n_eff;
  return axis_spanning(k * mu_min, k * mu_max, cfg.pointer);
}

Axis make_grid(const LimitConfig& cfg) {
  cfg.validate();
  const auto [mu_min, mu_max] = spectral_extremes(cfg.M);
  const double k = cfg.R * cfg.T;
  return axis_spanning(k * mu_min, k * mu_max, cfg.pointer);
}

double normalization_allowance(const PointerConfig& pointer, std::size_t axes) {
  // Per cut edge: the dropped tail plus the trapezoid endpoint term h^2/12 |g'|.
  const double b = pointer.buffer;
  const double h = pointer.dx / pointer.omega;
  const double endpoint = h * h * b * std::exp(-0.5 * b * b) / (12.0 * std::sqrt(2.0 * std::numbers::pi));
  return 1e-6 + 2.0 * static_cast<double>(axes) * (tail_mass(b) + endpoint);
}

GridPair single_measurement(const SchemeConfig& cfg, const DensityMatrix& rho) {
  cfg.validate();
  const EigenFrame f = make_frame(cfg.M, cfg.H, rho);
  return checked(single_interaction(f, make_grid(cfg, Scheme::Single), cfg.pointer.kappa, cfg.pointer.omega),
                 f.dim, cfg.pointer, "single_measurement");
}

GridPair repeated_measurements(const SchemeConfig& cfg, const DensityMatrix& rho, const Execution& exec) {
  cfg.validate();
  if (cfg.N == 1) return single_measurement(cfg, rho);
  require_capacity(cfg, Scheme::RepeatedMeasurements, exec);
  const EigenFrame f = make_frame(cfg.M, cfg.H, rho);
  const Axis axis = make_grid(cfg, Scheme::RepeatedMeasurements);
  const double total = std::pow(static_cast<double>(axis.count), static_cast<double>(cfg.N));
  if (total > static_cast<double>(exec.max_grid_points)) {
    std::ostringstream os;
    os << "repeated_measurements: " << total << " grid nodes exceed the materialization limit of "
       << exec.max_grid_points << "; use repeated_measurements_entropy";
    throw CapacityError(os.str(), total);
  }
  const RmTables t = rm_tables(f, axis, cfg);
  const std::size_t n = t.n;
  const auto size = static_cast<std::size_t>(total);
  std::vector<double> p(size);
  std::vector<double> v(size);
  parallel_for(n, exec.threads, [&](std::size_t j1) {
    rm_walk(t, cfg.N - 1, j1, f.rho, [&](std::size_t flat, double, const double* a, const double* c) {
      for (std::size_t j = 0; j < n; ++j) {
        double pj = 0.0;
        double vj = 0.0;
        for (std::size_t m = 0; m < t.dim; ++m) {
          pj += a[m] * t.g[m * n + j];
          vj += c[m] * t.g[m * n + j];
        }
        p[flat * n + j] = pj;
        v[flat * n + j] = vj;
      }
    });
  });
  std::vector<Axis> axes(cfg.N, axis);
  return checked({GridFunction(axes, std::move(p)), GridFunction(axes, std::move(v))}, f.dim, cfg.pointer,
                 "repeated_measurements");
}

GridEntropy repeated_measurements_entropy(const SchemeConfig& cfg, const DensityMatrix& rho, const Execution& exec) {
  cfg.validate();
  if (cfg.N == 1) {
    const GridPair pair = single_measurement(cfg, rho);
    return {grid_entropy(pair, rho.dim(), cfg.pointer), pair.p.integral(), pair.volume.integral()};
  }
  require_capacity(cfg, Scheme::RepeatedMeasurements, exec);
  const EigenFrame f = make_frame(cfg.M, cfg.H, rho);
  const Axis axis = make_grid(cfg, Scheme::RepeatedMeasurements);
  const RmTables t = rm_tables(f, axis, cfg);

  const auto partials = parallel_map<RmPartial>(t.n, exec.threads, [&](std::size_t j1) {
    RmPartial acc;
    std::vector<double> scratch(2 * t.n);
    rm_walk(t, cfg.N - 1, j1, f.rho, [&](std::size_t, double wprefix, const double* a, const double* c) {
      const auto part = detail::last_axis_sums(t.dim, t.n, t.g.data(), t.weight.data(), a, c, scratch.data());
      acc.entropy += wprefix * part.entropy;
      acc.norm_p += wprefix * part.norm_p;
      acc.norm_v += wprefix * part.norm_v;
    });
    return acc;
  });
  GridEntropy out;
  double s = 0.0;
  for (const auto& part : partials) {
    s += part.entropy;
    out.norm_p += part.norm_p;
    out.norm_v += part.norm_v;
  }
  check_normalization(out.norm_p, out.norm_v, f.dim, cfg.pointer, cfg.N, "repeated_measurements");
  out.entropy = EntropyValue(s);
  return out;
}

GridPair repeated_contacts(const SchemeConfig& cfg, const DensityMatrix& rho, const Execution& exec) {
  cfg.validate();
  const EigenFrame f = make_frame(cfg.M, cfg.H, rho);
  if (cfg.N == 1)
    return checked(single_interaction(f, make_grid(cfg, Scheme::Single), cfg.pointer.kappa, cfg.pointer.omega),
                   f.dim, cfg.pointer, "repeated_contacts");
  require_capacity(cfg, Scheme::RepeatedContacts, exec);

  const Axis axis = make_grid(cfg, Scheme::RepeatedContacts);
  const ComplexMatrix uf = linalg::herm_expm(f.h, Complex(0.0, -cfg.dt));
  const std::size_t d = f.dim;
  const std::size_t n_contacts = cfg.N;
  const double kappa = cfg.pointer.kappa;
  const double omega = cfg.pointer.omega;

  struct Point {
    double p = 0.0;
    double v = 0.0;
  };
  const auto points = parallel_map<Point>(axis.count, exec.threads, [&](std::size_t jx) {
    const double x = axis.at(jx);
    // K_x = sum over (m_0..m_N) of U_f[m_N, m_{N-1}] ... U_f[m_1, m_0]
    //       * sqrt g(x - kappa (mu_{m_0} + ... + mu_{m_{N-1}})) |m_N><m_0|.
    ComplexMatrix k = ComplexMatrix::Zero(static_cast<Index>(d), static_cast<Index>(d));
    std::vector<std::size_t> m(n_contacts + 1);
    std::vector<Complex> amp(n_contacts + 1);
    std::vector<double> shift(n_contacts + 1);
    for (std::size_t m0 = 0; m0 < d; ++m0) {
      m[0] = m0;
      amp[0] = 1.0;
      shift[0] = f.mu(static_cast<Index>(m0));
      std::size_t level = 1;
      m[1] = 0;
      while (level >= 1) {
        if (m[level] == d) {
          --level;
          if (level >= 1) ++m[level];
          continue;
        }
        const Complex a = amp[level - 1] * uf(static_cast<Index>(m[level]), static_cast<Index>(m[level - 1]));
        if (std::abs(a) < kPrunePathAmplitude) {
          ++m[level];
          continue;
        }
        if (level == n_contacts) {
          k(static_cast<Index>(m[level]), static_cast<Index>(m0)) += a * sqrt_gaussian(x - kappa * shift[level - 1], omega);
          ++m[level];
          continue;
        }
        amp[level] = a;
        shift[level] = shift[level - 1] + f.mu(static_cast<Index>(m[level]));
        ++level;
        m[level] = 0;
      }
    }
    return Point{(k * f.rho * k.adjoint()).trace().real(), k.squaredNorm()};
  });
  std::vector<double> p(axis.count);
  std::vector<double> v(axis.count);
  for (std::size_t j = 0; j < axis.count; ++j) {
    p[j] = std::max(0.0, points[j].p);
    v[j] = points[j].v;
  }
  return checked({GridFunction({axis}, std::move(p)), GridFunction({axis}, std::move(v))}, d, cfg.pointer,
                 "repeated_contacts");
}

GridPair limit_scheme(const LimitConfig& cfg, const DensityMatrix& rho, const Execution& exec) {
  cfg.validate();
  const auto& pc = cfg.pointer;
  const EigenFrame f = make_frame(cfg.M, cfg.H, rho);
  const Axis axis = make_grid(cfg);
  const std::size_t d = f.dim;

  // Momentum samples on the dual of a position lattice with spacing dx whose
  // period exceeds the grid by 12 omega on each side, so periodic images of
  // the pointer amplitude do not overlap the grid.
  const double period = (axis.stop() - axis.start) + 24.0 * pc.omega;
  const auto nk = static_cast<std::size_t>(std::ceil(period / pc.dx));
  const double dk = 2.0 * kPi / (static_cast<double>(nk) * pc.dx);
  const double amp0 = std::pow(8.0 * kPi * pc.omega * pc.omega, 0.25);
  const ComplexMatrix m_diag = linalg::diagonal(f.mu);

  std::vector<double> ks(nk);
  for (std::size_t j = 0; j < nk; ++j) ks[j] = (static_cast<double>(j) - static_cast<double>(nk / 2)) * dk;
  // phi~(k) W(k), W(k) = exp(-i (H + R k M) T).
  const auto branches = parallel_map<ComplexMatrix>(nk, exec.threads, [&](std::size_t j) {
    const double amplitude = amp0 * std::exp(-pc.omega * pc.omega * ks[j] * ks[j]);
    if (amplitude < 1e-300) return ComplexMatrix(ComplexMatrix::Zero(static_cast<Index>(d), static_cast<Index>(d)));
    const ComplexMatrix gen = f.h + cfg.R * ks[j] * m_diag;
    return ComplexMatrix(amplitude * linalg::herm_expm(0.5 * (gen + gen.adjoint()), Complex(0.0, -cfg.T)));
  });

  struct Point {
    double p = 0.0;
    double v = 0.0;
  };
  const auto points = parallel_map<Point>(axis.count, exec.threads, [&](std::size_t jx) {
    const double x = axis.at(jx);
    ComplexMatrix k = ComplexMatrix::Zero(static_cast<Index>(d), static_cast<Index>(d));
    for (std::size_t j = 0; j < nk; ++j) k += std::polar(1.0, ks[j] * x) * branches[j];
    k *= dk / (2.0 * kPi);
    return Point{(k * f.rho * k.adjoint()).trace().real(), k.squaredNorm()};
  });
  std::vector<double> p(axis.count);
  std::vector<double> v(axis.count);
  for (std::size_t j = 0; j < axis.count; ++j) {
    p[j] = std::max(0.0, points[j].p);
    v[j] = points[j].v;
  }
  return checked({GridFunction({axis}, std::move(p)), GridFunction({axis}, std::move(v))}, d, pc, "limit_scheme");
}

EntropyValue grid_entropy(const GridPair& grids, std::size_t dim, const PointerConfig& pointer, std::size_t threads) {
  const double allowance = normalization_allowance(pointer, grids.p.rank());
  return observational_grid(grids.p, grids.volume, dim, GridNormalization{allowance, allowance}, threads);
}

EntropyValue scheme_entropy(const SchemeConfig& cfg, const DensityMatrix& rho, Scheme scheme, const Execution& exec) {
  switch (scheme) {
    case Scheme::Projective:
      cfg.validate();
      return observational(CoarseGrainingVector(projective_cg(cfg.M)), rho);
    case Scheme::Single:
      return grid_entropy(single_measurement(cfg, rho), rho.dim(), cfg.pointer, exec.threads);
    case Scheme::RepeatedMeasurements:
      return repeated_measurements_entropy(cfg, rho, exec).entropy;
    case Scheme::RepeatedContacts:
      return grid_entropy(repeated_contacts(cfg, rho, exec), rho.dim(), cfg.pointer, exec.threads);
    case Scheme::Limit:
      return scheme_entropy(limit_config(cfg), rho, exec);
  }
  throw ValidationError("scheme_entropy: unknown scheme");
}

EntropyValue scheme_entropy(const LimitConfig& cfg, const DensityMatrix& rho, const Execution& exec) {
  return grid_entropy(limit_scheme(cfg, rho, exec), rho.dim(), cfg.pointer, exec.threads);
}

ComplexMatrix preset_m49() {
  ComplexMatrix m = ComplexMatrix::Zero(2, 2);
  m(1, 1) = 2.0;
  return m;
}

ComplexMatrix preset_h50() { return preset_m49(); }

ComplexMatrix preset_h51() {
  ComplexMatrix h(2, 2);
  h << 0.0, Complex(1.0, 1.0), Complex(1.0, -1.0), 2.0;
  return h;
}

}  // namespace obsent::pointer
