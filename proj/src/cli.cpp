#include "obsent/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <numbers>
#include <regex>
#include <set>
#include <sstream>

#include "obsent/errors.hpp"
#include "obsent/serialization.hpp"

namespace obsent::cli {

namespace {

using pointer::Scheme;

const std::set<std::string> kKnownKeys{"scheme", "state", "M",     "H",         "pointer",  "N",
                                       "N_range", "dt",   "T",     "R",         "omega_range", "schemes",
                                       "log_base", "output", "threads", "capacity", "povm", "probabilities"};

/// Runs `fn`, recording any failure under `path`.
class Collector {
 public:
  explicit Collector(std::vector<std::string>& out) : out_(out) {}

  template <class Fn>
  bool field(const std::string& path, Fn&& fn) {
    try {
      fn();
      return true;
    } catch (const std::exception& e) {
      out_.push_back(path + ": " + e.what());
      return false;
    }
  }

 private:
  std::vector<std::string>& out_;
};

double number(const json& v) {
  if (!v.is_number()) throw ValidationError("expected a number");
  return v.get<double>();
}

std::size_t count(const json& v) {
  if (!v.is_number_integer() && !(v.is_number() && std::floor(v.get<double>()) == v.get<double>()))
    throw ValidationError("expected an integer");
  const double x = v.get<double>();
  if (x < 0) throw ValidationError("must be >= 0");
  return static_cast<std::size_t>(x);
}

Task task_from_string(const std::string& name, Scheme& scheme) {
  if (name == "infer") return Task::Infer;
  if (name == "sweep_omega") return Task::SweepOmega;
  if (name == "sweep_n") return Task::SweepN;
  scheme = pointer::scheme_from_string(name);
  return Task::Scheme;
}

/// Reads the document into `cfg`; syntactic problems go to `out`.
void read_document(const json& doc, ExperimentConfig& cfg, std::vector<std::string>& out) {
  Collector c(out);
  if (!doc.is_object()) {
    out.push_back("config: expected a JSON object");
    return;
  }
  for (const auto& [key, _] : doc.items())
    if (!kKnownKeys.count(key)) out.push_back(key + ": unknown key");

  if (!doc.contains("scheme")) {
    out.push_back("scheme: missing");
  } else {
    c.field("scheme", [&] {
      if (!doc["scheme"].is_string()) throw ValidationError("expected a string");
      cfg.task = task_from_string(doc["scheme"].get<std::string>(), cfg.scheme);
    });
  }
  if (cfg.task == Task::Infer) {
    c.field("povm", [&] {
      if (!doc.contains("povm") || !doc["povm"].is_string()) throw ValidationError("path required for infer");
      cfg.povm_file = doc["povm"].get<std::string>();
    });
    c.field("probabilities", [&] {
      if (!doc.contains("probabilities") || !doc["probabilities"].is_string())
        throw ValidationError("path required for infer");
      cfg.probabilities_file = doc["probabilities"].get<std::string>();
    });
  }

  if (doc.contains("state")) {
    const json& st = doc["state"];
    if (!st.is_object()) {
      out.push_back("state: expected an object");
    } else if (st.contains("matrix")) {
      c.field("state.matrix", [&] { cfg.state_matrix = io::density_from_json(st).matrix(); });
    } else {
      c.field("state.phi", [&] { cfg.phi = st.contains("phi") ? parse_angle(st["phi"]) : 0.0; });
      c.field("state.theta", [&] { cfg.theta = st.contains("theta") ? parse_angle(st["theta"]) : 0.0; });
      c.field("state.alpha", [&] { cfg.alpha = st.contains("alpha") ? parse_angle(st["alpha"]) : 0.0; });
    }
  }
  if (cfg.task != Task::Infer) {
    if (!doc.contains("M")) out.push_back("M: missing");
    else c.field("M", [&] { cfg.M = parse_operator(doc["M"]); });
    if (doc.contains("H")) {
      c.field("H", [&] { cfg.H = parse_operator(doc["H"]); });
    } else if (cfg.M.size() > 0) {
      cfg.H = ComplexMatrix::Zero(cfg.M.rows(), cfg.M.cols());
    }
  }

  if (doc.contains("pointer")) {
    const json& p = doc["pointer"];
    if (!p.is_object()) {
      out.push_back("pointer: expected an object");
    } else {
      for (const auto& [key, _] : p.items())
        if (key != "omega" && key != "kappa" && key != "dx" && key != "buffer")
          out.push_back("pointer." + key + ": unknown key");
      c.field("pointer.omega", [&] { if (p.contains("omega")) cfg.pointer.omega = number(p["omega"]); });
      c.field("pointer.kappa", [&] { if (p.contains("kappa")) cfg.pointer.kappa = number(p["kappa"]); });
      c.field("pointer.dx", [&] { if (p.contains("dx")) cfg.pointer.dx = number(p["dx"]); });
      c.field("pointer.buffer", [&] { if (p.contains("buffer")) cfg.pointer.buffer = number(p["buffer"]); });
    }
  }
  c.field("N", [&] { if (doc.contains("N")) cfg.N = count(doc["N"]); });
  cfg.n_min = cfg.n_max = cfg.N;
  c.field("N_range", [&] {
    if (!doc.contains("N_range")) return;
    const json& r = doc["N_range"];
    if (r.is_array() && r.size() == 2) {
      cfg.n_min = count(r[0]);
      cfg.n_max = count(r[1]);
    } else if (r.is_object()) {
      cfg.n_min = count(r.at("min"));
      cfg.n_max = count(r.at("max"));
    } else {
      throw ValidationError("expected [min, max]");
    }
  });
  c.field("dt", [&] { if (doc.contains("dt")) cfg.dt = number(doc["dt"]); });
  c.field("T", [&] { if (doc.contains("T")) cfg.T = number(doc["T"]); });
  c.field("R", [&] { if (doc.contains("R")) cfg.R = number(doc["R"]); });
  c.field("omega_range", [&] {
    if (!doc.contains("omega_range")) return;
    const json& r = doc["omega_range"];
    if (!r.is_object()) throw ValidationError("expected {min, max, count}");
    cfg.omega_range.min = number(r.at("min"));
    cfg.omega_range.max = number(r.at("max"));
    cfg.omega_range.count = count(r.at("count"));
  });
  if (cfg.task == Task::SweepOmega) cfg.sweep_schemes = {Scheme::Single};
  c.field("schemes", [&] {
    if (!doc.contains("schemes")) return;
    if (!doc["schemes"].is_array()) throw ValidationError("expected a list of scheme names");
    cfg.sweep_schemes.clear();
    for (const auto& s : doc["schemes"]) cfg.sweep_schemes.push_back(pointer::scheme_from_string(s.get<std::string>()));
  });
  c.field("log_base", [&] {
    if (!doc.contains("log_base")) return;
    const auto b = doc["log_base"].get<std::string>();
    if (b == "bits" || b == "2") cfg.log_base = LogBase::Bits;
    else if (b == "nats" || b == "e") cfg.log_base = LogBase::Natural;
    else throw ValidationError("expected \"bits\" or \"nats\"");
  });
  c.field("output", [&] { if (doc.contains("output")) cfg.output = doc["output"].get<std::string>(); });
  c.field("threads", [&] {
    if (!doc.contains("threads")) return;
    cfg.threads = count(doc["threads"]);
    if (cfg.threads == 0) throw ValidationError("must be >= 1");
  });
  c.field("capacity", [&] {
    if (!doc.contains("capacity")) return;
    cfg.capacity = number(doc["capacity"]);
    if (!(cfg.capacity > 0.0)) throw ValidationError("must be > 0");
  });
}

pointer::PointerConfig pointer_for_omega(const pointer::PointerConfig& base, double omega) {
  pointer::PointerConfig p = base;
  p.omega = omega;
  p.dx = std::min(base.dx, omega / 5.0);
  return p;
}

/// Semantic checks for one evaluation point.
void check_point(const ExperimentConfig& cfg, Scheme scheme, std::size_t n, const pointer::PointerConfig& pc,
                 const std::string& where, const std::string& count_field, std::vector<std::string>& out) {
  Collector c(out);
  if (scheme == Scheme::Projective) return;
  if (scheme == Scheme::Limit) {
    c.field(where, [&] {
      pointer::LimitConfig lc = cfg.limit_config();
      lc.pointer = pc;
      pointer::make_grid(lc);
    });
    return;
  }
  pointer::SchemeConfig sc = cfg.scheme_config(n);
  sc.pointer = pc;
  if (!c.field(where, [&] { pointer::make_grid(sc, scheme); })) return;
  if (n > 1 && (scheme == Scheme::RepeatedMeasurements || scheme == Scheme::RepeatedContacts)) {
    const double cost = pointer::cost_estimate(sc, scheme);
    if (cost > cfg.capacity) {
      std::ostringstream os;
      os << count_field << ": capacity exceeded for " << pointer::to_string(scheme) << " with N=" << n << ", dx=" << pc.dx
         << " (estimated cost " << format_number(cost) << " > capacity " << format_number(cfg.capacity) << ")";
      out.push_back(os.str());
    }
  }
}

void check_semantics(const ExperimentConfig& cfg, std::vector<std::string>& out) {
  Collector c(out);
  if (cfg.task == Task::Infer) return;
  const bool pointer_ok = c.field("pointer", [&] { cfg.pointer.validate(); });
  if (!(cfg.dt >= 0.0)) out.push_back("dt: must be >= 0");
  if (cfg.T && !(*cfg.T > 0.0)) out.push_back("T: must be > 0");
  if (!std::isfinite(cfg.R)) out.push_back("R: must be finite");
  if (!pointer_ok || cfg.M.size() == 0 || cfg.H.size() == 0) return;
  if (!c.field("M", [&] {
        if (cfg.M.rows() != cfg.M.cols()) throw ShapeError("must be square");
        if (!linalg::is_hermitian(cfg.M)) throw ValidationError("must be Hermitian");
      }))
    return;
  if (!c.field("H", [&] {
        if (cfg.H.rows() != cfg.M.rows() || cfg.H.cols() != cfg.M.cols())
          throw ShapeError("must have the same dimension as M");
        if (!linalg::is_hermitian(cfg.H)) throw ValidationError("must be Hermitian");
      }))
    return;
  if (cfg.state_matrix && cfg.state_matrix->rows() != cfg.M.rows())
    out.push_back("state.matrix: dimension differs from M");
  if (!cfg.state_matrix && cfg.M.rows() != 2) out.push_back("state: angle parametrization needs a 2-dimensional M");

  switch (cfg.task) {
    case Task::Scheme:
      if (cfg.N < 1) {
        out.push_back("N: must be >= 1");
        return;
      }
      if (cfg.scheme == Scheme::Limit && !cfg.T && !(cfg.dt > 0.0)) {
        out.push_back("dt: must be > 0 to derive the limit parameters");
        return;
      }
      check_point(cfg, cfg.scheme, cfg.N, cfg.pointer, "pointer", "N", out);
      break;
    case Task::SweepOmega:
      if (cfg.N < 1) {
        out.push_back("N: must be >= 1");
        return;
      }
      if (!(cfg.omega_range.min > 0.0) || !(cfg.omega_range.max >= cfg.omega_range.min) || cfg.omega_range.count < 1) {
        out.push_back("omega_range: need 0 < min <= max and count >= 1");
        return;
      }
      for (Scheme s : cfg.sweep_schemes)
        for (double omega : cfg.omega_range.values())
          check_point(cfg, s, cfg.N, pointer_for_omega(cfg.pointer, omega),
                      "omega_range (omega=" + format_number(omega) + ")", "N", out);
      break;
    case Task::SweepN:
      if (cfg.n_min < 1 || cfg.n_max < cfg.n_min) {
        out.push_back("N_range: need 1 <= min <= max");
        return;
      }
      if (cfg.sweep_schemes.empty()) {
        out.push_back("schemes: must not be empty");
        return;
      }
      for (Scheme s : cfg.sweep_schemes) {
        if (s == Scheme::Limit) {
          if (!cfg.T) out.push_back("T: required when sweeping with the limit scheme");
          else check_point(cfg, s, 1, cfg.pointer, "schemes (limit)", "T", out);
          continue;
        }
        for (std::size_t n = cfg.n_min; n <= cfg.n_max; ++n) check_point(cfg, s, n, cfg.pointer, "pointer", "N_range", out);
      }
      break;
    case Task::Infer:
      break;
  }
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("cannot write " + path.string());
  f << text;
}

std::string dist_csv(const pointer::GridPair& grids, std::size_t dim) {
  const auto& axes = grids.p.axes();
  std::ostringstream os;
  os << 'x';
  for (std::size_t k = 1; k < axes.size(); ++k) os << ",x" << (k + 1);
  os << ",p,V_over_dim\n";
  std::vector<std::size_t> node(axes.size(), 0);
  const auto& p = grids.p.values();
  const auto& v = grids.volume.values();
  for (std::size_t flat = 0; flat < p.size(); ++flat) {
    for (std::size_t k = 0; k < axes.size(); ++k) os << format_number(axes[k].at(node[k])) << ',';
    os << format_number(p[flat]) << ',' << format_number(v[flat] / static_cast<double>(dim)) << '\n';
    for (std::size_t k = axes.size(); k-- > 0;) {
      if (++node[k] < axes[k].count) break;
      node[k] = 0;
    }
  }
  return os.str();
}

std::optional<pointer::GridPair> scheme_grids(const pointer::SchemeConfig& sc, const DensityMatrix& rho, Scheme scheme,
                                              const pointer::Execution& exec) {
  switch (scheme) {
    case Scheme::Single:
      return pointer::single_measurement(sc, rho);
    case Scheme::RepeatedContacts:
      return pointer::repeated_contacts(sc, rho, exec);
    case Scheme::RepeatedMeasurements: {
      const double nodes =
          std::pow(static_cast<double>(pointer::make_grid(sc, scheme).count), static_cast<double>(sc.N));
      if (nodes > static_cast<double>(exec.max_grid_points)) return std::nullopt;
      return pointer::repeated_measurements(sc, rho, exec);
    }
    default:
      return std::nullopt;
  }
}

}  // namespace

std::vector<double> OmegaRange::values() const {
  std::vector<double> out(count);
  if (count == 1) {
    out[0] = min;
    return out;
  }
  const double a = std::log(min);
  const double b = std::log(max);
  for (std::size_t k = 0; k < count; ++k)
    out[k] = std::exp(a + (b - a) * static_cast<double>(k) / static_cast<double>(count - 1));
  out.front() = min;
  out.back() = max;
  return out;
}

DensityMatrix ExperimentConfig::state() const {
  return state_matrix ? DensityMatrix(*state_matrix) : DensityMatrix::qubit(phi, theta, alpha);
}

pointer::SchemeConfig ExperimentConfig::scheme_config(std::size_t n) const {
  pointer::SchemeConfig sc{M, H, dt, n, pointer};
  if (task == Task::SweepN && T) {
    sc.dt = *T / static_cast<double>(n);
    sc.pointer.kappa = R * sc.dt;
  }
  return sc;
}

pointer::LimitConfig ExperimentConfig::limit_config() const {
  if (T) return pointer::LimitConfig{M, H, *T, R, pointer};
  return pointer::limit_config(pointer::SchemeConfig{M, H, dt, N, pointer});
}

pointer::Execution ExperimentConfig::execution() const {
  pointer::Execution e;
  e.threads = threads;
  e.capacity = capacity;
  return e;
}

double parse_angle(const json& value) {
  if (value.is_number()) return value.get<double>();
  if (!value.is_string()) throw ValidationError("expected a number or an expression like \"pi/16\"");
  const std::string s = value.get<std::string>();
  static const std::regex pattern(R"(^\s*([+-])?\s*(\d+(?:\.\d*)?(?:[eE][+-]?\d+)?)?\s*(\*?\s*pi)?\s*(?:/\s*(\d+(?:\.\d*)?))?\s*$)");
  std::smatch m;
  if (!std::regex_match(s, m, pattern) || (!m[2].matched && !m[3].matched))
    throw ValidationError("cannot parse angle \"" + s + "\"");
  if (m[2].matched && m[3].matched && m[3].str().find('*') == std::string::npos)
    throw ValidationError("cannot parse angle \"" + s + "\"");
  double x = m[2].matched ? std::stod(m[2].str()) : 1.0;
  if (m[3].matched) x *= std::numbers::pi;
  if (m[4].matched) {
    const double d = std::stod(m[4].str());
    if (d == 0.0) throw ValidationError("division by zero in \"" + s + "\"");
    x /= d;
  }
  return m[1].matched && m[1].str() == "-" ? -x : x;
}

ComplexMatrix parse_operator(const json& value) {
  if (value.is_string()) {
    const auto name = value.get<std::string>();
    if (name == "M49") return pointer::preset_m49();
    if (name == "H50") return pointer::preset_h50();
    if (name == "H51") return pointer::preset_h51();
    throw ValidationError("unknown preset \"" + name + "\" (known: M49, H50, H51)");
  }
  return io::matrix_from_json(value);
}

ValidationReport validate(const json& doc) {
  ValidationReport report;
  ExperimentConfig cfg;
  read_document(doc, cfg, report.violations);
  check_semantics(cfg, report.violations);
  return report;
}

ExperimentConfig parse_config(const json& doc) {
  const ValidationReport report = validate(doc);
  if (!report.ok()) {
    std::ostringstream os;
    os << "invalid config:";
    for (const auto& v : report.violations) os << "\n  " << v;
    throw ValidationError(os.str());
  }
  ExperimentConfig cfg;
  std::vector<std::string> ignored;
  read_document(doc, cfg, ignored);
  return cfg;
}

std::string format_number(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

std::string summary_header() { return "scheme,N,omega,entropy_bits,entropy_nats,S_vN_bits,S_pm_bits"; }

std::string format_row(const SummaryRow& row) {
  std::ostringstream os;
  os << pointer::to_string(row.scheme) << ',';
  if (row.N) os << *row.N;
  os << ',';
  if (row.omega) os << format_number(*row.omega);
  os << ',' << format_number(row.entropy.bits()) << ',' << format_number(row.entropy.nats()) << ','
     << format_number(row.von_neumann.bits()) << ',' << format_number(row.projective.bits());
  return os.str();
}

RunResult run(const ExperimentConfig& cfg) {
  RunResult result;
  std::filesystem::create_directories(cfg.output);

  if (cfg.task == Task::Infer) {
    const auto inferred = infer_files(cfg.povm_file, cfg.probabilities_file);
    const auto path = cfg.output / "rho.json";
    write_text(path, io::to_json(inferred.rho).dump(2) + "\n");
    result.files.push_back(path);
    return result;
  }

  const DensityMatrix rho = cfg.state();
  const pointer::Execution exec = cfg.execution();
  const EntropyValue s_vn = von_neumann(rho);
  const EntropyValue s_pm = observational(CoarseGrainingVector(projective_cg(cfg.M)), rho);
  auto row = [&](Scheme s, std::optional<std::size_t> n, std::optional<double> omega, EntropyValue e) {
    result.rows.push_back({s, n, s == Scheme::Projective ? std::nullopt : omega, e, s_vn, s_pm});
  };

  switch (cfg.task) {
    case Task::Scheme: {
      const auto sc = cfg.scheme_config(cfg.N);
      const std::size_t dim = rho.dim();
      std::optional<pointer::GridPair> grids;
      EntropyValue s;
      if (cfg.scheme == Scheme::Limit) {
        const auto lc = cfg.limit_config();
        grids = pointer::limit_scheme(lc, rho, exec);
        s = pointer::grid_entropy(*grids, dim, lc.pointer, exec.threads);
      } else if (cfg.scheme == Scheme::Projective) {
        s = s_pm;
      } else {
        grids = scheme_grids(sc, rho, cfg.scheme, exec);
        s = grids ? pointer::grid_entropy(*grids, dim, sc.pointer, exec.threads)
                  : pointer::scheme_entropy(sc, rho, cfg.scheme, exec);
      }
      row(cfg.scheme, cfg.N, cfg.pointer.omega, s);
      if (grids) {
        const auto path = cfg.output / "dist.csv";
        write_text(path, dist_csv(*grids, dim));
        result.files.push_back(path);
      }
      break;
    }
    case Task::SweepOmega:
      for (Scheme s : cfg.sweep_schemes)
        for (double omega : cfg.omega_range.values()) {
          auto sc = cfg.scheme_config(cfg.N);
          sc.pointer = pointer_for_omega(cfg.pointer, omega);
          if (s == Scheme::Limit) {
            auto lc = cfg.limit_config();
            lc.pointer = sc.pointer;
            row(s, cfg.N, omega, pointer::scheme_entropy(lc, rho, exec));
          } else {
            row(s, cfg.N, omega, pointer::scheme_entropy(sc, rho, s, exec));
          }
        }
      break;
    case Task::SweepN:
      for (Scheme s : cfg.sweep_schemes) {
        if (s == Scheme::Limit) {
          row(s, std::nullopt, cfg.pointer.omega, pointer::scheme_entropy(cfg.limit_config(), rho, exec));
          continue;
        }
        for (std::size_t n = cfg.n_min; n <= cfg.n_max; ++n) {
          const auto sc = cfg.scheme_config(n);
          if (s == Scheme::RepeatedContacts) {
            const auto grids = pointer::repeated_contacts(sc, rho, exec);
            row(s, n, sc.pointer.omega, pointer::grid_entropy(grids, rho.dim(), sc.pointer, exec.threads));
            const auto path = cfg.output / ("dist_rc_N" + std::to_string(n) + ".csv");
            write_text(path, dist_csv(grids, rho.dim()));
            result.files.push_back(path);
          } else {
            row(s, n, sc.pointer.omega, pointer::scheme_entropy(sc, rho, s, exec));
          }
        }
      }
      break;
    case Task::Infer:
      break;
  }

  std::string summary = summary_header() + "\n";
  for (const auto& r : result.rows) summary += format_row(r) + "\n";
  const auto path = cfg.output / "summary.csv";
  write_text(path, summary);
  result.files.insert(result.files.begin(), path);
  return result;
}

json povm_to_json(const std::vector<PovmElement>& povm) {
  json elements = json::array();
  for (const auto& e : povm) elements.push_back({{"index", e.index}, {"matrix", io::to_json(e.matrix)}});
  return {{"dim", povm.empty() ? 0 : povm.front().matrix.rows()}, {"elements", elements}};
}

std::vector<PovmElement> povm_from_json(const json& doc) {
  if (doc.contains("elements")) {
    std::vector<PovmElement> out;
    std::size_t k = 0;
    for (const auto& e : doc.at("elements")) {
      PovmElement el;
      el.index = e.contains("index") ? e["index"].get<MultiIndex>() : MultiIndex{k};
      el.matrix = io::matrix_from_json(e.at("matrix"));
      out.push_back(std::move(el));
      ++k;
    }
    return out;
  }
  if (doc.contains("coarse_grainings")) {
    std::vector<CoarseGraining> seq;
    for (const auto& cg : doc["coarse_grainings"]) seq.push_back(io::coarse_graining_from_json(cg));
    return povm(CoarseGrainingVector(std::move(seq)));
  }
  if (doc.contains("ops")) return povm(CoarseGrainingVector(io::coarse_graining_from_json(doc)));
  throw ValidationError("POVM document needs \"elements\", \"ops\" or \"coarse_grainings\"");
}

tomography::InferenceResult infer_files(const std::string& povm_path, const std::string& probabilities_path) {
  tomography::InferenceInput input;
  input.povm = povm_from_json(io::read_json_file(povm_path));
  const json probs = io::read_json_file(probabilities_path);
  if (probs.is_array()) {
    input.probabilities = probs.get<std::vector<double>>();
  } else {
    input.probabilities = probs.at("probabilities").get<std::vector<double>>();
    if (probs.contains("von_neumann")) input.known_von_neumann = probs["von_neumann"].get<double>();
    if (probs.contains("tol_overlap")) input.tol_overlap = probs["tol_overlap"].get<double>();
    if (probs.contains("tol_entropy")) input.tol_entropy = probs["tol_entropy"].get<double>();
  }
  return tomography::infer_state(input);
}

}  // namespace obsent::cli
