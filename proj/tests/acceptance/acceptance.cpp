// Acceptance suite: one PASS/FAIL line per criterion, with wall time and the
// measured quantities that decided it. Exit status is non-zero if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "obsent/cli.hpp"
#include "obsent/entropy.hpp"
#include "obsent/errors.hpp"
#include "obsent/indirect.hpp"
#include "obsent/pointer.hpp"
#include "obsent/tomography.hpp"
#include "random_quantum.hpp"

namespace ptr = obsent::pointer;
using obsent::CoarseGraining;
using obsent::CoarseGrainingVector;
using obsent::DensityMatrix;
using obsent::OutcomeTable;
using obsent::linalg::ComplexMatrix;
using obsent::testing::Rng;

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kLn2 = std::numbers::ln2;

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail += (detail.empty() ? "" : "; ") + what;
    }
  }
  void note(const std::string& what) { detail += (detail.empty() ? "" : "; ") + what; }
};

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

// Every discrete outcome table produced by the suite, for the KL identity.
std::vector<OutcomeTable> g_tables;

OutcomeTable record(OutcomeTable t) {
  g_tables.push_back(t);
  return t;
}

double entropy_of(const OutcomeTable& t) { return obsent::observational(t).nats(); }

double pm_nats(const DensityMatrix& rho) {
  double s = 0;
  for (std::size_t m = 0; m < rho.dim(); ++m) {
    const double q = rho.matrix()(m, m).real();
    if (q > 0) s -= q * std::log(q);
  }
  return s;
}

ptr::SchemeConfig figure(const ComplexMatrix& h, std::size_t n, double dx = 0.1, double buffer = 4.0) {
  ptr::SchemeConfig cfg;
  cfg.M = ptr::preset_m49();
  cfg.H = h;
  cfg.N = n;
  cfg.dt = 1.0;
  cfg.pointer = {1.0, 1.0, dx, buffer};
  return cfg;
}

ptr::Execution serial() {
  ptr::Execution e;
  e.threads = 1;
  return e;
}

double bits(double nats) { return nats / kLn2; }

// ---------------------------------------------------------------------------

Outcome theorem_suite() {
  Outcome out;
  Rng rng(20240601);
  double worst_lower = 0, worst_upper = 0, worst_append = 0, worst_refine = 0;
  for (int t = 0; t < 500; ++t) {
    const std::size_t dim = 2 + t % 4;
    const std::size_t length = 1 + (t / 4) % 3;
    const auto rho = obsent::testing::random_density(rng, dim, 1 + (t / 12) % dim);
    std::vector<CoarseGraining> seq;
    for (std::size_t k = 0; k < length; ++k) {
      const std::size_t outcomes = 2 + (t + k) % 3;
      seq.push_back((t + k) % 3 == 0 ? obsent::testing::random_projective_cg(rng, dim, std::min(outcomes, dim))
                                     : obsent::testing::random_cg(rng, dim, outcomes, 2));
    }
    const CoarseGrainingVector v(seq);
    const double s = entropy_of(record(obsent::outcome_table(v, rho)));
    const double svn = obsent::von_neumann(rho).nats();
    worst_lower = std::max(worst_lower, svn - s);
    worst_upper = std::max(worst_upper, s - std::log(static_cast<double>(dim)));

    const auto extra = obsent::testing::random_cg(rng, dim, 2, 2);
    const double s_app = entropy_of(record(obsent::outcome_table(v.appended(extra), rho)));
    worst_append = std::max(worst_append, s_app - s);

    const auto& last = seq.back();
    const std::size_t groups = std::max<std::size_t>(1, last.size() - 1);
    auto [coarse_last, last_map] = obsent::testing::group_outcomes(rng, last, groups);
    auto coarse_seq = seq;
    coarse_seq.back() = coarse_last;
    const CoarseGrainingVector coarse(coarse_seq);
    obsent::IndexMap map(v.outcome_count());
    for (std::size_t f = 0; f < map.size(); ++f) {
      auto idx = v.unflatten(f);
      idx.back() = last_map[idx.back()];
      map[f] = coarse.flatten(idx);
    }
    if (!obsent::is_finer(v, coarse, map, 1e-9)) out.require(false, "constructed refinement not finer at " + std::to_string(t));
    const double s_coarse = entropy_of(record(obsent::outcome_table(coarse, rho)));
    worst_refine = std::max(worst_refine, s - s_coarse);
  }
  out.require(worst_lower <= 1e-9, "S_vN - S = " + fmt(worst_lower));
  out.require(worst_upper <= 1e-9, "S - ln dim = " + fmt(worst_upper));
  out.require(worst_append <= 1e-9, "append increase " + fmt(worst_append));
  out.require(worst_refine <= 1e-9, "refinement increase " + fmt(worst_refine));
  out.note("max violations: lower " + fmt(worst_lower) + ", upper " + fmt(worst_upper) + ", append " +
           fmt(worst_append) + ", refine " + fmt(worst_refine));
  return out;
}

Outcome saturation_constructions() {
  Outcome out;
  Rng rng(77);
  double worst_swap = 0, worst_partial = 0;
  for (int t = 0; t < 40; ++t) {
    const std::size_t dim = 2 + t % 4;
    const auto rho = obsent::testing::random_density(rng, dim);
    const auto eig = obsent::linalg::herm_eigen(rho.matrix());
    Eigen::VectorXcd zero = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(dim));
    zero(0) = 1;
    const obsent::indirect::ProbeProtocol swap(dim, DensityMatrix::pure(zero), obsent::indirect::swap_unitary(dim),
                                               obsent::basis_cg(eig.eigenvectors));
    const double s = entropy_of(record(obsent::outcome_table(obsent::indirect::induced_cg(swap), rho)));
    worst_swap = std::max(worst_swap, std::abs(s - obsent::von_neumann(rho).nats()));
  }
  for (int t = 0; t < 60; ++t) {
    const std::size_t dim = 2 + t % 4;
    const std::size_t rank = 1 + (t / 4) % std::min<std::size_t>(3, dim - 1);
    const auto rho = obsent::testing::random_density(rng, dim, rank);
    const auto protocol = obsent::indirect::optimal_probe_protocol(rho, rank + 1);
    const double s = entropy_of(record(obsent::outcome_table(obsent::indirect::induced_cg(protocol), rho)));
    worst_partial = std::max(worst_partial, std::abs(s - obsent::von_neumann(rho).nats()));
  }
  out.require(worst_swap < 1e-9, "full swap gap " + fmt(worst_swap));
  out.require(worst_partial < 1e-9, "partial swap gap " + fmt(worst_partial));
  out.note("max |S_C - S_vN|: swap " + fmt(worst_swap) + ", partial swap " + fmt(worst_partial));
  return out;
}

std::vector<double> descending_eigenvalues(const ComplexMatrix& m) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(m, Eigen::EigenvaluesOnly);
  std::vector<double> v(es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size());
  std::sort(v.rbegin(), v.rend());
  return v;
}

Outcome closed_forms() {
  Outcome out;
  Rng rng(91);
  double worst_pv = 0, worst_mixed = 0;
  for (int t = 0; t < 100; ++t) {
    const std::size_t n = 2 + t % 4;
    const std::size_t m = 1 + (t / 4) % n;
    const auto rho = obsent::testing::random_density(rng, n, 1 + t % n);
    const auto sigma = obsent::testing::random_density(rng, m);
    const auto r = descending_eigenvalues(rho.matrix());
    auto s = descending_eigenvalues(sigma.matrix());
    std::reverse(s.begin(), s.end());
    double kept = 0;
    for (std::size_t i = m; i < n; ++i) kept += r[i];
    const auto table = record(obsent::outcome_table(obsent::indirect::induced_cg(obsent::indirect::partial_swap_protocol(rho, sigma)), rho));
    for (std::size_t i = 0; i < m; ++i) {
      worst_pv = std::max(worst_pv, std::abs(table.entries[i].p - (r[i] + kept * s[i])));
      worst_pv = std::max(worst_pv, std::abs(table.entries[i].volume - (1.0 + static_cast<double>(n - m) * s[i])));
    }

    const auto mixed = DensityMatrix::maximally_mixed(m);
    const double numeric =
        entropy_of(record(obsent::outcome_table(obsent::indirect::induced_cg(obsent::indirect::partial_swap_protocol(rho, mixed)), rho)));
    double closed = std::log(static_cast<double>(n) / static_cast<double>(m));
    for (std::size_t i = 0; i < m; ++i) {
      const double q = r[i] + kept / static_cast<double>(m);
      if (q > 0) closed -= q * std::log(q);
    }
    worst_mixed = std::max(worst_mixed, std::abs(numeric - closed));
    worst_mixed = std::max(worst_mixed, std::abs(obsent::indirect::mixed_probe_entropy(rho, m).nats() - closed));
  }
  out.require(worst_pv <= 1e-10, "p_i/V_i mismatch " + fmt(worst_pv));
  out.require(worst_mixed <= 1e-10, "mixed-probe mismatch " + fmt(worst_mixed));
  out.note("max error: p_i, V_i " + fmt(worst_pv) + ", mixed probe " + fmt(worst_mixed));
  return out;
}

std::vector<std::map<std::string, std::string>> read_csv(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::string line;
  std::getline(in, line);
  std::vector<std::string> header;
  {
    std::stringstream ss(line);
    for (std::string f; std::getline(ss, f, ',');) header.push_back(f);
  }
  std::vector<std::map<std::string, std::string>> rows;
  while (std::getline(in, line)) {
    std::stringstream ss(line);
    std::map<std::string, std::string> row;
    std::size_t k = 0;
    for (std::string f; std::getline(ss, f, ',') && k < header.size(); ++k) row[header[k]] = f;
    rows.push_back(row);
  }
  return rows;
}

std::filesystem::path scratch_dir(const std::string& name) {
  const auto p = std::filesystem::temp_directory_path() / ("obsent_acceptance_" + name);
  std::filesystem::remove_all(p);
  return p;
}

Outcome figure3() {
  Outcome out;
  // The 4-omega cutoff biases S_sm by ~2e-5 bits near the plateau, and the bias
  // shifts with the grid alignment by more than the 1e-6 step tolerance.
  auto doc = obsent::cli::json::parse(R"({
    "scheme": "sweep_omega",
    "state": {"phi": 0, "theta": "pi/16", "alpha": "pi/16"},
    "M": "M49", "H": "H50",
    "pointer": {"kappa": 1, "dx": 0.1, "buffer": 6},
    "omega_range": {"min": 0.05, "max": 100, "count": 40},
    "log_base": "bits"
  })");
  const auto dir = scratch_dir("fig3");
  doc["output"] = dir.string();
  obsent::cli::run(obsent::cli::parse_config(doc));
  const auto rows = read_csv(dir / "summary.csv");
  std::vector<std::pair<double, double>> curve;
  double pm = 0;
  for (const auto& row : rows) {
    curve.emplace_back(std::stod(row.at("omega")), std::stod(row.at("entropy_bits")));
    pm = std::stod(row.at("S_pm_bits"));
  }
  std::sort(curve.begin(), curve.end());
  double worst_drop = 0;
  for (std::size_t k = 1; k < curve.size(); ++k) worst_drop = std::max(worst_drop, curve[k - 1].second - curve[k].second);
  out.require(curve.size() == 40, "expected 40 rows, got " + std::to_string(curve.size()));
  out.require(worst_drop <= 1e-6, "non-monotone step " + fmt(worst_drop));
  const double low_gap = std::abs(curve.front().second - pm);
  out.require(low_gap < 1e-4, "|S_sm - S_pm| at omega=0.05 is " + fmt(low_gap) + " bits");
  out.require(curve.back().second > 0.999, "S_sm(100) = " + fmt(curve.back().second));
  out.note("S_pm " + fmt(pm) + " bits, S_sm(0.05) gap " + fmt(low_gap) + ", S_sm(100) " + fmt(curve.back().second) +
           ", worst drop " + fmt(worst_drop));
  return out;
}

std::map<std::string, double> read_golden(const std::string& file) {
  std::map<std::string, double> out;
  for (const auto& row : read_csv(std::filesystem::path(OBSENT_GOLDEN_DIR) / file))
    out[row.at("scheme") + row.at("N")] = std::stod(row.at("entropy_nats"));
  return out;
}

Outcome figure4() {
  Outcome out;
  const auto rho = DensityMatrix::qubit(0, kPi / 16, kPi / 16);
  const double pm = pm_nats(rho);
  // A 5-omega cutoff keeps the dropped Gaussian tails (and their entropy
  // contribution) well below the 1e-6 tolerance.
  std::vector<double> rm, rc;
  for (std::size_t n = 1; n <= 5; ++n) {
    const auto cfg = figure(ptr::preset_h50(), n, 0.1, 5.0);
    rm.push_back(ptr::scheme_entropy(cfg, rho, ptr::Scheme::RepeatedMeasurements).nats());
    rc.push_back(ptr::scheme_entropy(cfg, rho, ptr::Scheme::RepeatedContacts).nats());
  }
  std::string rows;
  for (std::size_t k = 0; k < 5; ++k) {
    if (k > 0) {
      out.require(rm[k] <= rm[k - 1] + 1e-6, "rm increases at N=" + std::to_string(k + 1));
      out.require(rc[k] <= rc[k - 1] + 1e-6, "rc increases at N=" + std::to_string(k + 1));
      out.require(rc[k] <= rm[k] + 1e-6, "rc above rm at N=" + std::to_string(k + 1));
    }
    out.require(rm[k] >= pm - 1e-6, "rm below S_pm at N=" + std::to_string(k + 1));
    out.require(rc[k] >= pm - 1e-6, "rc below S_pm at N=" + std::to_string(k + 1) + " by " + fmt(pm - rc[k]));
    rows += " N" + std::to_string(k + 1) + " rm " + fmt(bits(rm[k])) + " rc " + fmt(bits(rc[k]));
  }
  out.require(std::abs(rm[0] - rc[0]) <= 1e-10, "rm/rc differ at N=1 by " + fmt(std::abs(rm[0] - rc[0])));

  const auto golden = read_golden("fig4_entropy.csv");
  double worst_golden = std::abs(pm - golden.at("pm"));
  for (std::size_t n = 1; n <= 5; ++n) {
    const auto cfg = figure(ptr::preset_h50(), n);
    worst_golden = std::max(worst_golden, std::abs(ptr::scheme_entropy(cfg, rho, ptr::Scheme::RepeatedContacts).nats() -
                                                   golden.at("rc" + std::to_string(n))));
    if (n <= 3)
      worst_golden = std::max(worst_golden, std::abs(ptr::scheme_entropy(cfg, rho, ptr::Scheme::RepeatedMeasurements).nats() -
                                                     golden.at("rm" + std::to_string(n))));
  }
  out.require(worst_golden <= 1e-10, "golden mismatch " + fmt(worst_golden));
  out.note("S_pm " + fmt(bits(pm)) + " bits;" + rows + "; golden max diff " + fmt(worst_golden) + " nats");
  return out;
}

Outcome figure5() {
  Outcome out;
  struct State {
    const char* name;
    double phi, theta, alpha;
    bool below_pm;
  };
  const State states[] = {{"a", 0, kPi / 16, kPi / 16, false},
                          {"d", 0, 0, 0, false},
                          {"e", 0, kPi / 4, kPi / 16, true},
                          {"f", kPi / 3, kPi / 3, kPi / 16, true}};
  for (const auto& st : states) {
    const auto rho = DensityMatrix::qubit(st.phi, st.theta, st.alpha);
    const double pm = pm_nats(rho);
    std::vector<double> rm, rc;
    for (std::size_t n = 1; n <= 5; ++n) {
      const auto cfg = figure(ptr::preset_h51(), n);
      rm.push_back(ptr::scheme_entropy(cfg, rho, ptr::Scheme::RepeatedMeasurements).nats());
      rc.push_back(ptr::scheme_entropy(cfg, rho, ptr::Scheme::RepeatedContacts).nats());
    }
    std::string curve;
    for (std::size_t k = 0; k < 5; ++k) {
      if (k > 0) out.require(rm[k] < rm[k - 1], std::string("rm not decreasing for state ") + st.name + " at N=" + std::to_string(k + 1));
      curve += (k ? "," : "") + fmt(bits(rm[k]));
    }
    if (st.below_pm) {
      double deepest = 1e9;
      for (std::size_t k = 0; k < 5; ++k) deepest = std::min({deepest, rm[k] - pm, rc[k] - pm});
      out.require(deepest < -1e-3, std::string("state ") + st.name + " never below S_pm - 1e-3 (min gap " + fmt(deepest) + ")");
      out.note(std::string("state ") + st.name + " min(S - S_pm) " + fmt(bits(deepest)) + " bits");
    }
    out.note(std::string("state ") + st.name + " S_rm bits " + curve);
  }
  const auto grids = ptr::repeated_measurements(figure(ptr::preset_h51(), 2), DensityMatrix::qubit(0, kPi / 16, kPi / 16));
  const std::size_t n = grids.p.axes()[0].count;
  double asym = 0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) asym = std::max(asym, std::abs(grids.p.at({i, j}) - grids.p.at({j, i})));
  out.require(asym > 1e-3, "p(x1,x2) asymmetry " + fmt(asym));
  out.note("asymmetry " + fmt(asym));
  return out;
}

Outcome figure6() {
  Outcome out;
  const auto rho = DensityMatrix::qubit(0, kPi / 16, kPi / 16);
  ptr::LimitConfig lc;
  lc.M = ptr::preset_m49();
  lc.H = ptr::preset_h51();
  lc.T = 10;
  lc.R = 1;
  const double limit = ptr::scheme_entropy(lc, rho).bits();
  std::vector<double> gaps;
  std::string curve;
  for (std::size_t n : {2u, 4u, 8u, 16u}) {
    auto cfg = figure(ptr::preset_h51(), n);
    cfg.dt = lc.T / static_cast<double>(n);
    cfg.pointer.kappa = lc.R * cfg.dt;
    const double s = ptr::scheme_entropy(cfg, rho, ptr::Scheme::RepeatedContacts).bits();
    gaps.push_back(std::abs(s - limit));
    curve += " N" + std::to_string(n) + " " + fmt(s) + " (gap " + fmt(gaps.back()) + ")";
  }
  for (std::size_t k = 1; k < gaps.size(); ++k)
    out.require(gaps[k] < gaps[k - 1], "gap not decreasing between entries " + std::to_string(k - 1) + " and " + std::to_string(k));
  out.require(gaps.back() < 0.02, "|S_rc(16) - S_limit| = " + fmt(gaps.back()) + " bits");

  ptr::LimitConfig free = lc;
  free.H = ComplexMatrix::Zero(2, 2);
  auto sm = figure(ComplexMatrix::Zero(2, 2), 1);
  sm.pointer.kappa = free.R * free.T;
  const double cross = std::abs(ptr::scheme_entropy(free, rho).nats() - ptr::scheme_entropy(sm, rho, ptr::Scheme::Single).nats());
  out.require(cross <= 1e-8, "H=0 limit vs single measurement " + fmt(cross));
  out.note("S_limit " + fmt(limit) + " bits;" + curve + "; H=0 cross-check " + fmt(cross));
  return out;
}

Outcome grid_robustness() {
  Outcome out;
  const auto rho = DensityMatrix::qubit(0, kPi / 16, kPi / 16);
  double worst_coarse = 0, worst_fine = 0;
  for (std::size_t n = 1; n <= 5; ++n)
    for (auto scheme : {ptr::Scheme::RepeatedMeasurements, ptr::Scheme::RepeatedContacts}) {
      const double a = ptr::scheme_entropy(figure(ptr::preset_h50(), n, 1.0), rho, scheme).bits();
      const double b = ptr::scheme_entropy(figure(ptr::preset_h50(), n, 0.1), rho, scheme).bits();
      worst_coarse = std::max(worst_coarse, std::abs(a - b));
    }
  for (const auto& h : {ptr::preset_h50(), ptr::preset_h51()})
    for (auto scheme : {ptr::Scheme::RepeatedMeasurements, ptr::Scheme::RepeatedContacts}) {
      const double a = ptr::scheme_entropy(figure(h, 2, 0.1), rho, scheme).bits();
      const double b = ptr::scheme_entropy(figure(h, 2, 0.01), rho, scheme).bits();
      worst_fine = std::max(worst_fine, std::abs(a - b));
    }
  out.require(worst_coarse <= 2e-3, "|S(dx=1) - S(dx=0.1)| = " + fmt(worst_coarse) + " bits");
  out.require(worst_fine <= 1e-5, "|S(dx=0.1) - S(dx=0.01)| = " + fmt(worst_fine) + " bits");
  out.note("dx 1 vs 0.1: " + fmt(worst_coarse) + " bits; dx 0.1 vs 0.01 (N=2): " + fmt(worst_fine) + " bits");
  return out;
}

Outcome tomography_round_trip() {
  Outcome out;
  Rng rng(4242);
  double worst = 0;
  int returned_wrong = 0, wrong_error = 0;
  for (int t = 0; t < 200; ++t) {
    const std::size_t dim = 2 + t % 4;
    const auto rho = obsent::testing::random_density(rng, dim, 1 + (t / 4) % dim);
    const auto eig = obsent::linalg::herm_eigen(rho.matrix());
    CoarseGrainingVector v(obsent::basis_cg(eig.eigenvectors));
    const std::size_t rank = obsent::indirect::numerical_rank(rho);
    // The |R+1> probe needs a rank-deficient state.
    if (t % 3 == 2 && rank < dim)
      v = CoarseGrainingVector(obsent::indirect::induced_cg(obsent::indirect::optimal_probe_protocol(rho, rank + 1)));
    else if (t % 3 != 0)
      v = v.appended(obsent::testing::random_cg(rng, dim, 2, 2));
    obsent::tomography::InferenceInput in;
    in.povm = obsent::povm(v);
    for (const auto& e : in.povm) in.probabilities.push_back((e.matrix * rho.matrix()).trace().real());
    in.known_von_neumann = obsent::von_neumann(rho).nats();
    record(obsent::outcome_table(v, rho));
    try {
      const auto result = obsent::tomography::infer_state(in);
      worst = std::max(worst, obsent::tomography::trace_distance(result.rho.matrix(), rho.matrix()));
    } catch (const obsent::Error& e) {
      out.require(false, std::string("saturating case ") + std::to_string(t) + " raised: " + e.what());
    }

    const CoarseGrainingVector bad(obsent::testing::random_cg(rng, dim, 2 + t % 3, 2));
    obsent::tomography::InferenceInput nin;
    nin.povm = obsent::povm(bad);
    for (const auto& e : nin.povm) nin.probabilities.push_back((e.matrix * rho.matrix()).trace().real());
    nin.known_von_neumann = obsent::von_neumann(rho).nats();
    record(obsent::outcome_table(bad, rho));
    try {
      obsent::tomography::infer_state(nin);
      ++returned_wrong;
    } catch (const obsent::SaturationError&) {
    } catch (const obsent::Error&) {
      ++wrong_error;
    }
  }
  out.require(worst < 1e-7, "trace distance " + fmt(worst));
  out.require(returned_wrong == 0, std::to_string(returned_wrong) + " non-saturating cases returned a state");
  out.require(wrong_error == 0, std::to_string(wrong_error) + " non-saturating cases raised another error");
  out.note("max trace distance " + fmt(worst) + "; 200/200 non-saturating POVMs rejected: " +
           (returned_wrong + wrong_error == 0 ? "yes" : "no"));
  return out;
}

Outcome performance() {
  Outcome out;
  const auto rho = DensityMatrix::qubit(0, kPi / 16, kPi / 16);
  const auto cfg = figure(ptr::preset_h51(), 12);
  auto timed = [&](std::size_t threads, ptr::GridPair& result) {
    ptr::Execution e;
    e.threads = threads;
    const auto t0 = std::chrono::steady_clock::now();
    result = ptr::repeated_contacts(cfg, rho, e);
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  };
  ptr::GridPair one{obsent::GridFunction({}, {}), obsent::GridFunction({}, {})}, four = one;
  const double t1 = timed(1, one);
  const double t4 = timed(4, four);
  const bool identical = one.p.values() == four.p.values() && one.volume.values() == four.volume.values();
  out.require(t1 <= 60, "single worker " + fmt(t1) + " s");
  out.require(identical, "outputs differ between 1 and 4 workers");
  out.require(t1 / t4 >= 2.0, "speedup " + fmt(t1 / t4) + "x with 4 workers on " +
                                  std::to_string(std::thread::hardware_concurrency()) + " hardware thread(s)");
  out.note("1 worker " + fmt(t1) + " s, 4 workers " + fmt(t4) + " s, bit-identical " + (identical ? "yes" : "no"));
  return out;
}

Outcome kl_identity() {
  Outcome out;
  double worst_lib = 0, worst_oracle = 0;
  for (const auto& t : g_tables) {
    const double s = obsent::observational(t).nats();
    const auto kl = obsent::kl_decomposition(t, t.dim);
    worst_lib = std::max(worst_lib, std::abs(s - kl.entropy()));
    double d = 0;
    for (const auto& e : t.entries)
      if (e.p > obsent::kProbabilityFloor) d += e.p * std::log(e.p / (e.volume / static_cast<double>(t.dim)));
    worst_oracle = std::max(worst_oracle, std::abs(s - (std::log(static_cast<double>(t.dim)) - d)));
  }
  out.require(worst_lib <= 1e-12, "library decomposition off by " + fmt(worst_lib));
  out.require(worst_oracle <= 1e-12, "direct D_KL off by " + fmt(worst_oracle));
  out.note(std::to_string(g_tables.size()) + " tables; max |S - (ln dim - D_KL)| " + fmt(std::max(worst_lib, worst_oracle)));
  return out;
}

}  // namespace

// Usage: acceptance [criterion ids...]; no arguments runs all of them.
int main(int argc, char** argv) {
  struct Criterion {
    int id;
    const char* name;
    double budget;  // seconds, 0 = none
    std::function<Outcome()> fn;
  };
  const std::vector<Criterion> criteria{
      {1, "theorem suite", 60, theorem_suite},
      {2, "saturation constructions", 10, saturation_constructions},
      {3, "closed forms", 0, closed_forms},
      {4, "Fig. 3 single measurement sweep", 30, figure3},
      {5, "Fig. 4 commuting repeated schemes", 300, figure4},
      {6, "Fig. 5 non-commuting repeated schemes", 0, figure5},
      {7, "Fig. 6 continuum limit", 0, figure6},
      {8, "grid robustness", 0, grid_robustness},
      {9, "tomography round trip", 0, tomography_round_trip},
      {10, "repeated contacts performance", 0, performance},
      {11, "KL identity", 0, kl_identity},
  };
  std::vector<int> selected;
  for (int k = 1; k < argc; ++k) selected.push_back(std::atoi(argv[k]));
  int failures = 0, ran = 0;
  for (const auto& c : criteria) {
    if (!selected.empty() && std::find(selected.begin(), selected.end(), c.id) == selected.end()) continue;
    ++ran;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.fn();
    } catch (const std::exception& e) {
      o.require(false, std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (c.budget > 0) o.require(secs <= c.budget, "runtime " + fmt(secs) + " s over " + fmt(c.budget) + " s");
    if (!o.pass) ++failures;
    std::printf("%s criterion %d (%s) [%.1f s]: %s\n", o.pass ? "PASS" : "FAIL", c.id, c.name, secs, o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%d criteria passed\n", ran - failures, ran);
  return failures == 0 ? 0 : 1;
}
