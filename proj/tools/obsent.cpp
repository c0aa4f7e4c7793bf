#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "obsent/cli.hpp"
#include "obsent/errors.hpp"
#include "obsent/serialization.hpp"

namespace {

using obsent::cli::json;

struct Overrides {
  std::optional<std::string> scheme;
  std::optional<double> omega, kappa, dx, buffer, dt, T, R, capacity;
  std::optional<std::size_t> N, threads;
  std::optional<std::string> output, log_base;
};

void add_overrides(CLI::App* cmd, Overrides& o, bool with_scheme) {
  if (with_scheme) cmd->add_option("--scheme", o.scheme, "pm, sm, rm, rc, limit, infer, sweep_omega, sweep_n");
  cmd->add_option("--omega", o.omega, "pointer width");
  cmd->add_option("--kappa", o.kappa, "coupling strength");
  cmd->add_option("--dx", o.dx, "grid step");
  cmd->add_option("--buffer", o.buffer, "grid margin in units of omega");
  cmd->add_option("--N", o.N, "number of measurements or contacts");
  cmd->add_option("--dt", o.dt, "free evolution time between interactions");
  cmd->add_option("--T", o.T, "total time (limit scheme, fixed-time sweeps)");
  cmd->add_option("--R", o.R, "kappa / dt ratio");
  cmd->add_option("--capacity", o.capacity, "work budget for rm/rc");
  cmd->add_option("--threads", o.threads, "worker threads (default: OBSENT_THREADS or all cores)");
  cmd->add_option("--output", o.output, "output directory");
  cmd->add_option("--log-base", o.log_base, "bits or nats for console output");
}

json load(const std::string& path, const Overrides& o, const std::optional<std::string>& forced_scheme) {
  json doc = obsent::io::read_json_file(path);
  if (!doc.is_object()) return doc;
  if (forced_scheme) doc["scheme"] = *forced_scheme;
  if (o.scheme) doc["scheme"] = *o.scheme;
  auto set_pointer = [&](const char* key, const std::optional<double>& v) {
    if (v) doc["pointer"][key] = *v;
  };
  set_pointer("omega", o.omega);
  set_pointer("kappa", o.kappa);
  set_pointer("dx", o.dx);
  set_pointer("buffer", o.buffer);
  if (o.N) doc["N"] = *o.N;
  if (o.dt) doc["dt"] = *o.dt;
  if (o.T) doc["T"] = *o.T;
  if (o.R) doc["R"] = *o.R;
  if (o.capacity) doc["capacity"] = *o.capacity;
  if (o.threads) doc["threads"] = *o.threads;
  if (o.output) doc["output"] = *o.output;
  if (o.log_base) doc["log_base"] = *o.log_base;
  return doc;
}

int report_violations(const obsent::cli::ValidationReport& report) {
  for (const auto& v : report.violations) std::cerr << "violation: " << v << '\n';
  return report.ok() ? 0 : 1;
}

int run_config(const json& doc) {
  const auto report = obsent::cli::validate(doc);
  if (!report.ok()) return report_violations(report);
  const auto cfg = obsent::cli::parse_config(doc);
  const auto result = obsent::cli::run(cfg);
  const char* unit = cfg.log_base == obsent::LogBase::Bits ? "bits" : "nats";
  for (const auto& row : result.rows) {
    std::cout << obsent::pointer::to_string(row.scheme);
    if (row.N) std::cout << " N=" << *row.N;
    if (row.omega) std::cout << " omega=" << obsent::cli::format_number(*row.omega);
    std::cout << "  S=" << obsent::cli::format_number(row.entropy.in(cfg.log_base)) << ' ' << unit << '\n';
  }
  for (const auto& f : result.files) std::cout << "wrote " << f.string() << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Observational entropy of generalized and pointer measurements"};
  app.require_subcommand(1);

  std::string config_path;
  Overrides o;

  auto* run = app.add_subcommand("run", "run the experiment described by a config file");
  run->add_option("config", config_path, "JSON config")->required()->check(CLI::ExistingFile);
  add_overrides(run, o, true);

  auto* validate = app.add_subcommand("validate", "list every problem in a config file");
  validate->add_option("config", config_path, "JSON config")->required()->check(CLI::ExistingFile);
  add_overrides(validate, o, true);

  auto* sweep_omega = app.add_subcommand("sweep-omega", "entropy over a log-spaced range of pointer widths");
  sweep_omega->add_option("config", config_path, "JSON config")->required()->check(CLI::ExistingFile);
  add_overrides(sweep_omega, o, false);

  auto* sweep_n = app.add_subcommand("sweep-n", "entropy over a range of measurement/contact counts");
  sweep_n->add_option("config", config_path, "JSON config")->required()->check(CLI::ExistingFile);
  add_overrides(sweep_n, o, false);

  std::string povm_path, probs_path;
  std::optional<std::string> infer_output;
  auto* infer = app.add_subcommand("infer", "reconstruct a state from saturating POVM statistics");
  infer->add_option("povm-file", povm_path, "POVM document")->required()->check(CLI::ExistingFile);
  infer->add_option("probs-file", probs_path, "probabilities document")->required()->check(CLI::ExistingFile);
  infer->add_option("--output", infer_output, "write the state here instead of stdout");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*infer) {
      const auto result = obsent::cli::infer_files(povm_path, probs_path);
      const std::string text = obsent::io::to_json(result.rho).dump(2) + "\n";
      if (infer_output) {
        std::ofstream(*infer_output) << text;
      } else {
        std::cout << text;
      }
      return 0;
    }
    if (*validate) {
      const auto report = obsent::cli::validate(load(config_path, o, std::nullopt));
      if (report.ok()) std::cout << "ok\n";
      return report_violations(report);
    }
    if (*run) return run_config(load(config_path, o, std::nullopt));
    if (*sweep_omega) return run_config(load(config_path, o, std::string("sweep_omega")));
    if (*sweep_n) return run_config(load(config_path, o, std::string("sweep_n")));
  } catch (const obsent::CapacityError& e) {
    std::cerr << "error: " << e.what() << " (estimated cost " << e.estimated_cost() << ")\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
