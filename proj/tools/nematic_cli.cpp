// Command line driver: run, study, audit, validate.
#include <filesystem>
#include <iostream>

#include "CLI11.hpp"
#include "nematic/driver.hpp"
#include "nematic/errors.hpp"

using namespace nematic;

int main(int argc, char** argv) {
  CLI::App app{"Non-isothermal nematic liquid crystal flow: Galerkin runs and invariant audits"};
  app.require_subcommand(1);

  std::string config_path, snapshot_path;
  std::vector<std::string> overrides;
  std::vector<std::size_t> n_list, m_list;

  auto* run = app.add_subcommand("run", "march a configuration to t_end and audit it");
  run->add_option("config", config_path, "configuration file")->required()->check(CLI::ExistingFile);
  run->add_option("--set", overrides, "override a key, section.key=value");

  auto* study = app.add_subcommand("study", "truncation study over N then M");
  study->add_option("config", config_path, "configuration file")->required()->check(CLI::ExistingFile);
  study->add_option("--n-list", n_list, "velocity mode counts")->required()->delimiter(',');
  study->add_option("--m-list", m_list, "convective truncation levels")->required()->delimiter(',');
  study->add_option("--set", overrides, "override a key, section.key=value");

  auto* audit = app.add_subcommand("audit", "energy/entropy ledger and norms of a snapshot");
  audit->add_option("snapshot", snapshot_path, "snapshot file")->required()->check(CLI::ExistingFile);
  audit->add_option("config", config_path, "configuration file")->required()->check(CLI::ExistingFile);
  audit->add_option("--set", overrides, "override a key, section.key=value");

  auto* validate = app.add_subcommand("validate", "parse a configuration and check the material hypotheses");
  validate->add_option("config", config_path, "configuration file")->required()->check(CLI::ExistingFile);
  validate->add_option("--set", overrides, "override a key, section.key=value");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*validate) {
      const RunConfig cfg = load_config(config_path, overrides, false);
      const HypothesisReport rep = validate_hypotheses(cfg.laws(), default_theta_grid(), default_director_samples());
      std::cout << rep.summary();
      if (!rep.all_passed()) return 1;
      load_config(config_path, overrides, true);
      std::cout << "config ok\n";
      return 0;
    }
    const RunConfig cfg = load_config(config_path, overrides);
    if (*run) {
      const std::string out = resolve_output_dir(cfg);
      const RunOutcome o = run_command(cfg, out);
      std::cout << o.summary_json << '\n';
      std::cerr << (o.exit_code == 0 ? "run passed" : "run FAILED") << ", output in " << out << '\n';
      return o.exit_code;
    }
    if (*study) {
      const std::string out = resolve_output_dir(cfg);
      const StudyReport rep = convergence_study(cfg, n_list, m_list, out);
      std::cout << rep.csv;
      return 0;
    }
    if (*audit) {
      const AuditOutcome o = audit_snapshot(snapshot_path, cfg);
      std::cout << o.json << '\n';
      return o.exit_code;
    }
  } catch (const ConfigError& e) {
    std::cerr << config_path << ": " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
