#pragma once

#include <optional>
#include <string>
#include <vector>

#include "nematic/audit.hpp"
#include "nematic/fields.hpp"
#include "nematic/grid.hpp"
#include "nematic/material.hpp"
#include "nematic/stepper.hpp"

namespace nematic {

enum class InitialPreset { rest, taylor_green, random_smooth, file };
std::string to_string(InitialPreset preset);

/// uniform: (1, 0, 0) scaled to director_amplitude; random: smooth random field
/// with max |d| = director_amplitude; perturbed: (1, 0, 0) plus a smooth random
/// field of max norm director_amplitude.
enum class DirectorPreset { uniform, random, perturbed };
std::string to_string(DirectorPreset preset);

struct InitialSpec {
  InitialPreset preset = InitialPreset::rest;
  unsigned long seed = 0;
  double amplitude = 1.0;         // velocity amplitude (max |u| for random-smooth)
  double theta0 = 1.0;            // mean temperature
  double theta_amplitude = 0.0;   // max deviation of theta from theta0 (random-smooth)
  DirectorPreset director = DirectorPreset::uniform;
  double director_amplitude = 1.0;  // max |d|
  double bandwidth = 2.0;         // random-smooth spectra fall off as exp(-|m|^2 / (2 bandwidth^2))
  std::string file;               // snapshot for the file preset

  bool operator==(const InitialSpec&) const = default;
};

/// Optional tabulated laws, stored as resolved paths.
struct LawTables {
  std::string viscosity;
  std::string dilatation;
  std::string conductivity;
  std::string anisotropy;

  bool operator==(const LawTables&) const = default;
};

struct RunConfig {
  DomainSpec domain;
  MaterialParams material;
  LawTables tables;
  GalerkinConfig galerkin;
  InitialSpec initial;
  std::string output_dir = "output";
  std::size_t snapshot_stride = 0;
  bool heatmaps = false;
  NormExponents exponents;
  double dissipation_k = 0.0;  // 0: chosen from the run

  MaterialLaws laws() const;
  bool operator==(const RunConfig& o) const;
};

/// Parses `[section]` / `key = value` text; '#' starts a comment. Unknown keys,
/// missing required keys, malformed values and material laws that fail the
/// hypothesis checks raise ConfigError with the offending line. `overrides`
/// are `section.key=value` strings applied before validation. Relative table
/// and snapshot paths are resolved against `base_dir`.
RunConfig parse_config(const std::string& text, const std::vector<std::string>& overrides = {},
                       const std::string& base_dir = ".", bool check_hypotheses = true);
RunConfig load_config(const std::string& path, const std::vector<std::string>& overrides = {},
                      bool check_hypotheses = true);
/// Canonical text form; parse_config(dump_config(c)) == c.
std::string dump_config(const RunConfig& cfg);

/// Initial data for a run: u Leray-projected, d low-pass filtered, theta >= a positive minimum.
FieldState make_initial(const InitialSpec& spec, const Grid& grid, const MaterialLaws& laws);

/// Output directory: the environment variable NEMATIC_OUTPUT_DIR wins over the config.
std::string resolve_output_dir(const RunConfig& cfg);

}  // namespace nematic
