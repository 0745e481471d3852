#include "nematic/config.hpp"

#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "nematic/errors.hpp"

namespace nematic {

namespace fs = std::filesystem;

std::string to_string(InitialPreset preset) {
  switch (preset) {
    case InitialPreset::rest: return "rest";
    case InitialPreset::taylor_green: return "taylor-green";
    case InitialPreset::random_smooth: return "random-smooth";
    case InitialPreset::file: return "file";
  }
  return "rest";
}

std::string to_string(DirectorPreset preset) {
  switch (preset) {
    case DirectorPreset::uniform: return "uniform";
    case DirectorPreset::random: return "random";
    case DirectorPreset::perturbed: return "perturbed";
  }
  return "uniform";
}

MaterialLaws RunConfig::laws() const {
  MaterialLaws laws(material);
  if (!tables.viscosity.empty()) laws = laws.with_viscosity(ScalarLaw::load_table(tables.viscosity));
  if (!tables.dilatation.empty()) laws = laws.with_dilatation(ScalarLaw::load_table(tables.dilatation));
  if (!tables.conductivity.empty()) laws = laws.with_conductivity(ScalarLaw::load_table(tables.conductivity));
  if (!tables.anisotropy.empty()) laws = laws.with_anisotropy(ScalarLaw::load_table(tables.anisotropy));
  return laws;
}

bool RunConfig::operator==(const RunConfig& o) const {
  const auto& g = galerkin;
  const auto& h = o.galerkin;
  return domain == o.domain && material == o.material && tables == o.tables && g.levels.n == h.levels.n &&
         g.levels.m == h.levels.m && g.dt == h.dt && g.t_end == h.t_end && g.explicit_source == h.explicit_source &&
         g.implicit_diffusion == h.implicit_diffusion && g.cfl_safety == h.cfl_safety &&
         g.max_dt_halvings == h.max_dt_halvings && g.forcing == h.forcing && initial == o.initial &&
         output_dir == o.output_dir && snapshot_stride == o.snapshot_stride && heatmaps == o.heatmaps &&
         exponents.nu == o.exponents.nu && exponents.q == o.exponents.q && exponents.p == o.exponents.p &&
         dissipation_k == o.dissipation_k;
}

namespace {

struct Entry {
  std::string value;
  int line = 0;
};

using Sections = std::map<std::string, std::map<std::string, Entry>>;

const std::map<std::string, std::set<std::string>>& known_keys() {
  static const std::map<std::string, std::set<std::string>> keys = {
      {"domain", {"dim", "lengths", "resolution", "mode", "wall_axis"}},
      {"material",
       {"mu_lo", "mu_hi", "kappa_lo", "kappa_hi", "lambda_hi", "d0", "theta_floor", "kappa", "kappa_aniso", "mu_table",
        "lambda_table", "kappa_table", "kappa_aniso_table"}},
      {"galerkin",
       {"n_modes", "m_modes", "dt", "t_end", "cfl_safety", "max_dt_halvings", "implicit_diffusion", "explicit_source",
        "forcing"}},
      {"initial",
       {"preset", "seed", "amplitude", "theta0", "theta_amplitude", "director", "director_amplitude", "bandwidth", "file"}},
      {"output", {"dir", "snapshot_stride", "heatmaps"}},
      {"audit", {"nu", "q", "p", "K"}},
  };
  return keys;
}

std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

void store(Sections& sections, const std::string& section, const std::string& key, const std::string& value,
           int line) {
  const auto& keys = known_keys();
  auto it = keys.find(section);
  if (it == keys.end()) throw ConfigError("unknown section [" + section + "]", line);
  if (!it->second.count(key)) throw ConfigError("unknown key '" + key + "' in section [" + section + "]", line);
  sections[section][key] = Entry{value, line};
}

class Reader {
 public:
  explicit Reader(const Sections& s) : s_(s) {}

  const Entry* find(const std::string& section, const std::string& key) const {
    auto it = s_.find(section);
    if (it == s_.end()) return nullptr;
    auto jt = it->second.find(key);
    return jt == it->second.end() ? nullptr : &jt->second;
  }
  int line(const std::string& section, const std::string& key) const {
    const Entry* e = find(section, key);
    return e ? e->line : 0;
  }
  const Entry& require(const std::string& section, const std::string& key) const {
    const Entry* e = find(section, key);
    if (!e) throw ConfigError("missing required key '" + key + "' in section [" + section + "]");
    return *e;
  }

  double real(const std::string& section, const std::string& key, double fallback) const {
    const Entry* e = find(section, key);
    return e ? to_real(*e, key) : fallback;
  }
  long integer(const std::string& section, const std::string& key, long fallback) const {
    const Entry* e = find(section, key);
    return e ? to_integer(*e, key) : fallback;
  }
  bool boolean(const std::string& section, const std::string& key, bool fallback) const {
    const Entry* e = find(section, key);
    if (!e) return fallback;
    if (e->value == "true" || e->value == "yes" || e->value == "1") return true;
    if (e->value == "false" || e->value == "no" || e->value == "0") return false;
    throw ConfigError("'" + key + "' expects true or false, got '" + e->value + "'", e->line);
  }
  std::string text(const std::string& section, const std::string& key, const std::string& fallback) const {
    const Entry* e = find(section, key);
    return e ? e->value : fallback;
  }
  std::vector<double> reals(const std::string& section, const std::string& key, std::vector<double> fallback) const {
    const Entry* e = find(section, key);
    if (!e) return fallback;
    std::vector<double> out;
    for (const auto& tok : split(e->value)) out.push_back(to_real(Entry{tok, e->line}, key));
    if (out.empty()) throw ConfigError("'" + key + "' expects a list of numbers", e->line);
    return out;
  }

  static double to_real(const Entry& e, const std::string& key) {
    char* end = nullptr;
    const double v = std::strtod(e.value.c_str(), &end);
    if (e.value.empty() || end != e.value.c_str() + e.value.size()) {
      throw ConfigError("'" + key + "' expects a number, got '" + e.value + "'", e.line);
    }
    return v;
  }
  static long to_integer(const Entry& e, const std::string& key) {
    char* end = nullptr;
    const long v = std::strtol(e.value.c_str(), &end, 10);
    if (e.value.empty() || end != e.value.c_str() + e.value.size()) {
      throw ConfigError("'" + key + "' expects an integer, got '" + e.value + "'", e.line);
    }
    return v;
  }
  static std::vector<std::string> split(const std::string& s) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
      if (c == ',' || std::isspace(static_cast<unsigned char>(c))) {
        if (!cur.empty()) out.push_back(cur), cur.clear();
      } else {
        cur += c;
      }
    }
    if (!cur.empty()) out.push_back(cur);
    return out;
  }

 private:
  const Sections& s_;
};

std::string resolve(const std::string& base_dir, const std::string& path, int line) {
  if (path.empty()) return path;
  fs::path p(path);
  if (p.is_relative()) p = fs::path(base_dir) / p;
  p = p.lexically_normal();
  if (!fs::exists(p)) throw ConfigError("referenced file '" + p.string() + "' does not exist", line);
  return p.string();
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string fmt_list(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ", ";
    s += fmt(v[i]);
  }
  return s;
}

}  // namespace

RunConfig parse_config(const std::string& text, const std::vector<std::string>& overrides,
                       const std::string& base_dir, bool check_hypotheses) {
  Sections sections;
  std::istringstream in(text);
  std::string raw, section;
  int lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    if (auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
    const std::string line = trim(raw);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError("malformed section header", lineno);
      section = trim(line.substr(1, line.size() - 2));
      if (!known_keys().count(section)) throw ConfigError("unknown section [" + section + "]", lineno);
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("expected 'key = value'", lineno);
    if (section.empty()) throw ConfigError("key outside of any section", lineno);
    const std::string key = trim(line.substr(0, eq));
    if (sections[section].count(key)) throw ConfigError("duplicate key '" + key + "'", lineno);
    store(sections, section, key, trim(line.substr(eq + 1)), lineno);
  }
  for (const auto& o : overrides) {
    const auto eq = o.find('=');
    const auto dot = o.find('.');
    if (eq == std::string::npos || dot == std::string::npos || dot > eq) {
      throw ConfigError("override '" + o + "' is not of the form section.key=value");
    }
    store(sections, trim(o.substr(0, dot)), trim(o.substr(dot + 1, eq - dot - 1)), trim(o.substr(eq + 1)), 0);
  }

  const Reader r(sections);
  RunConfig cfg;

  // domain
  {
    const Entry& dim = r.require("domain", "dim");
    cfg.domain.dim = static_cast<int>(Reader::to_integer(dim, "dim"));
    if (cfg.domain.dim != 2 && cfg.domain.dim != 3) throw ConfigError("dim must be 2 or 3", dim.line);
    const Entry& res = r.require("domain", "resolution");
    const auto rv = r.reals("domain", "resolution", {});
    if (static_cast<int>(rv.size()) != cfg.domain.dim) {
      throw ConfigError("resolution needs " + std::to_string(cfg.domain.dim) + " entries", res.line);
    }
    for (int a = 0; a < 3; ++a) cfg.domain.resolution[a] = a < cfg.domain.dim ? static_cast<int>(rv[a]) : 1;
    for (int a = 0; a < cfg.domain.dim; ++a) {
      if (rv[a] != static_cast<double>(cfg.domain.resolution[a])) {
        throw ConfigError("resolution entries must be integers", res.line);
      }
    }
    if (const Entry* e = r.find("domain", "lengths")) {
      const auto lv = r.reals("domain", "lengths", {});
      if (static_cast<int>(lv.size()) != cfg.domain.dim) {
        throw ConfigError("lengths needs " + std::to_string(cfg.domain.dim) + " entries", e->line);
      }
      for (int a = 0; a < cfg.domain.dim; ++a) cfg.domain.lengths[a] = lv[a];
    }
    if (const Entry* e = r.find("domain", "mode")) {
      try {
        cfg.domain.mode = boundary_mode_from_string(e->value);
      } catch (const std::invalid_argument& ex) {
        throw ConfigError(ex.what(), e->line);
      }
    }
    cfg.domain.wall_axis = static_cast<int>(r.integer("domain", "wall_axis", cfg.domain.wall_axis));
    try {
      cfg.domain.validate();
    } catch (const std::invalid_argument& ex) {
      throw ConfigError(ex.what(), res.line);
    }
  }

  // material
  {
    auto& m = cfg.material;
    m.mu_lo = r.real("material", "mu_lo", m.mu_lo);
    m.mu_hi = r.real("material", "mu_hi", m.mu_hi);
    m.kappa_lo = r.real("material", "kappa_lo", m.kappa_lo);
    m.kappa_hi = r.real("material", "kappa_hi", m.kappa_hi);
    m.lambda_hi = r.real("material", "lambda_hi", m.lambda_hi);
    m.d0 = r.real("material", "d0", m.d0);
    m.theta_floor = r.real("material", "theta_floor", m.theta_floor);
    m.kappa_value = r.real("material", "kappa", m.kappa_value);
    m.kappa_aniso_value = r.real("material", "kappa_aniso", m.kappa_aniso_value);
    auto table = [&](const char* key) {
      return resolve(base_dir, r.text("material", key, ""), r.line("material", key));
    };
    cfg.tables.viscosity = table("mu_table");
    cfg.tables.dilatation = table("lambda_table");
    cfg.tables.conductivity = table("kappa_table");
    cfg.tables.anisotropy = table("kappa_aniso_table");
  }

  // galerkin
  {
    auto& g = cfg.galerkin;
    const long n = r.integer("galerkin", "n_modes", 16);
    if (n < 1) throw ConfigError("n_modes must be >= 1", r.line("galerkin", "n_modes"));
    const long m = r.integer("galerkin", "m_modes", n);
    if (m < 1 || m > n) throw ConfigError("m_modes must lie in [1, n_modes]", r.line("galerkin", "m_modes"));
    g.levels.n = static_cast<std::size_t>(n);
    g.levels.m = static_cast<std::size_t>(m);
    g.dt = r.real("galerkin", "dt", g.dt);
    if (!(g.dt > 0.0)) throw ConfigError("dt must be positive", r.line("galerkin", "dt"));
    g.t_end = r.real("galerkin", "t_end", g.t_end);
    if (!(g.t_end > 0.0)) throw ConfigError("t_end must be positive", r.line("galerkin", "t_end"));
    g.cfl_safety = r.real("galerkin", "cfl_safety", g.cfl_safety);
    if (!(g.cfl_safety > 0.0 && g.cfl_safety <= 1.0)) {
      throw ConfigError("cfl_safety must lie in (0, 1]", r.line("galerkin", "cfl_safety"));
    }
    g.max_dt_halvings = static_cast<int>(r.integer("galerkin", "max_dt_halvings", g.max_dt_halvings));
    if (g.max_dt_halvings < 0) {
      throw ConfigError("max_dt_halvings must be nonnegative", r.line("galerkin", "max_dt_halvings"));
    }
    g.implicit_diffusion = r.boolean("galerkin", "implicit_diffusion", g.implicit_diffusion);
    g.explicit_source = r.boolean("galerkin", "explicit_source", g.explicit_source);
    g.forcing = r.real("galerkin", "forcing", g.forcing);
  }

  // initial
  {
    auto& s = cfg.initial;
    const Entry& preset = r.require("initial", "preset");
    if (preset.value == "rest") {
      s.preset = InitialPreset::rest;
    } else if (preset.value == "taylor-green") {
      s.preset = InitialPreset::taylor_green;
    } else if (preset.value == "random-smooth") {
      s.preset = InitialPreset::random_smooth;
    } else if (preset.value == "file") {
      s.preset = InitialPreset::file;
    } else {
      throw ConfigError("unknown preset '" + preset.value + "' (rest, taylor-green, random-smooth, file)",
                        preset.line);
    }
    const long seed = r.integer("initial", "seed", 0);
    if (seed < 0) throw ConfigError("seed must be nonnegative", r.line("initial", "seed"));
    s.seed = static_cast<unsigned long>(seed);
    s.amplitude = r.real("initial", "amplitude", s.amplitude);
    s.theta0 = r.real("initial", "theta0", s.theta0);
    s.theta_amplitude = r.real("initial", "theta_amplitude", s.theta_amplitude);
    if (!(s.theta0 - std::abs(s.theta_amplitude) > 0.0)) {
      throw ConfigError("initial temperature must stay positive: need theta0 > |theta_amplitude|",
                        r.line("initial", r.find("initial", "theta_amplitude") ? "theta_amplitude" : "theta0"));
    }
    const std::string dir = r.text("initial", "director", "uniform");
    if (dir == "uniform") {
      s.director = DirectorPreset::uniform;
    } else if (dir == "random") {
      s.director = DirectorPreset::random;
    } else if (dir == "perturbed") {
      s.director = DirectorPreset::perturbed;
    } else {
      throw ConfigError("director must be uniform, random or perturbed", r.line("initial", "director"));
    }
    s.director_amplitude = r.real("initial", "director_amplitude", s.director_amplitude);
    if (!(s.director_amplitude >= 0.0)) {
      throw ConfigError("director_amplitude must be nonnegative", r.line("initial", "director_amplitude"));
    }
    s.bandwidth = r.real("initial", "bandwidth", s.bandwidth);
    if (!(s.bandwidth > 0.0)) throw ConfigError("bandwidth must be positive", r.line("initial", "bandwidth"));
    if (s.preset == InitialPreset::file) {
      const Entry& f = r.require("initial", "file");
      s.file = resolve(base_dir, f.value, f.line);
    } else if (const Entry* f = r.find("initial", "file")) {
      s.file = resolve(base_dir, f->value, f->line);
    }
  }

  // output
  cfg.output_dir = r.text("output", "dir", cfg.output_dir);
  {
    const long stride = r.integer("output", "snapshot_stride", 0);
    if (stride < 0) throw ConfigError("snapshot_stride must be nonnegative", r.line("output", "snapshot_stride"));
    cfg.snapshot_stride = static_cast<std::size_t>(stride);
  }
  cfg.heatmaps = r.boolean("output", "heatmaps", false);

  // audit
  cfg.exponents.nu = r.reals("audit", "nu", cfg.exponents.nu);
  cfg.exponents.q = r.reals("audit", "q", cfg.exponents.q);
  cfg.exponents.p = r.reals("audit", "p", cfg.exponents.p);
  try {
    cfg.exponents.validate();
  } catch (const RangeError& ex) {
    const char* key = std::string(ex.what()).find("nu") != std::string::npos  ? "nu"
                      : std::string(ex.what()).find(" q ") != std::string::npos ? "q"
                                                                                 : "p";
    throw ConfigError(ex.what(), r.line("audit", key));
  }
  cfg.dissipation_k = r.real("audit", "K", 0.0);
  if (cfg.dissipation_k < 0.0) throw ConfigError("K must be nonnegative (0 selects it from the run)", r.line("audit", "K"));

  // material laws and hypotheses
  MaterialLaws laws;
  try {
    laws = cfg.laws();
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& ex) {
    throw ConfigError(std::string("material: ") + ex.what(), r.line("material", "mu_lo"));
  }
  if (check_hypotheses) {
    const HypothesisReport rep = validate_hypotheses(laws, default_theta_grid(), default_director_samples());
    for (const auto& c : rep.checks) {
      if (c.passed) continue;
      int line = 0;
      if (c.name.rfind("viscosity", 0) == 0) {
        line = r.line("material", r.find("material", "mu_table") ? "mu_table" : "mu_lo");
      } else if (c.name.rfind("dilatation", 0) == 0) {
        line = r.line("material", r.find("material", "lambda_table") ? "lambda_table" : "lambda_hi");
      } else if (c.name.rfind("conductivity", 0) == 0) {
        line = r.line("material", r.find("material", "kappa_table") ? "kappa_table" : "kappa");
      } else if (c.name.rfind("anisotropy", 0) == 0) {
        line = r.line("material", r.find("material", "kappa_aniso_table") ? "kappa_aniso_table" : "kappa_aniso");
      }
      throw ConfigError("material hypothesis failed: " + c.name + " (" + c.counterexample + ")", line);
    }
  }
  return cfg;
}

RunConfig load_config(const std::string& path, const std::vector<std::string>& overrides, bool check_hypotheses) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  const fs::path base = fs::path(path).parent_path();
  return parse_config(buf.str(), overrides, base.empty() ? "." : base.string(), check_hypotheses);
}

std::string dump_config(const RunConfig& c) {
  std::ostringstream o;
  const int dim = c.domain.dim;
  auto ints = [&](const std::array<int, 3>& v) {
    std::string s;
    for (int a = 0; a < dim; ++a) s += (a ? ", " : "") + std::to_string(v[a]);
    return s;
  };
  std::vector<double> lengths(c.domain.lengths.begin(), c.domain.lengths.begin() + dim);
  o << "[domain]\n"
    << "dim = " << dim << "\n"
    << "lengths = " << fmt_list(lengths) << "\n"
    << "resolution = " << ints(c.domain.resolution) << "\n"
    << "mode = " << to_string(c.domain.mode) << "\n"
    << "wall_axis = " << c.domain.wall_axis << "\n\n";
  const auto& m = c.material;
  o << "[material]\n"
    << "mu_lo = " << fmt(m.mu_lo) << "\n"
    << "mu_hi = " << fmt(m.mu_hi) << "\n"
    << "kappa_lo = " << fmt(m.kappa_lo) << "\n"
    << "kappa_hi = " << fmt(m.kappa_hi) << "\n"
    << "lambda_hi = " << fmt(m.lambda_hi) << "\n"
    << "d0 = " << fmt(m.d0) << "\n"
    << "theta_floor = " << fmt(m.theta_floor) << "\n"
    << "kappa = " << fmt(m.kappa_value) << "\n"
    << "kappa_aniso = " << fmt(m.kappa_aniso_value) << "\n";
  if (!c.tables.viscosity.empty()) o << "mu_table = " << c.tables.viscosity << "\n";
  if (!c.tables.dilatation.empty()) o << "lambda_table = " << c.tables.dilatation << "\n";
  if (!c.tables.conductivity.empty()) o << "kappa_table = " << c.tables.conductivity << "\n";
  if (!c.tables.anisotropy.empty()) o << "kappa_aniso_table = " << c.tables.anisotropy << "\n";
  const auto& g = c.galerkin;
  o << "\n[galerkin]\n"
    << "n_modes = " << g.levels.n << "\n"
    << "m_modes = " << g.levels.m << "\n"
    << "dt = " << fmt(g.dt) << "\n"
    << "t_end = " << fmt(g.t_end) << "\n"
    << "cfl_safety = " << fmt(g.cfl_safety) << "\n"
    << "max_dt_halvings = " << g.max_dt_halvings << "\n"
    << "implicit_diffusion = " << (g.implicit_diffusion ? "true" : "false") << "\n"
    << "explicit_source = " << (g.explicit_source ? "true" : "false") << "\n"
    << "forcing = " << fmt(g.forcing) << "\n\n";
  const auto& s = c.initial;
  o << "[initial]\n"
    << "preset = " << to_string(s.preset) << "\n"
    << "seed = " << s.seed << "\n"
    << "amplitude = " << fmt(s.amplitude) << "\n"
    << "theta0 = " << fmt(s.theta0) << "\n"
    << "theta_amplitude = " << fmt(s.theta_amplitude) << "\n"
    << "director = " << to_string(s.director) << "\n"
    << "director_amplitude = " << fmt(s.director_amplitude) << "\n"
    << "bandwidth = " << fmt(s.bandwidth) << "\n";
  if (!s.file.empty()) o << "file = " << s.file << "\n";
  o << "\n[output]\n"
    << "dir = " << c.output_dir << "\n"
    << "snapshot_stride = " << c.snapshot_stride << "\n"
    << "heatmaps = " << (c.heatmaps ? "true" : "false") << "\n\n";
  o << "[audit]\n"
    << "nu = " << fmt_list(c.exponents.nu) << "\n"
    << "q = " << fmt_list(c.exponents.q) << "\n"
    << "p = " << fmt_list(c.exponents.p) << "\n"
    << "K = " << fmt(c.dissipation_k) << "\n";
  return o.str();
}

std::string resolve_output_dir(const RunConfig& cfg) {
  if (const char* env = std::getenv("NEMATIC_OUTPUT_DIR"); env != nullptr && *env != '\0') return env;
  return cfg.output_dir;
}

}  // namespace nematic
