#pragma once

// Run configuration shared by the dataset commands: a flat set of documented
// keys loadable from a TOML-style key = value file, overridable by flags.
// Validation aggregates every bad field into one report, and the resolved
// configuration hashes into the metadata sidecar so every artifact can be
// reproduced from its sidecar alone.

#include <cstdint>
#include <sstream>
#include <string>
#include <vector>

#include <atomlight/constants.hpp>
#include <atomlight/csv.hpp>
#include <atomlight/optimize.hpp>
#include <atomlight/version.hpp>

#include <json.hpp>

namespace atomlight {

struct RunConfig {
  // physical constants (SI)
  double lambda0_m = 121.567e-9;
  double gamma0_rad_per_s = 2 * pi * 100.0e6;
  double a0_m = 52.9177210903e-12;

  // single-geometry commands (spectrum2d, band3d, chi)
  double d_over_lambda0 = 0.1;
  double aspect = 2.5;
  int points = 400;
  double window = 3.0;       // detuning half-width, Gamma(0) units
  double gamma_prime = 0.0;  // extra dephasing, gamma0 units

  // d sweep (figure6a, figure6b)
  double d_min_a0 = 6.0;
  double d_max_a0 = 360.0;
  int d_points = 48;
  int delta_points = 512;
  double delta_window = 2.0;
  double gap_guard = 1e-3;
  double refine_tol = 1e-6;
  double match_tol = 5e-3;
  std::vector<double> gamma_primes{0.0};
  std::vector<double> targets{10.0, 14.0, 20.0, 25.0, 30.0};

  // susceptibility supply
  double chi_reference_d = 0.01;
  std::vector<double> chi_anchors{1.0 / 200, 1.0 / 141, 1.0 / 100, 1.0 / 60};
  double chi_window = 2.2;
  double chi_fine_lo = -0.7;
  double chi_fine_hi = 0.3;
  double chi_fine_step = 0.025;
  double chi_coarse_step = 0.1;
  double chi_tol = 1e-7;
  long site_budget = 100000;
  std::string chi_model_in;   // reuse a serialized model instead of solving
  std::string chi_model_out;  // save the built model here

  // electronic-structure input ("" selects the built-in asymptotic table)
  std::string hopping_table;

  // run control
  std::string output_dir = ".";
  int threads = 1;
  bool smoke = false;  // reduced grids for quick turnarounds

  void validate() const {
    std::vector<std::string> bad;
    auto req = [&](bool ok, const std::string& msg) {
      if (!ok) bad.push_back(msg);
    };
    req(lambda0_m > 0, "lambda0_m must be > 0");
    req(gamma0_rad_per_s > 0, "gamma0_rad_per_s must be > 0");
    req(a0_m > 0, "a0_m must be > 0");
    req(d_over_lambda0 > 0 && d_over_lambda0 < 1,
        "d_over_lambda0 must lie in (0, 1)");
    req(aspect > 0, "aspect must be > 0");
    req(points >= 2, "points must be >= 2");
    req(window > 0, "window must be > 0");
    req(gamma_prime >= 0, "gamma_prime must be >= 0");
    req(d_min_a0 > 0 && d_max_a0 > d_min_a0,
        "need 0 < d_min_a0 < d_max_a0");
    req(d_points >= 1, "d_points must be >= 1");
    req(delta_points >= 9, "delta_points must be >= 9");
    req(delta_window > 0, "delta_window must be > 0");
    req(gap_guard >= 0 && gap_guard < 0.5 * delta_window,
        "gap_guard must lie in [0, delta_window/2)");
    req(refine_tol > 0, "refine_tol must be > 0");
    req(match_tol > 0, "match_tol must be > 0");
    req(!gamma_primes.empty(), "gamma_primes must be non-empty");
    for (double g : gamma_primes)
      req(g >= 0, "gamma_primes entries must be >= 0");
    for (double t : targets) req(t > 0, "targets entries must be > 0");
    req(chi_reference_d > 0 && chi_reference_d < 1,
        "chi_reference_d must lie in (0, 1)");
    req(!chi_anchors.empty(), "chi_anchors must be non-empty");
    for (double a : chi_anchors)
      req(a > 0 && a < 1, "chi_anchors entries must lie in (0, 1)");
    req(chi_window > 0, "chi_window must be > 0");
    req(chi_fine_lo < 0 && chi_fine_hi > 0 && chi_fine_lo >= -chi_window &&
            chi_fine_hi <= chi_window,
        "chi fine band must straddle 0 inside chi_window");
    req(chi_fine_step > 0 && chi_coarse_step > 0,
        "chi grid steps must be > 0");
    req(chi_tol > 0, "chi_tol must be > 0");
    req(site_budget >= 9, "site_budget must be >= 9");
    req(threads >= 1, "threads must be >= 1");
    if (!bad.empty()) {
      std::ostringstream os;
      os << "invalid configuration (" << bad.size() << " problem"
         << (bad.size() > 1 ? "s" : "") << "):";
      for (const auto& m : bad) os << "\n  - " << m;
      throw ConfigError(os.str());
    }
  }

  PhysicalConstants constants() const {
    PhysicalConstants c;
    c.lambda0 = lambda0_m;
    c.gamma0 = gamma0_rad_per_s;
    c.a0 = a0_m;
    return c;
  }

  SweepConfig sweep() const {
    SweepConfig s;
    s.d_min_a0 = d_min_a0;
    s.d_max_a0 = d_max_a0;
    s.d_points = smoke ? std::min(d_points, 6) : d_points;
    s.delta_points = smoke ? std::min(delta_points, 128) : delta_points;
    s.delta_window = delta_window;
    s.gap_guard = gap_guard;
    s.refine_tol = refine_tol;
    s.match_tol = match_tol;
    s.gamma_primes = gamma_primes;
    s.target_n_re = targets;
    return s;
  }

  ChiModelOptions chi_options() const {
    ChiModelOptions o;
    o.reference_d_lambda0 = chi_reference_d;
    o.anchor_d_lambda0 = chi_anchors;
    o.window = chi_window;
    o.fine_lo = chi_fine_lo;
    o.fine_hi = chi_fine_hi;
    o.fine_step = chi_fine_step;
    o.coarse_step = chi_coarse_step;
    o.aspect = aspect;
    o.solver_tol = chi_tol;
    o.site_budget = site_budget;
    return o;
  }

  // canonical key = value rendering (sorted, full precision): the basis of
  // the reproducibility hash
  std::string canonical_text() const {
    auto num = [](double v) { return csv_number(v); };
    auto list = [&](const std::vector<double>& v) {
      std::string s = "[";
      for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) s += ", ";
        s += num(v[i]);
      }
      return s + "]";
    };
    std::ostringstream os;
    os << "a0_m = " << num(a0_m) << "\n"
       << "aspect = " << num(aspect) << "\n"
       << "chi_anchors = " << list(chi_anchors) << "\n"
       << "chi_coarse_step = " << num(chi_coarse_step) << "\n"
       << "chi_fine_hi = " << num(chi_fine_hi) << "\n"
       << "chi_fine_lo = " << num(chi_fine_lo) << "\n"
       << "chi_fine_step = " << num(chi_fine_step) << "\n"
       << "chi_model_in = \"" << chi_model_in << "\"\n"
       << "chi_model_out = \"" << chi_model_out << "\"\n"
       << "chi_reference_d = " << num(chi_reference_d) << "\n"
       << "chi_tol = " << num(chi_tol) << "\n"
       << "chi_window = " << num(chi_window) << "\n"
       << "d_max_a0 = " << num(d_max_a0) << "\n"
       << "d_min_a0 = " << num(d_min_a0) << "\n"
       << "d_over_lambda0 = " << num(d_over_lambda0) << "\n"
       << "d_points = " << d_points << "\n"
       << "delta_points = " << delta_points << "\n"
       << "delta_window = " << num(delta_window) << "\n"
       << "gamma0_rad_per_s = " << num(gamma0_rad_per_s) << "\n"
       << "gamma_prime = " << num(gamma_prime) << "\n"
       << "gamma_primes = " << list(gamma_primes) << "\n"
       << "gap_guard = " << num(gap_guard) << "\n"
       << "hopping_table = \"" << hopping_table << "\"\n"
       << "lambda0_m = " << num(lambda0_m) << "\n"
       << "match_tol = " << num(match_tol) << "\n"
       << "output_dir = \"" << output_dir << "\"\n"
       << "points = " << points << "\n"
       << "refine_tol = " << num(refine_tol) << "\n"
       << "site_budget = " << site_budget << "\n"
       << "smoke = " << (smoke ? "true" : "false") << "\n"
       << "targets = " << list(targets) << "\n"
       << "threads = " << threads << "\n"
       << "window = " << num(window) << "\n";
    return os.str();
  }
};

// FNV-1a, the traditional 64-bit offset/prime pair
inline std::uint64_t fnv1a64(const std::string& data) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : data) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

inline std::string config_hash(const RunConfig& cfg) {
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(fnv1a64(cfg.canonical_text())));
  return buf;
}

// metadata sidecar: everything needed to re-run the artifact
inline nlohmann::json make_sidecar(const std::string& command,
                                   const RunConfig& cfg) {
  nlohmann::json j;
  j["schema_version"] = 1;
  j["library_version"] = version_string;
  j["command"] = command;
  j["config_hash"] = config_hash(cfg);
  j["config"] = cfg.canonical_text();
  return j;
}

}  // namespace atomlight
