#pragma once

// CLI11 wiring for RunConfig: every documented key becomes a long option of
// the same name, loadable from a flat TOML file via --config and overridable
// on the command line (command line > environment > file > default).

#include <string>

#include <atomlight/config.hpp>

#include <CLI11.hpp>

namespace atomlight {

inline void attach_config_options(CLI::App& app, RunConfig& cfg) {
  app.set_config("--config", "", "read options from a flat TOML file");
  app.allow_config_extras(false);

  auto* consts = app.add_option_group("constants", "physical constants (SI)");
  consts->add_option("--lambda0_m", cfg.lambda0_m, "transition wavelength, m")
      ->capture_default_str();
  consts
      ->add_option("--gamma0_rad_per_s", cfg.gamma0_rad_per_s,
                   "single-atom linewidth, rad/s")
      ->capture_default_str();
  consts->add_option("--a0_m", cfg.a0_m, "Bohr radius, m")
      ->capture_default_str();

  auto* geom = app.add_option_group("geometry", "single-spacing commands");
  geom->add_option("--d_over_lambda0", cfg.d_over_lambda0,
                   "in-plane lattice constant / lambda0")
      ->capture_default_str();
  geom->add_option("--aspect", cfg.aspect,
                   "interlayer ratio dz/d of the tetragonal lattice")
      ->capture_default_str();
  geom->add_option("--points", cfg.points, "detuning grid size")
      ->capture_default_str();
  geom->add_option("--window", cfg.window,
                   "detuning half-window, collective linewidths")
      ->capture_default_str();
  geom->add_option("--gamma_prime", cfg.gamma_prime,
                   "extra non-radiative linewidth, gamma0 units")
      ->capture_default_str();

  auto* sweep = app.add_option_group("sweep", "lattice-constant sweeps");
  sweep->add_option("--d_min_a0", cfg.d_min_a0, "smallest spacing, Bohr radii")
      ->capture_default_str();
  sweep->add_option("--d_max_a0", cfg.d_max_a0, "largest spacing, Bohr radii")
      ->capture_default_str();
  sweep->add_option("--d_points", cfg.d_points, "spacings per sweep")
      ->capture_default_str();
  sweep->add_option("--delta_points", cfg.delta_points,
                    "detunings scanned per spacing")
      ->capture_default_str();
  sweep->add_option("--delta_window", cfg.delta_window,
                    "detuning half-window, collective linewidths")
      ->capture_default_str();
  sweep->add_option("--gap_guard", cfg.gap_guard,
                    "stand-off from the band gap, collective linewidths")
      ->capture_default_str();
  sweep->add_option("--refine_tol", cfg.refine_tol,
                    "detuning refinement tolerance, collective linewidths")
      ->capture_default_str();
  sweep->add_option("--match_tol", cfg.match_tol,
                    "relative tolerance for hitting a target Re n")
      ->capture_default_str();
  sweep->add_option("--gamma_primes", cfg.gamma_primes,
                    "dephasing values for sweeps, gamma0 units")
      ->capture_default_str();
  sweep->add_option("--targets", cfg.targets,
                    "target Re n values for loss minimization")
      ->capture_default_str();

  auto* chi = app.add_option_group("chi", "ground-state susceptibility model");
  chi->add_option("--chi_reference_d", cfg.chi_reference_d,
                  "spacing of the reference lineshape scan, lambda0 units")
      ->capture_default_str();
  chi->add_option("--chi_anchors", cfg.chi_anchors,
                  "spacings of on-resonance amplitude anchors, lambda0 units")
      ->capture_default_str();
  chi->add_option("--chi_window", cfg.chi_window,
                  "lineshape half-window, collective linewidths")
      ->capture_default_str();
  chi->add_option("--chi_fine_lo", cfg.chi_fine_lo,
                  "fine-grid band start, collective linewidths")
      ->capture_default_str();
  chi->add_option("--chi_fine_hi", cfg.chi_fine_hi,
                  "fine-grid band end, collective linewidths")
      ->capture_default_str();
  chi->add_option("--chi_fine_step", cfg.chi_fine_step,
                  "fine grid step, collective linewidths")
      ->capture_default_str();
  chi->add_option("--chi_coarse_step", cfg.chi_coarse_step,
                  "coarse grid step, collective linewidths")
      ->capture_default_str();
  chi->add_option("--chi_tol", cfg.chi_tol, "linear-solver tolerance")
      ->capture_default_str();
  chi->add_option("--site_budget", cfg.site_budget,
                  "atom budget for finite-array solves")
      ->capture_default_str();
  chi->add_option("--chi_model_in", cfg.chi_model_in,
                  "load a serialized susceptibility model instead of solving");
  chi->add_option("--chi_model_out", cfg.chi_model_out,
                  "save the susceptibility model after building it");

  auto* run = app.add_option_group("run", "inputs and outputs");
  run->add_option("--hopping_table", cfg.hopping_table,
                  "CSV of molecular hopping rates (default: built-in table)");
  run->add_option("--output_dir", cfg.output_dir, "directory for artifacts")
      ->envname("ATOMLIGHT_OUTPUT_DIR")
      ->capture_default_str();
  run->add_option("--threads", cfg.threads, "worker threads for sweeps")
      ->capture_default_str();
  run->add_flag("--smoke", cfg.smoke, "reduced grids for quick turnarounds");
}

}  // namespace atomlight
