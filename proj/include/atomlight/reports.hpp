#pragma once

// CSV renderings of computed datasets.  Every emitter here is deterministic:
// same inputs, byte-identical text.

#include <string>
#include <vector>

#include <atomlight/csv.hpp>
#include <atomlight/optimize.hpp>

namespace atomlight {

// optimizer sweep records (one row per (gamma_prime, spacing) pair)
inline CsvTable sweep_records_table(const std::vector<OptimumRecord>& recs) {
  CsvTable t({"d_over_a0", "dz_over_a0", "gamma_prime", "target_n_re",
              "delta_over_gamma0", "delta_tilde", "re_n", "im_n", "re_sigma_t",
              "im_sigma_t", "re_sigma_hd", "im_sigma_hd", "omega0_gamma0",
              "gamma_collective_gamma0", "valid"});
  for (const auto& r : recs)
    t.add_row({r.d_over_a0, r.dz_over_a0, r.gamma_prime, r.target_n_re,
               r.delta, r.delta_tilde, r.n.real(), r.n.imag(),
               r.sigma_t.real(), r.sigma_t.imag(), r.sigma_hd.real(),
               r.sigma_hd.imag(), r.omega0, r.gamma_collective,
               r.valid ? 1.0 : 0.0});
  return t;
}

// loss-minimization records plus the analytic loss model per target
inline CsvTable loss_report_table(const std::vector<LossScalingReport>& reps) {
  CsvTable t({"gamma_prime", "target_n_re", "d_over_a0", "n_im_opt",
              "n_im_model", "rel_dev", "d_qc_a0", "d_qc_measured"});
  for (const auto& rep : reps)
    for (const auto& p : rep.points)
      t.add_row({rep.gamma_prime, p.target_n_re, p.d_over_a0, p.n_im_opt,
                 p.n_im_model, p.rel_dev, rep.d_qc_a0,
                 rep.d_qc_measured ? 1.0 : 0.0});
  return t;
}

}  // namespace atomlight
