// ensemble.hpp: classical Monte Carlo over thermal disorder (positions,
// velocities, Doppler shifts, time-of-flight spacing drift).
//
// Sample k draws from std::mt19937_64 seeded with seed_seq{seed_lo, seed_hi, k},
// so every sample is reproducible on its own and results do not depend on the
// number of worker threads. Reductions run in sample order.

#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "floqryd/drive/schedule.hpp"
#include "floqryd/lindblad/evolver.hpp"
#include "floqryd/model/system.hpp"
#include "floqryd/observables/observables.hpp"

namespace floqryd::disorder {

struct DisorderSample {
  std::vector<model::Vec3> positions;   // µm
  std::vector<model::Vec3> velocities;  // µm/µs
  std::vector<double> doppler_shifts;   // rad/µs, k_eff·v_x
};

/// Independent generator for sample `index` of a run seeded with `seed`.
std::mt19937_64 substream(std::uint64_t seed, std::uint64_t index);

DisorderSample draw_sample(const model::ThermalEnsemble& ensemble, const model::AtomArray& array, double k_eff,
                           std::mt19937_64& rng);
DisorderSample draw_sample(const model::ThermalEnsemble& ensemble, const model::AtomArray& array, double k_eff,
                           std::uint64_t seed, std::uint64_t index);

/// |(x_i + v_i t) − (x_j + v_j t)|. Throws SameAtom, IndexOutOfRange.
double time_of_flight_distance(const DisorderSample& sample, std::size_t i, std::size_t j, double t);

struct EnsembleSpec {
  model::SystemConfig config;
  drive::DriveSchedule schedule;
  std::optional<drive::RamModel> ram;
  std::vector<double> sample_times;
  std::size_t n_samples = 2;
  std::uint64_t seed = 0;
  /// Freeze V_ij at the sampled t = 0 spacing even when atoms are released.
  bool static_interaction = false;
  /// Fold the per-atom SPAM channel into the reported populations.
  bool spam_forward = false;
  std::size_t threads = 1;
  lindblad::EvolveOptions evolve;
  /// Starting state; |g…g> when empty.
  std::optional<lindblad::DensityMatrix> initial;
};

struct EnsembleStats {
  std::vector<double> times;
  std::vector<std::string> labels;        // population labels, then "fidelity_w"
  std::vector<std::vector<double>> mean;  // [time][label]
  std::vector<std::vector<double>> stdev; // sample standard deviation (n − 1)
  std::size_t sample_count = 0;
  std::uint64_t seed = 0;

  /// Per-sample maximum over time of <W|ρ|W>, its mean and standard deviation.
  std::vector<double> fmax_samples;
  double fmax_mean = 0.0;
  double fmax_std = 0.0;
  /// <W|ρ̄(t)|W> of the ensemble-mean density matrix (equal to the mean
  /// per-time fidelity because the reference is shared).
  std::vector<double> mean_state_fidelity;

  std::size_t label_index(const std::string& label) const;
  std::vector<double> mean_series(const std::string& label) const;
  std::vector<double> std_series(const std::string& label) const;
};

/// One Lindblad evolution per sample from `initial` (default |g…g>). Numerical failures are
/// rethrown with the failing sample index in the message.
EnsembleStats run_ensemble(const EnsembleSpec& spec);

/// Builder for one disorder realization (exposed for single-shot runs).
hamiltonian::HamiltonianBuilder sample_hamiltonian(const EnsembleSpec& spec, const DisorderSample& sample);

/// Number of worker threads: explicit value, else FLOQRYD_THREADS, else 1.
std::size_t resolve_threads(std::optional<std::size_t> requested);

/// Runs task(i) for i in [0, count) on `threads` workers; the first exception
/// (lowest index) is rethrown after all workers finish.
void parallel_for(std::size_t count, std::size_t threads, const std::function<void(std::size_t)>& task);

}  // namespace floqryd::disorder
