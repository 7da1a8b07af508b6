#include "floqryd/disorder/ensemble.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>

#include "floqryd/error.hpp"

namespace floqryd::disorder {

std::mt19937_64 substream(std::uint64_t seed, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
  return std::mt19937_64(seq);
}

DisorderSample draw_sample(const model::ThermalEnsemble& ensemble, const model::AtomArray& array, double k_eff,
                           std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  DisorderSample s;
  const double sx[3] = {ensemble.sigma_radial, ensemble.sigma_radial, ensemble.sigma_axial};
  const double sv[3] = {ensemble.velocity_sigma_radial, ensemble.velocity_sigma_radial, ensemble.velocity_sigma_axial};
  for (const auto& nominal : array.positions) {
    model::Vec3 x{}, v{};
    for (int k = 0; k < 3; ++k) x[k] = nominal[k] + sx[k] * normal(rng);
    for (int k = 0; k < 3; ++k) v[k] = sv[k] * normal(rng);
    s.positions.push_back(x);
    s.velocities.push_back(v);
    s.doppler_shifts.push_back(k_eff * v[0]);
  }
  return s;
}

DisorderSample draw_sample(const model::ThermalEnsemble& ensemble, const model::AtomArray& array, double k_eff,
                           std::uint64_t seed, std::uint64_t index) {
  auto rng = substream(seed, index);
  return draw_sample(ensemble, array, k_eff, rng);
}

double time_of_flight_distance(const DisorderSample& sample, std::size_t i, std::size_t j, double t) {
  const std::size_t n = sample.positions.size();
  if (i >= n || j >= n) throw Error(ErrorCode::IndexOutOfRange, "atom index out of range");
  if (i == j) throw Error(ErrorCode::SameAtom, "distance of an atom to itself");
  double r2 = 0.0;
  for (int k = 0; k < 3; ++k) {
    const double d = (sample.positions[i][k] + sample.velocities[i][k] * t) -
                     (sample.positions[j][k] + sample.velocities[j][k] * t);
    r2 += d * d;
  }
  return std::sqrt(r2);
}

std::size_t EnsembleStats::label_index(const std::string& label) const {
  const auto it = std::find(labels.begin(), labels.end(), label);
  if (it == labels.end()) throw Error(ErrorCode::InvalidConfig, "unknown label '" + label + "'");
  return static_cast<std::size_t>(std::distance(labels.begin(), it));
}

std::vector<double> EnsembleStats::mean_series(const std::string& label) const {
  const std::size_t k = label_index(label);
  std::vector<double> out;
  for (const auto& row : mean) out.push_back(row[k]);
  return out;
}

std::vector<double> EnsembleStats::std_series(const std::string& label) const {
  const std::size_t k = label_index(label);
  std::vector<double> out;
  for (const auto& row : stdev) out.push_back(row[k]);
  return out;
}

hamiltonian::HamiltonianBuilder sample_hamiltonian(const EnsembleSpec& spec, const DisorderSample& sample) {
  model::AtomArray array{sample.positions, spec.config.array.c6};
  hamiltonian::HamiltonianBuilder h(array, spec.config.lasers, spec.schedule);
  h.with_doppler(sample.doppler_shifts);
  if (spec.config.thermal.released && !spec.static_interaction) h.with_velocities(sample.velocities);
  if (spec.ram) h.with_ram(*spec.ram);
  return h;
}

std::size_t resolve_threads(std::optional<std::size_t> requested) {
  if (requested && *requested > 0) return *requested;
  if (const char* env = std::getenv("FLOQRYD_THREADS")) {
    char* end = nullptr;
    const unsigned long v = std::strtoul(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<std::size_t>(v);
  }
  return 1;
}

void parallel_for(std::size_t count, std::size_t threads, const std::function<void(std::size_t)>& task) {
  threads = std::clamp<std::size_t>(threads, 1, std::max<std::size_t>(count, 1));
  std::vector<std::exception_ptr> errors(count);
  std::atomic<std::size_t> next{0};
  const auto worker = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        task(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

EnsembleStats run_ensemble(const EnsembleSpec& spec) {
  if (spec.n_samples < 2) throw Error(ErrorCode::InvalidConfig, "an ensemble needs at least 2 samples");
  if (spec.sample_times.empty()) throw Error(ErrorCode::InvalidConfig, "no sample times");
  const std::size_t n_atoms = spec.config.array.size();
  const std::size_t dim = std::size_t{1} << n_atoms;
  const auto dissipators = lindblad::build_dissipators(spec.config, n_atoms);
  const auto reference = observables::WReference::symmetric(n_atoms).state();
  const std::size_t n_times = spec.sample_times.size();
  const std::pair<double, double> span{0.0, spec.sample_times.back()};
  const lindblad::DensityMatrix rho0 = spec.initial ? *spec.initial : lindblad::DensityMatrix::ground(n_atoms);
  if (rho0.dim() != dim) throw Error(ErrorCode::DimensionMismatch, "initial state dimension");

  EnsembleStats out;
  out.times = spec.sample_times;
  out.seed = spec.seed;
  out.sample_count = spec.n_samples;
  for (const auto& [label, value] : observables::populations(std::vector<double>(dim, 1.0 / dim), n_atoms))
    out.labels.push_back(label);
  out.labels.push_back("fidelity_w");
  const std::size_t n_labels = out.labels.size();

  // values[sample][time * n_labels + label]
  std::vector<std::vector<double>> values(spec.n_samples);
  lindblad::EvolveOptions options = spec.evolve;
  options.keep_snapshots = true;

  parallel_for(spec.n_samples, spec.threads, [&](std::size_t k) {
    try {
      const DisorderSample sample = draw_sample(spec.config.thermal, spec.config.array,
                                                spec.config.lasers.effective_wavevector, spec.seed, k);
      const auto h = sample_hamiltonian(spec, sample);
      const auto traj = lindblad::evolve(h, dissipators, rho0, span,
                                         spec.sample_times, options);
      std::vector<double>& row = values[k];
      row.resize(n_times * n_labels);
      for (std::size_t t = 0; t < n_times; ++t) {
        std::vector<double> p = traj.populations[t];
        if (spec.spam_forward) p = observables::apply_spam(p, n_atoms, spec.config.spam);
        std::size_t l = 0;
        for (const auto& [label, value] : observables::populations(p, n_atoms)) row[t * n_labels + l++] = value;
        row[t * n_labels + l] = observables::w_fidelity(traj.snapshots[t].matrix(), reference);
      }
    } catch (const Error& e) {
      throw Error(e.code(), "sample " + std::to_string(k) + ": " + e.what());
    }
  });

  out.mean.assign(n_times, std::vector<double>(n_labels, 0.0));
  out.stdev.assign(n_times, std::vector<double>(n_labels, 0.0));
  const double n = static_cast<double>(spec.n_samples);
  for (std::size_t t = 0; t < n_times; ++t) {
    for (std::size_t l = 0; l < n_labels; ++l) {
      double sum = 0.0;
      for (const auto& row : values) sum += row[t * n_labels + l];
      const double mean = sum / n;
      double ss = 0.0;
      for (const auto& row : values) {
        const double d = row[t * n_labels + l] - mean;
        ss += d * d;
      }
      out.mean[t][l] = mean;
      out.stdev[t][l] = std::sqrt(ss / (n - 1.0));
    }
  }

  const std::size_t f = n_labels - 1;
  for (const auto& row : values) {
    double best = 0.0;
    for (std::size_t t = 0; t < n_times; ++t) best = std::max(best, row[t * n_labels + f]);
    out.fmax_samples.push_back(best);
  }
  double sum = 0.0;
  for (double v : out.fmax_samples) sum += v;
  out.fmax_mean = sum / n;
  double ss = 0.0;
  for (double v : out.fmax_samples) ss += (v - out.fmax_mean) * (v - out.fmax_mean);
  out.fmax_std = std::sqrt(ss / (n - 1.0));
  for (std::size_t t = 0; t < n_times; ++t) out.mean_state_fidelity.push_back(out.mean[t][f]);
  return out;
}

}  // namespace floqryd::disorder
