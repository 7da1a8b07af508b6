#include "floqryd/observables/observables.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>
#include <numeric>

#include "floqryd/error.hpp"

namespace floqryd::observables {

WReference WReference::from_positions(const std::vector<model::Vec3>& positions, double k_eff) {
  WReference out;
  for (const auto& p : positions) out.phases.push_back(k_eff * p[0]);
  return out;
}

core::StateVector WReference::state() const {
  const std::size_t n = phases.size();
  if (n == 0) throw Error(ErrorCode::InvalidConfig, "W reference needs at least one atom");
  const std::size_t dim = std::size_t{1} << n;
  std::vector<core::cplx> amps(dim);
  const double norm = 1.0 / std::sqrt(static_cast<double>(n));
  for (std::size_t i = 0; i < n; ++i) amps[std::size_t{1} << (n - 1 - i)] = std::polar(norm, phases[i]);
  return core::StateVector(std::move(amps));
}

std::map<std::string, double> populations(const std::vector<double>& p, std::size_t n_atoms) {
  const std::size_t dim = std::size_t{1} << n_atoms;
  if (p.size() != dim) throw Error(ErrorCode::DimensionMismatch, "population vector size");
  std::map<std::string, double> out;
  for (std::size_t s = 0; s < dim; ++s) out[core::basis_label(s, n_atoms)] = p[s];
  if (n_atoms == 2) out["ge+eg"] = p[1] + p[2];
  if (n_atoms >= 3) {
    std::vector<double> pn(n_atoms + 1, 0.0);
    for (std::size_t s = 0; s < dim; ++s) pn[static_cast<std::size_t>(core::excitation_count(s))] += p[s];
    for (std::size_t k = 0; k <= n_atoms; ++k) out["P" + std::to_string(k)] = pn[k];
  }
  return out;
}

std::map<std::string, double> populations(const lindblad::DensityMatrix& rho) {
  const std::size_t dim = rho.dim();
  const std::size_t n = static_cast<std::size_t>(std::countr_zero(dim));
  std::vector<double> p(dim);
  for (std::size_t s = 0; s < dim; ++s) p[s] = rho.population(s);
  return populations(p, n);
}

double w_fidelity(const core::ComplexMatrix& rho, const core::StateVector& w) {
  if (rho.rows() != w.dim() || rho.cols() != w.dim()) throw Error(ErrorCode::DimensionMismatch, "W reference dimension");
  const std::vector<core::cplx> rw = rho * std::span<const core::cplx>(w.amplitudes());
  core::cplx f{};
  for (std::size_t s = 0; s < w.dim(); ++s) f += std::conj(w[s]) * rw[s];
  if (std::abs(f.imag()) > 1e-9) throw Error(ErrorCode::NotHermitian, "fidelity has an imaginary part");
  return std::clamp(f.real(), 0.0, 1.0);
}

double w_fidelity(const lindblad::DensityMatrix& rho, const WReference& reference) {
  return w_fidelity(rho.matrix(), reference.state());
}

SpamChannel spam_channel(const model::SpamModel& spam) {
  spam.validate();
  const double e = spam.false_positive, ep = spam.false_negative, eta = spam.pumping_error;
  SpamChannel m{};
  m[0][0] = eta * (1 - e) + (1 - eta) * (1 - e);
  m[0][1] = eta * (1 - e) + (1 - eta) * (1 - e) * ep;
  m[1][0] = eta * e + (1 - eta) * e;
  m[1][1] = eta * e + (1 - eta) * (1 - ep + e * ep);
  return m;
}

std::array<double, 2> apply_spam(double true_g, double true_r, const model::SpamModel& spam) {
  if (std::abs(true_g + true_r - 1.0) > 1e-9 || true_g < -1e-12 || true_r < -1e-12)
    throw Error(ErrorCode::NotNormalized, "true populations must sum to 1");
  const SpamChannel m = spam_channel(spam);
  return {m[0][0] * true_g + m[0][1] * true_r, m[1][0] * true_g + m[1][1] * true_r};
}

std::vector<double> apply_spam(const std::vector<double>& p, std::size_t n_atoms, const model::SpamModel& spam) {
  const std::size_t dim = std::size_t{1} << n_atoms;
  if (p.size() != dim) throw Error(ErrorCode::DimensionMismatch, "population vector size");
  // Joint vectors come from integrated density matrices: trace tolerance.
  if (std::abs(std::accumulate(p.begin(), p.end(), 0.0) - 1.0) > lindblad::kTraceTol)
    throw Error(ErrorCode::NotNormalized, "true populations must sum to 1");
  const SpamChannel m = spam_channel(spam);
  std::vector<double> out(dim, 0.0);
  for (std::size_t d = 0; d < dim; ++d) {
    for (std::size_t s = 0; s < dim; ++s) {
      double w = 1.0;
      for (std::size_t i = 0; i < n_atoms; ++i) {
        const std::size_t bit = n_atoms - 1 - i;
        w *= m[(d >> bit) & 1U][(s >> bit) & 1U];
      }
      out[d] += w * p[s];
    }
  }
  return out;
}

double gate_error_bound(double v, double tau_us) {
  if (!(v > 0.0) || !(tau_us > 0.0)) throw Error(ErrorCode::InvalidConfig, "V and tau must be positive");
  const double prefactor = 3.0 * std::pow(7.0 * std::numbers::pi, 2.0 / 3.0) / 8.0;
  return prefactor * std::pow(v * tau_us, -2.0 / 3.0);
}

}  // namespace floqryd::observables
