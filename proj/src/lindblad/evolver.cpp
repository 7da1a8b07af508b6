#include "floqryd/lindblad/evolver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>

#include "floqryd/error.hpp"

namespace floqryd::lindblad {

namespace {

using core::ComplexMatrix;
using core::cplx;

Mat to_eigen(const ComplexMatrix& m) {
  Mat out(static_cast<long>(m.rows()), static_cast<long>(m.cols()));
  for (std::size_t r = 0; r < m.rows(); ++r)
    for (std::size_t c = 0; c < m.cols(); ++c) out(static_cast<long>(r), static_cast<long>(c)) = m(r, c);
  return out;
}

ComplexMatrix from_eigen(const Mat& m) {
  ComplexMatrix out(static_cast<std::size_t>(m.rows()), static_cast<std::size_t>(m.cols()));
  for (long r = 0; r < m.rows(); ++r)
    for (long c = 0; c < m.cols(); ++c) out(static_cast<std::size_t>(r), static_cast<std::size_t>(c)) = m(r, c);
  return out;
}

double min_eig(const Mat& m) {
  const Mat herm = 0.5 * (m + m.adjoint());
  Eigen::SelfAdjointEigenSolver<Mat> solver(herm, Eigen::EigenvaluesOnly);
  return solver.eigenvalues().minCoeff();
}

void check_matrix(const Mat& m, double trace_tol, ErrorCode trace_code) {
  if (!m.allFinite()) throw Error(ErrorCode::NotHermitian, "density matrix has non-finite entries");
  const double herm = (m - m.adjoint()).cwiseAbs().maxCoeff();
  if (herm > kHermitianTol) throw Error(ErrorCode::NotHermitian, "Hermiticity defect " + std::to_string(herm));
  const double tr = m.trace().real();
  if (std::abs(tr - 1.0) > trace_tol) throw Error(trace_code, "trace " + std::to_string(tr));
  const double lo = min_eig(m);
  if (lo < -kPositivityTol) throw Error(ErrorCode::PositivityViolation, "minimum eigenvalue " + std::to_string(lo));
}

// Bit-flip partners of every basis state: H_{s, s^bit} = Ω/2.
struct FlipTable {
  std::size_t n = 0;
  std::size_t dim = 0;
  long partner[16][4] = {};
  explicit FlipTable(std::size_t atoms) : n(atoms), dim(std::size_t{1} << atoms) {
    for (std::size_t s = 0; s < dim; ++s)
      for (std::size_t i = 0; i < n; ++i) partner[s][i] = static_cast<long>(s ^ (std::size_t{1} << (n - 1 - i)));
  }
};

class LindbladRhs {
 public:
  LindbladRhs(const hamiltonian::HamiltonianBuilder& h, const DissipatorSet& d) : h_(h), flips_(h.atom_count()) {
    const long dim = static_cast<long>(h.dim());
    anti_ = Mat::Zero(dim, dim);
    for (const auto& op : d.collapse_ops) {
      if (op.max_abs() == 0.0) continue;
      const Mat l = to_eigen(op);
      anti_ += l.adjoint() * l;
      // Every channel here has at most one non-zero per column, so
      // (LρL†)_{f(s) f(s')} = c_s ρ_{ss'} c_{s'}^*.
      Monomial mono;
      bool is_monomial = true;
      for (long c = 0; c < dim && is_monomial; ++c) {
        mono.target[c] = -1;
        for (long r = 0; r < dim; ++r) {
          if (l(r, c) == cplx{}) continue;
          if (mono.target[c] >= 0) {
            is_monomial = false;
            break;
          }
          mono.target[c] = r;
          mono.coef[c] = l(r, c);
        }
      }
      if (is_monomial) {
        monomials_.push_back(mono);
      } else {
        jumps_.push_back(l);
        jumps_dag_.push_back(l.adjoint());
      }
    }
    anti_ *= cplx{0.0, -0.5};
    heff_.resize(dim, dim);
    m_.resize(dim, dim);
    tmp_.resize(dim, dim);
  }

  void set_segment(std::size_t segment) { segment_ = segment; }

  void operator()(double t, const Mat& rho, Mat& drho) {
    double diag[16];
    const double rabi = h_.fill(t, segment_, diag);
    heff_ = anti_;
    const cplx half_rabi{0.5 * rabi, 0.0};
    for (std::size_t s = 0; s < flips_.dim; ++s) {
      const long ls = static_cast<long>(s);
      heff_(ls, ls) += diag[s];
      for (std::size_t i = 0; i < flips_.n; ++i) heff_(ls, flips_.partner[s][i]) += half_rabi;
    }
    m_.noalias() = heff_ * rho;
    m_ *= cplx{0.0, -1.0};
    drho = m_ + m_.adjoint();
    const long dim = static_cast<long>(flips_.dim);
    for (const auto& mono : monomials_) {
      for (long c = 0; c < dim; ++c) {
        if (mono.target[c] < 0) continue;
        const cplx cc = std::conj(mono.coef[c]);
        for (long r = 0; r < dim; ++r) {
          if (mono.target[r] < 0) continue;
          drho(mono.target[r], mono.target[c]) += mono.coef[r] * rho(r, c) * cc;
        }
      }
    }
    for (std::size_t k = 0; k < jumps_.size(); ++k) {
      tmp_.noalias() = jumps_[k] * rho;
      drho.noalias() += tmp_ * jumps_dag_[k];
    }
  }

 private:
  const hamiltonian::HamiltonianBuilder& h_;
  FlipTable flips_;
  std::size_t segment_ = 0;
  Mat anti_;  // −(i/2) Σ L†L
  struct Monomial {
    long target[16];
    cplx coef[16];
  };
  std::vector<Monomial> monomials_;
  std::vector<Mat> jumps_;
  std::vector<Mat> jumps_dag_;
  Mat heff_, m_, tmp_;
};

class SchrodingerRhs {
 public:
  explicit SchrodingerRhs(const hamiltonian::HamiltonianBuilder& h) : h_(h), flips_(h.atom_count()) {}
  void set_segment(std::size_t segment) { segment_ = segment; }

  void operator()(double t, const Mat& u, Mat& du) {
    double diag[16];
    const double rabi = h_.fill(t, segment_, diag);
    const long dim = static_cast<long>(flips_.dim);
    for (long s = 0; s < dim; ++s) {
      for (long c = 0; c < u.cols(); ++c) {
        cplx acc = diag[s] * u(s, c);
        for (std::size_t i = 0; i < flips_.n; ++i) acc += 0.5 * rabi * u(flips_.partner[s][i], c);
        du(s, c) = cplx{acc.imag(), -acc.real()};  // −i·acc
      }
    }
  }

 private:
  const hamiltonian::HamiltonianBuilder& h_;
  FlipTable flips_;
  std::size_t segment_ = 0;
};

// Walks [t0, t1] segment by segment, stopping at every requested time.
template <class Rhs, class OnSample>
void integrate_schedule(Rhs& rhs, const drive::DriveSchedule& schedule, Mat& y, double t0, double t1,
                        const std::vector<double>& stops, const OdeOptions& opt, OdeStats& stats, OnSample&& on_sample) {
  double t = t0;
  double h = opt.initial_step;
  std::size_t next = 0;
  while (next < stops.size() && stops[next] <= t0) on_sample(next++, y);
  while (t < t1) {
    const std::size_t seg = schedule.segment_index(t);
    const double seg_end = seg + 1 < schedule.size() ? schedule.segment_start(seg + 1) : schedule.total_duration();
    double target = std::min(seg_end, t1);
    if (next < stops.size()) target = std::min(target, stops[next]);
    if (target <= t) {
      // Only possible at a zero-length remainder; step over it.
      target = std::min(t1, std::nextafter(t, std::numeric_limits<double>::infinity()));
    }
    rhs.set_segment(seg);
    dopri45(rhs, t, target, y, h, schedule.max_step(seg), opt, stats);
    t = target;
    while (next < stops.size() && stops[next] <= t) on_sample(next++, y);
  }
}

}  // namespace

void check_density(const ComplexMatrix& m, double trace_tol) {
  check_matrix(to_eigen(m), trace_tol, ErrorCode::NotNormalized);
}

DensityMatrix::DensityMatrix(ComplexMatrix m) : m_(std::move(m)) {
  if (m_.rows() != m_.cols()) throw Error(ErrorCode::DimensionMismatch, "density matrix must be square");
  check_density(m_);
}

DensityMatrix DensityMatrix::ground(std::size_t n_atoms) {
  const std::size_t dim = std::size_t{1} << n_atoms;
  ComplexMatrix m(dim, dim);
  m(0, 0) = 1.0;
  return DensityMatrix(std::move(m));
}

DensityMatrix DensityMatrix::pure(const core::StateVector& psi) {
  return DensityMatrix(psi.projector());
}

double DensityMatrix::purity() const { return (m_ * m_).trace().real(); }

DissipatorSet build_dissipators(const model::NoiseModel& noise, std::size_t n_atoms) {
  if (n_atoms < 1 || n_atoms > 3)
    throw Error(ErrorCode::UnsupportedAtomCount, "dissipators defined for 1 to 3 atoms, got " + std::to_string(n_atoms));
  namespace p = core::pauli;
  DissipatorSet out;
  const ComplexMatrix scatter = std::sqrt(noise.gamma1) * p::proj_g() + std::sqrt(noise.gamma2) * p::lower();
  const ComplexMatrix decay = std::sqrt(noise.gamma_r) * p::lower();
  for (std::size_t i = 0; i < n_atoms; ++i) {
    out.collapse_ops.push_back(core::embed(scatter, i, n_atoms));
    out.collapse_ops.push_back(core::embed(decay, i, n_atoms));
  }
  ComplexMatrix global = p::sigma_z();
  for (std::size_t i = 1; i < n_atoms; ++i) global = core::kron(global, p::sigma_z());
  out.collapse_ops.push_back(std::sqrt(0.5 * noise.gamma_l) * global);
  return out;
}

DissipatorSet build_dissipators(const model::SystemConfig& config, std::size_t n_atoms) {
  return build_dissipators(config.noise, n_atoms);
}

std::size_t TrajectoryResult::label_index(std::string_view label) const {
  const auto it = std::find(labels.begin(), labels.end(), label);
  if (it == labels.end()) throw Error(ErrorCode::InvalidConfig, "unknown basis label '" + std::string(label) + "'");
  return static_cast<std::size_t>(std::distance(labels.begin(), it));
}

std::vector<double> TrajectoryResult::series(std::string_view label) const {
  const std::size_t k = label_index(label);
  std::vector<double> out;
  out.reserve(populations.size());
  for (const auto& row : populations) out.push_back(row[k]);
  return out;
}

TrajectoryResult evolve(const hamiltonian::HamiltonianBuilder& h, const DissipatorSet& dissipators,
                        const DensityMatrix& rho0, std::pair<double, double> t_span,
                        const std::vector<double>& sample_times, const EvolveOptions& options) {
  const std::size_t dim = h.dim();
  if (rho0.dim() != dim) throw Error(ErrorCode::InvalidInitialState, "initial state dimension does not match H");
  try {
    check_density(rho0.matrix());
  } catch (const Error& e) {
    throw Error(ErrorCode::InvalidInitialState, e.what());
  }
  for (const auto& l : dissipators.collapse_ops)
    if (l.rows() != dim || l.cols() != dim) throw Error(ErrorCode::DimensionMismatch, "collapse operator dimension");
  const auto [t0, t1] = t_span;
  if (!(t1 >= t0) || t0 < 0.0 || t1 > h.schedule().total_duration() + 1e-12)
    throw Error(ErrorCode::TimeOutOfSchedule, "time span outside the drive schedule");
  for (std::size_t k = 0; k < sample_times.size(); ++k) {
    if (sample_times[k] < t0 - 1e-12 || sample_times[k] > t1 + 1e-12 || (k > 0 && sample_times[k] < sample_times[k - 1]))
      throw Error(ErrorCode::InvalidConfig, "sample times must be ascending and inside the span");
  }

  TrajectoryResult out;
  for (std::size_t s = 0; s < dim; ++s) out.labels.push_back(core::basis_label(s, h.atom_count()));
  out.times.reserve(sample_times.size());
  out.populations.reserve(sample_times.size());

  Mat y = to_eigen(rho0.matrix());
  LindbladRhs rhs(h, dissipators);
  const auto on_sample = [&](std::size_t k, const Mat& rho) {
    check_matrix(rho, kTraceTol, ErrorCode::TraceDrift);
    out.times.push_back(sample_times[k]);
    std::vector<double> pops(dim);
    for (std::size_t s = 0; s < dim; ++s) pops[s] = rho(static_cast<long>(s), static_cast<long>(s)).real();
    out.populations.push_back(std::move(pops));
    if (options.keep_snapshots) out.snapshots.emplace_back(from_eigen(rho));
  };
  integrate_schedule(rhs, h.schedule(), y, t0, t1, sample_times, options.ode, out.stats, on_sample);
  check_matrix(y, kTraceTol, ErrorCode::TraceDrift);
  return out;
}

double time_averaged_population(const TrajectoryResult& result, std::string_view label,
                                std::pair<double, double> window) {
  const auto& ts = result.times;
  const auto [a, b] = window;
  if (ts.size() < 2 || !(b > a) || a < ts.front() - 1e-12 || b > ts.back() + 1e-12)
    throw Error(ErrorCode::WindowOutOfRange, "averaging window outside the trajectory");
  const std::vector<double> ys = result.series(label);
  const auto value_at = [&](double t) {
    const auto it = std::upper_bound(ts.begin(), ts.end(), t);
    std::size_t i = static_cast<std::size_t>(std::distance(ts.begin(), it));
    if (i == 0) return ys.front();
    if (i >= ts.size()) return ys.back();
    const double w = (t - ts[i - 1]) / (ts[i] - ts[i - 1]);
    return ys[i - 1] + w * (ys[i] - ys[i - 1]);
  };
  double area = 0.0;
  double prev_t = a;
  double prev_y = value_at(a);
  for (std::size_t i = 0; i < ts.size(); ++i) {
    if (ts[i] <= a || ts[i] >= b) continue;
    area += 0.5 * (prev_y + ys[i]) * (ts[i] - prev_t);
    prev_t = ts[i];
    prev_y = ys[i];
  }
  area += 0.5 * (prev_y + value_at(b)) * (b - prev_t);
  return area / (b - a);
}

std::vector<double> linspace(double start, double stop, std::size_t count) {
  std::vector<double> out;
  if (count == 0) return out;
  if (count == 1) return {start};
  out.reserve(count);
  for (std::size_t k = 0; k < count; ++k)
    out.push_back(k + 1 == count ? stop : start + (stop - start) * static_cast<double>(k) / static_cast<double>(count - 1));
  return out;
}

ComplexMatrix propagate_unitary(const hamiltonian::HamiltonianBuilder& h, double t0, double t1, const OdeOptions& options) {
  const long dim = static_cast<long>(h.dim());
  Mat u = Mat::Identity(dim, dim);
  SchrodingerRhs rhs(h);
  OdeStats stats;
  integrate_schedule(rhs, h.schedule(), u, t0, t1, {}, options, stats, [](std::size_t, const Mat&) {});
  return from_eigen(u);
}

}  // namespace floqryd::lindblad
