#include "nsesync/intertwine.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace nsesync {
namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

using Matrix2 = std::array<std::array<double, 2>, 2>;

const double kSqrt2 = std::sqrt(2.0);
const double kSqrt3 = std::sqrt(3.0);
const double kSqrt27 = std::sqrt(27.0);

// Applies a per-mode linear combination inside |k| <= cutoff; zero outside.
template <class Combine>
std::pair<SpectralField, SpectralField> low_mode_pair(const SpectralField& a, const SpectralField& b, double cutoff,
                                                      Combine combine) {
  const SpectralGrid& grid = a.grid();
  if (!(b.grid() == grid)) throw std::invalid_argument("coupled fields live on different grids");
  const int n = grid.resolution();
  const double c2 = cutoff * cutoff;
  std::vector<Complex> first(grid.size());
  std::vector<Complex> second(grid.size());
  const auto x = a.coeffs();
  const auto y = b.coeffs();
  for (int i = 0; i < n; ++i) {
    const int kx = grid.wavenumber(i);
    for (int j = 0; j < n; ++j) {
      const int ky = grid.wavenumber(j);
      if (!(double(kx * kx + ky * ky) <= c2)) continue;
      const std::size_t f = grid.flat(i, j);
      std::tie(first[f], second[f]) = combine(x[f], y[f]);
    }
  }
  return {SpectralField(grid, std::move(first)), SpectralField(grid, std::move(second))};
}

NonlinearTerms nonlinear_terms(const StreamFunction& first, const StreamFunction& second,
                               const NonlinearTerms* precomputed) {
  if (precomputed != nullptr) return *precomputed;
  return {nse_nonlinear_term(first), nse_nonlinear_term(second)};
}

void require_finite(double x, const char* what) {
  if (!std::isfinite(x)) throw std::invalid_argument(std::string(what) + " must be finite");
}

void require_nonnegative(double x, const char* what) {
  if (!(x >= 0.0) || !std::isfinite(x)) throw std::invalid_argument(std::string(what) + " must be a finite nonnegative number");
}

}  // namespace

std::string variant_name(const CouplingVariant& variant) {
  return std::visit(overloaded{
                        [](const coupling::Trivial&) { return std::string("trivial"); },
                        [](const coupling::MutualSync&) { return std::string("mutual_sync"); },
                        [](const coupling::DegenerateSync&) { return std::string("degenerate_sync"); },
                        [](const coupling::GeneralSync&) { return std::string("general_sync"); },
                        [](const coupling::MutualNudge&) { return std::string("mutual_nudge"); },
                        [](const coupling::SymmetricNudge&) { return std::string("symmetric_nudge"); },
                        [](const coupling::GeneralNudge&) { return std::string("general_nudge"); },
                    },
                    variant);
}

void validate(const IntertwinementSpec& spec, const SpectralGrid& grid) {
  if (!(spec.cutoff > 0.0) || !std::isfinite(spec.cutoff)) throw std::invalid_argument("observation cutoff must be positive");
  if (spec.cutoff > grid.dealias_cutoff()) throw std::invalid_argument("observation cutoff exceeds resolved band");
  std::visit(overloaded{
                 [](const coupling::Trivial&) {},
                 [](const coupling::DegenerateSync&) {},
                 [](const coupling::MutualSync& s) {
                   if (!(s.theta1 >= 0.0 && s.theta1 <= 1.0)) throw std::invalid_argument("theta1 must lie in [0, 1]");
                 },
                 [](const coupling::GeneralSync& s) {
                   for (double t : {s.theta11, s.theta12, s.theta21, s.theta22}) require_finite(t, "sync weight");
                 },
                 [](const coupling::MutualNudge& s) {
                   require_nonnegative(s.mu1, "mu1");
                   require_nonnegative(s.mu2, "mu2");
                 },
                 [](const coupling::SymmetricNudge& s) {
                   require_nonnegative(s.mu2, "mu2");
                   require_finite(s.mu1, "mu1");
                   if (s.mu1 < s.mu2) throw std::invalid_argument("symmetric nudging requires mu1 >= mu2 >= 0");
                 },
                 [](const coupling::GeneralNudge& s) {
                   for (const auto& row : s.matrix)
                     for (double m : row) require_finite(m, "nudging matrix entry");
                 },
             },
             spec.variant);
}

std::optional<Matrix2> nudging_matrix(const CouplingVariant& variant) {
  return std::visit(overloaded{
                        [](const coupling::MutualNudge& s) -> std::optional<Matrix2> {
                          return Matrix2{{{s.mu1, -s.mu1}, {-s.mu2, s.mu2}}};
                        },
                        [](const coupling::SymmetricNudge& s) -> std::optional<Matrix2> {
                          return IntertwiningMatrix{s.mu1, s.mu2}.entries();
                        },
                        [](const coupling::GeneralNudge& s) -> std::optional<Matrix2> { return s.matrix; },
                        [](const auto&) -> std::optional<Matrix2> { return std::nullopt; },
                    },
                    variant);
}

CouplingTerms coupling_terms(const IntertwinementSpec& spec, const StreamFunction& first,
                             const StreamFunction& second, const NonlinearTerms* precomputed) {
  const SpectralGrid& grid = first.grid();
  if (!(second.grid() == grid)) throw std::invalid_argument("coupled fields live on different grids");
  if (spec.cutoff > grid.dealias_cutoff()) throw std::invalid_argument("observation cutoff exceeds resolved band");
  const double cutoff = spec.cutoff;

  if (auto m = nudging_matrix(spec.variant)) {
    // C = -M P_N V, written as (-m_i1) a + (-m_i2) b so every nudge variant
    // shares one evaluation path.
    const double a11 = -(*m)[0][0], a12 = -(*m)[0][1], a21 = -(*m)[1][0], a22 = -(*m)[1][1];
    auto [c1, c2] = low_mode_pair(first.psi, second.psi, cutoff, [=](Complex a, Complex b) {
      return std::pair{a11 * a + a12 * b, a21 * a + a22 * b};
    });
    return {std::move(c1), std::move(c2)};
  }

  return std::visit(
      overloaded{
          [&](const coupling::Trivial&) { return CouplingTerms{SpectralField(grid), SpectralField(grid)}; },
          [&](const coupling::MutualSync& s) {
            const NonlinearTerms b = nonlinear_terms(first, second, precomputed);
            const double t1 = s.theta1, t2 = s.theta2();
            auto [c1, c2] = low_mode_pair(b.first, b.second, cutoff, [=](Complex b1, Complex b2) {
              return std::pair{t1 * (b1 - b2), t2 * (b2 - b1)};
            });
            return CouplingTerms{std::move(c1), std::move(c2)};
          },
          [&](const coupling::DegenerateSync&) {
            const NonlinearTerms b = nonlinear_terms(first, second, precomputed);
            auto [c1, c2] = low_mode_pair(b.first, b.second, cutoff,
                                          [](Complex b1, Complex b2) { return std::pair{b1, b2}; });
            return CouplingTerms{std::move(c1), std::move(c2)};
          },
          [&](const coupling::GeneralSync& s) {
            const NonlinearTerms b = nonlinear_terms(first, second, precomputed);
            auto [c1, c2] = low_mode_pair(b.first, b.second, cutoff, [&s](Complex b1, Complex b2) {
              return std::pair{s.theta11 * b1 - s.theta12 * b2, s.theta21 * b2 - s.theta22 * b1};
            });
            return CouplingTerms{std::move(c1), std::move(c2)};
          },
          [&](const auto&) -> CouplingTerms { throw std::logic_error("unhandled coupling variant"); },
      },
      spec.variant);
}

std::pair<double, double> eigenvalues(const IntertwiningMatrix& m) { return {m.mu1 - m.mu2, m.mu1 + m.mu2}; }

double GrashofBundle::g_lambda(double theta1) const {
  if (uniform) return *uniform;
  if (!force1_ || !force2_) throw std::logic_error("grashof bundle has no force fields");
  const double lambda1 = 1.0 - theta1;
  const double lambda2 = theta1;
  const SpectralField mix = lambda1 * force1_->potential + lambda2 * force2_->potential;
  return norm_hn(mix, 1) / (nu * nu);
}

GrashofBundle GrashofBundle::from_forces(const BodyForce& g1, const BodyForce& g2, double nu, double tilde_mu,
                                         double split) {
  if (!(nu > 0.0)) throw std::invalid_argument("viscosity must be positive");
  if (!(split >= 0.0 && split <= 1.0)) throw std::invalid_argument("force split must lie in [0, 1]");
  if (split > 0.0 && !(tilde_mu > 0.0)) throw std::invalid_argument("a nonzero force split needs tilde_mu > 0");
  GrashofBundle b;
  b.nu = nu;
  b.g1 = grashof(g1, nu);
  b.g2 = grashof(g2, nu);
  b.g = std::hypot(b.g1, b.g2);
  b.g_max = std::max(b.g1, b.g2);
  b.tilde_g1 = split > 0.0 ? split * b.g1 / tilde_mu : 0.0;
  b.tilde_g2 = split > 0.0 ? split * b.g2 / tilde_mu : 0.0;
  b.tilde_g = std::hypot(b.tilde_g1, b.tilde_g2);
  b.tilde_G = (1.0 - split) * b.g;
  b.force1_ = g1;
  b.force2_ = g2;
  return b;
}

GrashofBundle GrashofBundle::uniform_value(double value, double nu) {
  if (!(value >= 0.0)) throw std::invalid_argument("grashof override must be nonnegative");
  GrashofBundle b;
  b.nu = nu;
  b.g1 = b.g2 = b.g = b.g_max = value;
  b.tilde_G = value;
  b.uniform = value;
  return b;
}

double threshold_mutual_sync(double g_lambda, double lambda, const AnalysisConstants& c) {
  if (!(g_lambda >= 0.0)) throw std::invalid_argument("g_lambda must be nonnegative");
  if (!(lambda >= 0.0 && lambda <= 1.0)) throw std::invalid_argument("lambda must lie in [0, 1]");
  const double cl2 = c.ladyzhenskaya * c.ladyzhenskaya;
  if (lambda == 0.0 || lambda == 1.0) {
    return std::max(48.0 * kSqrt3 * cl2 * g_lambda * g_lambda, c.agmon / cl2);
  }
  return 15.0 * kSqrt27 * cl2 * g_lambda * g_lambda;
}

std::pair<double, double> degenerate_sync_residuals(double N, double g, const AnalysisConstants& c) {
  const double cl = c.ladyzhenskaya, cs = c.sobolev;
  const double first = std::max(9.0 * kSqrt3 / cl, 12.0 * kSqrt2 * cl) * g;
  const double second = 32.0 * kSqrt2 * cl * std::sqrt(24.0 * (cl * cl + cs * cs * std::log(N)) * g * g + 1.0) * g;
  return {N - first, N - second};
}

double threshold_degenerate_sync(double g, const AnalysisConstants& c) {
  if (!(g >= 0.0) || !std::isfinite(g)) throw std::invalid_argument("grashof number must be finite and nonnegative");
  auto bound = [&](double N) { return N - degenerate_sync_residuals(N, g, c).second; };
  const double floor = std::max(1.0, std::max(9.0 * kSqrt3 / c.ladyzhenskaya, 12.0 * kSqrt2 * c.ladyzhenskaya) * g);
  double N = floor;
  // Starting below the least admissible N, the iterates increase monotonically
  // toward it; the map is a contraction there (slope < 1/2).
  for (int it = 0; it < 10000; ++it) {
    const double next = std::max(floor, bound(N));
    if (next <= N) return N;
    if (next - N <= 1e-13 * next) {
      N = next;
      for (int bump = 0; bump < 200 && bound(N) > N; ++bump) N *= 1.0 + 1e-13;
      if (bound(N) <= N) return N;
      break;
    }
    N = next;
  }
  throw std::runtime_error("degenerate-sync threshold iteration did not converge");
}

MutualNudgeThresholds threshold_mutual_nudge(double mu1, double mu2, double g, double nu, const AnalysisConstants& c) {
  if (!(mu1 >= 0.0 && mu2 >= 0.0)) throw std::invalid_argument("nudging strengths must be nonnegative");
  if (!(g >= 0.0)) throw std::invalid_argument("grashof number must be nonnegative");
  const double lo = std::min(mu1, mu2);
  if (lo == 0.0) throw std::domain_error("assisted threshold undefined at degenerate ratio");
  const double root_ratio = std::sqrt(std::max(mu1, mu2) / lo);
  MutualNudgeThresholds t;
  t.assisted = 4.0 * kSqrt2 * c.ladyzhenskaya * root_ratio * g * g;
  t.unassisted = 3.0 * kSqrt2 / 2.0 * std::sqrt(c.ladyzhenskaya) * root_ratio * g;
  t.nu = nu;
  return t;
}

Interval SymmetricNudgeThresholds::relaxation_band_b(double N) const {
  const double nb = symmetric_nudge_cutoff_b(*this);
  return {0.25 * nb * nb * nu, 0.25 * N * N * nu};
}

bool SymmetricNudgeThresholds::assisted_ok_b(double N) const {
  return N >= symmetric_nudge_cutoff_b(*this) && mu_sum() <= 0.25 * N * N * nu;
}

double symmetric_nudge_cutoff_b(const SymmetricNudgeThresholds& t) {
  if (!t.cutoff_b) throw std::domain_error("strict gap mu1>mu2 required");
  return *t.cutoff_b;
}

SymmetricNudgeThresholds threshold_symmetric_nudge(double mu1, double mu2, const GrashofBundle& bundle, double nu,
                                                   const AnalysisConstants& c) {
  if (!(mu2 >= 0.0 && mu1 >= mu2)) throw std::invalid_argument("symmetric nudging requires mu1 >= mu2 >= 0");
  SymmetricNudgeThresholds t;
  t.mu1 = mu1;
  t.mu2 = mu2;
  t.nu = nu;
  t.cutoff_a = 4.0 * c.ladyzhenskaya * bundle.g;
  if (mu1 > mu2) {
    const double gap = mu1 - mu2;
    t.cutoff_b = 4.0 * c.ladyzhenskaya *
                 std::sqrt(nu / gap * bundle.tilde_G * bundle.tilde_G + bundle.tilde_g * bundle.tilde_g);
  }
  return t;
}

namespace {

void report_symmetric(ThresholdReport& r, double mu1, double mu2, double cutoff, const GrashofBundle& bundle,
                      const AnalysisConstants& c) {
  const auto t = threshold_symmetric_nudge(mu1, mu2, bundle, bundle.nu, c);
  const auto [l1, l2] = eigenvalues(IntertwiningMatrix{mu1, mu2});
  r.entries.push_back({"lambda1", l1});
  r.entries.push_back({"lambda2", l2});
  r.entries.push_back({"g", bundle.g});
  r.entries.push_back({"N_A", t.cutoff_a});
  const auto band_a = t.relaxation_band_a(cutoff);
  r.entries.push_back({"mu_band_A_lower", band_a.lower});
  r.entries.push_back({"mu_band_A_upper", band_a.upper});
  bool ok = cutoff >= t.cutoff_a && t.relaxation_ok_a(cutoff);
  if (t.cutoff_b) {
    const auto band_b = t.relaxation_band_b(cutoff);
    r.entries.push_back({"tilde_G", bundle.tilde_G});
    r.entries.push_back({"tilde_g", bundle.tilde_g});
    r.entries.push_back({"N_B", *t.cutoff_b});
    r.entries.push_back({"mu_band_B_lower", band_b.lower});
    r.entries.push_back({"mu_band_B_upper", band_b.upper});
    ok = ok || (cutoff >= *t.cutoff_b && t.relaxation_ok_b(cutoff));
  } else {
    r.notes.push_back("N_B unavailable: strict gap mu1>mu2 required");
  }
  r.entries.push_back({"mu_sum", t.mu_sum()});
  r.cutoff_satisfied = ok;
}

}  // namespace

ThresholdReport evaluate_thresholds(const IntertwinementSpec& spec, const GrashofBundle& bundle,
                                    const AnalysisConstants& c) {
  ThresholdReport r;
  const double cutoff = spec.cutoff;
  r.entries.push_back({"N", cutoff});
  std::visit(
      overloaded{
          [&](const coupling::Trivial&) {
            r.notes.push_back("trivial coupling: determining-modes regime, no explicit threshold evaluated");
          },
          [&](const coupling::MutualSync& s) {
            const double lambda = s.theta2();
            const double gl = bundle.g_lambda(s.theta1);
            const double n_star = threshold_mutual_sync(gl, lambda, c);
            r.entries.push_back({"g_lambda", gl});
            r.entries.push_back({"N_star", n_star});
            r.cutoff_satisfied = cutoff >= n_star;
          },
          [&](const coupling::DegenerateSync&) {
            const double n_star = threshold_degenerate_sync(bundle.g_max, c);
            r.entries.push_back({"g", bundle.g_max});
            r.entries.push_back({"N_star", n_star});
            r.cutoff_satisfied = cutoff >= n_star;
          },
          [&](const coupling::GeneralSync&) {
            r.notes.push_back("general synchronization weights: no well-posedness guarantee, no threshold");
          },
          [&](const coupling::MutualNudge& s) {
            if (std::min(s.mu1, s.mu2) == 0.0) {
              r.notes.push_back("degenerate ratio (one mu is zero): reporting symmetric-nudge thresholds with mu2 = 0");
              report_symmetric(r, std::max(s.mu1, s.mu2), 0.0, cutoff, bundle, c);
              return;
            }
            const auto t = threshold_mutual_nudge(s.mu1, s.mu2, bundle.g, bundle.nu, c);
            const auto band = t.relaxation_band(cutoff);
            r.entries.push_back({"g", bundle.g});
            r.entries.push_back({"N_assisted", t.assisted});
            r.entries.push_back({"N_unassisted", t.unassisted});
            r.entries.push_back({"mu_band_lower", band.lower});
            r.entries.push_back({"mu_band_upper", band.upper});
            r.entries.push_back({"mu_sum", s.mu1 + s.mu2});
            r.cutoff_satisfied = cutoff >= t.unassisted && band.contains(s.mu1 + s.mu2);
          },
          [&](const coupling::SymmetricNudge& s) { report_symmetric(r, s.mu1, s.mu2, cutoff, bundle, c); },
          [&](const coupling::GeneralNudge& s) {
            const auto& m = s.matrix;
            if (m[0][0] == m[1][1] && m[0][1] == m[1][0] && m[0][1] <= 0.0 && m[0][0] >= -m[0][1]) {
              report_symmetric(r, m[0][0], -m[0][1], cutoff, bundle, c);
            } else {
              r.notes.push_back("general nudging matrix outside the symmetric family: no threshold");
            }
          },
      },
      spec.variant);
  return r;
}

}  // namespace nsesync
