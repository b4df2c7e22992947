#pragma once

// Coupling layer for a pair of Navier-Stokes copies
//
//   d/dt v_1 + nu A v_1 + B(v_1, v_1) = g_1 + C_1(v_1, v_2)
//   d/dt v_2 + nu A v_2 + B(v_2, v_2) = g_2 + C_2(v_1, v_2)
//
// evaluated at the streamfunction level, together with closed-form
// frequency/relaxation thresholds under which the pair self-synchronizes.
//
// The analysis constants C_L, C_A, C_S (Ladyzhenskaya, Agmon, borderline
// Sobolev) have no known sharp values. They default to 1, so every threshold
// here is a scale estimate rather than a certified bound.

#include <array>
#include <cmath>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "nsesync/field_ops.hpp"
#include "nsesync/forcing.hpp"

namespace nsesync {

namespace coupling {

/// No coupling; the two copies evolve independently.
struct Trivial {
  friend bool operator==(const Trivial&, const Trivial&) = default;
};

/// C_1 = theta_1 P_N(B_1 - B_2), C_2 = theta_2 P_N(B_2 - B_1), theta_2 = 1 - theta_1.
struct MutualSync {
  double theta1 = 0.5;
  double theta2() const { return 1.0 - theta1; }
  friend bool operator==(const MutualSync&, const MutualSync&) = default;
};

/// C_j = P_N B_j: each copy drops its own low-mode advection.
struct DegenerateSync {
  friend bool operator==(const DegenerateSync&, const DegenerateSync&) = default;
};

/// C_1 = t11 P_N B_1 - t12 P_N B_2, C_2 = t21 P_N B_2 - t22 P_N B_1.
/// No well-posedness theory is known outside the mutual and degenerate cases.
struct GeneralSync {
  double theta11 = 0.0, theta12 = 0.0, theta21 = 0.0, theta22 = 0.0;
  friend bool operator==(const GeneralSync&, const GeneralSync&) = default;
};

/// C_1 = mu_1 P_N(v_2 - v_1), C_2 = mu_2 P_N(v_1 - v_2). With mu_2 = 0 this is
/// the AOT nudging filter with v_2 as the reference.
struct MutualNudge {
  double mu1 = 50.0;
  double mu2 = 0.0;
  friend bool operator==(const MutualNudge&, const MutualNudge&) = default;
};

/// C_1 = -mu_1 P_N v_1 + mu_2 P_N v_2, C_2 = mu_2 P_N v_1 - mu_1 P_N v_2.
/// Requires mu_1 >= mu_2 >= 0.
struct SymmetricNudge {
  double mu1 = 50.0;
  double mu2 = 0.0;
  friend bool operator==(const SymmetricNudge&, const SymmetricNudge&) = default;
};

/// C = -M P_N V for an arbitrary 2x2 matrix M (rows act on (v_1, v_2)).
struct GeneralNudge {
  std::array<std::array<double, 2>, 2> matrix{};
  friend bool operator==(const GeneralNudge&, const GeneralNudge&) = default;
};

}  // namespace coupling

using CouplingVariant = std::variant<coupling::Trivial, coupling::MutualSync, coupling::DegenerateSync,
                                     coupling::GeneralSync, coupling::MutualNudge, coupling::SymmetricNudge,
                                     coupling::GeneralNudge>;

struct IntertwinementSpec {
  CouplingVariant variant = coupling::Trivial{};
  double cutoff = 50.0;  ///< projection radius N of P_N

  friend bool operator==(const IntertwinementSpec&, const IntertwinementSpec&) = default;
};

/// Stable lowercase name used in configs and reports (e.g. "mutual_sync").
std::string variant_name(const CouplingVariant& variant);

/// Throws std::invalid_argument for out-of-range parameters, and
/// "observation cutoff exceeds resolved band" when the cutoff is past the
/// dealias cutoff of the grid.
void validate(const IntertwinementSpec& spec, const SpectralGrid& grid);

/// Nudging matrix M with C = -M P_N V. Defined for every nudge variant.
std::optional<std::array<std::array<double, 2>, 2>> nudging_matrix(const CouplingVariant& variant);

/// Streamfunction nonlinear terms of both copies, shared with the stepper.
struct NonlinearTerms {
  SpectralField first;
  SpectralField second;
};

struct CouplingTerms {
  SpectralField first;
  SpectralField second;
};

/// Right-hand-side additions for each copy. Sync variants reuse
/// `precomputed` when given instead of recomputing the nonlinear terms.
CouplingTerms coupling_terms(const IntertwinementSpec& spec, const StreamFunction& first,
                             const StreamFunction& second, const NonlinearTerms* precomputed = nullptr);

/// Symmetric intertwining matrix [[mu1, -mu2], [-mu2, mu1]].
struct IntertwiningMatrix {
  double mu1 = 0.0;
  double mu2 = 0.0;

  std::array<std::array<double, 2>, 2> entries() const { return {{{mu1, -mu2}, {-mu2, mu1}}}; }
  bool nonnegative_definite() const { return mu1 >= std::abs(mu2); }
};

/// (mu1 - mu2, mu1 + mu2).
std::pair<double, double> eigenvalues(const IntertwiningMatrix& m);

struct AnalysisConstants {
  double ladyzhenskaya = 1.0;  ///< C_L
  double agmon = 1.0;          ///< C_A
  double sobolev = 1.0;        ///< C_S
};

/// Grashof-type force magnitudes for a pair of forces, all divided by nu^2.
struct GrashofBundle {
  double nu = 0.0;
  double g1 = 0.0;        ///< |g_1| / nu^2
  double g2 = 0.0;        ///< |g_2| / nu^2
  double g = 0.0;         ///< (g1^2 + g2^2)^{1/2}
  double g_max = 0.0;     ///< max(g1, g2)
  double tilde_g1 = 0.0;  ///< |gt_1| / nu^2 for the split g = Gt + mu_t gt
  double tilde_g2 = 0.0;
  double tilde_g = 0.0;   ///< (tilde_g1^2 + tilde_g2^2)^{1/2}
  double tilde_G = 0.0;   ///< |Gt| / nu^2, pair norm
  std::optional<double> uniform;  ///< set when every quantity was overridden by one value

  /// g_lambda = |lambda_1 g_1 + lambda_2 g_2| / nu^2 with lambda_1 = theta_2, lambda_2 = theta_1.
  double g_lambda(double theta1) const;

  /// Bundle from force fields. The symmetric-nudge split uses
  /// gt = split * g / mu_t (so Gt = (1 - split) g); split in [0, 1].
  static GrashofBundle from_forces(const BodyForce& g1, const BodyForce& g2, double nu, double tilde_mu = 0.0,
                                   double split = 0.0);
  /// Every Grashof quantity replaced by `value` (tilde_g = 0, tilde_G = value).
  static GrashofBundle uniform_value(double value, double nu);

 private:
  std::optional<BodyForce> force1_;
  std::optional<BodyForce> force2_;
};

/// N >= max(48 sqrt3 C_L^2 g^2, C_A / C_L^2) for lambda in {0, 1},
/// N >= 15 sqrt27 C_L^2 g^2 for lambda in (0, 1).
double threshold_mutual_sync(double g_lambda, double lambda, const AnalysisConstants& c = {});

/// Smallest N >= 1 meeting both
///   N >= max(9 sqrt3 / C_L, 12 sqrt2 C_L) g,
///   N >= 32 sqrt2 C_L (24 (C_L^2 + C_S^2 log N) g^2 + 1)^{1/2} g,
/// the second solved by monotone fixed-point iteration.
double threshold_degenerate_sync(double g, const AnalysisConstants& c = {});

/// Residuals of the two degenerate-sync inequalities at N (>= 0 means satisfied).
std::pair<double, double> degenerate_sync_residuals(double N, double g, const AnalysisConstants& c = {});

struct Interval {
  double lower = 0.0;
  double upper = 0.0;
  bool contains(double x) const { return lower <= x && x <= upper; }
  bool empty() const { return lower > upper; }
};

struct MutualNudgeThresholds {
  double assisted = 0.0;    ///< 4 sqrt2 C_L r^{1/2} g^2
  double unassisted = 0.0;  ///< (3 sqrt2 / 2) C_L^{1/2} r^{1/2} g
  double nu = 0.0;

  /// [(4/3) N_*^2 nu, (4/3) N^2 nu]: admissible mu_1 + mu_2 for cutoff N.
  Interval relaxation_band(double N) const { return {4.0 / 3.0 * unassisted * unassisted * nu, 4.0 / 3.0 * N * N * nu}; }
};

/// r = max(mu)/min(mu). Throws std::domain_error
/// ("assisted threshold undefined at degenerate ratio") if min(mu) == 0.
MutualNudgeThresholds threshold_mutual_nudge(double mu1, double mu2, double g, double nu,
                                             const AnalysisConstants& c = {});

struct SymmetricNudgeThresholds {
  double mu1 = 0.0;
  double mu2 = 0.0;
  double nu = 0.0;
  double cutoff_a = 0.0;                ///< N_* = 4 C_L g
  std::optional<double> cutoff_b;       ///< 4 C_L (nu/(mu1-mu2) Gt^2 + gt^2)^{1/2}, needs mu1 > mu2

  double mu_sum() const { return mu1 + mu2; }
  /// (1/4) N_*^2 nu <= mu1 + mu2 <= (1/4) N^2 nu with N_* = cutoff_a.
  Interval relaxation_band_a(double N) const { return {0.25 * cutoff_a * cutoff_a * nu, 0.25 * N * N * nu}; }
  bool relaxation_ok_a(double N) const { return relaxation_band_a(N).contains(mu_sum()); }
  /// Same with N_* = cutoff_b. Throws std::domain_error when mu1 == mu2.
  Interval relaxation_band_b(double N) const;
  bool relaxation_ok_b(double N) const { return relaxation_band_b(N).contains(mu_sum()); }
  /// Assisted alternative: N >= cutoff_b and mu1 + mu2 <= (1/4) N^2 nu.
  bool assisted_ok_b(double N) const;
};

/// Throws std::invalid_argument unless mu1 >= mu2 >= 0.
SymmetricNudgeThresholds threshold_symmetric_nudge(double mu1, double mu2, const GrashofBundle& bundle, double nu,
                                                   const AnalysisConstants& c = {});

/// Throws std::domain_error("strict gap mu1>mu2 required") when mu1 == mu2.
double symmetric_nudge_cutoff_b(const SymmetricNudgeThresholds& t);

struct ThresholdEntry {
  std::string key;
  double value = 0.0;
};

struct ThresholdReport {
  std::vector<ThresholdEntry> entries;
  /// Whether the configured cutoff meets the governing threshold (nullopt when
  /// no theorem covers the variant).
  std::optional<bool> cutoff_satisfied;
  std::vector<std::string> notes;
};

/// Every threshold that applies to `spec`, evaluated for its cutoff.
ThresholdReport evaluate_thresholds(const IntertwinementSpec& spec, const GrashofBundle& bundle,
                                    const AnalysisConstants& c = {});

}  // namespace nsesync
