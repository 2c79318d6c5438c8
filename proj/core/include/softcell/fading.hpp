#pragma once

#include <complex>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "softcell/rng.hpp"

namespace softcell {

enum class FadingKind {
  NonFading,       // the constant gain 1
  Rayleigh,        // circularly symmetric complex normal, E|x|^2 = 1
  ScaledRayleigh,  // alpha * Rayleigh, alpha > 0
  PhaseOnly,       // uniform phase on the unit circle
  MaxOrderStat,    // strongest of `pool` i.i.d. base draws (largest |x|^2)
  Empirical,       // resampling of user-supplied complex gains
};

// Per-coefficient moment summary: m1 = E x, m2 = E|x|^2, m4 = E|x|^4,
// kurtosis = m4/m2^2, e_log_abs = E log|x| (nats), e_log_abs_sq_2nd =
// E (log|x|)^2 (the integrability witness for the log-moment assumption).
// Standard errors are zero on analytic paths and Monte Carlo/bootstrap
// estimates otherwise.
struct MomentSummary {
  std::complex<double> m1{0.0, 0.0};
  double m2 = 0.0;
  double m4 = 0.0;
  double kurtosis = 0.0;
  double e_log_abs = 0.0;
  double e_log_abs_sq_2nd = 0.0;

  bool analytic = true;            // closed-form values, no sampling involved
  bool log_moments_finite = true;  // false when the law puts mass at |x| = 0
  std::uint64_t mc_samples = 0;    // draws behind Monte Carlo values (0 if none)

  double m1_se = 0.0;
  double m2_se = 0.0;
  double m4_se = 0.0;
  double kurtosis_se = 0.0;
  double e_log_abs_se = 0.0;
  double e_log_abs_sq_2nd_se = 0.0;
};

// Declarative distributional properties, reported per model kind:
//   h1       E (log|x|)^2 < infinity
//   h2       absolutely continuous on the complex plane
//   h3       the |x|^2 density is strictly positive on some [M, inf)
//   h3_prime the |x|^2 density and Lebesgue measure are mutually absolutely
//            continuous on some interval [m, M]
//   h4       Lebesgue measure outside some ball is absolutely continuous
//            with respect to the law
struct Hypotheses {
  bool h1 = false;
  bool h2 = false;
  bool h3 = false;
  bool h3_prime = false;
  bool h4 = false;
};

// Log-moment ordering of two models.  Asymmetric limit statements want the
// model with the smaller E log|x| in the first slot; `a_below_b` says whether
// the pair already satisfies that.
struct LogMomentOrder {
  double e_log_abs_a = 0.0;
  double e_log_abs_b = 0.0;
  bool a_below_b = true;
};

inline constexpr std::uint64_t kDefaultMomentSeed = 0x5eed0001u;
inline constexpr std::uint64_t kDefaultMomentSamples = 1'000'000;

// An immutable complex fading-gain law.  Copies are cheap (sample lists are
// shared) and instances may be used concurrently; random streams are the
// caller's and are never shared between workers.
class FadingModel {
 public:
  static FadingModel nonfading();
  static FadingModel rayleigh();
  static FadingModel scaled_rayleigh(double alpha);
  static FadingModel phase_only();
  static FadingModel max_order_stat(FadingModel base, int pool);
  static FadingModel empirical(std::vector<std::complex<double>> samples,
                               std::string origin = {});

  // Spec-string grammar (the CLI surface): `nonfading`, `rayleigh`,
  // `phase-only`, `scaled-rayleigh:<alpha>`, `maxk:<K>:<base>`,
  // `empirical:<path to one-complex-per-line file "re im">`.
  static FadingModel parse(const std::string& spec);

  // Canonical spec string; parse(spec()) reproduces the model.
  std::string spec() const;

  FadingKind kind() const { return kind_; }
  double alpha() const { return alpha_; }
  int pool() const { return pool_; }
  const FadingModel& base() const;
  const std::vector<std::complex<double>>& samples() const;

  std::complex<double> sample_gain(Rng& rng) const;

  // Closed-form moments where the law admits them (NonFading, Rayleigh,
  // ScaledRayleigh, PhaseOnly), exact sample averages with bootstrap errors
  // for Empirical, Monte Carlo otherwise.  Deterministic for fixed arguments.
  MomentSummary moments(std::uint64_t mc_samples = kDefaultMomentSamples,
                        std::uint64_t seed = kDefaultMomentSeed,
                        unsigned threads = 0) const;

  Hypotheses hypotheses() const;

 private:
  FadingModel() = default;

  MomentSummary empirical_moments(std::uint64_t seed, unsigned threads) const;

  FadingKind kind_ = FadingKind::NonFading;
  double alpha_ = 1.0;
  int pool_ = 1;
  std::shared_ptr<const FadingModel> base_;
  std::shared_ptr<const std::vector<std::complex<double>>> samples_;
  std::string origin_;
};

// Compares E log|x| of two models (uses analytic values when available,
// Monte Carlo with the given budget otherwise).
LogMomentOrder compare_log_moments(const FadingModel& model_a, const FadingModel& model_b,
                                   std::uint64_t mc_samples = kDefaultMomentSamples,
                                   std::uint64_t seed = kDefaultMomentSeed);

// Reads a one-complex-per-line "re im" text file ('#' comments allowed).
std::vector<std::complex<double>> read_complex_samples(const std::string& path);

}  // namespace softcell
