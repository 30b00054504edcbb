#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "sinhz/numeric.hpp"

namespace sinhz {

struct KoBoLParams {
  double c_plus = 1.0;
  double c_minus = 1.0;
  double nu_plus = 0.5;
  double nu_minus = 0.5;
  double lambda_minus = -1.0;
  double lambda_plus = 1.0;
  double mu = 0.0;
};

// Normal tempered stable; nu_s = 1 is NIG.
struct NTSParams {
  double delta_s = 1.0;
  double alpha_s = 1.0;
  double beta_s = 0.0;
  double nu_s = 1.0;
  double mu = 0.0;
};

// psi(xi) = d0 xi^2 - i mu xi (Brownian increment).
struct QuadraticParams {
  double d0 = 1.0;
  double mu = 0.0;
};

enum class ModelKind { kobol, nts, quadratic, mixture };

struct AsymptoticTerm {
  cplx d;
  double nu;
};

// psi(xi) + i mu xi = sum_j d_j xi^{nu_j} + O(|xi|^{nu_N}) as xi -> inf in Re xi > 0.
struct Asymptotics {
  double mu = 0.0;
  std::vector<AsymptoticTerm> terms;  // strictly decreasing nu
  double nu_N = -1.0;                 // first exponent not kept
  double d0 = 0.0;
  double nu0 = 0.0;
  int j0 = 0;                          // == terms.size() when every kept coefficient is real
  double nu_j0 = 0.0;
  cplx d_j0{};
  double nu_bar = 0.0;
  // Set when the model violates the structural requirements (d0 > 0, nu0 in (0,2], drift rule).
  std::optional<std::string> violation;
};

struct EsscherShift {
  double beta = 0.0;
};

class LevyModel {
 public:
  static LevyModel kobol(const KoBoLParams& p);
  static LevyModel nts(const NTSParams& p);
  static LevyModel quadratic(const QuadraticParams& p);
  // Phi = a0 Phi0 + a1 Phi1; components are reordered so that component 1 decays faster.
  static LevyModel mixture(double a0, const LevyModel& m0, double a1, const LevyModel& m1);

  ModelKind kind() const { return kind_; }
  std::string name() const;
  double strip_minus() const { return mu_minus_; }
  double strip_plus() const { return mu_plus_; }
  double drift() const;

  cplx psi(cplx xi) const;
  cplx dpsi(cplx xi) const;
  cplx phi(cplx xi) const { return std::exp(-psi(xi)); }

  const Asymptotics& asymptotics() const { return asym_; }
  // Esscher shift making Phi(. - i beta) even and real on R, when one exists.
  std::optional<double> symmetrizing_beta() const;

  const KoBoLParams& kobol_params() const { return kb_; }
  const NTSParams& nts_params() const { return nts_; }
  const QuadraticParams& quadratic_params() const { return quad_; }
  double weight(int k) const { return k == 0 ? a0_ : a1_; }
  const LevyModel& component(int k) const { return k == 0 ? *c0_ : *c1_; }

 private:
  LevyModel() = default;
  void check_cut(cplx xi) const;
  void finish();

  ModelKind kind_ = ModelKind::quadratic;
  KoBoLParams kb_;
  NTSParams nts_;
  QuadraticParams quad_;
  double a0_ = 1.0, a1_ = 0.0;
  std::shared_ptr<const LevyModel> c0_, c1_;
  double mu_minus_ = 0.0, mu_plus_ = 0.0;
  Asymptotics asym_;
};

cplx psi_eval(const LevyModel& m, cplx xi);
cplx phi_eval(const LevyModel& m, cplx xi);
// Throws PreconditionError when the model violates the structural asymptotic requirements.
const Asymptotics& asymptotic_params(const LevyModel& m);
LevyModel esscher(const LevyModel& m, EsscherShift s);
// Phi(xi - i beta) even in xi and real non-negative on a real grid, within tol.
bool symmetry_check(const LevyModel& m, EsscherShift s, double tol, int samples = 401, double span = 50.0);
// Prefactor of the asymptotic level-curve law y ~ p(delta) x^{nu_bar + 1 - nu0}.
double p_delta(const LevyModel& m, double delta);
// Var of the increment, -(d^2/dy^2) psi(i y) at 0, by central differences on the real exponent.
double increment_variance(const LevyModel& m);

}  // namespace sinhz
