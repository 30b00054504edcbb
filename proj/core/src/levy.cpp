#include "sinhz/levy.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "sinhz/errors.hpp"

namespace sinhz {

namespace {

double binom(double nu, int k) {
  double c = 1.0;
  for (int i = 0; i < k; ++i) c *= (nu - i) / (i + 1);
  return c;
}

// Kept terms: exponents above this value; the first dropped exponent becomes nu_N.
constexpr double kKeepAbove = -1.0;
constexpr int kMaxOrder = 12;

struct TermSink {
  std::map<double, cplx, std::greater<>> by_nu;
  double first_dropped = -INFINITY;
  void add(double nu, cplx d) {
    // Merge exponents equal up to roundoff (e.g. nu - k == 0).
    if (std::abs(nu) < 1e-13) nu = 0.0;
    if (nu > kKeepAbove) {
      by_nu[nu] += d;
    } else {
      first_dropped = std::max(first_dropped, nu);
    }
  }
};

bool is_real(cplx d) { return std::abs(d.imag()) <= 1e-12 * std::max(1.0, std::abs(d)); }

}  // namespace

LevyModel LevyModel::kobol(const KoBoLParams& p) {
  auto bad = [](const char* what) { throw PreconditionError(std::string("KoBoL: ") + what); };
  if (!(p.c_plus > 0 && p.c_minus > 0)) bad("c_plus, c_minus must be positive");
  for (double nu : {p.nu_plus, p.nu_minus}) {
    if (!(nu > 0 && nu < 2)) bad("nu must lie in (0, 2)");
    if (std::abs(nu - 1.0) < 1e-12) bad("nu = 1 carries log factors and is not supported");
  }
  if (!(p.lambda_minus < 0 && 0 < p.lambda_plus)) bad("need lambda_minus < 0 < lambda_plus");
  LevyModel m;
  m.kind_ = ModelKind::kobol;
  m.kb_ = p;
  m.mu_minus_ = p.lambda_minus;
  m.mu_plus_ = p.lambda_plus;
  m.finish();
  return m;
}

LevyModel LevyModel::nts(const NTSParams& p) {
  auto bad = [](const char* what) { throw PreconditionError(std::string("NTS: ") + what); };
  if (!(p.delta_s > 0 && p.alpha_s > 0)) bad("delta_s, alpha_s must be positive");
  if (!(std::abs(p.beta_s) < p.alpha_s)) bad("need |beta_s| < alpha_s");
  if (!(p.nu_s > 0 && p.nu_s < 2)) bad("nu_s must lie in (0, 2)");
  LevyModel m;
  m.kind_ = ModelKind::nts;
  m.nts_ = p;
  m.mu_minus_ = p.beta_s - p.alpha_s;
  m.mu_plus_ = p.beta_s + p.alpha_s;
  m.finish();
  return m;
}

LevyModel LevyModel::quadratic(const QuadraticParams& p) {
  if (!(p.d0 > 0)) throw PreconditionError("quadratic: d0 must be positive");
  LevyModel m;
  m.kind_ = ModelKind::quadratic;
  m.quad_ = p;
  m.mu_minus_ = -INFINITY;
  m.mu_plus_ = INFINITY;
  m.finish();
  return m;
}

LevyModel LevyModel::mixture(double a0, const LevyModel& m0, double a1, const LevyModel& m1) {
  if (!(a0 > 0 && a1 > 0) || std::abs(a0 + a1 - 1.0) > 1e-12) {
    throw PreconditionError("mixture: weights must be positive and sum to 1");
  }
  // Component 1 must decay faster so that Phi1/Phi0 -> 0 at infinity.
  auto faster = [](const Asymptotics& x, const Asymptotics& y) {
    return x.nu0 > y.nu0 || (x.nu0 == y.nu0 && x.d0 > y.d0);
  };
  const bool swap = !faster(m1.asym_, m0.asym_);
  if (swap && !faster(m0.asym_, m1.asym_)) {
    throw PreconditionError("mixture: components must differ in their leading asymptotic term");
  }
  LevyModel m;
  m.kind_ = ModelKind::mixture;
  m.a0_ = swap ? a1 : a0;
  m.a1_ = swap ? a0 : a1;
  m.c0_ = std::make_shared<LevyModel>(swap ? m1 : m0);
  m.c1_ = std::make_shared<LevyModel>(swap ? m0 : m1);
  m.mu_minus_ = std::max(m0.mu_minus_, m1.mu_minus_);
  m.mu_plus_ = std::min(m0.mu_plus_, m1.mu_plus_);
  m.finish();
  return m;
}

std::string LevyModel::name() const {
  switch (kind_) {
    case ModelKind::kobol: return "kobol";
    case ModelKind::nts: return "nts";
    case ModelKind::quadratic: return "quadratic";
    case ModelKind::mixture: return "mixture";
  }
  return "unknown";
}

double LevyModel::drift() const {
  switch (kind_) {
    case ModelKind::kobol: return kb_.mu;
    case ModelKind::nts: return nts_.mu;
    case ModelKind::quadratic: return quad_.mu;
    case ModelKind::mixture: return c0_->drift();
  }
  return 0.0;
}

void LevyModel::check_cut(cplx xi) const {
  if (xi.real() == 0.0 && (xi.imag() >= mu_plus_ || xi.imag() <= mu_minus_)) {
    std::ostringstream os;
    os << name() << ": xi = " << xi << " lies on a branch cut";
    throw DomainError(os.str());
  }
}

cplx LevyModel::psi(cplx xi) const {
  check_cut(xi);
  switch (kind_) {
    case ModelKind::kobol: {
      const auto& p = kb_;
      const double gp = std::tgamma(-p.nu_plus), gm = std::tgamma(-p.nu_minus);
      const cplx t1 = std::pow(-p.lambda_minus, p.nu_plus) - std::pow(cplx(-p.lambda_minus) - kI * xi, p.nu_plus);
      const cplx t2 = std::pow(p.lambda_plus, p.nu_minus) - std::pow(cplx(p.lambda_plus) + kI * xi, p.nu_minus);
      return -kI * p.mu * xi + p.c_plus * gp * t1 + p.c_minus * gm * t2;
    }
    case ModelKind::nts: {
      const auto& p = nts_;
      const double h = 0.5 * p.nu_s;
      const cplx A = cplx(p.alpha_s - p.beta_s) - kI * xi;
      const cplx B = cplx(p.alpha_s + p.beta_s) + kI * xi;
      const double base = std::pow(p.alpha_s * p.alpha_s - p.beta_s * p.beta_s, h);
      return -kI * p.mu * xi + p.delta_s * (std::pow(A, h) * std::pow(B, h) - base);
    }
    case ModelKind::quadratic:
      return quad_.d0 * xi * xi - kI * quad_.mu * xi;
    case ModelKind::mixture: {
      const cplx p0 = c0_->psi(xi), p1 = c1_->psi(xi);
      const cplx w = a0_ + a1_ * std::exp(p0 - p1);
      if (w.real() <= 0 && std::abs(w.imag()) <= 1e-14 * std::abs(w)) {
        throw DomainError("mixture: Phi1/Phi0 on the negative real axis");
      }
      return p0 - std::log(w);
    }
  }
  return 0.0;
}

cplx LevyModel::dpsi(cplx xi) const {
  check_cut(xi);
  switch (kind_) {
    case ModelKind::kobol: {
      const auto& p = kb_;
      const double gp = std::tgamma(-p.nu_plus), gm = std::tgamma(-p.nu_minus);
      const cplx a = std::pow(cplx(-p.lambda_minus) - kI * xi, p.nu_plus - 1.0);
      const cplx b = std::pow(cplx(p.lambda_plus) + kI * xi, p.nu_minus - 1.0);
      return -kI * p.mu + p.c_plus * gp * p.nu_plus * kI * a - p.c_minus * gm * p.nu_minus * kI * b;
    }
    case ModelKind::nts: {
      const auto& p = nts_;
      const double h = 0.5 * p.nu_s;
      const cplx A = cplx(p.alpha_s - p.beta_s) - kI * xi;
      const cplx B = cplx(p.alpha_s + p.beta_s) + kI * xi;
      return -kI * p.mu + p.delta_s * h * std::pow(A, h) * std::pow(B, h) * (-kI / A + kI / B);
    }
    case ModelKind::quadratic:
      return 2.0 * quad_.d0 * xi - kI * quad_.mu;
    case ModelKind::mixture: {
      const cplx p0 = c0_->psi(xi), p1 = c1_->psi(xi);
      const cplx e = a1_ * std::exp(p0 - p1);
      const cplx d0 = c0_->dpsi(xi), d1 = c1_->dpsi(xi);
      return d0 - e * (d0 - d1) / (a0_ + e);
    }
  }
  return 0.0;
}

void LevyModel::finish() {
  Asymptotics a;
  TermSink sink;
  switch (kind_) {
    case ModelKind::kobol: {
      const auto& p = kb_;
      a.mu = p.mu;
      const double gp = std::tgamma(-p.nu_plus), gm = std::tgamma(-p.nu_minus);
      sink.add(0.0, p.c_plus * gp * std::pow(-p.lambda_minus, p.nu_plus) +
                        p.c_minus * gm * std::pow(p.lambda_plus, p.nu_minus));
      for (int k = 0; k <= kMaxOrder; ++k) {
        const double ep = p.nu_plus - k, em = p.nu_minus - k;
        sink.add(ep, -p.c_plus * gp * binom(p.nu_plus, k) * std::pow(-p.lambda_minus, k) *
                         std::exp(-kI * (kPi * ep / 2)));
        sink.add(em, -p.c_minus * gm * binom(p.nu_minus, k) * std::pow(p.lambda_plus, k) *
                         std::exp(kI * (kPi * em / 2)));
      }
      break;
    }
    case ModelKind::nts: {
      const auto& p = nts_;
      a.mu = p.mu;
      const double h = 0.5 * p.nu_s, A = p.alpha_s + p.beta_s, B = p.alpha_s - p.beta_s;
      sink.add(0.0, -p.delta_s * std::pow(p.alpha_s * p.alpha_s - p.beta_s * p.beta_s, h));
      // xi^nu (1 + A/(i xi))^{h} (1 - B/(i xi))^{h}, expanded in 1/(i xi).
      for (int m = 0; m <= kMaxOrder; ++m) {
        double cm = 0.0;
        for (int k = 0; k <= m; ++k) cm += binom(h, k) * std::pow(A, k) * binom(h, m - k) * std::pow(-B, m - k);
        sink.add(p.nu_s - m, p.delta_s * cm * std::pow(-kI, m));
      }
      break;
    }
    case ModelKind::quadratic:
      a.mu = quad_.mu;
      sink.add(2.0, quad_.d0);
      break;
    case ModelKind::mixture: {
      // Phi1/Phi0 decays faster than any power, so only -ln a0 is added to component 0.
      const Asymptotics& b = c0_->asym_;
      a.mu = b.mu;
      for (const auto& t : b.terms) sink.add(t.nu, t.d);
      sink.add(0.0, -std::log(a0_));
      sink.first_dropped = std::max(sink.first_dropped, b.nu_N);
      break;
    }
  }
  for (const auto& [nu, d] : sink.by_nu) {
    if (std::abs(d) > 1e-300) a.terms.push_back({d, nu});
  }
  a.nu_N = std::isfinite(sink.first_dropped) ? sink.first_dropped : kKeepAbove;
  if (a.terms.empty()) a.violation = "no asymptotic terms";
  if (!a.violation) {
    a.d0 = a.terms[0].d.real();
    a.nu0 = a.terms[0].nu;
    if (!is_real(a.terms[0].d) || !(a.terms[0].d.real() > 0)) {
      a.violation = "leading coefficient d0 must be real and positive (essentially asymmetric model)";
    } else if (!(a.nu0 > 0 && a.nu0 <= 2)) {
      a.violation = "leading exponent nu0 must lie in (0, 2]";
    } else if (a.nu0 < 1 && a.mu != 0.0) {
      a.violation = "nu0 < 1 requires zero drift";
    }
    for (size_t j = 0; j < a.terms.size() && !a.violation; ++j) {
      if (a.terms[j].nu > 0 && !(a.terms[j].d.real() > 0)) a.violation = "Re d_j must be positive for nu_j > 0";
    }
  }
  const int N = static_cast<int>(a.terms.size());
  a.j0 = N;
  for (int j = 1; j < N; ++j) {
    if (!is_real(a.terms[j].d)) {
      a.j0 = j;
      break;
    }
  }
  a.nu_j0 = a.j0 < N ? a.terms[a.j0].nu : a.nu_N;
  a.d_j0 = a.j0 < N ? a.terms[a.j0].d : cplx(0.0);
  if (a.mu == 0.0 && a.nu_j0 <= 0) {
    a.nu_bar = 0.0;
  } else if (a.mu != 0.0 && a.nu_j0 < 1) {
    a.nu_bar = 1.0;
  } else {
    a.nu_bar = a.nu_j0;
  }
  asym_ = a;
}

std::optional<double> LevyModel::symmetrizing_beta() const {
  switch (kind_) {
    case ModelKind::kobol:
      if (kb_.mu != 0.0 || kb_.c_plus != kb_.c_minus || kb_.nu_plus != kb_.nu_minus) return std::nullopt;
      return -(kb_.lambda_plus + kb_.lambda_minus) / 2.0;
    case ModelKind::nts:
      if (nts_.mu != 0.0) return std::nullopt;
      return -nts_.beta_s;
    case ModelKind::quadratic:
      return -quad_.mu / (2.0 * quad_.d0);
    case ModelKind::mixture:
      return std::nullopt;
  }
  return std::nullopt;
}

cplx psi_eval(const LevyModel& m, cplx xi) { return m.psi(xi); }
cplx phi_eval(const LevyModel& m, cplx xi) { return m.phi(xi); }

const Asymptotics& asymptotic_params(const LevyModel& m) {
  const Asymptotics& a = m.asymptotics();
  if (a.violation) throw PreconditionError("asymptotic_params: " + *a.violation);
  return a;
}

LevyModel esscher(const LevyModel& m, EsscherShift s) {
  const double b = s.beta;
  if (!(-b > m.strip_minus() && -b < m.strip_plus())) {
    std::ostringstream os;
    os << "esscher: beta = " << b << " outside (" << -m.strip_plus() << ", " << -m.strip_minus() << ")";
    throw PreconditionError(os.str());
  }
  if (b == 0.0) return m;
  switch (m.kind()) {
    case ModelKind::kobol: {
      KoBoLParams p = m.kobol_params();
      p.lambda_minus += b;
      p.lambda_plus += b;
      return LevyModel::kobol(p);
    }
    case ModelKind::nts: {
      NTSParams p = m.nts_params();
      p.beta_s += b;
      return LevyModel::nts(p);
    }
    case ModelKind::quadratic: {
      QuadraticParams p = m.quadratic_params();
      p.mu += 2.0 * p.d0 * b;
      return LevyModel::quadratic(p);
    }
    case ModelKind::mixture: {
      const cplx z(0.0, -b);
      const double p0 = m.weight(0) * m.component(0).phi(z).real();
      const double p1 = m.weight(1) * m.component(1).phi(z).real();
      return LevyModel::mixture(p0 / (p0 + p1), esscher(m.component(0), s), p1 / (p0 + p1),
                                esscher(m.component(1), s));
    }
  }
  return m;
}

bool symmetry_check(const LevyModel& m, EsscherShift s, double tol, int samples, double span) {
  const cplx shift(0.0, -s.beta);
  double worst = 0.0;
  for (int k = 0; k < samples; ++k) {
    const double x = span * (k + 0.5) / samples;
    cplx a, b;
    try {
      a = m.phi(cplx(x) + shift);
      b = m.phi(cplx(-x) + shift);
    } catch (const DomainError&) {
      return false;
    }
    worst = std::max({worst, std::abs(a - b), std::abs(a.imag()), std::max(0.0, -a.real())});
  }
  return worst <= tol;
}

double p_delta(const LevyModel& m, double delta) {
  if (delta == 0.0) throw PreconditionError("p_delta: delta must be nonzero");
  const Asymptotics& a = asymptotic_params(m);
  const double dn = a.d0 * a.nu0;
  const double nj = a.nu_j0;
  if (nj > 1 || (nj > 0 && nj < 1 && a.mu == 0.0)) return -a.d_j0.imag() / dn;
  if (a.mu != 0.0 && nj < 1) return a.mu / dn;
  if (a.mu == 0.0 && nj == 0.0) return (delta - a.d_j0.imag()) / dn;
  if (a.mu == 0.0 && nj < 0) return delta / dn;
  std::ostringstream os;
  os << "p_delta: no case applies (mu=" << a.mu << ", nu_j0=" << nj << ")";
  throw PreconditionError(os.str());
}

double increment_variance(const LevyModel& m) {
  const double h = 1e-4;
  return ((m.dpsi(cplx(h)) - m.dpsi(cplx(-h))) / (2.0 * h)).real();
}

}  // namespace sinhz
