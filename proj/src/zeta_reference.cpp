#include "rzlab/zeta_reference.hpp"

#include <cmath>
#include <limits>
#include <numbers>

namespace rzlab {

namespace {

template <class T>
struct EtaLimits;
template <>
struct EtaLimits<double> {
  static constexpr int kMaxTerms = 400;  // (3 + sqrt 8)^n stays finite
};
template <>
struct EtaLimits<long double> {
  static constexpr int kMaxTerms = 2000;
};

template <class T>
struct AcceleratedSum {
  std::complex<T> value;
  T rounding = 0;
};

// Cohen–Rodriguez Villegas–Zagier, algorithm 1, for sum_{k>=0} (-1)^k (k+1)^{-s}.
template <class T>
AcceleratedSum<T> cvz_eta(std::complex<T> s, int n) {
  using std::exp;
  using std::log;
  using std::sqrt;
  T d = std::pow(T(3) + sqrt(T(8)), n);
  d = (d + T(1) / d) / T(2);
  T b = -1;
  T c = -d;
  std::complex<T> sum = 0;
  T magnitude = 0;
  for (int k = 0; k < n; ++k) {
    c = b - c;
    const std::complex<T> term = exp(-s * log(static_cast<T>(k + 1)));
    sum += c * term;
    magnitude += std::fabs(c) * std::abs(term);
    b = static_cast<T>(k + n) * static_cast<T>(k - n) * b / ((static_cast<T>(k) + T(0.5)) * static_cast<T>(k + 1));
  }
  return {sum / d, T(4) * static_cast<T>(n) * std::numeric_limits<T>::epsilon() * magnitude / d};
}

// log of Gamma(sigma) / |Gamma(s)|: the total variation of the measure whose
// moments are (k+1)^{-s}.
double log_variation(ComplexPoint s) { return std::lgamma(s.sigma) - log_gamma(s.value()).real(); }

template <class T>
std::pair<std::complex<T>, EtaValue> eta_with_tolerance(ComplexPoint s, T tol) {
  if (!s.finite()) throw ParameterError("eta: non-finite point");
  if (!(s.sigma > 0.0)) throw DomainError("eta: requires Re s > 0, got " + to_string(s));
  if (!(tol > 0)) throw ParameterError("eta: tolerance must be positive");
  const T log_base = std::log(T(3) + std::sqrt(T(8)));
  const T log_tv = static_cast<T>(log_variation(s));
  // Smallest n with 2 TV / (3 + sqrt 8)^n <= tol / 2.
  const T need = (std::log(T(4)) + log_tv - std::log(tol)) / log_base;
  const int n = std::max(8, static_cast<int>(std::ceil(need)));
  if (n > EtaLimits<T>::kMaxTerms) {
    throw ParameterError("eta: tolerance unattainable at s = " + to_string(s) + " (|t| too large)");
  }
  const AcceleratedSum<T> acc = cvz_eta(std::complex<T>(s.sigma, s.t), n);
  const T truncation = T(2) * std::exp(log_tv - static_cast<T>(n) * log_base);
  const T bound = truncation + acc.rounding;
  EtaValue ev;
  ev.point = s;
  ev.value = {static_cast<double>(acc.value.real()), static_cast<double>(acc.value.imag())};
  ev.terms_used = n;
  ev.error_bound = static_cast<double>(bound);
  return {acc.value, ev};
}

template <class T>
std::complex<T> eta_denominator(ComplexPoint s) {
  if (s.sigma == 1.0 && s.t == 0.0) throw SingularityError("zeta: pole at s = 1");
  const std::complex<T> one_minus_s(T(1) - static_cast<T>(s.sigma), -static_cast<T>(s.t));
  const std::complex<T> denom = T(1) - std::exp(one_minus_s * std::log(T(2)));
  if (std::abs(denom) <= T(1e-10)) {
    throw SingularityError("zeta_via_eta: 1 - 2^{1-s} vanishes at s = " + to_string(s));
  }
  return denom;
}

}  // namespace

Complex log_gamma(Complex z) {
  if (!(z.real() > 0.0)) throw DomainError("log_gamma: requires Re z > 0");
  Complex shift = 0.0;
  while (z.real() < 12.0) {
    shift += std::log(z);
    z += 1.0;
  }
  const Complex inv = 1.0 / z;
  const Complex inv2 = inv * inv;
  const Complex series =
      inv * (1.0 / 12.0 - inv2 * (1.0 / 360.0 - inv2 * (1.0 / 1260.0 - inv2 * (1.0 / 1680.0))));
  return (z - 0.5) * std::log(z) - z + 0.5 * std::log(2.0 * std::numbers::pi) + series - shift;
}

EtaValue eta(ComplexPoint s, double tol) { return eta_with_tolerance<double>(s, tol).second; }

EtaValue eta_terms(ComplexPoint s, int terms) {
  if (!(s.sigma > 0.0)) throw DomainError("eta: requires Re s > 0, got " + to_string(s));
  if (terms < 1 || terms > EtaLimits<double>::kMaxTerms) throw ParameterError("eta: terms must lie in [1, 400]");
  const auto acc = cvz_eta(Complex(s.sigma, s.t), terms);
  EtaValue ev;
  ev.point = s;
  ev.value = acc.value;
  ev.terms_used = terms;
  ev.error_bound = 2.0 * std::exp(log_variation(s) - terms * std::log(3.0 + std::sqrt(8.0))) + acc.rounding;
  return ev;
}

Complex zeta_via_eta(ComplexPoint s, double tol) {
  if (!(s.sigma > 0.0)) throw DomainError("zeta_via_eta: requires Re s > 0, got " + to_string(s));
  const Complex denom = eta_denominator<double>(s);
  return eta(s, tol * std::abs(denom)).value / denom;
}

std::complex<long double> zeta_via_eta_extended(ComplexPoint s, long double tol) {
  if (!(s.sigma > 0.0)) throw DomainError("zeta_via_eta: requires Re s > 0, got " + to_string(s));
  const auto denom = eta_denominator<long double>(s);
  return eta_with_tolerance<long double>(s, tol * std::abs(denom)).first / denom;
}

DirichletValue zeta_dirichlet(ComplexPoint s, std::uint64_t terms) {
  if (!(s.sigma > 1.0)) throw DomainError("zeta_dirichlet: requires Re s > 1, got " + to_string(s));
  if (terms < 1) throw ParameterError("zeta_dirichlet: terms must be >= 1");
  CompensatedComplexSum sum;
  for (std::uint64_t n = 1; n <= terms; ++n) sum.add(dirichlet_power(std::log(static_cast<double>(n)), s));
  const Complex z = s.value();
  const double L = std::log(static_cast<double>(terms));
  const double N = static_cast<double>(terms);
  const Complex np = dirichlet_power(L, s);  // N^{-s}
  // Tail sum_{n>N} n^{-s} = N^{1-s}/(s-1) - N^{-s}/2 - sum_j B_2j/(2j)! (d/dx)^{2j-1} x^{-s} |_N.
  Complex tail = N * np / (z - 1.0) - 0.5 * np;
  Complex rising = z;  // s (s+1) ... (s + 2j - 2)
  Complex power = np / N;
  constexpr double coeff[] = {1.0 / 12.0, -1.0 / 720.0, 1.0 / 30240.0, -1.0 / 1209600.0};
  for (int j = 0; j < 3; ++j) {
    tail += coeff[j] * rising * power;
    rising *= (z + static_cast<double>(2 * j + 1)) * (z + static_cast<double>(2 * j + 2));
    power /= N * N;
  }
  const double next = std::fabs(coeff[3]) * std::abs(rising * power);
  return {sum.value() + tail, 2.0 * next};
}

double stieltjes_gamma(int n, std::uint64_t m, bool accelerate) {
  if (n < 0 || n > 8) throw ParameterError("stieltjes_gamma: order must lie in [0, 8]");
  if (m < 1) throw ParameterError("stieltjes_gamma: m must be >= 1");
  CompensatedSum sum;
  for (std::uint64_t k = 1; k <= m; ++k) {
    const double L = std::log(static_cast<double>(k));
    double term = 1.0 / static_cast<double>(k);
    for (int i = 0; i < n; ++i) term *= L;
    sum.add(term);
  }
  const double Lm = std::log(static_cast<double>(m));
  sum.add(-std::pow(Lm, n + 1) / (n + 1));
  if (!accelerate) return sum.value();

  // f(x) = (ln x)^n / x has f^{(j)}(x) = P_j(ln x) / x^{j+1} with
  // P_0 = L^n and P_{j+1} = P_j' - (j+1) P_j.
  std::vector<double> poly(static_cast<std::size_t>(n) + 1, 0.0);
  poly[static_cast<std::size_t>(n)] = 1.0;
  auto eval = [&](const std::vector<double>& p) {
    double acc = 0.0;
    for (std::size_t i = p.size(); i-- > 0;) acc = acc * Lm + p[i];
    return acc;
  };
  auto step = [](const std::vector<double>& p, int j) {
    std::vector<double> next(p.size(), 0.0);
    for (std::size_t i = 0; i < p.size(); ++i) {
      if (i > 0) next[i - 1] += static_cast<double>(i) * p[i];
      next[i] -= static_cast<double>(j + 1) * p[i];
    }
    return next;
  };
  const double M = static_cast<double>(m);
  sum.add(-0.5 * eval(poly) / M);
  constexpr double bernoulli_over_factorial[] = {1.0 / 12.0, -1.0 / 720.0, 1.0 / 30240.0};
  double mpow = M * M;  // x^{j+1} for j = 1
  for (int j = 0, q = 0; q < 3; ++j) {
    poly = step(poly, j);  // now P_{j+1}
    if ((j + 1) % 2 == 1) {
      sum.add(-bernoulli_over_factorial[q] * eval(poly) / mpow);
      ++q;
    }
    mpow *= M;
  }
  return sum.value();
}

StieltjesTable stieltjes_table(int count, std::uint64_t m, bool accelerate) {
  if (count < 1 || count > 9) throw ParameterError("stieltjes_table: count must lie in [1, 9]");
  StieltjesTable table;
  table.truncation = m;
  table.accelerated = accelerate;
  for (int n = 0; n < count; ++n) table.gamma.push_back(stieltjes_gamma(n, m, accelerate));
  return table;
}

Complex zeta_laurent(ComplexPoint s, const StieltjesTable& gammas, int terms) {
  const Complex h = s.value() - 1.0;
  if (h == 0.0) throw SingularityError("zeta_laurent: pole at s = 1");
  if (!(std::abs(h) < 0.5)) throw ParameterError("zeta_laurent: requires |s - 1| < 0.5, got " + to_string(s));
  if (terms < 0 || static_cast<std::size_t>(terms) > gammas.size()) {
    throw ParameterError("zeta_laurent: terms exceeds Stieltjes table size");
  }
  Complex sum = 1.0 / h;
  Complex coeff = 1.0;  // (-1)^n h^n / n!
  for (int n = 0; n < terms; ++n) {
    sum += coeff * gammas.gamma[static_cast<std::size_t>(n)];
    coeff *= -h / static_cast<double>(n + 1);
  }
  return sum;
}

Complex phi_partial(ComplexPoint s, std::uint64_t cutoff) {
  if (!s.finite()) throw ParameterError("phi_partial: non-finite point");
  CompensatedComplexSum sum;
  for (std::uint64_t n = 2; n <= cutoff; ++n) {
    const double L = std::log(static_cast<double>(n));
    sum.add(dirichlet_power(L, s) / L);
  }
  return sum.value();
}

Complex phi_with_tail(ComplexPoint s, std::uint64_t cutoff) {
  if (!(s.sigma > 1.0)) throw DomainError("phi_with_tail: requires Re s > 1, got " + to_string(s));
  if (cutoff < 2) throw ParameterError("phi_with_tail: cutoff must be >= 2");
  const Complex z = s.value();
  const double L = std::log(static_cast<double>(cutoff));
  const double N = static_cast<double>(cutoff);
  const Complex fN = dirichlet_power(L, s) / L;
  const Complex dfN = -dirichlet_power(L, s) / N * (z / L + 1.0 / (L * L));
  const Complex tail = exponential_integral_e1((z - 1.0) * L) - 0.5 * fN - dfN / 12.0;
  return phi_partial(s, cutoff) + tail;
}

Complex exponential_integral_e1(Complex z) {
  if (!(z.real() > 0.0)) throw DomainError("exponential_integral_e1: requires Re z > 0");
  constexpr double eps = std::numeric_limits<double>::epsilon();
  if (std::abs(z) <= 1.0) {
    // -gamma - log z - sum_{k>=1} (-z)^k / (k k!)
    Complex sum = 0.0;
    Complex term = 1.0;
    for (int k = 1; k < 100; ++k) {
      term *= -z / static_cast<double>(k);
      const Complex add = term / static_cast<double>(k);
      sum += add;
      if (std::abs(add) < eps * std::abs(sum)) break;
    }
    return -std::numbers::egamma - std::log(z) - sum;
  }
  // Continued fraction, modified Lentz.
  constexpr double tiny = 1e-300;
  Complex b = z + 1.0;
  Complex c = 1.0 / tiny;
  Complex d = 1.0 / b;
  Complex h = d;
  for (int i = 1; i < 10000; ++i) {
    const double an = -static_cast<double>(i) * static_cast<double>(i);
    b += 2.0;
    d = 1.0 / (an * d + b);
    c = b + an / c;
    const Complex del = c * d;
    h *= del;
    if (std::abs(del - 1.0) < eps) break;
  }
  return h * std::exp(-z);
}

}  // namespace rzlab
