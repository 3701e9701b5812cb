// Classical zeta reference stack. Everything here is deterministic and serves
// as the oracle for the random models:
//   eta(s)  = sum_{k>=1} (-1)^{k-1} k^{-s}            (Re s > 0)
//   zeta(s) = eta(s) / (1 - 2^{1-s})
//   zeta(s) = 1/(s-1) + sum_n (-1)^n / n! gamma_n (s-1)^n   near s = 1
//   phi(s)  = sum_{n>=2} 1/(ln n n^s),  phi'(s) = 1 - zeta(s)
#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include "rzlab/common.hpp"

namespace rzlab {

struct EtaValue {
  ComplexPoint point;
  Complex value;
  int terms_used = 0;
  double error_bound = 0.0;
};

/// Alternating series accelerated with the Cohen–Rodriguez Villegas–Zagier
/// Chebyshev weights. With k^{-s} = (1/Gamma(s)) int_0^1 x^{k-1} (-ln x)^{s-1} dx,
/// the truncation error after n terms is at most
///   2 Gamma(sigma) / (|Gamma(s)| (3 + sqrt 8)^n),
/// to which a rounding estimate is added. n is chosen so the truncation part is
/// at most tol / 2; error_bound may still exceed tol when rounding dominates.
/// Throws DomainError for sigma <= 0 and ParameterError if n would exceed the
/// term cap.
EtaValue eta(ComplexPoint s, double tol = 1e-13);

/// eta with a fixed number of accelerated terms (no tolerance search).
EtaValue eta_terms(ComplexPoint s, int terms);

/// eta(s) / (1 - 2^{1-s}). Throws SingularityError at s = 1 and wherever the
/// denominator vanishes (s = 1 + 2 pi i k / ln 2).
Complex zeta_via_eta(ComplexPoint s, double tol = 1e-13);

/// Same computation carried out in long double.
std::complex<long double> zeta_via_eta_extended(ComplexPoint s, long double tol = 1e-16L);

/// Euler–Maclaurin corrected Dirichlet series for Re s > 1.
struct DirichletValue {
  Complex value;
  double error_estimate = 0.0;
};
DirichletValue zeta_dirichlet(ComplexPoint s, std::uint64_t terms);

struct StieltjesTable {
  std::vector<double> gamma;  // gamma[n] for n = 0..size-1
  std::uint64_t truncation = 0;
  bool accelerated = true;

  [[nodiscard]] std::size_t size() const { return gamma.size(); }
};

/// sum_{k=1}^{m} (ln k)^n / k - (ln m)^{n+1} / (n + 1). With `accelerate`, the
/// Euler–Maclaurin tail of the sum (through the B_6 term) is subtracted, which
/// removes the O((ln m)^n / m) bias of the raw expression.
double stieltjes_gamma(int n, std::uint64_t m, bool accelerate = true);

StieltjesTable stieltjes_table(int count, std::uint64_t m, bool accelerate = true);

/// Laurent expansion about s = 1 with `terms` Stieltjes constants.
Complex zeta_laurent(ComplexPoint s, const StieltjesTable& gammas, int terms);

/// sum_{n=2}^{N} 1/(ln n n^s); any sigma.
Complex phi_partial(ComplexPoint s, std::uint64_t cutoff);

/// phi_partial plus the Euler–Maclaurin tail
///   E1((s-1) ln N) - f(N)/2 - f'(N)/12,  f(x) = x^{-s}/ln x,
/// giving phi(s) itself for Re s > 1.
Complex phi_with_tail(ComplexPoint s, std::uint64_t cutoff);

/// Exponential integral E1(z) for Re z > 0.
Complex exponential_integral_e1(Complex z);

/// log Gamma(z) for Re z > 0 (Stirling series after upward shift).
Complex log_gamma(Complex z);

}  // namespace rzlab
