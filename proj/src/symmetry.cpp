#include "rzlab/symmetry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "rzlab/parallel.hpp"

namespace rzlab {

namespace {

constexpr Wide kWideLimit = static_cast<Wide>(1) << 124;

void require_positive_sigma(ComplexPoint s, const char* who) {
  if (!s.finite()) throw ParameterError(std::string(who) + ": non-finite point");
  if (!(s.sigma > 0.0)) throw DomainError(std::string(who) + ": requires sigma > 0, got " + to_string(s));
}

double log_wide(Wide v) { return std::log(static_cast<double>(v)); }

// expm1 on the complex plane: e^{a+ib} - 1 without cancellation near 0.
Complex complex_expm1(Complex z) {
  const double a = z.real();
  const double b = z.imag();
  if (b == 0.0) return {std::expm1(a), 0.0};
  const double half = std::sin(0.5 * b);
  const double cos_m1 = -2.0 * half * half;
  return {std::expm1(a) * std::cos(b) + cos_m1, std::exp(a) * std::sin(b)};
}

void check_primes(const SymmetricBlock& block) {
  for (const Wide p : block.primes) {
    if (p < 2) {
      throw IntegrityError("block " + std::to_string(block.index) + ": pseudo-prime " + to_string_wide(p) + " < 2");
    }
  }
}

}  // namespace

std::string to_string_wide(Wide v) {
  if (v == 0) return "0";
  const bool negative = v < 0;
  unsigned __int128 u = negative ? static_cast<unsigned __int128>(-(v + 1)) + 1 : static_cast<unsigned __int128>(v);
  std::string digits;
  while (u > 0) {
    digits.push_back(static_cast<char>('0' + static_cast<int>(u % 10)));
    u /= 10;
  }
  if (negative) digits.push_back('-');
  std::reverse(digits.begin(), digits.end());
  return digits;
}

std::uint64_t block_k(const BlockParams& params, std::uint64_t n) {
  if (params.k_rule == KRule::Constant) {
    if (params.k0 < 1) throw ParameterError("block_k: k0 must be >= 1");
    return params.k0;
  }
  auto r = static_cast<std::uint64_t>(std::sqrt(static_cast<double>(n)));
  while (r * r > n) --r;
  while ((r + 1) * (r + 1) <= n) ++r;
  return r * r == n ? r : r + 1;
}

Wide block_width(double beta, std::uint64_t n) {
  if (!(beta > 0.0) || !std::isfinite(beta)) throw ParameterError("block_width: beta must be positive");
  if (n < 1) throw ParameterError("block_width: n must be >= 1");
  Wide width = 0;
  if (beta == std::floor(beta) && beta <= 32.0) {
    width = 1;
    for (int e = 0; e < static_cast<int>(beta); ++e) {
      if (width > kWideLimit / static_cast<Wide>(n)) throw ParameterError("block_width: B_n overflows");
      width *= static_cast<Wide>(n);
    }
  } else {
    const long double w = std::floor(std::pow(static_cast<long double>(n), static_cast<long double>(beta)));
    if (!(w < static_cast<long double>(kWideLimit))) throw ParameterError("block_width: B_n overflows");
    width = static_cast<Wide>(w);
  }
  return std::max<Wide>(width, 1);
}

StreamKey block_stream_key(const StreamKey& key, std::uint64_t n) { return key.child("block/" + std::to_string(n)); }

std::vector<Wide> draw_offsets(Wide width, std::uint64_t k, const StreamKey& block_key) {
  RandomStream rng = derive_substream(block_key);
  std::vector<Wide> xi(k);
  const auto w = static_cast<long double>(width);
  for (auto& x : xi) {
    const long double eta = static_cast<long double>(rng.uniform01());
    auto v = static_cast<Wide>(std::floor(w * eta));
    x = std::clamp<Wide>(v, 0, width - 1);
  }
  return xi;
}

BlockGenerator::BlockGenerator(BlockParams params, StreamKey key) : params_(params), key_(std::move(key)) {
  if (!(params_.beta > 0.0) || !std::isfinite(params_.beta)) throw ParameterError("blocks: beta must be positive");
  if (params_.k_rule == KRule::Constant && params_.k0 < 1) throw ParameterError("blocks: k0 must be >= 1");
}

SymmetricBlock BlockGenerator::next() {
  SymmetricBlock block;
  block.index = n_;
  block.A = a_;
  block.B = block_width(params_.beta, n_);
  if (block.A > kWideLimit - 2 * block.B) throw ParameterError("blocks: A_n overflows 124 bits");
  block.C = block.A + block.B;
  block.xi = draw_offsets(block.B, block_k(params_, n_), block_stream_key(key_, n_));
  block.primes.reserve(2 * block.xi.size());
  for (const Wide x : block.xi) block.primes.push_back(block.C - x);
  for (const Wide x : block.xi) block.primes.push_back(block.C + x);
  a_ = block.A + 2 * block.B;
  ++n_;
  return block;
}

std::vector<SymmetricBlock> build_blocks(const BlockParams& params, const StreamKey& key) {
  if (params.n_blocks < 1) throw ParameterError("build_blocks: n_blocks must be >= 1");
  BlockGenerator gen(params, key);
  std::vector<SymmetricBlock> blocks;
  blocks.reserve(params.n_blocks);
  for (std::uint64_t n = 0; n < params.n_blocks; ++n) blocks.push_back(gen.next());
  return blocks;
}

BlockFirstSum block_first_sum(const SymmetricBlock& block, ComplexPoint s) {
  require_positive_sigma(s, "block_first_sum");
  check_primes(block);
  const Complex sv = s.value();
  const double log_c = log_wide(block.C);
  const Complex c_pow = dirichlet_power(log_c, s);
  const auto c = static_cast<long double>(block.C);

  CompensatedComplexSum deviation;  // sum_i [(1 - x)^{-s} + (1 + x)^{-s} - 2]
  CompensatedSum squares;           // sum_i x_i^2
  for (const Wide xi : block.xi) {
    const auto x = static_cast<double>(static_cast<long double>(xi) / c);
    deviation.add(complex_expm1(-sv * std::log1p(-x)));
    deviation.add(complex_expm1(-sv * std::log1p(x)));
    squares.add(x * x);
  }
  const double k = static_cast<double>(block.k());
  const Complex second = sv * (sv + 1.0) * squares.value();

  BlockFirstSum out;
  out.exact = c_pow * (2.0 * k + deviation.value());
  out.predicted = c_pow * (2.0 * k + second);
  out.residual = std::abs(c_pow * (deviation.value() - second));
  const double ratio = static_cast<double>(static_cast<long double>(block.B) / c);
  const double c_sigma = std::exp(-s.sigma * log_c);
  out.third_order_scale = k * ratio * ratio * ratio * c_sigma;
  out.first_order_scale = k * ratio * c_sigma;
  out.first_order_deviation = std::abs(c_pow * deviation.value());
  return out;
}

CltTable clt_fluctuation_check(std::span<const SymmetricBlock> blocks, ComplexPoint s, std::uint64_t replicas,
                               const StreamKey& key, unsigned threads) {
  require_positive_sigma(s, "clt_fluctuation_check");
  if (replicas < 2) throw ParameterError("clt_fluctuation_check: replicas must be >= 2");
  if (blocks.empty()) throw ParameterError("clt_fluctuation_check: no blocks given");

  struct Draw {
    double statistic = 0.0;
    double squares_scaled = 0.0;  // sum (xi / C)^2
  };
  const std::size_t nb = blocks.size();
  const auto draws = parallel_map(replicas, threads, [&](std::size_t r) {
    std::vector<Draw> out(nb);
    const StreamKey rk = key.with_replica(r);
    for (std::size_t b = 0; b < nb; ++b) {
      const SymmetricBlock& blk = blocks[b];
      const std::vector<Wide> xi = draw_offsets(blk.B, blk.k(), block_stream_key(rk, blk.index));
      const auto width = static_cast<long double>(blk.B);
      const auto c = static_cast<long double>(blk.C);
      long double sum_sq = 0.0L;  // in units of B^2
      for (const Wide x : xi) {
        const long double u = static_cast<long double>(x) / width;
        sum_sq += u * u;
      }
      const double k = static_cast<double>(xi.size());
      out[b].statistic = static_cast<double>((sum_sq - k / 3.0L) / std::sqrt(4.0L * k / 45.0L));
      out[b].squares_scaled = static_cast<double>(sum_sq * (width / c) * (width / c));
    }
    return out;
  });

  CltTable table;
  table.rows.reserve(nb * replicas);
  const Complex sv = s.value();
  for (std::size_t b = 0; b < nb; ++b) {
    const SymmetricBlock& blk = blocks[b];
    CltSummary sum;
    sum.block = blk.index;
    sum.k = blk.k();
    sum.regime_warning = blk.k() < kCltMinK;
    table.regime_warning = table.regime_warning || sum.regime_warning;

    CompensatedSum m1, sq_mean;
    for (std::uint64_t r = 0; r < replicas; ++r) {
      m1.add(draws[r][b].statistic);
      sq_mean.add(draws[r][b].squares_scaled);
    }
    const double n = static_cast<double>(replicas);
    sum.mean = m1.value() / n;
    CompensatedSum m2, m3;
    for (std::uint64_t r = 0; r < replicas; ++r) {
      const double d = draws[r][b].statistic - sum.mean;
      m2.add(d * d);
      m3.add(d * d * d);
    }
    sum.variance = m2.value() / (n - 1.0);
    const double pop_var = m2.value() / n;
    sum.skew = pop_var > 0.0 ? (m3.value() / n) / std::pow(pop_var, 1.5) : 0.0;

    const Complex c_pow = dirichlet_power(log_wide(blk.C), s);
    const double ratio = static_cast<double>(static_cast<long double>(blk.B) / static_cast<long double>(blk.C));
    sum.second_order_mean = sv * (sv + 1.0) * c_pow * (sq_mean.value() / n);
    sum.second_order_predicted = sv * (sv + 1.0) * c_pow * (static_cast<double>(blk.k()) * ratio * ratio / 3.0);
    table.summary.push_back(sum);
  }
  for (std::size_t b = 0; b < nb; ++b) {
    for (std::uint64_t r = 0; r < replicas; ++r) {
      table.rows.push_back({blocks[b].index, blocks[b].k(), r, draws[r][b].statistic});
    }
  }
  return table;
}

ComplexEvaluation tilde_zeta_partial(std::span<const SymmetricBlock> blocks, ComplexPoint s, int order) {
  require_positive_sigma(s, "tilde_zeta_partial");
  if (order < 0) throw ParameterError("tilde_zeta_partial: order must be >= 1 (or 0 for automatic)");
  EulerLogAccumulator acc(s, order == 0 ? default_log_order(s.sigma) : order);
  std::uint64_t count = 0;
  for (const SymmetricBlock& blk : blocks) {
    check_primes(blk);
    for (const Wide p : blk.primes) {
      acc.add(log_wide(p));
      ++count;
    }
  }
  return acc.evaluation(count);
}

Complex tilde_zeta_product(std::span<const SymmetricBlock> blocks, ComplexPoint s) {
  require_positive_sigma(s, "tilde_zeta_product");
  Complex product = 1.0;
  for (const SymmetricBlock& blk : blocks) {
    check_primes(blk);
    for (const Wide p : blk.primes) {
      const Complex factor = 1.0 - dirichlet_power(log_wide(p), s);
      if (std::abs(factor) < 1e-14) {
        throw SingularityError("tilde_zeta_product: factor for P = " + to_string_wide(p) + " vanishes at s = " +
                               to_string(s));
      }
      product /= factor;
    }
  }
  return product;
}

bool cauchy_converged(double s_n, double s_2n, double s_4n) {
  const double d1 = std::fabs(s_2n - s_n);
  const double d2 = std::fabs(s_4n - s_2n);
  return d2 < d1 && d2 < kCauchyTolerance * (1.0 + std::fabs(s_4n));
}

std::vector<std::uint64_t> region_checkpoints(std::uint64_t n_blocks) {
  std::vector<std::uint64_t> out;
  for (std::uint64_t n = n_blocks; n >= 1; n /= 2) out.push_back(n);
  std::reverse(out.begin(), out.end());
  return out;
}

RegionTable convergence_region_scan(const RegionScanConfig& cfg) {
  if (cfg.betas.empty() || cfg.eps.empty()) throw ParameterError("region_scan: beta and eps lists must be non-empty");
  for (const double b : cfg.betas) {
    if (!(b > 0.0) || !std::isfinite(b)) throw ParameterError("region_scan: beta values must be positive");
  }
  for (const double e : cfg.eps) {
    if (!(e > 0.0) || !std::isfinite(e)) throw ParameterError("region_scan: eps values must be positive");
  }
  if (cfg.n_blocks < 4 || (cfg.n_blocks & (cfg.n_blocks - 1)) != 0) {
    throw ParameterError("region_scan: n_blocks must be a power of two >= 4");
  }
  if (cfg.replicas < 1) throw ParameterError("region_scan: replicas must be >= 1");

  const std::vector<std::uint64_t> checkpoints = region_checkpoints(cfg.n_blocks);
  const std::size_t n_eps = cfg.eps.size();
  const std::size_t n_cp = checkpoints.size();
  const std::uint64_t replicas = cfg.replicas;

  // One task per (beta, replica); each yields partial sums [eps][checkpoint].
  const auto partials = parallel_map(cfg.betas.size() * replicas, cfg.threads, [&](std::size_t task) {
    const double beta = cfg.betas[task / replicas];
    const std::uint64_t r = task % replicas;
    BlockParams params{beta, KRule::Sqrt, 1, cfg.n_blocks};
    BlockGenerator gen(params, cfg.key.with_replica(r));
    std::vector<CompensatedSum> sums(n_eps);
    std::vector<std::vector<double>> out(n_eps, std::vector<double>(n_cp));
    std::size_t next_cp = 0;
    for (std::uint64_t n = 1; n <= cfg.n_blocks; ++n) {
      const SymmetricBlock blk = gen.next();
      for (const Wide p : blk.primes) {
        const double lp = log_wide(p);
        for (std::size_t e = 0; e < n_eps; ++e) sums[e].add(std::exp(-cfg.eps[e] * lp));
      }
      if (n == checkpoints[next_cp]) {
        for (std::size_t e = 0; e < n_eps; ++e) out[e][next_cp] = sums[e].value();
        ++next_cp;
      }
    }
    return out;
  });

  RegionTable table;
  table.criterion =
      "partial sums S of sum_{n,j} P^{-eps} at N = n_blocks/4, 2N, 4N: converged iff |S(4N)-S(2N)| < |S(2N)-S(N)| "
      "and |S(4N)-S(2N)| < 1e-6*(1+|S(4N)|)";
  table.rows.reserve(cfg.betas.size() * n_eps * replicas * n_cp);
  for (std::size_t b = 0; b < cfg.betas.size(); ++b) {
    for (std::size_t e = 0; e < n_eps; ++e) {
      std::uint64_t hits = 0;
      for (std::uint64_t r = 0; r < replicas; ++r) {
        const std::vector<double>& s = partials[b * replicas + r][e];
        const bool ok = cauchy_converged(s[n_cp - 3], s[n_cp - 2], s[n_cp - 1]);
        hits += ok ? 1 : 0;
        for (std::size_t c = 0; c < n_cp; ++c) {
          table.rows.push_back({cfg.betas[b], cfg.eps[e], r, cfg.n_blocks, checkpoints[c], std::fabs(s[c]), ok});
        }
      }
      table.cells.push_back(
          {cfg.betas[b], cfg.eps[e], static_cast<double>(hits) / static_cast<double>(replicas)});
    }
  }
  return table;
}

}  // namespace rzlab
