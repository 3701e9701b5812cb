// Locally symmetric pseudo-prime blocks.
//
// Block n spans [A_n, A_{n+1}] with A_1 = 1, A_{n+1} = A_n + 2 B_n and centre
// C_n = A_n + B_n. Offsets xi_i = floor(B_n eta_i), eta_i ~ U(0,1), are placed
// mirror-symmetrically: the 2k pseudo-primes are C_n - xi_i and C_n + xi_i.
// The linear terms of sum_j P_{n,j}^{-s} then cancel pairwise.
#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "rzlab/common.hpp"
#include "rzlab/random_zeta.hpp"
#include "rzlab/rng.hpp"

namespace rzlab {

// Block coordinates outgrow 64 bits quickly (A_n ~ n^{beta+1}).
using Wide = __int128;

std::string to_string_wide(Wide v);

enum class KRule { Sqrt, Constant };

struct BlockParams {
  double beta = 2.0;  // B_n = max(1, floor(n^beta))
  KRule k_rule = KRule::Sqrt;
  std::uint64_t k0 = 1;  // used by KRule::Constant
  std::uint64_t n_blocks = 1;
};

struct SymmetricBlock {
  std::uint64_t index = 0;
  Wide A = 0;
  Wide B = 0;
  Wide C = 0;
  std::vector<Wide> xi;      // k offsets in [0, B)
  std::vector<Wide> primes;  // C - xi_1..C - xi_k, then C + xi_1..C + xi_k

  [[nodiscard]] std::uint64_t k() const { return xi.size(); }
};

std::uint64_t block_k(const BlockParams& params, std::uint64_t n);
Wide block_width(double beta, std::uint64_t n);

/// Key of the substream that supplies the offsets of block n.
StreamKey block_stream_key(const StreamKey& key, std::uint64_t n);

/// k offsets floor(B eta) from the given block stream.
std::vector<Wide> draw_offsets(Wide width, std::uint64_t k, const StreamKey& block_key);

/// Sequential block generator; blocks depend on their predecessors only
/// through A_n.
class BlockGenerator {
 public:
  BlockGenerator(BlockParams params, StreamKey key);
  SymmetricBlock next();

 private:
  BlockParams params_;
  StreamKey key_;
  std::uint64_t n_ = 1;
  Wide a_ = 1;
};

std::vector<SymmetricBlock> build_blocks(const BlockParams& params, const StreamKey& key);

struct BlockFirstSum {
  Complex exact;      // sum_j P_{n,j}^{-s}
  Complex predicted;  // 2k C^{-s} + s(s+1) sum xi^2 / C^{2+s}
  double residual = 0.0;
  // k B^3 / C^{3+sigma}: scale of the first neglected term.
  double third_order_scale = 0.0;
  // k B / C^{1+sigma}: size the linear terms would have without cancellation.
  double first_order_scale = 0.0;
  // |exact - 2k C^{-s}|
  double first_order_deviation = 0.0;
};

/// The exact sum is evaluated as C^{-s} sum_i [(1 - x_i)^{-s} + (1 + x_i)^{-s}],
/// x_i = xi_i / C, with expm1/log1p so the residual is not lost to cancellation.
BlockFirstSum block_first_sum(const SymmetricBlock& block, ComplexPoint s);

struct CltRow {
  std::uint64_t block = 0;
  std::uint64_t k = 0;
  std::uint64_t replica = 0;
  double statistic = 0.0;  // (sum xi^2 - k B^2/3) / (B^2 sqrt(4k/45))
};

struct CltSummary {
  std::uint64_t block = 0;
  std::uint64_t k = 0;
  double mean = 0.0;
  double variance = 0.0;
  double skew = 0.0;
  bool regime_warning = false;  // k < 30
  // Replica mean of s(s+1) sum xi^2 / C^{2+s} against k s(s+1) B^2 / (3 C^{2+s}).
  Complex second_order_mean;
  Complex second_order_predicted;
};

struct CltTable {
  std::vector<CltRow> rows;
  std::vector<CltSummary> summary;
  bool regime_warning = false;
};

inline constexpr std::uint64_t kCltMinK = 30;

/// Redraws the offsets of each given block once per replica, using the same
/// block substreams as build_blocks (replica r reproduces replica r's blocks).
CltTable clt_fluctuation_check(std::span<const SymmetricBlock> blocks, ComplexPoint s, std::uint64_t replicas,
                               const StreamKey& key, unsigned threads = 1);

/// exp(sum_{m<=M} (1/m) sum_{n,j} P^{-ms}) with multiplicity; M = 0 picks the
/// default order.
ComplexEvaluation tilde_zeta_partial(std::span<const SymmetricBlock> blocks, ComplexPoint s, int order = 0);

/// Direct product of (1 - P^{-s})^{-1} with multiplicity.
Complex tilde_zeta_product(std::span<const SymmetricBlock> blocks, ComplexPoint s);

struct RegionScanConfig {
  std::vector<double> betas;
  std::vector<double> eps;  // real parts sigma > 0
  std::uint64_t n_blocks = 4096;
  std::uint64_t replicas = 1;
  StreamKey key;
  unsigned threads = 1;
};

struct RegionRow {
  double beta = 0.0;
  double eps = 0.0;
  std::uint64_t replica = 0;
  std::uint64_t n_blocks = 0;
  std::uint64_t checkpoint = 0;
  double abs_partial = 0.0;
  bool converged = false;
};

struct RegionCell {
  double beta = 0.0;
  double eps = 0.0;
  double converged_fraction = 0.0;
};

struct RegionTable {
  std::vector<RegionRow> rows;  // ordered by (beta, eps, replica, checkpoint)
  std::vector<RegionCell> cells;
  std::string criterion;
};

inline constexpr double kCauchyTolerance = 1e-6;

/// Converged iff, for partial sums S at N = n_blocks/4, 2N, 4N of the first sum
/// sum_{n,j} P^{-eps}: |S(4N) - S(2N)| < |S(2N) - S(N)| and
/// |S(4N) - S(2N)| < 1e-6 (1 + |S(4N)|).
bool cauchy_converged(double s_n, double s_2n, double s_4n);

/// Partial-sum checkpoints used by the scan: n_blocks / 2^j down to 1, ascending.
std::vector<std::uint64_t> region_checkpoints(std::uint64_t n_blocks);

RegionTable convergence_region_scan(const RegionScanConfig& config);

}  // namespace rzlab
