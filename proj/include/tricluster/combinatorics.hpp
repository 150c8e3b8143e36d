#pragma once

#include <array>
#include <atomic>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <shared_mutex>
#include <vector>

namespace tricluster {

/// Log-domain combinatorics shared by every cost evaluation: ln n!, ln C(n,k),
/// ln S(n,k) (Stirling numbers of the second kind) and
/// ln B(n,k) = ln sum_{j<=k} S(n,j). Natural logarithms throughout.
///
/// Reads are lock-free once a table region exists; growth is serialized.
class CombinatoricsCache {
 public:
  static constexpr std::size_t kChunkBits = 16;
  static constexpr std::size_t kChunkSize = std::size_t{1} << kChunkBits;
  static constexpr std::size_t kMaxChunks = 256;  // table covers n < 2^24
  static constexpr std::int64_t kDefaultStirlingCap = 20000;

  CombinatoricsCache();
  ~CombinatoricsCache();
  CombinatoricsCache(const CombinatoricsCache&) = delete;
  CombinatoricsCache& operator=(const CombinatoricsCache&) = delete;

  static CombinatoricsCache& global();

  double log_factorial(std::uint64_t n) const {
    const auto chunk = n >> kChunkBits;
    if (chunk < kMaxChunks) {
      const double* table = chunks_[chunk].load(std::memory_order_acquire);
      if (table == nullptr) table = grow(chunk);
      return table[n & (kChunkSize - 1)];
    }
    return stirling_series(n);
  }

  double log_binomial(std::int64_t n, std::int64_t k) const;

  /// ln S(n,k) for k = 0..n (entry 0 is -inf for n > 0).
  std::shared_ptr<const std::vector<double>> log_stirling_row(std::int64_t n) const;
  /// ln B(n,k) for k = 0..n (entry 0 is -inf for n > 0).
  std::shared_ptr<const std::vector<double>> log_bell_prefix_row(std::int64_t n) const;

  double log_stirling2(std::int64_t n, std::int64_t k) const;
  double log_sum_stirling(std::int64_t n, std::int64_t kmax) const;

  /// Largest n for which Stirling rows are computed; larger requests throw
  /// std::length_error instead of falling back to an approximation.
  void set_stirling_cap(std::int64_t cap) { stirling_cap_.store(cap); }
  std::int64_t stirling_cap() const { return stirling_cap_.load(); }

 private:
  struct StirlingRows {
    std::shared_ptr<const std::vector<double>> stirling;
    std::shared_ptr<const std::vector<double>> prefix;
  };

  const double* grow(std::uint64_t chunk) const;
  static double stirling_series(std::uint64_t n);
  const StirlingRows& rows(std::int64_t n) const;

  mutable std::array<std::atomic<const double*>, kMaxChunks> chunks_{};
  mutable std::vector<std::unique_ptr<double[]>> owned_;
  mutable std::mutex grow_mutex_;
  mutable long double running_ = 0.0L;  // ln((filled)!) carried between chunks
  mutable std::size_t filled_chunks_ = 0;

  mutable std::shared_mutex stirling_mutex_;
  mutable std::map<std::int64_t, StirlingRows> stirling_rows_;
  std::atomic<std::int64_t> stirling_cap_{kDefaultStirlingCap};
};

inline double log_factorial(std::uint64_t n) { return CombinatoricsCache::global().log_factorial(n); }

/// ln C(n,k). Throws std::domain_error unless 0 <= k <= n.
inline double log_binomial(std::int64_t n, std::int64_t k) {
  return CombinatoricsCache::global().log_binomial(n, k);
}

/// ln B(n,kmax), B(n,kmax) = sum_{k=1}^{kmax} S(n,k). Throws std::domain_error
/// unless 1 <= kmax <= n.
inline double log_sum_stirling(std::int64_t n, std::int64_t kmax) {
  return CombinatoricsCache::global().log_sum_stirling(n, kmax);
}

/// ln(e^a + e^b) without overflow; handles -inf operands.
double log_add_exp(double a, double b) noexcept;

}  // namespace tricluster
