#include "tricluster/combinatorics.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

namespace tricluster {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
}

double log_add_exp(double a, double b) noexcept {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  if (a < b) std::swap(a, b);
  return a + std::log1p(std::exp(b - a));
}

CombinatoricsCache::CombinatoricsCache() {
  for (auto& c : chunks_) c.store(nullptr, std::memory_order_relaxed);
}

CombinatoricsCache::~CombinatoricsCache() = default;

CombinatoricsCache& CombinatoricsCache::global() {
  static CombinatoricsCache cache;
  return cache;
}

const double* CombinatoricsCache::grow(std::uint64_t chunk) const {
  std::lock_guard lock(grow_mutex_);
  while (filled_chunks_ <= chunk) {
    auto table = std::make_unique<double[]>(kChunkSize);
    const std::uint64_t base = filled_chunks_ * kChunkSize;
    for (std::size_t r = 0; r < kChunkSize; ++r) {
      const std::uint64_t n = base + r;
      if (n > 1) running_ += std::log(static_cast<long double>(n));
      table[r] = static_cast<double>(running_);
    }
    chunks_[filled_chunks_].store(table.get(), std::memory_order_release);
    owned_.push_back(std::move(table));
    ++filled_chunks_;
  }
  return chunks_[chunk].load(std::memory_order_acquire);
}

double CombinatoricsCache::stirling_series(std::uint64_t n) {
  // Only used for n >= 2^24, where the truncated series is exact to double precision.
  const long double x = static_cast<long double>(n);
  const long double inv = 1.0L / x;
  const long double inv2 = inv * inv;
  const long double series = inv / 12.0L - inv * inv2 / 360.0L + inv * inv2 * inv2 / 1260.0L;
  return static_cast<double>(x * std::log(x) - x + 0.5L * std::log(2.0L * std::numbers::pi_v<long double> * x) +
                             series);
}

double CombinatoricsCache::log_binomial(std::int64_t n, std::int64_t k) const {
  if (k < 0 || n < 0 || k > n) {
    throw std::domain_error("log_binomial: need 0 <= k <= n, got n=" + std::to_string(n) +
                            " k=" + std::to_string(k));
  }
  return log_factorial(static_cast<std::uint64_t>(n)) - log_factorial(static_cast<std::uint64_t>(k)) -
         log_factorial(static_cast<std::uint64_t>(n - k));
}

const CombinatoricsCache::StirlingRows& CombinatoricsCache::rows(std::int64_t n) const {
  if (n < 0) throw std::domain_error("Stirling numbers need n >= 0");
  {
    std::shared_lock lock(stirling_mutex_);
    auto it = stirling_rows_.find(n);
    if (it != stirling_rows_.end()) return it->second;
  }
  if (n > stirling_cap_.load()) {
    throw std::length_error("Stirling table request n=" + std::to_string(n) + " exceeds the cap " +
                            std::to_string(stirling_cap_.load()));
  }
  // Rolling rows of ln S(r,k) = ln(k S(r-1,k) + S(r-1,k-1)).
  std::vector<double> row(static_cast<std::size_t>(n) + 1, kNegInf);
  std::vector<double> log_k(row.size(), kNegInf);
  for (std::int64_t k = 1; k <= n; ++k) log_k[k] = std::log(static_cast<double>(k));
  row[0] = 0.0;  // S(0,0) = 1
  for (std::int64_t r = 1; r <= n; ++r) {
    for (std::int64_t k = r; k >= 1; --k) {
      const double keep = row[k] == kNegInf ? kNegInf : log_k[k] + row[k];
      row[k] = log_add_exp(keep, row[k - 1]);
    }
    row[0] = kNegInf;
  }
  std::vector<double> prefix(row.size(), kNegInf);
  if (n == 0) prefix[0] = 0.0;
  for (std::int64_t k = 1; k <= n; ++k) prefix[k] = log_add_exp(prefix[k - 1], row[k]);

  std::unique_lock lock(stirling_mutex_);
  auto [it, inserted] = stirling_rows_.try_emplace(
      n, StirlingRows{std::make_shared<const std::vector<double>>(std::move(row)),
                      std::make_shared<const std::vector<double>>(std::move(prefix))});
  return it->second;
}

std::shared_ptr<const std::vector<double>> CombinatoricsCache::log_stirling_row(std::int64_t n) const {
  return rows(n).stirling;
}

std::shared_ptr<const std::vector<double>> CombinatoricsCache::log_bell_prefix_row(std::int64_t n) const {
  return rows(n).prefix;
}

double CombinatoricsCache::log_stirling2(std::int64_t n, std::int64_t k) const {
  if (k < 0 || k > n) return kNegInf;
  return (*rows(n).stirling)[static_cast<std::size_t>(k)];
}

double CombinatoricsCache::log_sum_stirling(std::int64_t n, std::int64_t kmax) const {
  if (kmax < 1 || kmax > n) {
    throw std::domain_error("log_sum_stirling: need 1 <= kmax <= n, got n=" + std::to_string(n) +
                            " kmax=" + std::to_string(kmax));
  }
  return (*rows(n).prefix)[static_cast<std::size_t>(kmax)];
}

}  // namespace tricluster
