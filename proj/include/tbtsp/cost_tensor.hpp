#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "tbtsp/model.hpp"

namespace tbtsp {

enum class TensorKind : std::uint8_t { kTbtsp = 1, kDdtsp = 2 };

std::string_view to_string(TensorKind kind) noexcept;

/// Number of edge trajectories n^2 * h^2 * s^2.
struct EdgeCount {
  std::uint64_t omega{0};
};

EdgeCount edge_count(std::size_t n, std::size_t h, std::size_t s) noexcept;

/// Dense travel-time table c(i,k,w -> j,m,l) over zero-based waypoint
/// indices i, j and configuration index c = heading * s + speed.
///
/// Layout is row-major in (i, c, j, c'), so the costs out of one
/// configuration towards one waypoint are contiguous. Entries with i == j
/// hold +infinity and are never usable.
class CostTensor {
 public:
  static constexpr double kUnusable = std::numeric_limits<double>::infinity();

  CostTensor(TensorKind kind, std::size_t n, std::size_t h, std::size_t s);
  CostTensor(TensorKind kind, std::size_t n, std::size_t h, std::size_t s,
             std::vector<double> costs);

  [[nodiscard]] TensorKind kind() const noexcept { return kind_; }
  [[nodiscard]] std::size_t n() const noexcept { return n_; }
  [[nodiscard]] std::size_t h() const noexcept { return h_; }
  [[nodiscard]] std::size_t s() const noexcept { return s_; }
  [[nodiscard]] std::size_t configs() const noexcept { return h_ * s_; }
  [[nodiscard]] EdgeCount edges() const noexcept { return edge_count(n_, h_, s_); }

  [[nodiscard]] std::size_t index(std::size_t i, std::size_t ci, std::size_t j,
                                  std::size_t cj) const noexcept {
    return ((i * configs() + ci) * n_ + j) * configs() + cj;
  }
  [[nodiscard]] double at(std::size_t i, std::size_t ci, std::size_t j,
                          std::size_t cj) const noexcept {
    return costs_[index(i, ci, j, cj)];
  }
  /// Six-index form with zero-based (i, k, w) -> (j, m, l).
  [[nodiscard]] double at(std::size_t i, std::size_t k, std::size_t w, std::size_t j,
                          std::size_t m, std::size_t l) const noexcept {
    return at(i, k * s_ + w, j, m * s_ + l);
  }
  /// Costs from (i, ci) to every configuration of j.
  [[nodiscard]] std::span<const double> row(std::size_t i, std::size_t ci,
                                            std::size_t j) const noexcept {
    return {costs_.data() + index(i, ci, j, 0), configs()};
  }

  void set(std::size_t i, std::size_t ci, std::size_t j, std::size_t cj, double value) noexcept {
    costs_[index(i, ci, j, cj)] = value;
  }

  [[nodiscard]] std::span<const double> data() const noexcept { return costs_; }

  /// Same entries with every usable cost multiplied by `factor`.
  [[nodiscard]] CostTensor scaled(double factor) const;

  friend bool operator==(const CostTensor&, const CostTensor&) = default;

 private:
  TensorKind kind_;
  std::size_t n_;
  std::size_t h_;
  std::size_t s_;
  std::vector<double> costs_;
};

/// Time-optimal axis-split trajectory durations between all configuration
/// pairs of distinct waypoints. Work is split over (i, j) pairs.
CostTensor build_tbtsp_costs(const Instance& instance, unsigned threads = 1);

/// Constant-speed Dubins travel times (s = 1) at the instance's v_max.
CostTensor build_ddtsp_costs(const Instance& instance, unsigned threads = 1);

class CacheError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class StaleCacheError : public CacheError {
 public:
  using CacheError::CacheError;
};

// Binary cache: "TBTC" magic, u32 version, u8 kind, u32 n/h/s, u64 instance
// hash, then n^2 h^2 s^2 little-endian doubles.
void write_cache(const CostTensor& tensor, std::uint64_t instance_hash,
                 const std::filesystem::path& path);
CostTensor read_cache(const std::filesystem::path& path, std::uint64_t expected_hash);
CostTensor cache_roundtrip(const CostTensor& tensor, std::uint64_t instance_hash,
                           const std::filesystem::path& path);

/// `<kind>_<hash>.bin` inside `dir`.
std::filesystem::path cache_path(const std::filesystem::path& dir, TensorKind kind,
                                 std::uint64_t instance_hash);

/// Loads the tensor from the cache directory when present, otherwise builds
/// and stores it. An empty directory disables caching.
CostTensor load_or_build(const Instance& instance, TensorKind kind,
                         const std::filesystem::path& cache_dir, unsigned threads = 1);

}  // namespace tbtsp
