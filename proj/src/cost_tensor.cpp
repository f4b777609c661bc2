#include "tbtsp/cost_tensor.hpp"

#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <functional>
#include <iomanip>
#include <sstream>
#include <thread>

#include "tbtsp/dubins.hpp"
#include "tbtsp/trajectory.hpp"

namespace tbtsp {

namespace {

constexpr std::array<char, 4> kMagic = {'T', 'B', 'T', 'C'};
constexpr std::uint32_t kVersion = 1;

// Runs fn(i, j) for every ordered pair of distinct waypoints, pairs dealt
// round-robin to the workers.
void for_each_pair(std::size_t n, unsigned threads,
                   const std::function<void(std::size_t, std::size_t)>& fn) {
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i != j) pairs.emplace_back(i, j);
    }
  }
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(pairs.size())));
  if (threads == 1) {
    for (auto [i, j] : pairs) fn(i, j);
    return;
  }
  std::vector<std::jthread> workers;
  for (unsigned t = 0; t < threads; ++t) {
    workers.emplace_back([&, t] {
      for (std::size_t k = t; k < pairs.size(); k += threads) fn(pairs[k].first, pairs[k].second);
    });
  }
}

template <typename T>
void put(std::ostream& out, T value) {
  static_assert(std::is_trivially_copyable_v<T>);
  std::array<char, sizeof(T)> bytes;
  std::memcpy(bytes.data(), &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes.begin(), bytes.end());
  out.write(bytes.data(), bytes.size());
}

template <typename T>
T get(std::istream& in) {
  std::array<char, sizeof(T)> bytes;
  if (!in.read(bytes.data(), bytes.size())) throw CacheError("truncated cost cache");
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes.begin(), bytes.end());
  T value;
  std::memcpy(&value, bytes.data(), sizeof(T));
  return value;
}

}  // namespace

std::string_view to_string(TensorKind kind) noexcept {
  return kind == TensorKind::kTbtsp ? "tbtsp" : "ddtsp";
}

EdgeCount edge_count(std::size_t n, std::size_t h, std::size_t s) noexcept {
  const std::uint64_t side = static_cast<std::uint64_t>(n) * h * s;
  return {side * side};
}

CostTensor::CostTensor(TensorKind kind, std::size_t n, std::size_t h, std::size_t s)
    : CostTensor(kind, n, h, s, std::vector<double>(edge_count(n, h, s).omega, 0.0)) {
  for (std::size_t i = 0; i < n_; ++i) {
    for (std::size_t ci = 0; ci < configs(); ++ci) {
      for (std::size_t cj = 0; cj < configs(); ++cj) set(i, ci, i, cj, kUnusable);
    }
  }
}

CostTensor::CostTensor(TensorKind kind, std::size_t n, std::size_t h, std::size_t s,
                       std::vector<double> costs)
    : kind_(kind), n_(n), h_(h), s_(s), costs_(std::move(costs)) {
  if (n < 2 || h < 1 || s < 1) throw std::invalid_argument("tensor needs n >= 2, h >= 1, s >= 1");
  if (kind == TensorKind::kDdtsp && s != 1) {
    throw std::invalid_argument("DDTSP tensors have a single speed level");
  }
  if (costs_.size() != edge_count(n, h, s).omega) {
    throw std::invalid_argument("cost table size does not match n^2 h^2 s^2");
  }
}

CostTensor CostTensor::scaled(double factor) const {
  CostTensor out = *this;
  for (double& c : out.costs_) {
    if (c != kUnusable) c *= factor;
  }
  return out;
}

CostTensor build_tbtsp_costs(const Instance& instance, unsigned threads) {
  const auto& scheme = instance.scheme();
  const std::size_t n = instance.size();
  const std::size_t hs = scheme.config_count();
  CostTensor tensor(TensorKind::kTbtsp, n, scheme.heading_count(), scheme.speed_count());

  std::vector<Vec2> velocity(hs);
  for (std::size_t c = 0; c < hs; ++c) {
    velocity[c] = config_velocity({1, static_cast<int>(c / scheme.speed_count()),
                                   static_cast<int>(c % scheme.speed_count())},
                                  scheme);
  }
  const KinematicLimits& limits = instance.limits();
  const auto waypoints = instance.waypoints();

  for_each_pair(n, threads, [&](std::size_t i, std::size_t j) {
    const double dx = waypoints[j].x - waypoints[i].x;
    const double dy = waypoints[j].y - waypoints[i].y;
    for (std::size_t ci = 0; ci < hs; ++ci) {
      for (std::size_t cj = 0; cj < hs; ++cj) {
        tensor.set(i, ci, j, cj,
                   planar_min_duration({0.0, 0.0}, velocity[ci], {dx, dy}, velocity[cj], limits));
      }
    }
  });
  return tensor;
}

CostTensor build_ddtsp_costs(const Instance& instance, unsigned threads) {
  const auto& scheme = instance.scheme();
  const std::size_t n = instance.size();
  const std::size_t h = scheme.heading_count();
  CostTensor tensor(TensorKind::kDdtsp, n, h, 1);
  const auto waypoints = instance.waypoints();
  const auto headings = scheme.headings();

  for_each_pair(n, threads, [&](std::size_t i, std::size_t j) {
    for (std::size_t k = 0; k < h; ++k) {
      const Pose from = make_pose(waypoints[i].x, waypoints[i].y, heading_to_psi(headings[k]));
      for (std::size_t m = 0; m < h; ++m) {
        const Pose to = make_pose(waypoints[j].x, waypoints[j].y, heading_to_psi(headings[m]));
        tensor.set(i, k, j, m, dubins_cost(from, to, instance.limits()));
      }
    }
  });
  return tensor;
}

void write_cache(const CostTensor& tensor, std::uint64_t instance_hash,
                 const std::filesystem::path& path) {
  if (path.empty()) throw CacheError("empty cache path");
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw CacheError("cannot open cache file for writing: " + path.string());
  out.write(kMagic.data(), kMagic.size());
  put<std::uint32_t>(out, kVersion);
  put<std::uint8_t>(out, static_cast<std::uint8_t>(tensor.kind()));
  put<std::uint32_t>(out, static_cast<std::uint32_t>(tensor.n()));
  put<std::uint32_t>(out, static_cast<std::uint32_t>(tensor.h()));
  put<std::uint32_t>(out, static_cast<std::uint32_t>(tensor.s()));
  put<std::uint64_t>(out, instance_hash);
  for (double c : tensor.data()) put<double>(out, c);
  if (!out) throw CacheError("failed writing cache file: " + path.string());
}

CostTensor read_cache(const std::filesystem::path& path, std::uint64_t expected_hash) {
  if (path.empty()) throw CacheError("empty cache path");
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CacheError("cannot open cache file: " + path.string());
  std::array<char, 4> magic{};
  if (!in.read(magic.data(), magic.size()) || magic != kMagic) {
    throw CacheError("not a cost cache file: " + path.string());
  }
  if (get<std::uint32_t>(in) != kVersion) throw CacheError("unsupported cost cache version");
  const auto kind = static_cast<TensorKind>(get<std::uint8_t>(in));
  if (kind != TensorKind::kTbtsp && kind != TensorKind::kDdtsp) {
    throw CacheError("unknown tensor kind in cost cache");
  }
  const std::size_t n = get<std::uint32_t>(in);
  const std::size_t h = get<std::uint32_t>(in);
  const std::size_t s = get<std::uint32_t>(in);
  const std::uint64_t hash = get<std::uint64_t>(in);
  if (hash != expected_hash) {
    std::ostringstream msg;
    msg << "stale cost cache " << path.string() << ": instance hash " << std::hex << hash
        << " != expected " << expected_hash;
    throw StaleCacheError(msg.str());
  }
  std::vector<double> costs(edge_count(n, h, s).omega);
  for (double& c : costs) c = get<double>(in);
  if (in.peek() != std::char_traits<char>::eof()) throw CacheError("trailing bytes in cost cache");
  return CostTensor(kind, n, h, s, std::move(costs));
}

CostTensor cache_roundtrip(const CostTensor& tensor, std::uint64_t instance_hash,
                           const std::filesystem::path& path) {
  write_cache(tensor, instance_hash, path);
  return read_cache(path, instance_hash);
}

std::filesystem::path cache_path(const std::filesystem::path& dir, TensorKind kind,
                                 std::uint64_t instance_hash) {
  std::ostringstream name;
  name << to_string(kind) << '_' << std::hex << std::setw(16) << std::setfill('0')
       << instance_hash << ".bin";
  return dir / name.str();
}

CostTensor load_or_build(const Instance& instance, TensorKind kind,
                         const std::filesystem::path& cache_dir, unsigned threads) {
  auto build = [&] {
    return kind == TensorKind::kTbtsp ? build_tbtsp_costs(instance, threads)
                                      : build_ddtsp_costs(instance, threads);
  };
  if (cache_dir.empty()) return build();
  const std::uint64_t hash = instance_hash(instance);
  const auto path = cache_path(cache_dir, kind, hash);
  if (std::filesystem::exists(path)) return read_cache(path, hash);
  std::filesystem::create_directories(cache_dir);
  CostTensor tensor = build();
  write_cache(tensor, hash, path);
  return tensor;
}

}  // namespace tbtsp
