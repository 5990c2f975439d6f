#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <random>

namespace haps {

template <class F>
using V2 = Eigen::Matrix<F, 2, 1>;
template <class F>
using V3 = Eigen::Matrix<F, 3, 1>;
template <class F>
using VX = Eigen::Matrix<F, Eigen::Dynamic, 1>;
template <class F>
using MX = Eigen::Matrix<F, Eigen::Dynamic, Eigen::Dynamic>;

using Vec2 = V2<double>;
using Vec3 = V3<double>;
using VecX = VX<double>;
using MatX = MX<double>;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kSpeedOfLight = 299792458.0;

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double lin) { return 10.0 * std::log10(lin); }

// splitmix64 finalizer; used to derive independent stream seeds from one
// master seed.
inline std::uint64_t mix_seed(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream,
                                 std::uint64_t index = 0) {
  return mix_seed(mix_seed(mix_seed(master) ^ stream) ^ index);
}

// A seeded random stream with value semantics: copying it forks an identical
// sequence.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed = 0) : engine_(seed) {}

  double gaussian() { return normal_(engine_); }
  double uniform() { return uniform_(engine_); }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  Vec2 gaussian2() {
    const double x = gaussian();
    const double y = gaussian();
    return {x, y};
  }
  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

}  // namespace haps
