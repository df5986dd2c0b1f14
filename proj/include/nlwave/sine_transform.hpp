#pragma once

// Thin FFTW wrapper for the two real-to-real transforms the radial calculus
// needs:
//   DST-I  (RODFT00): y_k = 2 sum_{j=1}^{n} x_j sin(pi j k / (n+1)),  k = 1..n
//   DCT-I  (REDFT00): y_j = x_0 + (-1)^j x_{m-1}
//                           + 2 sum_{k=1}^{m-2} x_k cos(pi j k / (m-1))
// Plans are created once per (kind, size) under a mutex and executed with the
// new-array interface, which FFTW documents as thread safe.

#include <fftw3.h>

#include <map>
#include <mutex>
#include <span>
#include <utility>
#include <vector>

#include "nlwave/error.hpp"

namespace nlwave::detail {

enum class R2RKind { dst1, dct1 };

class PlanCache {
 public:
  static PlanCache& instance() {
    static PlanCache cache;
    return cache;
  }

  PlanCache(const PlanCache&) = delete;
  PlanCache& operator=(const PlanCache&) = delete;

  fftw_plan get(R2RKind kind, int n) {
    std::lock_guard<std::mutex> lock(mutex_);
    auto key = std::make_pair(kind, n);
    auto it = plans_.find(key);
    if (it != plans_.end()) return it->second;
    std::vector<double> in(static_cast<std::size_t>(n)), out(static_cast<std::size_t>(n));
    const fftw_r2r_kind k = kind == R2RKind::dst1 ? FFTW_RODFT00 : FFTW_REDFT00;
    // ESTIMATE keeps plan selection deterministic; UNALIGNED lets us execute on
    // std::vector storage of any alignment.
    fftw_plan p = fftw_plan_r2r_1d(n, in.data(), out.data(), k,
                                   FFTW_ESTIMATE | FFTW_UNALIGNED | FFTW_PRESERVE_INPUT);
    if (p == nullptr) throw Error("FFTW failed to create an r2r plan");
    plans_.emplace(key, p);
    return p;
  }

 private:
  PlanCache() = default;
  ~PlanCache() {
    for (auto& [key, plan] : plans_) fftw_destroy_plan(plan);
  }

  std::mutex mutex_;
  std::map<std::pair<R2RKind, int>, fftw_plan> plans_;
};

// out may not alias in.
inline void r2r(R2RKind kind, std::span<const double> in, std::span<double> out) {
  if (in.size() != out.size() || in.empty())
    throw InvalidArgument("r2r: size mismatch or empty input");
  if (kind == R2RKind::dct1 && in.size() < 2)
    throw InvalidArgument("r2r: DCT-I needs at least two points");
  fftw_plan p = PlanCache::instance().get(kind, static_cast<int>(in.size()));
  // FFTW's r2r plans do not modify the input of an out-of-place transform.
  fftw_execute_r2r(p, const_cast<double*>(in.data()), out.data());
}

}  // namespace nlwave::detail
