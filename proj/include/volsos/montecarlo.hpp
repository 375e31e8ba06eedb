#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "volsos/rng.hpp"
#include "volsos/semialg.hpp"

namespace volsos::mc {

// Samples are produced in fixed chunks; chunk c uses stream (stream_base + c)
// of the counter-based generator, so results do not depend on thread count.
inline constexpr std::int64_t kChunkSize = 4096;

struct VolumeEstimate {
  double value = 0.0;
  double std_error = 0.0;
  std::int64_t samples = 0;
  std::uint64_t seed = 0;
  std::int64_t hits = 0;
};

using Point = std::vector<double>;

// Draws one uniform point of X into out.
void draw_point(const OuterDomain& x, CounterRng& rng, std::span<double> out);

std::vector<Point> sample(const OuterDomain& x, std::int64_t count, std::uint64_t seed, std::uint64_t stream_base = 0);

// Streams `count` uniform points of X through fn(chunk, first, size, points).
// Chunks may run on worker threads; fn must only touch per-chunk state.
void for_each_chunk(const OuterDomain& x, std::int64_t count, std::uint64_t seed, std::uint64_t stream_base,
                    const std::function<void(std::int64_t chunk, std::int64_t first, std::int64_t size,
                                             std::span<const double> points)>& fn);

// Runs fn(i) for i in [0, count) on up to hardware_concurrency threads.
void parallel_for(std::int64_t count, const std::function<void(std::int64_t)>& fn);

VolumeEstimate volume(const SemialgebraicSet& k, const OuterDomain& x, std::int64_t count, std::uint64_t seed);

}  // namespace volsos::mc
