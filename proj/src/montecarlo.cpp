#include "volsos/montecarlo.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

#include "volsos/errors.hpp"
#include "volsos/rng.hpp"

namespace volsos::mc {

void draw_point(const OuterDomain& x, CounterRng& rng, std::span<double> out) {
  const int n = x.dimension();
  if (x.shape() == OuterDomain::Shape::Box) {
    for (int k = 0; k < n; ++k) {
      const double a = x.half_widths()[k];
      out[k] = rng.uniform(-a, a);
    }
    return;
  }
  // Gaussian direction, radius U^(1/n) R.
  double norm = 0.0;
  do {
    norm = 0.0;
    for (int k = 0; k < n; ++k) {
      out[k] = rng.normal();
      norm += out[k] * out[k];
    }
  } while (norm == 0.0);
  norm = std::sqrt(norm);
  const double radius = std::pow(rng.uniform(), 1.0 / n) * x.radius();
  for (int k = 0; k < n; ++k) out[k] *= radius / norm;
}

void parallel_for(std::int64_t count, const std::function<void(std::int64_t)>& fn) {
  const std::int64_t workers =
      std::min<std::int64_t>(count, std::max<unsigned>(1, std::thread::hardware_concurrency()));
  if (workers <= 1) {
    for (std::int64_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::int64_t> next{0};
  std::vector<std::thread> threads;
  for (std::int64_t w = 0; w < workers; ++w)
    threads.emplace_back([&] {
      for (std::int64_t i = next++; i < count; i = next++) fn(i);
    });
  for (auto& t : threads) t.join();
}

void for_each_chunk(const OuterDomain& x, std::int64_t count, std::uint64_t seed, std::uint64_t stream_base,
                    const std::function<void(std::int64_t, std::int64_t, std::int64_t, std::span<const double>)>& fn) {
  if (count < 1) throw Error("sample count must be >= 1");
  const int n = x.dimension();
  const std::int64_t chunks = (count + kChunkSize - 1) / kChunkSize;
  parallel_for(chunks, [&](std::int64_t c) {
    const std::int64_t first = c * kChunkSize;
    const std::int64_t size = std::min(kChunkSize, count - first);
    CounterRng rng(seed, stream_base + static_cast<std::uint64_t>(c));
    std::vector<double> points(static_cast<std::size_t>(size * n));
    for (std::int64_t i = 0; i < size; ++i) draw_point(x, rng, std::span<double>(points).subspan(i * n, n));
    fn(c, first, size, points);
  });
}

std::vector<Point> sample(const OuterDomain& x, std::int64_t count, std::uint64_t seed, std::uint64_t stream_base) {
  const int n = x.dimension();
  std::vector<Point> out(static_cast<std::size_t>(count));
  for_each_chunk(x, count, seed, stream_base,
                 [&](std::int64_t, std::int64_t first, std::int64_t size, std::span<const double> pts) {
                   for (std::int64_t i = 0; i < size; ++i)
                     out[first + i].assign(pts.begin() + i * n, pts.begin() + (i + 1) * n);
                 });
  return out;
}

VolumeEstimate volume(const SemialgebraicSet& k, const OuterDomain& x, std::int64_t count, std::uint64_t seed) {
  if (k.dimension() != x.dimension()) throw DimensionMismatch("K and X have different dimensions");
  const int n = x.dimension();
  const std::int64_t chunks = (count + kChunkSize - 1) / kChunkSize;
  std::vector<std::int64_t> hits(static_cast<std::size_t>(chunks), 0);
  for_each_chunk(x, count, seed, 0, [&](std::int64_t c, std::int64_t, std::int64_t size, std::span<const double> pts) {
    std::int64_t h = 0;
    for (std::int64_t i = 0; i < size; ++i) h += k.contains(pts.subspan(i * n, n)) ? 1 : 0;
    hits[c] = h;
  });
  VolumeEstimate est;
  est.samples = count;
  est.seed = seed;
  for (auto h : hits) est.hits += h;
  const double frac = static_cast<double>(est.hits) / static_cast<double>(count);
  est.value = x.volume() * frac;
  est.std_error = x.volume() * std::sqrt(frac * (1.0 - frac) / static_cast<double>(count));
  return est;
}

}  // namespace volsos::mc
