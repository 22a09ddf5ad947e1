#include "pimetro/stochastics.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "pimetro/parallel.hpp"

namespace pimetro {

namespace {

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::uint64_t mix64(std::uint64_t x) {
  std::uint64_t s = x;
  return splitmix64(s);
}

constexpr std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

// Samples per independently seeded chunk of a reciprocal-study grid point.
constexpr std::uint64_t kReciprocalChunk = 1u << 20;

}  // namespace

Rng::Rng(std::uint64_t seed) : seed_(seed) {
  std::uint64_t sm = seed;
  for (auto& word : s_) word = splitmix64(sm);
}

std::uint64_t Rng::next_u64() {
  const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
  const std::uint64_t t = s_[1] << 17;
  s_[2] ^= s_[0];
  s_[3] ^= s_[1];
  s_[1] ^= s_[2];
  s_[0] ^= s_[3];
  s_[2] ^= t;
  s_[3] = rotl(s_[3], 45);
  return result;
}

double Rng::next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

double Rng::next_standard_normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u, v, s;
  do {
    u = 2.0 * next_unit() - 1.0;
    v = 2.0 * next_unit() - 1.0;
    s = u * u + v * v;
  } while (s >= 1.0 || s == 0.0);
  const double scale = std::sqrt(-2.0 * std::log(s) / s);
  spare_ = v * scale;
  has_spare_ = true;
  return u * scale;
}

std::uint64_t child_seed(std::uint64_t seed, std::uint64_t index) {
  return mix64(mix64(seed) ^ mix64(index + 0x632BE59BD9B4E019ULL));
}

Rng Rng::derive_child(std::uint64_t index) const { return Rng(child_seed(seed_, index)); }

double sample_normal(Rng& rng, double mean, double stdev) {
  if (!(stdev >= 0.0) || !std::isfinite(stdev)) {
    throw std::invalid_argument("sample_normal: stdev must be finite and >= 0, got " +
                                std::to_string(stdev));
  }
  const double z = rng.next_standard_normal();
  if (stdev == 0.0) return mean;
  return mean + stdev * z;
}

double sample_uniform(Rng& rng, double lo, double hi) {
  if (!(lo <= hi)) {
    throw std::invalid_argument("sample_uniform: lo must be <= hi");
  }
  const double u = rng.next_unit();
  if (lo == hi) return lo;
  const double x = lo + (hi - lo) * u;
  return x > hi ? hi : x;
}

void ReciprocalStudyConfig::validate() const {
  if (!(denominator_mean > 0.0)) throw std::invalid_argument("denominator_mean must be > 0");
  if (numerator_mean == 0.0 || !std::isfinite(numerator_mean)) {
    throw std::invalid_argument("numerator_mean must be finite and non-zero");
  }
  if (!(numerator_stdev >= 0.0)) throw std::invalid_argument("numerator_stdev must be >= 0");
  if (denominator_stdevs.empty()) throw std::invalid_argument("denominator stdev grid is empty");
  for (double s : denominator_stdevs) {
    if (!(s >= 0.0) || !std::isfinite(s)) {
      throw std::invalid_argument("denominator stdevs must be finite and >= 0");
    }
  }
  if (samples_per_point < 10'000) throw std::invalid_argument("samples_per_point must be >= 1e4");
  if (!(bin_width > 0.0)) throw std::invalid_argument("bin_width must be > 0");
}

namespace {

struct ChunkStats {
  std::vector<std::uint64_t> bins;
  std::uint64_t in_window = 0;
  // Sum of (x - r) over in-window samples; keeps the zero-spread case exact.
  double deviation_sum = 0.0;
};

}  // namespace

std::vector<ReciprocalPoint> reciprocal_peak_curve(const ReciprocalStudyConfig& cfg,
                                                   const Rng& rng, unsigned threads) {
  cfg.validate();
  const double r = cfg.deterministic_ratio();
  const double w = cfg.bin_width;
  const double lo = std::min(r / 5.0, 5.0 * r);
  const double hi = std::max(r / 5.0, 5.0 * r);
  // Bin k is centered on r + k*w.
  const auto k_lo = static_cast<long long>(std::floor((lo - r) / w + 0.5));
  const auto k_hi = static_cast<long long>(std::floor((hi - r) / w + 0.5));
  const auto n_bins = static_cast<std::size_t>(k_hi - k_lo + 1);

  const std::size_t n_points = cfg.denominator_stdevs.size();
  const std::uint64_t n_chunks = (cfg.samples_per_point + kReciprocalChunk - 1) / kReciprocalChunk;
  std::vector<ChunkStats> chunks(n_points * n_chunks);

  parallel_for_index(chunks.size(), threads, [&](std::size_t job) {
    const std::size_t point = job / n_chunks;
    const std::uint64_t chunk = job % n_chunks;
    const double den_sd = cfg.denominator_stdevs[point];
    const std::uint64_t begin = chunk * kReciprocalChunk;
    const std::uint64_t end = std::min(cfg.samples_per_point, begin + kReciprocalChunk);

    Rng stream = rng.derive_child(point).derive_child(chunk);
    ChunkStats& stats = chunks[job];
    stats.bins.assign(n_bins, 0);
    for (std::uint64_t i = begin; i < end; ++i) {
      const double num = sample_normal(stream, cfg.numerator_mean, cfg.numerator_stdev);
      const double den = sample_normal(stream, cfg.denominator_mean, den_sd);
      const double x = num / den;
      if (!(x >= lo && x <= hi)) continue;
      const auto k = static_cast<long long>(std::floor((x - r) / w + 0.5));
      if (k < k_lo || k > k_hi) continue;
      ++stats.bins[static_cast<std::size_t>(k - k_lo)];
      ++stats.in_window;
      stats.deviation_sum += x - r;
    }
  });

  std::vector<ReciprocalPoint> out;
  out.reserve(n_points);
  for (std::size_t p = 0; p < n_points; ++p) {
    std::vector<std::uint64_t> bins(n_bins, 0);
    std::uint64_t in_window = 0;
    double deviation_sum = 0.0;
    for (std::uint64_t c = 0; c < n_chunks; ++c) {
      const ChunkStats& s = chunks[p * n_chunks + c];
      for (std::size_t b = 0; b < n_bins; ++b) bins[b] += s.bins[b];
      in_window += s.in_window;
      deviation_sum += s.deviation_sum;
    }
    std::size_t best = 0;
    for (std::size_t b = 1; b < n_bins; ++b) {
      if (bins[b] > bins[best]) best = b;
    }
    ReciprocalPoint pt;
    pt.denominator_stdev = cfg.denominator_stdevs[p];
    pt.peak_location = r + static_cast<double>(k_lo + static_cast<long long>(best)) * w;
    pt.central_fraction =
        static_cast<double>(in_window) / static_cast<double>(cfg.samples_per_point);
    pt.central_mean = in_window == 0
                          ? std::numeric_limits<double>::quiet_NaN()
                          : r + deviation_sum / static_cast<double>(in_window);
    out.push_back(pt);
  }
  return out;
}

}  // namespace pimetro
