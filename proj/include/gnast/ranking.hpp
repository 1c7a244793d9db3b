#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <vector>

#include "gnast/trace.hpp"

namespace gnast {

struct RankedEntry {
  std::size_t index = 0;
  double distance = 0;  // minimal distance to all earlier entries; the first
                        // entry carries the initial pair distance
};
using RankedSequence = std::vector<RankedEntry>;

using LatentPoint = std::vector<double>;

inline double euclidean(const LatentPoint& a, const LatentPoint& b) {
  double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return std::sqrt(s);
}

inline std::vector<std::vector<double>> pairwise_distances(const std::vector<LatentPoint>& pts) {
  const std::size_t n = pts.size();
  for (const auto& p : pts)
    if (p.size() != pts.front().size())
      throw std::invalid_argument("pairwise_distances: dimension mismatch");
  std::vector<std::vector<double>> d(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) d[i][j] = d[j][i] = euclidean(pts[i], pts[j]);
  return d;
}

namespace detail {

// Greedy traversal over an arbitrary metric. farthest=true appends the point
// whose minimal distance to the sequence is maximal (FFT); false gives the
// closest-first dual. Ties break toward the lowest index; the seed pair is
// the lexicographically first extremal pair, lower index first. Min-distance
// maintenance is incremental (O(n) per append), no full matrix is stored.
template <typename DistFn>
RankedSequence greedy_order(std::size_t n, DistFn&& dist, bool farthest, std::size_t limit) {
  RankedSequence seq;
  if (n == 0) return seq;
  if (n == 1) {
    seq.push_back({0, 0.0});
    return seq;
  }
  std::size_t best_i = 0, best_j = 1;
  double best_d = dist(0, 1);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double d = dist(i, j);
      if (farthest ? d > best_d : d < best_d) {
        best_d = d;
        best_i = i;
        best_j = j;
      }
    }
  }
  seq.push_back({best_i, best_d});
  seq.push_back({best_j, best_d});

  std::vector<char> chosen(n, 0);
  chosen[best_i] = chosen[best_j] = 1;
  std::vector<double> min_dist(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (chosen[i]) continue;
    min_dist[i] = std::min(dist(i, best_i), dist(i, best_j));
  }
  while (seq.size() < std::min(n, limit)) {
    std::size_t pick = n;
    double pick_d = farthest ? -1.0 : std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
      if (chosen[i]) continue;
      if (farthest ? min_dist[i] > pick_d : min_dist[i] < pick_d) {
        pick_d = min_dist[i];
        pick = i;
      }
    }
    seq.push_back({pick, pick_d});
    chosen[pick] = 1;
    for (std::size_t i = 0; i < n; ++i) {
      if (chosen[i]) continue;
      min_dist[i] = std::min(min_dist[i], dist(i, pick));
    }
  }
  if (seq.size() > limit) seq.resize(limit);
  return seq;
}

inline void check_dims(const std::vector<LatentPoint>& pts) {
  for (const auto& p : pts)
    if (p.size() != pts.front().size())
      throw std::invalid_argument("ranking: dimension mismatch");
}

}  // namespace detail

// Farthest-first traversal: starts with a maximally distant pair, then
// greedily appends the point whose minimal distance to the sequence is
// maximal. Exact duplicates end up at the tail.
inline RankedSequence fft_order(const std::vector<LatentPoint>& pts) {
  detail::check_dims(pts);
  return detail::greedy_order(
      pts.size(), [&](std::size_t i, std::size_t j) { return euclidean(pts[i], pts[j]); }, true,
      pts.size());
}

// Closest-first dual of fft_order, used as the similarity baseline.
inline RankedSequence cft_order(const std::vector<LatentPoint>& pts) {
  detail::check_dims(pts);
  return detail::greedy_order(
      pts.size(), [&](std::size_t i, std::size_t j) { return euclidean(pts[i], pts[j]); }, false,
      pts.size());
}

// First `head` entries of the traversal without ordering the rest.
inline RankedSequence fft_prefix(const std::vector<LatentPoint>& pts, std::size_t head) {
  detail::check_dims(pts);
  return detail::greedy_order(
      pts.size(), [&](std::size_t i, std::size_t j) { return euclidean(pts[i], pts[j]); }, true,
      head);
}

inline RankedSequence cft_prefix(const std::vector<LatentPoint>& pts, std::size_t head) {
  detail::check_dims(pts);
  return detail::greedy_order(
      pts.size(), [&](std::size_t i, std::size_t j) { return euclidean(pts[i], pts[j]); }, false,
      head);
}

inline double hamming(const CoverageTrace& a, const CoverageTrace& b) {
  if (a.map_size() != b.map_size())
    throw std::invalid_argument("hamming: trace length mismatch");
  std::size_t d = 0;
  for (std::size_t i = 0; i < a.map_size(); ++i)
    if (a.classes[i] != b.classes[i]) ++d;
  return static_cast<double>(d);
}

// Raw-trace variant for comparison with latent-space ranking.
inline RankedSequence fft_order_traces(const std::vector<const CoverageTrace*>& traces) {
  return detail::greedy_order(
      traces.size(), [&](std::size_t i, std::size_t j) { return hamming(*traces[i], *traces[j]); },
      true, traces.size());
}

inline RankedSequence cft_order_traces(const std::vector<const CoverageTrace*>& traces) {
  return detail::greedy_order(
      traces.size(), [&](std::size_t i, std::size_t j) { return hamming(*traces[i], *traces[j]); },
      false, traces.size());
}

// Indices (in original order) of the k records kept by the FFT prefix.
inline std::vector<std::size_t> cull_indices(const std::vector<LatentPoint>& pts, std::size_t k) {
  if (k < 2) throw std::invalid_argument("cull: k must be at least 2");
  std::vector<std::size_t> keep;
  if (pts.size() <= k) {
    keep.resize(pts.size());
    for (std::size_t i = 0; i < keep.size(); ++i) keep[i] = i;
    return keep;
  }
  RankedSequence seq = fft_prefix(pts, k);
  keep.reserve(k);
  for (const auto& e : seq) keep.push_back(e.index);
  std::sort(keep.begin(), keep.end());
  return keep;
}

// Keeps the k most representative records (FFT prefix over their latents),
// preserving original corpus order. Idempotent.
template <typename Record, typename GetLatent>
std::vector<Record> cull(std::vector<Record> records, std::size_t k, GetLatent&& latent_of) {
  if (records.size() <= k) {
    if (k < 2) throw std::invalid_argument("cull: k must be at least 2");
    return records;
  }
  std::vector<LatentPoint> pts;
  pts.reserve(records.size());
  for (const auto& r : records) pts.push_back(latent_of(r));
  std::vector<std::size_t> keep = cull_indices(pts, k);
  std::vector<Record> out;
  out.reserve(keep.size());
  for (std::size_t idx : keep) out.push_back(std::move(records[idx]));
  return out;
}

}  // namespace gnast
