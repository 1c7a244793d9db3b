#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "gnast/ranking.hpp"
#include "gnast/state.hpp"

namespace gnast {

using NgramSet = std::set<std::string>;

// All contiguous substrings with lengths in [n_min, n_max], as a set.
inline NgramSet ngrams(std::string_view s, std::size_t n_min, std::size_t n_max) {
  if (n_min < 1 || n_min > n_max) throw std::invalid_argument("ngrams: bad length range");
  NgramSet out;
  for (std::size_t n = n_min; n <= n_max && n <= s.size(); ++n)
    for (std::size_t i = 0; i + n <= s.size(); ++i) out.emplace(s.substr(i, n));
  return out;
}

// |A intersect B| / |A union B|; both empty gives 0.
inline double jaccard(const NgramSet& a, const NgramSet& b) {
  if (a.empty() && b.empty()) return 0.0;
  std::size_t inter = 0;
  const NgramSet& small = a.size() <= b.size() ? a : b;
  const NgramSet& large = a.size() <= b.size() ? b : a;
  for (const auto& g : small) inter += large.count(g);
  return static_cast<double>(inter) / static_cast<double>(a.size() + b.size() - inter);
}

// 1 - cos(a, b), in [0, 2]. Zero vectors have no direction.
template <typename T>
double cosine_distance(const Tensor<T>& a, const Tensor<T>& b) {
  if (a.numel() != b.numel()) throw std::invalid_argument("cosine_distance: length mismatch");
  double dot = 0, na = 0, nb = 0;
  for (std::size_t i = 0; i < a.numel(); ++i) {
    dot += double(a(i)) * double(b(i));
    na += double(a(i)) * double(a(i));
    nb += double(b(i)) * double(b(i));
  }
  if (na == 0 || nb == 0) throw std::invalid_argument("cosine_distance: zero vector");
  return 1.0 - dot / (std::sqrt(na) * std::sqrt(nb));
}

struct SimilarityReport {
  double mean_jaccard_fft = 0;
  double mean_jaccard_cft = 0;
  std::size_t repetitions = 0;
  std::vector<double> per_rep_fft;
  std::vector<double> per_rep_cft;
};

namespace detail {

// Per-string seed derived from the latent vector bits, so a repetition's
// strings vary only through the drawn vectors.
inline std::uint64_t string_seed(const LatentPoint& z) {
  std::vector<float> bits(z.size());
  for (std::size_t i = 0; i < z.size(); ++i) bits[i] = static_cast<float>(z[i]);
  return fnv1a64(bits.data(), bits.size() * sizeof(float));
}

template <typename T>
double head_jaccard(const Generator<T>& gen, const std::vector<LatentPoint>& pts,
                    const RankedSequence& head_seq) {
  std::vector<NgramSet> sets;
  sets.reserve(head_seq.size());
  NgramSet all;
  for (const auto& e : head_seq) {
    const LatentPoint& p = pts[e.index];
    Tensor<T> z({p.size()});
    for (std::size_t i = 0; i < p.size(); ++i) z(i) = static_cast<T>(p[i]);
    Rng rng(string_seed(p));
    std::string s = gen.sample_string(gen.forward(z), rng);
    sets.push_back(ngrams(s, 1, 10));
    all.insert(sets.back().begin(), sets.back().end());
  }
  double sum = 0;
  for (const auto& a : sets) sum += jaccard(a, all);
  return sum / static_cast<double>(sets.size());
}

}  // namespace detail

// Draws n standard-normal latent vectors, orders them by FFT and CFT, and
// compares the n-gram overlap of the strings generated from the two heads.
// Lower FFT overlap than CFT means latent distance shows up as syntactic
// dissimilarity.
template <typename T>
SimilarityReport latent_similarity_eval(const Generator<T>& gen, std::size_t n = 10000,
                                        std::size_t head = 100, std::size_t reps = 10,
                                        Rng rng = Rng(1)) {
  SimilarityReport rep;
  rep.repetitions = reps;
  for (std::size_t r = 0; r < reps; ++r) {
    std::vector<LatentPoint> pts(n, LatentPoint(gen.dims().latent));
    for (auto& p : pts)
      for (auto& v : p) v = rng.normal();
    rep.per_rep_fft.push_back(detail::head_jaccard(gen, pts, fft_prefix(pts, head)));
    rep.per_rep_cft.push_back(detail::head_jaccard(gen, pts, cft_prefix(pts, head)));
  }
  for (double v : rep.per_rep_fft) rep.mean_jaccard_fft += v;
  for (double v : rep.per_rep_cft) rep.mean_jaccard_cft += v;
  rep.mean_jaccard_fft /= static_cast<double>(reps);
  rep.mean_jaccard_cft /= static_cast<double>(reps);
  return rep;
}

struct BehaviourReport {
  double mean = 0, stddev = 0, min = 0, max = 0;
  std::vector<double> distances;
};

// RQ5-style probe: feed random latent inputs through generator, target and
// encoder, and report how the true encodings relate to the inputs. Reports
// only; the direction is not asserted anywhere.
template <typename T>
BehaviourReport behaviour_targeting_eval(const Generator<T>& gen, const Vae<T>& vae,
                                         std::string_view target_id, std::size_t n, Rng& rng) {
  BehaviourReport rep;
  rep.distances.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    Tensor<T> z({gen.dims().latent});
    for (auto& v : z.data) v = static_cast<T>(rng.normal());
    std::string s = gen.sample_string(gen.forward(z), rng);
    ExecutionRecord rec = execute_target(target_id, s, vae.dims().map_size);
    Tensor<T> z_true = vae.embed(rec.trace);
    rep.distances.push_back(cosine_distance(z, z_true));
  }
  double sum = 0;
  rep.min = rep.distances.empty() ? 0 : rep.distances.front();
  rep.max = rep.min;
  for (double d : rep.distances) {
    sum += d;
    rep.min = std::min(rep.min, d);
    rep.max = std::max(rep.max, d);
  }
  rep.mean = sum / static_cast<double>(std::max<std::size_t>(1, rep.distances.size()));
  double var = 0;
  for (double d : rep.distances) var += (d - rep.mean) * (d - rep.mean);
  rep.stddev = rep.distances.size() > 1
                   ? std::sqrt(var / static_cast<double>(rep.distances.size() - 1))
                   : 0.0;
  return rep;
}

struct CrashGroup {
  CoverageTrace trace;
  std::vector<std::string> inputs;  // distinct inputs sharing the trace
  std::uint64_t first_epoch = 0;
  std::string detail;
  bool reproduces = false;  // representative re-executed to Crash
};

struct CrashSummary {
  std::vector<CrashGroup> groups;  // ordered by first appearance
};

// Groups archived crashes by exact trace equality and re-executes one
// representative per group to confirm the crash still reproduces.
inline CrashSummary crash_report(const std::vector<CrashEntry>& archive,
                                 std::string_view target_id, std::size_t map_size) {
  CrashSummary out;
  for (const auto& e : archive) {
    CrashGroup* grp = nullptr;
    for (auto& g : out.groups)
      if (g.trace == e.record.trace) {
        grp = &g;
        break;
      }
    if (!grp) {
      out.groups.push_back({e.record.trace, {}, e.epoch, e.record.detail, false});
      grp = &out.groups.back();
    }
    if (std::find(grp->inputs.begin(), grp->inputs.end(), e.record.input) == grp->inputs.end())
      grp->inputs.push_back(e.record.input);
  }
  for (auto& g : out.groups) {
    ExecutionRecord rec = execute_target(target_id, g.inputs.front(), map_size);
    g.reproduces = rec.outcome == Outcome::Crash;
  }
  return out;
}

struct NgramFrequency {
  std::size_t length = 0;
  std::string gram;
  std::uint64_t count = 0;
};

// Occurrence counts of the most frequent n-grams per length across a corpus
// of strings; ties resolve lexicographically.
inline std::vector<NgramFrequency> ngram_frequency_report(const std::vector<std::string>& corpus,
                                                          std::size_t n_min, std::size_t n_max,
                                                          std::size_t top_per_length) {
  std::vector<NgramFrequency> out;
  for (std::size_t n = n_min; n <= n_max; ++n) {
    std::map<std::string, std::uint64_t> counts;
    for (const auto& s : corpus)
      for (std::size_t i = 0; i + n <= s.size(); ++i) counts[s.substr(i, n)]++;
    std::vector<std::pair<std::string, std::uint64_t>> sorted(counts.begin(), counts.end());
    std::stable_sort(sorted.begin(), sorted.end(),
                     [](const auto& a, const auto& b) { return a.second > b.second; });
    for (std::size_t i = 0; i < sorted.size() && i < top_per_length; ++i)
      out.push_back({n, sorted[i].first, sorted[i].second});
  }
  return out;
}

}  // namespace gnast
