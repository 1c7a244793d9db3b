#pragma once

#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "gnast/generator.hpp"
#include "gnast/harness.hpp"
#include "gnast/rng.hpp"
#include "gnast/vae.hpp"

namespace gnast {

// One kept execution: the input, its trace, and the trace's latent encoding
// under the VAE parameters current at the last refresh.
struct CorpusRecord {
  std::string input;
  CoverageTrace trace;
  std::vector<float> latent;
  std::uint64_t epoch_found = 0;
  Outcome outcome = Outcome::Rejected;
};

struct CrashEntry {
  ExecutionRecord record;
  std::uint64_t epoch = 0;
};

struct EpochReport {
  std::uint64_t epoch = 0;
  std::uint64_t new_distinct_traces = 0;
  std::uint64_t corpus_size = 0;
  double vae_loss_mean = 0;
  double gnn_loss_mean = 0;
  std::uint64_t crashes_this_epoch = 0;
  double wall_time_s = 0;
};

// Field-wise equality minus wall time, which never reproduces.
inline bool reports_equivalent(const EpochReport& a, const EpochReport& b) {
  return a.epoch == b.epoch && a.new_distinct_traces == b.new_distinct_traces &&
         a.corpus_size == b.corpus_size && a.vae_loss_mean == b.vae_loss_mean &&
         a.gnn_loss_mean == b.gnn_loss_mean && a.crashes_this_epoch == b.crashes_this_epoch;
}

struct FuzzerState {
  std::uint64_t epoch = 0;
  std::vector<CorpusRecord> corpus;
  Vae<float> vae;
  Generator<float> gnn;
  Rng rng;
  std::vector<CrashEntry> crashes;            // append-only
  std::vector<std::vector<float>> staged;     // next generative pass inputs
  std::set<std::string> seen_traces;          // hashes of every distinct trace found
  std::vector<EpochReport> reports;
  double learning_rate = 1e-4;
  bool lr_halved = false;  // instability fallback used up

  FuzzerState(Vae<float> v, Generator<float> g, Rng r)
      : vae(std::move(v)), gnn(std::move(g)), rng(r) {}
};

}  // namespace gnast
