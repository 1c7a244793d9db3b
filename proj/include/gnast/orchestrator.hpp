#pragma once

#include <chrono>
#include <span>

#include "gnast/config.hpp"
#include "gnast/hash.hpp"
#include "gnast/ranking.hpp"
#include "gnast/state.hpp"

namespace gnast {

// Persistence callbacks invoked as the epoch loop produces artifacts.
// The default implementations discard everything, which keeps in-memory
// campaigns (tests, pilots) free of filesystem traffic.
struct PersistHook {
  virtual void on_new_record(const CorpusRecord&) {}
  virtual void on_crash(const CrashEntry&) {}
  virtual void on_report(const EpochReport&) {}
  virtual ~PersistHook() = default;
};

inline std::string trace_hash(const CoverageTrace& t) { return sha256_hex(t.classes); }

// Fresh state: untrained networks, empty corpus, and a staged batch of
// standard-normal latent inputs.
inline FuzzerState init_state(const CampaignConfig& cfg) {
  validate_config(cfg);
  VaeDims vd;
  vd.map_size = cfg.map_size;
  vd.latent = cfg.latent_dim;
  GenDims gd = desk_generator_dims(cfg.deconv_blocks, cfg.filters, cfg.latent_dim, 16,
                                   cfg.str_len_max, cfg.profile == "paper");
  gd.dict = cfg.dict_size;
  FuzzerState state(
      Vae<float>(vd, static_cast<float>(cfg.leaky_slope), derive_seed(cfg.seed, "vae-init")),
      Generator<float>(gd, static_cast<float>(cfg.leaky_slope), derive_seed(cfg.seed, "gnn-init")),
      Rng(derive_seed(cfg.seed, "campaign")));
  state.learning_rate = cfg.learning_rate;
  state.staged.resize(cfg.batch_size, std::vector<float>(cfg.latent_dim));
  for (auto& z : state.staged)
    for (auto& v : z) v = static_cast<float>(state.rng.normal());
  return state;
}

struct GenerativeResult {
  std::vector<ExecutionRecord> executions;
  std::uint64_t new_distinct = 0;
  std::uint64_t crashes = 0;
};

// One generative pass: perturb each staged input, generate, execute, embed.
// Appends records whose traces were never seen before; archives crashes.
// Network weights are read-only here.
inline GenerativeResult generative_pass(FuzzerState& state, const CampaignConfig& cfg,
                                        PersistHook* hook = nullptr) {
  GenerativeResult result;
  const float sigma = static_cast<float>(cfg.input_noise_sigma);
  for (const auto& staged : state.staged) {
    Tensor<float> z({cfg.latent_dim});
    for (std::size_t i = 0; i < cfg.latent_dim; ++i) z(i) = staged[i];
    Tensor<float> z_in = Generator<float>::perturb_input(z, sigma, state.rng);
    Tensor<float> logits = state.gnn.forward(z_in);
    std::string input = state.gnn.sample_string(logits, state.rng);
    ExecutionRecord rec = execute_target(cfg.target, input, cfg.map_size, cfg.str_len_max);

    if (rec.outcome == Outcome::Crash) {
      CrashEntry entry{rec, state.epoch};
      state.crashes.push_back(entry);
      if (hook) hook->on_crash(entry);
      ++result.crashes;
    }
    const std::string h = trace_hash(rec.trace);
    if (!state.seen_traces.count(h)) {
      state.seen_traces.insert(h);
      Tensor<float> latent = state.vae.embed(rec.trace);
      CorpusRecord record{rec.input, rec.trace,
                          std::vector<float>(latent.data.begin(), latent.data.end()), state.epoch,
                          rec.outcome};
      state.corpus.push_back(record);
      if (hook) hook->on_new_record(state.corpus.back());
      ++result.new_distinct;
    }
    result.executions.push_back(std::move(rec));
  }
  return result;
}

struct TrainSummary {
  double vae_loss_mean = 0;
  double gnn_loss_mean = 0;  // cross-entropy + mse_weight * mse
  double gnn_ce_mean = 0;
  double gnn_mse_mean = 0;
  std::size_t steps = 0;
};

// steps_per_pass optimizer steps for the VAE and then the generator, with
// uniform-with-replacement minibatches from the corpus.
inline TrainSummary training_pass(FuzzerState& state, const CampaignConfig& cfg) {
  TrainSummary sum;
  if (cfg.steps_per_pass == 0) return sum;
  if (state.corpus.empty()) throw std::logic_error("training_pass: corpus is empty");
  const std::size_t n = state.corpus.size();
  const float lr = static_cast<float>(state.learning_rate);

  for (std::size_t s = 0; s < cfg.steps_per_pass; ++s) {
    std::vector<const CoverageTrace*> batch(cfg.batch_size);
    for (auto& t : batch) t = &state.corpus[state.rng.below(n)].trace;
    sum.vae_loss_mean += state.vae.train_step(batch, state.rng, lr);
  }

  for (std::size_t s = 0; s < cfg.steps_per_pass; ++s) {
    std::vector<Tensor<float>> latents;
    std::vector<std::string_view> targets;
    latents.reserve(cfg.batch_size);
    targets.reserve(cfg.batch_size);
    for (std::size_t i = 0; i < cfg.batch_size; ++i) {
      const CorpusRecord& r = state.corpus[state.rng.below(n)];
      Tensor<float> z({cfg.latent_dim});
      for (std::size_t d = 0; d < cfg.latent_dim; ++d) z(d) = r.latent[d];
      latents.push_back(std::move(z));
      targets.push_back(r.input);
    }
    auto parts = state.gnn.train_step(latents, targets, static_cast<float>(cfg.input_noise_sigma),
                                      static_cast<float>(cfg.mse_weight), state.rng, lr);
    sum.gnn_loss_mean += parts.total;
    sum.gnn_ce_mean += parts.ce;
    sum.gnn_mse_mean += parts.mse;
  }

  const double steps = static_cast<double>(cfg.steps_per_pass);
  sum.vae_loss_mean /= steps;
  sum.gnn_loss_mean /= steps;
  sum.gnn_ce_mean /= steps;
  sum.gnn_mse_mean /= steps;
  sum.steps = cfg.steps_per_pass;
  return sum;
}

namespace detail {

// Restage generative inputs: refreshed embeddings of the FFT-leading corpus
// records plus exploration noise, padded with fresh standard normals when
// the corpus is still smaller than a batch.
inline void restage_inputs(FuzzerState& state, const CampaignConfig& cfg) {
  for (auto& rec : state.corpus) {
    Tensor<float> latent = state.vae.embed(rec.trace);
    rec.latent.assign(latent.data.begin(), latent.data.end());
  }
  std::vector<LatentPoint> pts;
  pts.reserve(state.corpus.size());
  for (const auto& rec : state.corpus)
    pts.emplace_back(rec.latent.begin(), rec.latent.end());

  state.staged.clear();
  RankedSequence lead = fft_prefix(pts, cfg.batch_size);
  const float sigma = static_cast<float>(cfg.input_noise_sigma);
  for (const auto& e : lead) {
    if (state.staged.size() == cfg.batch_size) break;
    std::vector<float> z(cfg.latent_dim);
    for (std::size_t d = 0; d < cfg.latent_dim; ++d)
      z[d] = state.corpus[e.index].latent[d] +
             sigma * static_cast<float>(state.rng.normal());
    state.staged.push_back(std::move(z));
  }
  while (state.staged.size() < cfg.batch_size) {
    std::vector<float> z(cfg.latent_dim);
    for (auto& v : z) v = static_cast<float>(state.rng.normal());
    state.staged.push_back(std::move(z));
  }
}

inline EpochReport epoch_body(FuzzerState& state, const CampaignConfig& cfg, PersistHook* hook) {
  const auto t0 = std::chrono::steady_clock::now();
  GenerativeResult gen = generative_pass(state, cfg, hook);
  if (state.corpus.size() > cfg.k)
    state.corpus = cull(std::move(state.corpus), cfg.k, [](const CorpusRecord& r) {
      return LatentPoint(r.latent.begin(), r.latent.end());
    });
  TrainSummary train = training_pass(state, cfg);
  restage_inputs(state, cfg);

  EpochReport report;
  report.epoch = state.epoch;
  report.new_distinct_traces = gen.new_distinct;
  report.corpus_size = state.corpus.size();
  report.vae_loss_mean = train.vae_loss_mean;
  report.gnn_loss_mean = train.gnn_loss_mean;
  report.crashes_this_epoch = gen.crashes;
  report.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return report;
}

}  // namespace detail

// One full epoch: generative pass, cull to k, training pass, latent refresh
// and restaging. Instability propagates to the caller, which owns rollback
// (see run_campaign).
inline EpochReport run_epoch(FuzzerState& state, const CampaignConfig& cfg,
                             PersistHook* hook = nullptr) {
  EpochReport report = detail::epoch_body(state, cfg, hook);
  state.reports.push_back(report);
  if (hook) hook->on_report(report);
  ++state.epoch;
  return report;
}

// True when the last `window` reports saw no new distinct trace at all.
inline bool stall_check(std::span<const EpochReport> reports, std::size_t window = 20) {
  if (reports.size() < window || window == 0) return false;
  for (std::size_t i = reports.size() - window; i < reports.size(); ++i)
    if (reports[i].new_distinct_traces != 0) return false;
  return true;
}

// Runs epochs until state.epoch reaches target_epochs. Instability rolls the
// epoch back and retries once with the learning rate halved.
inline void run_campaign(FuzzerState& state, const CampaignConfig& cfg,
                         std::uint64_t target_epochs, PersistHook* hook = nullptr) {
  while (state.epoch < target_epochs) {
    FuzzerState snapshot = state;
    try {
      run_epoch(state, cfg, hook);
    } catch (const instability_error&) {
      if (snapshot.lr_halved) throw;
      state = std::move(snapshot);
      state.learning_rate /= 2;
      state.lr_halved = true;
      run_epoch(state, cfg, hook);  // second failure propagates
    }
  }
}

}  // namespace gnast
