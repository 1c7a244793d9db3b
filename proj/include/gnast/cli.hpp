#pragma once

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <ostream>

#include "gnast/analysis.hpp"
#include "gnast/persist.hpp"

namespace gnast::cli {

// Exit codes: 0 success, 1 usage/config error, 2 runtime or instability.

inline std::string escape_bytes(std::string_view s) {
  std::string out;
  for (unsigned char c : s) {
    if (c == '\\') out += "\\\\";
    else if (c == '"') out += "\\\"";
    else if (c == ',') out += "\\x2c";
    else if (c >= 0x20 && c < 0x7f) out.push_back(static_cast<char>(c));
    else {
      char buf[5];
      std::snprintf(buf, sizeof buf, "\\x%02x", c);
      out += buf;
    }
  }
  return out;
}

namespace detail {

struct OverrideCollector {
  std::vector<std::pair<std::string, std::string>> pairs;

  void attach(CLI::App* app, const char* key, const char* help) {
    std::string k = key;
    app->add_option_function<std::string>(
        "--" + k, [this, k](const std::string& v) { pairs.emplace_back(k, v); }, help);
  }
};

// All config fields as --snake_case options; values are validated by
// parse_config so errors name the offending field.
inline void add_config_options(CLI::App* app, OverrideCollector& col) {
  col.attach(app, "target", "target program: json, xmlite or csub");
  col.attach(app, "profile", "configuration profile: desk or paper");
  col.attach(app, "map_size", "coverage map size (power of two)");
  col.attach(app, "latent_dim", "latent space dimension");
  col.attach(app, "str_len_max", "maximum generated string length (fixed 512)");
  col.attach(app, "dict_size", "output dictionary size (fixed 129)");
  col.attach(app, "batch_size", "inputs per generative pass / minibatch size");
  col.attach(app, "steps_per_pass", "optimizer steps per training pass");
  col.attach(app, "k", "corpus size cap");
  col.attach(app, "learning_rate", "RMSProp learning rate");
  col.attach(app, "input_noise_sigma", "stddev of generator input noise");
  col.attach(app, "mse_weight", "weight of the latent reconstruction term");
  col.attach(app, "deconv_blocks", "generator deconvolution block count");
  col.attach(app, "filters", "generator filter count");
  col.attach(app, "leaky_slope", "leaky relu slope");
  col.attach(app, "epochs", "epochs to run");
  col.attach(app, "seed", "campaign seed");
  col.attach(app, "output_dir", "campaign output directory");
}

struct CliHook : DirectoryHook {
  using DirectoryHook::DirectoryHook;
  void on_report(const EpochReport& r) override {
    DirectoryHook::on_report(r);
    std::cout << "epoch " << r.epoch << ": new_traces=" << r.new_distinct_traces
              << " corpus=" << r.corpus_size << " vae_loss=" << r.vae_loss_mean
              << " gnn_loss=" << r.gnn_loss_mean << " crashes=" << r.crashes_this_epoch << "\n";
  }
};

inline int cmd_fuzz(const std::string& config_file,
                    const std::vector<std::pair<std::string, std::string>>& overrides,
                    bool resume) {
  std::string doc;
  CampaignConfig cfg;
  FuzzerState state = [&] {
    if (resume) {
      // Resume re-reads the saved config echo and applies overrides on top.
      CampaignConfig probe = parse_config(
          config_file.empty() ? "" : read_file(config_file), overrides);
      LoadedCampaign lc = load_corpus(probe.output_dir);
      doc = config_to_json(lc.config).dump();
      cfg = parse_config(doc, overrides);
      return std::move(lc.state);
    }
    doc = config_file.empty() ? "" : read_file(config_file);
    cfg = parse_config(doc, overrides);
    return init_state(cfg);
  }();

  fs::create_directories(cfg.output_dir);
  write_file(fs::path(cfg.output_dir) / "config.json", config_to_json(cfg).dump(2) + "\n");
  CliHook hook{fs::path(cfg.output_dir)};
  run_campaign(state, cfg, cfg.epochs, &hook);
  save_corpus(state, cfg, cfg.output_dir);

  std::cout << "done: epochs=" << state.epoch << " distinct_traces=" << state.seen_traces.size()
            << " corpus=" << state.corpus.size() << " crashes=" << state.crashes.size()
            << " stalled=" << (stall_check(state.reports) ? "yes" : "no") << "\n";
  return 0;
}

inline std::ostream& open_or_stdout(std::ofstream& file, const std::string& path) {
  if (path.empty()) return std::cout;
  file.open(path, std::ios::trunc);
  if (!file) throw std::runtime_error("cannot open for writing: " + path);
  return file;
}

inline int cmd_generate(const std::string& dir, std::size_t count, std::uint64_t seed,
                        const std::string& latents_file, const std::string& out_dir) {
  LoadedCampaign lc = load_corpus(dir);
  Rng rng(derive_seed(seed, "generate"));
  std::vector<std::vector<float>> latents;
  if (!latents_file.empty()) {
    latents = read_latents_file(latents_file);
    for (const auto& z : latents)
      if (z.size() != lc.config.latent_dim)
        throw std::runtime_error("latent vector length does not match campaign latent_dim");
  } else {
    latents.resize(count, std::vector<float>(lc.config.latent_dim));
    for (auto& z : latents)
      for (auto& v : z) v = static_cast<float>(rng.normal());
  }
  if (!out_dir.empty()) fs::create_directories(out_dir);
  std::size_t i = 0;
  for (const auto& zv : latents) {
    Tensor<float> z({zv.size()});
    z.data = zv;
    std::string s = lc.state.gnn.sample_string(lc.state.gnn.forward(z), rng);
    if (!out_dir.empty()) {
      char name[32];
      std::snprintf(name, sizeof name, "gen_%05zu.bin", i++);
      write_file(fs::path(out_dir) / name, s);
    } else {
      std::cout << escape_bytes(s) << "\n";
    }
  }
  return 0;
}

inline int cmd_rank(const std::string& dir, const std::string& mode, const std::string& on,
                    const std::string& out_path) {
  LoadedCampaign lc = load_corpus(dir);
  if (lc.state.corpus.empty()) throw std::runtime_error("corpus is empty, nothing to rank");
  RankedSequence seq;
  if (on == "latent") {
    std::vector<LatentPoint> pts;
    for (const auto& r : lc.state.corpus)
      pts.emplace_back(r.latent.begin(), r.latent.end());
    seq = mode == "cft" ? cft_order(pts) : fft_order(pts);
  } else {
    std::vector<const CoverageTrace*> traces;
    for (const auto& r : lc.state.corpus) traces.push_back(&r.trace);
    seq = mode == "cft" ? cft_order_traces(traces) : fft_order_traces(traces);
  }
  std::ofstream file;
  std::ostream& out = open_or_stdout(file, out_path);
  char buf[64];
  for (const auto& e : seq) {
    std::snprintf(buf, sizeof buf, "%zu,%.17g\n", e.index, e.distance);
    out << buf;
  }
  return 0;
}

inline int cmd_ngram_report(const std::string& dir, std::size_t n_min, std::size_t n_max,
                            std::size_t top, const std::string& format,
                            const std::string& out_path) {
  LoadedCampaign lc = load_corpus(dir);
  std::vector<std::string> corpus;
  for (const auto& r : lc.state.corpus) corpus.push_back(r.input);
  auto rows = ngram_frequency_report(corpus, n_min, n_max, top);
  std::ofstream file;
  std::ostream& out = open_or_stdout(file, out_path);
  if (format == "json") {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& r : rows)
      arr.push_back({{"length", r.length}, {"gram", escape_bytes(r.gram)}, {"count", r.count}});
    out << arr.dump(2) << "\n";
  } else {
    out << "length,gram,count\n";
    for (const auto& r : rows)
      out << r.length << "," << escape_bytes(r.gram) << "," << r.count << "\n";
  }
  return 0;
}

inline int cmd_latent_eval(const std::string& dir, std::size_t n, std::size_t head,
                           std::size_t reps, std::uint64_t seed, const std::string& format,
                           const std::string& out_path) {
  LoadedCampaign lc = load_corpus(dir);
  SimilarityReport rep =
      latent_similarity_eval(lc.state.gnn, n, head, reps, Rng(derive_seed(seed, "latent-eval")));
  std::ofstream file;
  std::ostream& out = open_or_stdout(file, out_path);
  if (format == "json") {
    out << nlohmann::json{{"mean_jaccard_fft", rep.mean_jaccard_fft},
                          {"mean_jaccard_cft", rep.mean_jaccard_cft},
                          {"repetitions", rep.repetitions},
                          {"per_rep_fft", rep.per_rep_fft},
                          {"per_rep_cft", rep.per_rep_cft}}
                 .dump(2)
        << "\n";
  } else {
    out << "rep,jaccard_fft,jaccard_cft\n";
    for (std::size_t i = 0; i < rep.repetitions; ++i)
      out << i << "," << rep.per_rep_fft[i] << "," << rep.per_rep_cft[i] << "\n";
    out << "mean," << rep.mean_jaccard_fft << "," << rep.mean_jaccard_cft << "\n";
  }
  return 0;
}

inline int cmd_behaviour_eval(const std::string& dir, std::size_t n, std::uint64_t seed,
                              const std::string& format, const std::string& out_path) {
  LoadedCampaign lc = load_corpus(dir);
  Rng rng(derive_seed(seed, "behaviour-eval"));
  BehaviourReport rep =
      behaviour_targeting_eval(lc.state.gnn, lc.state.vae, lc.config.target, n, rng);
  std::ofstream file;
  std::ostream& out = open_or_stdout(file, out_path);
  if (format == "json") {
    out << nlohmann::json{{"mean", rep.mean},
                          {"stddev", rep.stddev},
                          {"min", rep.min},
                          {"max", rep.max},
                          {"distances", rep.distances}}
                 .dump(2)
        << "\n";
  } else {
    out << "mean,stddev,min,max\n";
    out << rep.mean << "," << rep.stddev << "," << rep.min << "," << rep.max << "\n";
  }
  return 0;
}

inline int cmd_crash_report(const std::string& dir, const std::string& format,
                            const std::string& out_path) {
  LoadedCampaign lc = load_corpus(dir);
  CrashSummary sum = crash_report(lc.state.crashes, lc.config.target, lc.config.map_size);
  std::ofstream file;
  std::ostream& out = open_or_stdout(file, out_path);
  if (format == "json") {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& g : sum.groups) {
      nlohmann::json inputs = nlohmann::json::array();
      for (const auto& in : g.inputs) inputs.push_back(escape_bytes(in));
      arr.push_back({{"trace_hash", sha256_hex(g.trace.classes)},
                     {"first_epoch", g.first_epoch},
                     {"detail", g.detail},
                     {"reproduces", g.reproduces},
                     {"inputs", inputs}});
    }
    out << arr.dump(2) << "\n";
  } else {
    out << "trace_hash,inputs,first_epoch,reproduces,example\n";
    for (const auto& g : sum.groups)
      out << sha256_hex(g.trace.classes) << "," << g.inputs.size() << "," << g.first_epoch << ","
          << (g.reproduces ? "yes" : "no") << "," << escape_bytes(g.inputs.front()) << "\n";
  }
  return 0;
}

}  // namespace detail

inline int run_command(int argc, const char* const* argv) {
  CLI::App app{"GNAST: generative network assisted software testing"};
  app.require_subcommand(1);

  // fuzz
  auto* fuzz = app.add_subcommand("fuzz", "run a fuzzing campaign");
  std::string config_file;
  bool resume = false;
  detail::OverrideCollector fuzz_overrides;
  fuzz->add_option("--config", config_file, "JSON configuration file");
  fuzz->add_flag("--resume", resume, "continue a saved campaign from its output directory");
  detail::add_config_options(fuzz, fuzz_overrides);

  // generate
  auto* gen = app.add_subcommand("generate", "sample strings from a trained generator");
  std::string gen_dir, gen_latents, gen_out;
  std::size_t gen_count = 10;
  std::uint64_t gen_seed = 1;
  gen->add_option("--campaign", gen_dir, "campaign directory")->required();
  gen->add_option("--count", gen_count, "number of strings to sample");
  gen->add_option("--seed", gen_seed, "sampling seed");
  gen->add_option("--latents", gen_latents, "latent vector file (length-prefixed f32)");
  gen->add_option("--out_dir", gen_out, "write raw strings here instead of stdout");

  // rank
  auto* rank = app.add_subcommand("rank", "order corpus records by farthest-first traversal");
  std::string rank_dir, rank_mode = "fft", rank_on = "latent", rank_out;
  rank->add_option("--campaign", rank_dir, "campaign directory")->required();
  rank->add_option("--mode", rank_mode, "fft or cft")
      ->check(CLI::IsMember({"fft", "cft"}));
  rank->add_option("--on", rank_on, "latent (euclidean) or trace (hamming)")
      ->check(CLI::IsMember({"latent", "trace"}));
  rank->add_option("--out", rank_out, "output file (default stdout)");

  // ngram-report
  auto* ngram = app.add_subcommand("ngram-report", "most frequent n-grams in the corpus");
  std::string ng_dir, ng_format = "csv", ng_out;
  std::size_t ng_min = 3, ng_max = 10, ng_top = 50;
  ngram->add_option("--campaign", ng_dir, "campaign directory")->required();
  ngram->add_option("--n_min", ng_min, "minimum n-gram length");
  ngram->add_option("--n_max", ng_max, "maximum n-gram length");
  ngram->add_option("--top", ng_top, "n-grams per length");
  ngram->add_option("--format", ng_format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  ngram->add_option("--out", ng_out, "output file (default stdout)");

  // latent-eval
  auto* leval = app.add_subcommand("latent-eval", "FFT vs CFT n-gram similarity experiment");
  std::string le_dir, le_format = "csv", le_out;
  std::size_t le_n = 10000, le_head = 100, le_reps = 10;
  std::uint64_t le_seed = 1;
  leval->add_option("--campaign", le_dir, "campaign directory")->required();
  leval->add_option("--n", le_n, "latent vectors per repetition");
  leval->add_option("--head", le_head, "sequence prefix length");
  leval->add_option("--reps", le_reps, "repetitions");
  leval->add_option("--seed", le_seed, "evaluation seed");
  leval->add_option("--format", le_format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  leval->add_option("--out", le_out, "output file (default stdout)");

  // behaviour-eval
  auto* beval = app.add_subcommand("behaviour-eval", "cosine distance of input vs true encoding");
  std::string be_dir, be_format = "csv", be_out;
  std::size_t be_n = 100;
  std::uint64_t be_seed = 1;
  beval->add_option("--campaign", be_dir, "campaign directory")->required();
  beval->add_option("--n", be_n, "number of probes");
  beval->add_option("--seed", be_seed, "evaluation seed");
  beval->add_option("--format", be_format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  beval->add_option("--out", be_out, "output file (default stdout)");

  // crash-report
  auto* creport = app.add_subcommand("crash-report", "summarize archived crashes");
  std::string cr_dir, cr_format = "csv", cr_out;
  creport->add_option("--campaign", cr_dir, "campaign directory")->required();
  creport->add_option("--format", cr_format, "csv or json")
      ->check(CLI::IsMember({"csv", "json"}));
  creport->add_option("--out", cr_out, "output file (default stdout)");

  try {
    app.parse(argc, argv);
    if (fuzz->parsed()) return detail::cmd_fuzz(config_file, fuzz_overrides.pairs, resume);
    if (gen->parsed()) return detail::cmd_generate(gen_dir, gen_count, gen_seed, gen_latents, gen_out);
    if (rank->parsed()) return detail::cmd_rank(rank_dir, rank_mode, rank_on, rank_out);
    if (ngram->parsed()) return detail::cmd_ngram_report(ng_dir, ng_min, ng_max, ng_top, ng_format, ng_out);
    if (leval->parsed())
      return detail::cmd_latent_eval(le_dir, le_n, le_head, le_reps, le_seed, le_format, le_out);
    if (beval->parsed()) return detail::cmd_behaviour_eval(be_dir, be_n, be_seed, be_format, be_out);
    if (creport->parsed()) return detail::cmd_crash_report(cr_dir, cr_format, cr_out);
    return 1;
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  } catch (const instability_error& e) {
    std::cerr << "instability: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace gnast::cli
