#pragma once

#include <filesystem>
#include <fstream>
#include <optional>
#include <string>

#include <json.hpp>

#include "gnast/checkpoint.hpp"
#include "gnast/config.hpp"
#include "gnast/hash.hpp"
#include "gnast/orchestrator.hpp"
#include "gnast/state.hpp"

// Campaign directory layout:
//   config.json              resolved configuration echo
//   inputs/<sha256>.bin      corpus record input bytes
//   traces/<sha256>.gnt      matching trace, GNT1 format
//   crashes/<sha256>.{bin,gnt} + crashes/index.jsonl
//   index.jsonl              one JSON object per corpus record
//   reports.jsonl            one epoch report per line
//   checkpoints/epoch_<e>/   vae.ckpt, gnn.ckpt, state.json
namespace gnast {

namespace fs = std::filesystem;

inline void write_file(const fs::path& path, std::string_view bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw std::runtime_error("short write: " + path.string());
}

inline std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open: " + path.string());
  std::string s((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return s;
}

inline nlohmann::json report_to_json(const EpochReport& r) {
  return nlohmann::json{{"epoch", r.epoch},
                        {"new_distinct_traces", r.new_distinct_traces},
                        {"corpus_size", r.corpus_size},
                        {"vae_loss_mean", r.vae_loss_mean},
                        {"gnn_loss_mean", r.gnn_loss_mean},
                        {"crashes_this_epoch", r.crashes_this_epoch},
                        {"wall_time_s", r.wall_time_s}};
}

inline EpochReport report_from_json(const nlohmann::json& j) {
  EpochReport r;
  r.epoch = j.at("epoch").get<std::uint64_t>();
  r.new_distinct_traces = j.at("new_distinct_traces").get<std::uint64_t>();
  r.corpus_size = j.at("corpus_size").get<std::uint64_t>();
  r.vae_loss_mean = j.at("vae_loss_mean").get<double>();
  r.gnn_loss_mean = j.at("gnn_loss_mean").get<double>();
  r.crashes_this_epoch = j.at("crashes_this_epoch").get<std::uint64_t>();
  r.wall_time_s = j.at("wall_time_s").get<double>();
  return r;
}

// Latent vector files: per vector a u32-LE length prefix then that many
// little-endian float32 values; vectors are simply concatenated.
inline void write_latents_file(const fs::path& path,
                               const std::vector<std::vector<float>>& latents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
  for (const auto& z : latents) {
    const std::uint32_t n = static_cast<std::uint32_t>(z.size());
    out.write(reinterpret_cast<const char*>(&n), 4);
    out.write(reinterpret_cast<const char*>(z.data()),
              static_cast<std::streamsize>(z.size() * sizeof(float)));
  }
  if (!out) throw std::runtime_error("short write: " + path.string());
}

inline std::vector<std::vector<float>> read_latents_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open: " + path.string());
  std::vector<std::vector<float>> out;
  for (;;) {
    std::uint32_t n = 0;
    in.read(reinterpret_cast<char*>(&n), 4);
    if (in.gcount() == 0) break;
    if (in.gcount() != 4 || n == 0 || n > (1u << 20))
      throw std::runtime_error("bad latent vector length in: " + path.string());
    std::vector<float> z(n);
    in.read(reinterpret_cast<char*>(z.data()), static_cast<std::streamsize>(n * sizeof(float)));
    if (in.gcount() != static_cast<std::streamsize>(n * sizeof(float)))
      throw std::runtime_error("truncated latent vector in: " + path.string());
    out.push_back(std::move(z));
  }
  return out;
}

// Writes inputs, traces, crashes and reports as the campaign produces them.
// Files are content-addressed, so retried epochs rewrite identical bytes.
class DirectoryHook : public PersistHook {
 public:
  explicit DirectoryHook(fs::path dir) : dir_(std::move(dir)) {
    fs::create_directories(dir_ / "inputs");
    fs::create_directories(dir_ / "traces");
    fs::create_directories(dir_ / "crashes");
  }

  void on_new_record(const CorpusRecord& rec) override {
    const std::string h = sha256_hex(rec.input);
    write_file(dir_ / "inputs" / (h + ".bin"), rec.input);
    write_trace_file((dir_ / "traces" / (h + ".gnt")).string(), rec.trace);
  }

  void on_crash(const CrashEntry& e) override {
    const std::string h = sha256_hex(e.record.input);
    write_file(dir_ / "crashes" / (h + ".bin"), e.record.input);
    write_trace_file((dir_ / "crashes" / (h + ".gnt")).string(), e.record.trace);
  }

  void on_report(const EpochReport& r) override {
    std::ofstream out(dir_ / "reports.jsonl", std::ios::app);
    out << report_to_json(r).dump() << "\n";
  }

 private:
  fs::path dir_;
};

// Full snapshot of a campaign: corpus index, crash index, reports, config
// echo, and a checkpoint directory for the current epoch. save then load
// reproduces the state bit-exactly, so resumed campaigns continue on the
// same trajectory an uninterrupted run would take.
inline void save_corpus(const FuzzerState& state, const CampaignConfig& cfg, const fs::path& dir) {
  fs::create_directories(dir / "inputs");
  fs::create_directories(dir / "traces");
  fs::create_directories(dir / "crashes");
  write_file(dir / "config.json", config_to_json(cfg).dump(2) + "\n");

  std::ofstream index(dir / "index.jsonl", std::ios::trunc);
  if (!index) throw std::runtime_error("cannot write corpus index");
  for (const auto& rec : state.corpus) {
    const std::string h = sha256_hex(rec.input);
    write_file(dir / "inputs" / (h + ".bin"), rec.input);
    write_trace_file((dir / "traces" / (h + ".gnt")).string(), rec.trace);
    index << nlohmann::json{{"hash", h},
                            {"epoch_found", rec.epoch_found},
                            {"outcome", outcome_name(rec.outcome)},
                            {"latent", rec.latent}}
                 .dump()
          << "\n";
  }
  index.close();

  std::ofstream crash_index(dir / "crashes" / "index.jsonl", std::ios::trunc);
  for (const auto& e : state.crashes) {
    const std::string h = sha256_hex(e.record.input);
    write_file(dir / "crashes" / (h + ".bin"), e.record.input);
    write_trace_file((dir / "crashes" / (h + ".gnt")).string(), e.record.trace);
    crash_index << nlohmann::json{{"hash", h}, {"epoch", e.epoch}, {"detail", e.record.detail}}
                       .dump()
                << "\n";
  }
  crash_index.close();

  std::ofstream reports(dir / "reports.jsonl", std::ios::trunc);
  for (const auto& r : state.reports) reports << report_to_json(r).dump() << "\n";
  reports.close();

  const fs::path ckpt = dir / "checkpoints" / ("epoch_" + std::to_string(state.epoch));
  fs::create_directories(ckpt);
  save_checkpoint(state.vae.params(), (ckpt / "vae.ckpt").string());
  save_checkpoint(state.gnn.params(), (ckpt / "gnn.ckpt").string());

  nlohmann::json meta{{"epoch", state.epoch},
                      {"learning_rate", state.learning_rate},
                      {"lr_halved", state.lr_halved},
                      {"rng", std::to_string(state.rng.state())},
                      {"staged", state.staged},
                      {"seen_traces", std::vector<std::string>(state.seen_traces.begin(),
                                                               state.seen_traces.end())}};
  write_file(ckpt / "state.json", meta.dump(2) + "\n");
}

inline std::optional<std::uint64_t> latest_checkpoint_epoch(const fs::path& dir) {
  const fs::path root = dir / "checkpoints";
  if (!fs::is_directory(root)) return std::nullopt;
  std::optional<std::uint64_t> best;
  for (const auto& entry : fs::directory_iterator(root)) {
    const std::string name = entry.path().filename().string();
    if (name.rfind("epoch_", 0) != 0) continue;
    const std::uint64_t e = std::stoull(name.substr(6));
    if (!best || e > *best) best = e;
  }
  return best;
}

struct LoadedCampaign {
  CampaignConfig config;
  FuzzerState state;
};

inline LoadedCampaign load_corpus(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw std::runtime_error("no campaign directory: " + dir.string());
  const fs::path cfg_path = dir / "config.json";
  if (!fs::exists(cfg_path)) throw std::runtime_error("missing file: " + cfg_path.string());
  CampaignConfig cfg = parse_config(read_file(cfg_path));

  const auto epoch = latest_checkpoint_epoch(dir);
  if (!epoch) throw std::runtime_error("no checkpoints under: " + (dir / "checkpoints").string());
  const fs::path ckpt = dir / "checkpoints" / ("epoch_" + std::to_string(*epoch));

  VaeDims vd;
  vd.map_size = cfg.map_size;
  vd.latent = cfg.latent_dim;
  GenDims gd = desk_generator_dims(cfg.deconv_blocks, cfg.filters, cfg.latent_dim, 16,
                                   cfg.str_len_max, cfg.profile == "paper");
  gd.dict = cfg.dict_size;
  const float slope = static_cast<float>(cfg.leaky_slope);

  FuzzerState state(
      Vae<float>(vd, slope, load_checkpoint<float>((ckpt / "vae.ckpt").string())),
      Generator<float>(gd, slope, load_checkpoint<float>((ckpt / "gnn.ckpt").string())), Rng(0));

  const nlohmann::json meta = nlohmann::json::parse(read_file(ckpt / "state.json"));
  state.epoch = meta.at("epoch").get<std::uint64_t>();
  state.learning_rate = meta.at("learning_rate").get<double>();
  state.lr_halved = meta.at("lr_halved").get<bool>();
  state.rng.set_state(std::stoull(meta.at("rng").get<std::string>()));
  state.staged = meta.at("staged").get<std::vector<std::vector<float>>>();
  for (const auto& h : meta.at("seen_traces")) state.seen_traces.insert(h.get<std::string>());

  const fs::path index_path = dir / "index.jsonl";
  if (!fs::exists(index_path)) throw std::runtime_error("missing file: " + index_path.string());
  std::ifstream index(index_path);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(index, line)) {
    ++line_no;
    if (line.empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw std::runtime_error("corrupt index line " + std::to_string(line_no) + " in " +
                               index_path.string() + ": " + e.what());
    }
    CorpusRecord rec;
    const std::string h = j.at("hash").get<std::string>();
    rec.input = read_file(dir / "inputs" / (h + ".bin"));
    if (sha256_hex(rec.input) != h)
      throw std::runtime_error("input bytes do not match hash: " + h);
    rec.trace = read_trace_file((dir / "traces" / (h + ".gnt")).string());
    rec.epoch_found = j.at("epoch_found").get<std::uint64_t>();
    rec.outcome = outcome_from_name(j.at("outcome").get<std::string>());
    rec.latent = j.at("latent").get<std::vector<float>>();
    state.corpus.push_back(std::move(rec));
  }

  const fs::path crash_index = dir / "crashes" / "index.jsonl";
  if (fs::exists(crash_index)) {
    std::ifstream in(crash_index);
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      const nlohmann::json j = nlohmann::json::parse(line);
      CrashEntry e;
      const std::string h = j.at("hash").get<std::string>();
      e.record.input = read_file(dir / "crashes" / (h + ".bin"));
      e.record.trace = read_trace_file((dir / "crashes" / (h + ".gnt")).string());
      e.record.outcome = Outcome::Crash;
      e.record.detail = j.at("detail").get<std::string>();
      e.epoch = j.at("epoch").get<std::uint64_t>();
      state.crashes.push_back(std::move(e));
    }
  }

  const fs::path reports_path = dir / "reports.jsonl";
  if (fs::exists(reports_path)) {
    std::ifstream in(reports_path);
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      EpochReport r = report_from_json(nlohmann::json::parse(line));
      if (r.epoch < state.epoch) state.reports.push_back(r);
    }
  }

  return {std::move(cfg), std::move(state)};
}

}  // namespace gnast
