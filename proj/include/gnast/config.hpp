#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "gnast/harness.hpp"
#include "gnast/trace.hpp"

namespace gnast {

// Full campaign configuration. The desk profile is sized so everything runs
// on an ordinary machine; the paper profile selects the 64K map and the
// 42-block generator but is otherwise identical.
struct CampaignConfig {
  std::string target = "json";
  std::string profile = "desk";  // desk | paper
  std::size_t map_size = 1024;
  std::size_t latent_dim = 16;
  std::size_t str_len_max = 512;   // fixed
  std::size_t dict_size = 129;     // fixed
  std::size_t batch_size = 64;
  std::size_t steps_per_pass = 100;
  std::size_t k = 5000;
  double learning_rate = 0.0001;
  double input_noise_sigma = 0.1;
  double mse_weight = 1.0;
  std::size_t deconv_blocks = 10;
  std::size_t filters = 32;
  double leaky_slope = 0.2;
  std::size_t epochs = 100;
  std::uint64_t seed = 1;
  std::string output_dir = "gnast-out";

  bool operator==(const CampaignConfig&) const = default;
};

namespace detail {

inline void config_fail(const std::string& field, const std::string& constraint) {
  throw std::invalid_argument("config field '" + field + "': " + constraint);
}

}  // namespace detail

inline void validate_config(const CampaignConfig& c) {
  find_target(c.target);  // throws for unknown ids
  if (c.profile != "desk" && c.profile != "paper")
    detail::config_fail("profile", "must be 'desk' or 'paper'");
  if (!is_power_of_two(c.map_size)) detail::config_fail("map_size", "must be a power of two");
  if (c.latent_dim == 0) detail::config_fail("latent_dim", "must be positive");
  if (c.str_len_max != 512) detail::config_fail("str_len_max", "fixed at 512");
  if (c.dict_size != 129) detail::config_fail("dict_size", "fixed at 129");
  if (c.batch_size == 0) detail::config_fail("batch_size", "must be positive");
  if (c.k < 2) detail::config_fail("k", "must be at least 2");
  if (c.learning_rate <= 0) detail::config_fail("learning_rate", "must be positive");
  if (c.input_noise_sigma < 0) detail::config_fail("input_noise_sigma", "must be nonnegative");
  if (c.mse_weight < 0) detail::config_fail("mse_weight", "must be nonnegative");
  if (c.deconv_blocks == 0) detail::config_fail("deconv_blocks", "must be positive");
  if (c.filters == 0) detail::config_fail("filters", "must be positive");
  if (c.leaky_slope <= 0 || c.leaky_slope >= 1)
    detail::config_fail("leaky_slope", "must be in (0, 1)");
  if (c.output_dir.empty()) detail::config_fail("output_dir", "must not be empty");
}

inline nlohmann::json config_to_json(const CampaignConfig& c) {
  return nlohmann::json{{"target", c.target},
                        {"profile", c.profile},
                        {"map_size", c.map_size},
                        {"latent_dim", c.latent_dim},
                        {"str_len_max", c.str_len_max},
                        {"dict_size", c.dict_size},
                        {"batch_size", c.batch_size},
                        {"steps_per_pass", c.steps_per_pass},
                        {"k", c.k},
                        {"learning_rate", c.learning_rate},
                        {"input_noise_sigma", c.input_noise_sigma},
                        {"mse_weight", c.mse_weight},
                        {"deconv_blocks", c.deconv_blocks},
                        {"filters", c.filters},
                        {"leaky_slope", c.leaky_slope},
                        {"epochs", c.epochs},
                        {"seed", c.seed},
                        {"output_dir", c.output_dir}};
}

// Builds a config from defaults, an optional JSON document, and command-line
// overrides (applied last, in order). The "paper" profile adjusts map_size
// and deconv_blocks unless the document or an override sets them explicitly.
inline CampaignConfig parse_config(
    const std::string& json_text,
    const std::vector<std::pair<std::string, std::string>>& overrides = {}) {
  nlohmann::json doc = nlohmann::json::object();
  if (!json_text.empty()) {
    doc = nlohmann::json::parse(json_text, nullptr, true);
    if (!doc.is_object()) throw std::invalid_argument("config document must be a JSON object");
  }
  for (const auto& [key, value] : overrides) {
    nlohmann::json v;
    try {
      v = nlohmann::json::parse(value);
    } catch (const nlohmann::json::parse_error&) {
      v = value;  // bare strings (target ids, paths) arrive unquoted
    }
    if (v.is_number() || v.is_string()) doc[key] = v;
    else throw std::invalid_argument("override for '" + key + "' must be a number or string");
  }

  CampaignConfig c;
  if (doc.contains("profile")) {
    c.profile = doc.at("profile").get<std::string>();
    if (c.profile == "paper") {
      c.map_size = 65536;
      c.deconv_blocks = 42;
    }
  }

  auto get_size = [&](const char* key, std::size_t& field) {
    if (doc.contains(key)) field = doc.at(key).get<std::size_t>();
  };
  auto get_double = [&](const char* key, double& field) {
    if (doc.contains(key)) field = doc.at(key).get<double>();
  };

  static const std::vector<std::string> known = {
      "target",        "profile",       "map_size",    "latent_dim",       "str_len_max",
      "dict_size",     "batch_size",    "steps_per_pass", "k",             "learning_rate",
      "input_noise_sigma", "mse_weight", "deconv_blocks", "filters",       "leaky_slope",
      "epochs",        "seed",          "output_dir"};
  for (const auto& [key, _] : doc.items()) {
    if (std::find(known.begin(), known.end(), key) == known.end())
      throw std::invalid_argument("unknown config key: '" + key + "'");
  }

  if (doc.contains("target")) c.target = doc.at("target").get<std::string>();
  if (doc.contains("output_dir")) c.output_dir = doc.at("output_dir").get<std::string>();
  get_size("map_size", c.map_size);
  get_size("latent_dim", c.latent_dim);
  get_size("str_len_max", c.str_len_max);
  get_size("dict_size", c.dict_size);
  get_size("batch_size", c.batch_size);
  get_size("steps_per_pass", c.steps_per_pass);
  get_size("k", c.k);
  get_size("deconv_blocks", c.deconv_blocks);
  get_size("filters", c.filters);
  get_size("epochs", c.epochs);
  get_double("learning_rate", c.learning_rate);
  get_double("input_noise_sigma", c.input_noise_sigma);
  get_double("mse_weight", c.mse_weight);
  get_double("leaky_slope", c.leaky_slope);
  if (doc.contains("seed")) c.seed = doc.at("seed").get<std::uint64_t>();

  validate_config(c);
  return c;
}

}  // namespace gnast
