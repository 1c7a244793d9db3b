#pragma once

#include <array>
#include <stdexcept>
#include <string>
#include <string_view>

#include "gnast/targets.hpp"
#include "gnast/trace.hpp"

namespace gnast {

enum class Outcome { Accepted, Rejected, Crash };

inline std::string_view outcome_name(Outcome o) {
  switch (o) {
    case Outcome::Accepted: return "accepted";
    case Outcome::Rejected: return "rejected";
    case Outcome::Crash: return "crash";
  }
  return "?";
}

inline Outcome outcome_from_name(std::string_view s) {
  if (s == "accepted") return Outcome::Accepted;
  if (s == "rejected") return Outcome::Rejected;
  if (s == "crash") return Outcome::Crash;
  throw std::runtime_error("unknown outcome: " + std::string(s));
}

struct ExecutionRecord {
  std::string input;
  CoverageTrace trace;
  Outcome outcome = Outcome::Rejected;
  std::string detail;
};

struct TargetProgram {
  std::string_view id;
  std::string_view fault_predicate_doc;
};

inline constexpr std::array<TargetProgram, 3> kTargets = {{
    {"json", "an empty object value `{}` occurring as a direct element of an array, e.g. `[{}]`"},
    {"xmlite", "a closing tag with an empty name: `</>`"},
    {"csub", "an empty parenthesis group `()` with no tokens between the parentheses"},
}};

inline const TargetProgram& find_target(std::string_view id) {
  for (const auto& t : kTargets)
    if (t.id == id) return t;
  throw std::invalid_argument("unknown target id: " + std::string(id));
}

// Runs one input against a bundled target in-process. Every execution gets
// a fresh trace buffer, so runs are pure and may happen concurrently.
inline ExecutionRecord execute_target(std::string_view target_id, std::string_view input,
                                      std::size_t map_size, std::size_t max_len = 512) {
  find_target(target_id);  // throws on unknown id
  if (input.size() > max_len)
    throw std::invalid_argument("input exceeds length cap of " + std::to_string(max_len) +
                                " bytes (got " + std::to_string(input.size()) + ")");
  TraceContext ctx(map_size);
  targets::RunResult r;
  if (target_id == "json") r = targets::run_json(input, ctx);
  else if (target_id == "xmlite") r = targets::run_xmlite(input, ctx);
  else r = targets::run_csub(input, ctx);

  ExecutionRecord rec;
  rec.input.assign(input.begin(), input.end());
  rec.trace = ctx.finalize();
  rec.outcome = r.crashed ? Outcome::Crash : (r.accepted ? Outcome::Accepted : Outcome::Rejected);
  rec.detail = r.detail;
  return rec;
}

}  // namespace gnast
