#include <catch2/catch_amalgamated.hpp>

#include <filesystem>

#include "gnast/harness.hpp"
#include "gnast/rng.hpp"
#include "gnast/trace.hpp"

using namespace gnast;

TEST_CASE("edge_index matches the xor-shift formula") {
  CHECK(edge_index(0, 0, 1024) == 0);
  CHECK(edge_index(2, 3, 1024) == 2);       // 3 ^ (2 >> 1) = 2
  CHECK(edge_index(1024, 7, 1024) == 519);  // (7 ^ 512) mod 1024

  // 10k random pairs against a direct re-evaluation of the formula.
  Rng rng(42);
  for (int i = 0; i < 10000; ++i) {
    const auto prev = static_cast<std::uint32_t>(rng.next_u64());
    const auto cur = static_cast<std::uint32_t>(rng.next_u64());
    CHECK(edge_index(prev, cur, 4096) == ((cur ^ (prev >> 1)) % 4096));
  }
}

TEST_CASE("edge_index rejects non-power-of-two map sizes") {
  CHECK_THROWS_AS(edge_index(0, 0, 1000), std::invalid_argument);
  CHECK_THROWS_AS(edge_index(0, 0, 0), std::invalid_argument);
}

TEST_CASE("bucketize matches the 8-class table") {
  CHECK(bucketize(0) == 0);
  CHECK(bucketize(1) == 1);
  CHECK(bucketize(2) == 2);
  CHECK(bucketize(3) == 3);
  CHECK(bucketize(5) == 4);
  CHECK(bucketize(1000) == 7);
  // Full table over 0..1000.
  for (std::uint64_t c = 0; c <= 1000; ++c) {
    std::uint8_t expect;
    if (c == 0) expect = 0;
    else if (c == 1) expect = 1;
    else if (c == 2) expect = 2;
    else if (c == 3) expect = 3;
    else if (c <= 7) expect = 4;
    else if (c <= 15) expect = 5;
    else if (c <= 31) expect = 6;
    else expect = 7;
    REQUIRE(bucketize(c) == expect);
  }
}

TEST_CASE("bucketize is nondecreasing") {
  for (std::uint64_t c = 1; c <= 4096; ++c) CHECK(bucketize(c) >= bucketize(c - 1));
}

TEST_CASE("trace context buckets per-edge hit counts") {
  TraceContext ctx(64);
  for (int i = 0; i < 5; ++i) {
    ctx.hit(3);
    ctx.hit(9);
  }
  CoverageTrace t = ctx.finalize();
  REQUIRE(t.map_size() == 64);
  CHECK_FALSE(t.all_zero());
  // 3 -> 9 taken 5 times lands in class 4.
  CHECK(t.classes[edge_index(3, 9, 64)] == 4);
}

TEST_CASE("trace file round-trips bit-exactly") {
  TraceContext ctx(128);
  ctx.hit(1);
  ctx.hit(2);
  ctx.hit(1);
  CoverageTrace t = ctx.finalize();

  auto path = std::filesystem::temp_directory_path() / "gnast_trace_test.gnt";
  write_trace_file(path.string(), t);
  CoverageTrace back = read_trace_file(path.string());
  CHECK(back == t);

  // Exact header bytes: magic then little-endian size.
  std::ifstream in(path, std::ios::binary);
  char head[8];
  in.read(head, 8);
  CHECK(std::string(head, 4) == "GNT1");
  CHECK(static_cast<unsigned char>(head[4]) == 128);
  CHECK(head[5] == 0);
  CHECK(head[6] == 0);
  CHECK(head[7] == 0);
  std::filesystem::remove(path);
}

TEST_CASE("trace file loader rejects corrupt files") {
  auto dir = std::filesystem::temp_directory_path();
  auto bad_magic = dir / "gnast_bad_magic.gnt";
  {
    std::ofstream out(bad_magic, std::ios::binary);
    out << "NOPE\x10\x00\x00\x00";
  }
  CHECK_THROWS_WITH(read_trace_file(bad_magic.string()),
                    Catch::Matchers::ContainsSubstring("bad trace file header"));

  auto truncated = dir / "gnast_truncated.gnt";
  {
    std::ofstream out(truncated, std::ios::binary);
    out << "GNT1";
    const std::uint32_t n = 64;
    out.write(reinterpret_cast<const char*>(&n), 4);
    out << "xy";  // far fewer than 64 class bytes
  }
  CHECK_THROWS_WITH(read_trace_file(truncated.string()),
                    Catch::Matchers::ContainsSubstring("truncated"));
  CHECK_THROWS(read_trace_file((dir / "gnast_does_not_exist.gnt").string()));
  std::filesystem::remove(bad_magic);
  std::filesystem::remove(truncated);
}

TEST_CASE("execute_target is deterministic and pure") {
  ExecutionRecord a = execute_target("json", "{}", 1024);
  ExecutionRecord b = execute_target("json", "{}", 1024);
  CHECK(a.trace == b.trace);
  CHECK(a.outcome == b.outcome);

  // Running another input in between must not leak into the next trace.
  execute_target("json", "[1,2,3]", 1024);
  ExecutionRecord c = execute_target("json", "{}", 1024);
  CHECK(c.trace == a.trace);
}

TEST_CASE("execute_target validates target id and input length") {
  CHECK_THROWS_AS(execute_target("nope", "{}", 1024), std::invalid_argument);
  std::string big(513, 'a');
  CHECK_THROWS_WITH(execute_target("json", big, 1024),
                    Catch::Matchers::ContainsSubstring("length cap"));
}

TEST_CASE("every bundled target records at least one edge") {
  for (const auto& t : kTargets) {
    ExecutionRecord rec = execute_target(t.id, "", 1024);
    CHECK_FALSE(rec.trace.all_zero());
    ExecutionRecord rec2 = execute_target(t.id, "x", 1024);
    CHECK_FALSE(rec2.trace.all_zero());
  }
}

TEST_CASE("traces reflect syntax: fixture inputs differ per target") {
  CHECK_FALSE(execute_target("json", "{}", 1024).trace ==
              execute_target("json", "[1,2]", 1024).trace);
  CHECK_FALSE(execute_target("xmlite", "<a/>", 1024).trace ==
              execute_target("xmlite", "<a>text</a>", 1024).trace);
  CHECK_FALSE(execute_target("csub", "int x;", 1024).trace ==
              execute_target("csub", "if (x) { y; }", 1024).trace);
}
