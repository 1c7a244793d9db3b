#include <catch2/catch_amalgamated.hpp>

#include "gnast/harness.hpp"
#include "gnast/rng.hpp"

using namespace gnast;

TEST_CASE("json target accepts well-formed values") {
  for (const char* ok : {"{}", "[]", "null", "true", "false", "42", "-3.25e2", "\"hi\\n\"",
                         "{\"a\": [1, 2, {\"b\": null}]}", "  [\"x\", {\"y\": \"z\"}]  "}) {
    ExecutionRecord rec = execute_target("json", ok, 1024);
    INFO(ok << " -> " << rec.detail);
    CHECK(rec.outcome == Outcome::Accepted);
    CHECK_FALSE(rec.trace.all_zero());
  }
}

TEST_CASE("json target rejects malformed input") {
  for (const char* bad : {"", "\x01\x02\x03", "{", "[1,", "\"unterminated", "tru", "1.,",
                          "{\"a\" 1}", "[1 2]", "nulll extra", "{}{}"}) {
    ExecutionRecord rec = execute_target("json", bad, 1024);
    INFO(bad << " -> " << rec.detail);
    CHECK(rec.outcome == Outcome::Rejected);
  }
  // binary garbage fixture from the harness contract
  CHECK(execute_target("json", std::string("\x00\x01\x02", 3), 1024).outcome ==
        Outcome::Rejected);
}

TEST_CASE("json seeded fault: empty object element inside an array") {
  CHECK(execute_target("json", "[{}]", 1024).outcome == Outcome::Crash);
  CHECK(execute_target("json", "[1, {} ,2]", 1024).outcome == Outcome::Crash);
  CHECK(execute_target("json", "[[ {} ]]", 1024).outcome == Outcome::Crash);
  // Empty objects elsewhere do not trigger it.
  CHECK(execute_target("json", "{}", 1024).outcome == Outcome::Accepted);
  CHECK(execute_target("json", "{\"a\": {}}", 1024).outcome == Outcome::Accepted);
  CHECK(execute_target("json", "[{\"a\":1}]", 1024).outcome == Outcome::Accepted);
}

TEST_CASE("json depth guard rejects instead of overflowing") {
  std::string deep(100, '[');
  CHECK(execute_target("json", deep, 1024).outcome == Outcome::Rejected);
}

TEST_CASE("xmlite accepts well-formed fragments") {
  for (const char* ok : {"<a/>", "<a></a>", "<a href=\"x\">text</a>", "<a><b/>mid<c></c></a>",
                         "<!-- note --><a/>", "<?pi data?><a/>", "<a>&amp;</a>"}) {
    ExecutionRecord rec = execute_target("xmlite", ok, 1024);
    INFO(ok << " -> " << rec.detail);
    CHECK(rec.outcome == Outcome::Accepted);
  }
}

TEST_CASE("xmlite rejects malformed fragments") {
  for (const char* bad : {"", "plain text", "<a>", "</a>", "<a></b>", "<a", "<!-- unterminated",
                          "<a attr></a>", "<1tag/>", "<a>&bad"}) {
    ExecutionRecord rec = execute_target("xmlite", bad, 1024);
    INFO(bad << " -> " << rec.detail);
    CHECK(rec.outcome == Outcome::Rejected);
  }
}

TEST_CASE("xmlite seeded fault: empty-name closing tag") {
  CHECK(execute_target("xmlite", "</>", 1024).outcome == Outcome::Crash);
  CHECK(execute_target("xmlite", "<a></>", 1024).outcome == Outcome::Crash);
  CHECK(execute_target("xmlite", "text</>more", 1024).outcome == Outcome::Crash);
}

TEST_CASE("csub accepts balanced token streams") {
  for (const char* ok : {"int x = 1;", "if (x > 0) { y = x * 2; }", "/* comment */ x;",
                         "// line\nint y;", "\"string with (unbalanced\" ;", "for (i = 0; i < n; i = i + 1) { s; }"}) {
    ExecutionRecord rec = execute_target("csub", ok, 1024);
    INFO(ok << " -> " << rec.detail);
    CHECK(rec.outcome == Outcome::Accepted);
  }
}

TEST_CASE("csub rejects broken token streams") {
  for (const char* bad : {"{", "}", "(", "x)", "\"unterminated", "/* unterminated", "{ ( }"}) {
    ExecutionRecord rec = execute_target("csub", bad, 1024);
    INFO(bad << " -> " << rec.detail);
    CHECK(rec.outcome == Outcome::Rejected);
  }
  CHECK(execute_target("csub", "\x80\x90", 1024).outcome == Outcome::Rejected);
}

TEST_CASE("csub seeded fault: empty parenthesis group") {
  CHECK(execute_target("csub", "()", 1024).outcome == Outcome::Crash);
  CHECK(execute_target("csub", "f();", 1024).outcome == Outcome::Crash);
  CHECK(execute_target("csub", "( )", 1024).outcome == Outcome::Crash);
  CHECK(execute_target("csub", "(/* c */)", 1024).outcome == Outcome::Crash);
  // Non-empty groups are fine.
  CHECK(execute_target("csub", "(x)", 1024).outcome == Outcome::Accepted);
  CHECK(execute_target("csub", "(())", 1024).outcome == Outcome::Crash);  // inner pair is empty
}

TEST_CASE("fault predicates are documented per target") {
  for (const auto& t : kTargets) CHECK_FALSE(t.fault_predicate_doc.empty());
}

TEST_CASE("successful executions never produce the all-zero trace") {
  Rng rng(7);
  for (const auto& t : kTargets) {
    for (int i = 0; i < 200; ++i) {
      std::string s;
      const std::size_t len = rng.below(64);
      for (std::size_t j = 0; j < len; ++j)
        s.push_back(static_cast<char>(rng.below(128)));
      CHECK_FALSE(execute_target(t.id, s, 256).trace.all_zero());
    }
  }
}
