#include <gtest/gtest.h>

#include "assertgen/errors.hpp"
#include "assertgen/tapio.hpp"
#include "support.hpp"

using namespace assertgen;

TEST(TapFile, RoundTrip) {
  Rng rng(9);
  std::vector<miner::TapRecord> taps;
  for (int i = 0; i < 200; ++i) {
    auto t = testsupport::random_tap(rng);
    if (i % 3 == 0) t.focal_signature = "get(int,String)";
    taps.push_back(t);
  }
  auto text = tapio::taps_to_jsonl(taps);
  EXPECT_EQ(tapio::taps_from_jsonl(text), taps);
  EXPECT_EQ(tapio::taps_to_jsonl(tapio::taps_from_jsonl(text)), text);
  EXPECT_EQ(text.back(), '\n');
  EXPECT_EQ(text.find('\r'), std::string::npos);
}

TEST(TapFile, FieldLayout) {
  miner::TapRecord t;
  t.context_tokens = {"x", "=", "\"a b\"", ";", "AssertPlaceHolder", ";"};
  t.target_tokens = {"assertNull", "(", "x", ")"};
  t.id = miner::tap_id(t.context_tokens, t.target_tokens);
  auto line = tapio::taps_to_jsonl({t});
  EXPECT_EQ(line, "{\"id\":\"" + t.id +
                      "\",\"context\":\"x = \\\"a b\\\" ; AssertPlaceHolder ;\",\"target\":\"assertNull ( x )\","
                      "\"focal_signature\":null}\n");
}

TEST(TapFile, BadInput) {
  EXPECT_THROW(tapio::taps_from_jsonl("{not json}\n"), InputError);
  EXPECT_THROW(tapio::taps_from_jsonl("{\"id\":\"1\"}\n"), InputError);
  EXPECT_TRUE(tapio::taps_from_jsonl("\n\n").empty());
}

TEST(AbstractTapFile, RoundTrip) {
  Rng rng(4);
  std::vector<miner::TapRecord> taps;
  for (int i = 0; i < 100; ++i) taps.push_back(testsupport::random_tap(rng));
  auto idioms = testsupport::random_idioms(rng, taps, 20);
  std::vector<abstractor::AbstractTap> abstract;
  for (const auto& t : taps) abstract.push_back(abstractor::abstract_tap(t, idioms));

  auto text = tapio::abstract_taps_to_jsonl(abstract);
  auto back = tapio::abstract_taps_from_jsonl(text);
  ASSERT_EQ(back.size(), abstract.size());
  for (std::size_t i = 0; i < back.size(); ++i) {
    EXPECT_EQ(back[i].raw_id, abstract[i].raw_id);
    EXPECT_EQ(back[i].context_tokens, abstract[i].context_tokens);
    EXPECT_EQ(back[i].target_tokens, abstract[i].target_tokens);
    EXPECT_EQ(back[i].map.forward, abstract[i].map.forward);
    EXPECT_EQ(back[i].map.backward, abstract[i].map.backward);
    EXPECT_EQ(back[i].map.next_index, abstract[i].map.next_index);
  }
  EXPECT_EQ(tapio::abstract_taps_to_jsonl(back), text);
}

TEST(FilterReportFile, RoundTrip) {
  miner::FilterReport r{10, 1, 2, 3, 4};
  auto back = tapio::filter_report_from_json(tapio::filter_report_json(r));
  EXPECT_EQ(back.input_count, 10u);
  EXPECT_EQ(back.removed_long, 1u);
  EXPECT_EQ(back.removed_unknown, 2u);
  EXPECT_EQ(back.removed_duplicate, 3u);
  EXPECT_EQ(back.kept, 4u);
}

TEST(Files, ReadWrite) {
  testsupport::TempDir dir;
  auto p = dir / "nested/dir/file.txt";
  tapio::write_file(p, "hello\n");
  EXPECT_EQ(tapio::read_file(p), "hello\n");
  EXPECT_THROW(tapio::read_file(dir / "missing"), InputError);
}

TEST(Files, JsonlLines) {
  auto lines = tapio::jsonl_lines("a\r\n\n  \nb");
  ASSERT_EQ(lines.size(), 2u);
  EXPECT_EQ(lines[0], "a");
  EXPECT_EQ(lines[1], "b");
}
