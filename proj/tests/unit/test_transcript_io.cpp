#include <gtest/gtest.h>

#include <sstream>

#include "dicka/transcript_io.hpp"

namespace p = dicka::protocol;

namespace {

p::ProtocolConfig config(double threshold, std::uint64_t seed) {
  p::ProtocolConfig c;
  c.n_parties = 4;
  c.n_rounds = 800;
  c.test_prob = 0.2;
  c.threshold = threshold;
  c.qber = 0.01;
  c.seed = seed;
  c.key_length = 100;
  return c;
}

void expect_round_trip(const p::Transcript& t) {
  const std::string text = dicka::io::transcript_to_string(t);
  std::istringstream in(text);
  const auto back = dicka::io::read_transcript(in);
  EXPECT_EQ(back.config, t.config);
  EXPECT_EQ(back.rounds, t.rounds);
  EXPECT_EQ(back.ec, t.ec);
  EXPECT_EQ(back.tests, t.tests);
  EXPECT_EQ(back.wins, t.wins);
  EXPECT_EQ(back.pa_seed, t.pa_seed);
  EXPECT_EQ(back.abort, t.abort);
  ASSERT_EQ(back.keys.size(), t.keys.size());
  for (std::size_t i = 0; i < t.keys.size(); ++i) EXPECT_EQ(back.keys[i].final_key, t.keys[i].final_key);
  EXPECT_EQ(dicka::io::transcript_to_string(back), text);
}

}  // namespace

TEST(TranscriptIo, RoundTripSuccessfulRun) {
  const auto t = p::run_protocol(config(0.78, 3));
  ASSERT_FALSE(t.abort.has_value());
  expect_round_trip(t);
}

TEST(TranscriptIo, RoundTripAbortedRun) {
  const auto t = p::run_protocol(config(0.85, 3));
  ASSERT_TRUE(t.abort.has_value());
  expect_round_trip(t);
}

TEST(TranscriptIo, RejectsMalformedInput) {
  std::istringstream bad_magic("not-a-transcript 1\n");
  EXPECT_THROW(dicka::io::read_transcript(bad_magic), dicka::Error);
  std::string text = dicka::io::transcript_to_string(p::run_protocol(config(0.78, 4)));
  text.resize(text.size() / 2);
  std::istringstream truncated(text);
  EXPECT_THROW(dicka::io::read_transcript(truncated), dicka::Error);
}

TEST(TranscriptIo, SummaryFields) {
  const auto t = p::run_protocol(config(0.78, 5));
  const auto j = dicka::io::summary_json(t);
  EXPECT_EQ(j["n_parties"], 4);
  EXPECT_EQ(j["key_length"], 100);
  EXPECT_EQ(j["keys_identical"], true);
  EXPECT_EQ(j["final_keys"].size(), 4U);
  EXPECT_TRUE(j["abort"].is_null());
}
