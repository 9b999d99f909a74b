#include <gtest/gtest.h>

#include <map>
#include <random>

#include "common/error.hpp"
#include "keywords/keywords.hpp"

namespace pulse::keywords {
namespace {

using Tokens = std::vector<std::string>;

TEST(Tokenize, LowercasesAndSplitsOnPunctuation) {
  EXPECT_EQ(tokenize_title("Coronavirus: Cases RISE, officials say!"),
            (Tokens{"coronavirus", "cases", "rise", "officials", "say"}));
  EXPECT_EQ(tokenize_title(""), Tokens{});
  EXPECT_EQ(tokenize_title("  ...  "), Tokens{});
}

TEST(Tokenize, KeepsInnerHyphensAndDeletesApostrophes) {
  EXPECT_EQ(tokenize_title("COVID-19 stay-at-home order"), (Tokens{"covid-19", "stay-at-home", "order"}));
  EXPECT_EQ(tokenize_title("Trump's plan - not -this- one"), (Tokens{"trumps", "plan", "not", "this", "one"}));
  EXPECT_EQ(tokenize_title("Trump\xE2\x80\x99s plan"), (Tokens{"trumps", "plan"}));
}

TEST(Tokenize, TreatsGeneralPunctuationAndNbspAsSeparators) {
  EXPECT_EQ(tokenize_title("virus\xE2\x80\x94lockdown"), (Tokens{"virus", "lockdown"}));
  EXPECT_EQ(tokenize_title("new\xC2\xA0york"), (Tokens{"new", "york"}));
  EXPECT_EQ(tokenize_title("caf\xC3\xA9 closes"), (Tokens{"caf\xC3\xA9", "closes"}));
}

TEST(Lemmatize, GroundTruthTable) {
  const std::map<std::string, std::string> truth = {
      {"cases", "case"},         {"says", "say"},         {"said", "say"},
      {"deaths", "death"},       {"stories", "story"},    {"hospitals", "hospital"},
      {"viruses", "virus"},      {"virus", "virus"},      {"crisis", "crisis"},
      {"business", "business"},  {"closing", "close"},    {"closed", "close"},
      {"testing", "test"},       {"tested", "test"},      {"running", "run"},
      {"stopped", "stop"},       {"hoping", "hope"},      {"spreading", "spread"},
      {"masks", "mask"},         {"lives", "life"},       {"children", "child"},
      {"news", "news"},          {"during", "during"},    {"sars", "sars"},
      {"covid-19", "covid-19"},  {"2020", "2020"},        {"bus", "bus"},
      {"churches", "church"},    {"boxes", "box"},        {"agreed", "agreed"},
      {"carried", "carry"},      {"falling", "fall"},     {"kissing", "kiss"},
      {"sing", "sing"},          {"updated", "update"},   {"related", "relate"},
  };
  for (const auto& [token, lemma] : truth) EXPECT_EQ(lemmatize(token), lemma) << token;
}

TEST(Lemmatize, IsIdempotentOnCommonLemmas) {
  for (const char* w : {"case", "say", "death", "story", "virus", "close", "test", "run", "mask", "life"}) {
    EXPECT_EQ(lemmatize(lemmatize(w)), lemmatize(w)) << w;
  }
}

TEST(StopTokens, DropArticlesAndPrepositions) {
  KeywordCounter c;
  c.add_title("The spread of the virus in an area and at a school for the kids on the bus to home");
  for (const auto& kc : c.top(100)) EXPECT_FALSE(is_stop_token(kc.lemma)) << kc.lemma;
  EXPECT_EQ(c.total_tokens(), 7u);
}

TEST(KeywordCounter, TiesBreakByLemma) {
  KeywordCounter c;
  c.add_title("zeta alpha mask");
  c.add_title("masks beta");
  const auto top = c.top(4);
  ASSERT_EQ(top.size(), 4u);
  EXPECT_EQ(top[0], (KeywordCount{"mask", 2}));
  EXPECT_EQ(top[1], (KeywordCount{"alpha", 1}));
  EXPECT_EQ(top[2], (KeywordCount{"beta", 1}));
  EXPECT_EQ(top[3], (KeywordCount{"zeta", 1}));
  EXPECT_EQ(c.top(100).size(), 4u);
}

TEST(KeywordCounter, CountsOccurrencesNotDocuments) {
  KeywordCounter c;
  c.add_title("virus virus virus");
  EXPECT_EQ(c.top(1)[0].mentions, 3u);
}

TEST(KeywordCounter, MergeEqualsSinglePass) {
  std::mt19937 rng(12);
  const std::vector<std::string> words = {"case", "cases", "death", "mask", "masks", "lockdown", "says",
                                          "school", "schools", "vaccine", "testing", "the", "of"};
  std::vector<std::string> titles;
  for (int i = 0; i < 500; ++i) {
    std::string t;
    for (int j = 0; j < 6; ++j) t += words[rng() % words.size()] + " ";
    titles.push_back(t);
  }
  KeywordCounter whole, a, b;
  for (std::size_t i = 0; i < titles.size(); ++i) {
    whole.add_title(titles[i]);
    (i % 2 ? a : b).add_title(titles[i]);
  }
  a.merge(b);
  EXPECT_EQ(a.top(1000), whole.top(1000));
  EXPECT_EQ(a.total_tokens(), whole.total_tokens());
}

TEST(TopKeywords, RejectsZeroK) {
  std::vector<gkg::Article> none;
  EXPECT_THROW(top_keywords(none, 0), Error);
  EXPECT_TRUE(top_keywords(none, 5).empty());
}

TEST(TopKeywords, SortedAndBoundedProperty) {
  std::mt19937 rng(4);
  std::vector<gkg::Article> articles(300);
  for (auto& a : articles) {
    for (int j = 0; j < 5; ++j) a.record.title += "w" + std::to_string(rng() % 40) + " ";
  }
  for (std::size_t k : {1u, 5u, 10u, 40u, 100u}) {
    const auto top = top_keywords(articles, k);
    EXPECT_LE(top.size(), k);
    for (std::size_t i = 1; i < top.size(); ++i) {
      const bool ordered = top[i - 1].mentions > top[i].mentions ||
                           (top[i - 1].mentions == top[i].mentions && top[i - 1].lemma < top[i].lemma);
      EXPECT_TRUE(ordered) << i;
    }
  }
}

}  // namespace
}  // namespace pulse::keywords
