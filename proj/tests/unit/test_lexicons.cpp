//
// Copyright 2026 The fairdial Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

#include <gtest/gtest.h>

#include <sstream>
#include <string>
#include <vector>

#include "fairdial/lexicons.hpp"

namespace fairdial {
namespace {

using Tokens = std::vector<std::string>;

std::string data_file(const std::string& name) {
  return std::string(FAIRDIAL_DATA_DIR) + "/" + name;
}

TEST(PairList, ParsesPairsAndComments) {
  const auto list = parse_pair_list(
      "# comment\n\nhe - she\nHis - Her\nson-in-law - daughter-in-law\n", "t");
  ASSERT_EQ(list.size(), 3u);
  EXPECT_EQ(list.pairs()[0].a_form, Tokens{"he"});
  EXPECT_EQ(list.pairs()[1].b_form, Tokens{"her"});
  EXPECT_EQ(list.pairs()[2].a_form, (Tokens{"son", "in", "law"}));
  EXPECT_EQ(list.pairs()[2].a_surface, "son-in-law");
  EXPECT_EQ(list.max_phrase_length(), 3u);
  EXPECT_EQ(list.pairs()[1].line, 4u);
}

TEST(PairList, RejectsMalformedLines) {
  try {
    parse_pair_list("he - she\nhe she\n", "t");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2u);
  }
  EXPECT_THROW(parse_pair_list("he - \n", "t"), ParseError);
  EXPECT_THROW(parse_pair_list(" - she\n", "t"), ParseError);
  EXPECT_THROW(parse_pair_list("he - He\n", "t"), ParseError);
  EXPECT_THROW(parse_pair_list("a b c d e f - x\n", "t"), ParseError);
  EXPECT_THROW(parse_pair_list("# nothing\n", "t"), ValidationError);
}

TEST(PairList, CounterpartUsesFirstListedPair) {
  const auto list = parse_pair_list("this - dis\nthat - dat\nthis - dhis\n", "r");
  const Tokens this_{"this"};
  EXPECT_EQ(counterpart_of(list, this_, Direction::kAToB), Tokens{"dis"});
  const Tokens dis{"dis"};
  EXPECT_EQ(counterpart_of(list, dis, Direction::kBToA), Tokens{"this"});
  EXPECT_FALSE(counterpart_of(list, dis, Direction::kAToB).has_value());
}

TEST(PairList, WarnsWhenPhraseIsOnBothSides) {
  const auto list = parse_pair_list("police - po po\ncops - police\n", "r");
  ASSERT_EQ(list.warnings().size(), 1u);
  EXPECT_NE(list.warnings()[0].find("police"), std::string::npos);
}

TEST(PairList, ShippedListsLoad) {
  const auto gender = load_pair_list(data_file("gender_pairs.txt"), "gender");
  const auto race = load_pair_list(data_file("race_pairs.txt"), "race");
  EXPECT_GT(gender.size(), 100u);
  EXPECT_GT(race.size(), 50u);
  const Tokens he{"he"};
  EXPECT_EQ(counterpart_of(gender, he, Direction::kAToB), Tokens{"she"});
  const Tokens this_{"this"};
  EXPECT_EQ(counterpart_of(race, this_, Direction::kAToB), Tokens{"dis"});
}

TEST(Direction, RoundTrip) {
  EXPECT_EQ(parse_direction(to_string(Direction::kAToB)), Direction::kAToB);
  EXPECT_EQ(parse_direction(to_string(Direction::kBToA)), Direction::kBToA);
  EXPECT_EQ(reverse(Direction::kAToB), Direction::kBToA);
  EXPECT_THROW(parse_direction("sideways"), ValidationError);
}

TEST(AttributeLexicon, LoadsLinesAndCommaLists) {
  std::istringstream in("# c\nEngineer, lawyer\nnurse\nengineer\nin-law\n");
  const auto lex = load_attribute_list(in, "career");
  EXPECT_EQ(lex.size(), 4u);
  EXPECT_TRUE(lex.contains("ENGINEER"));
  EXPECT_FALSE(lex.contains("doctor"));
  ASSERT_EQ(lex.compounds().size(), 1u);
  EXPECT_EQ(lex.compounds()[0], (Tokens{"in", "law"}));
}

TEST(AttributeLexicon, Rejects) {
  std::istringstream multi("two words\n");
  EXPECT_THROW(load_attribute_list(multi, "x"), ParseError);
  std::istringstream empty("# none\n");
  EXPECT_THROW(load_attribute_list(empty, "x"), ValidationError);
}

TEST(AttributeLexicon, ShippedListsContainReferenceWords) {
  const auto career = load_attribute_list(data_file("career.txt"), "career");
  const auto family = load_attribute_list(data_file("family.txt"), "family");
  const auto unpleasant = load_attribute_list(data_file("unpleasant.txt"), "unpleasant");
  const auto pleasant = load_attribute_list(data_file("pleasant.txt"), "pleasant");
  EXPECT_TRUE(career.contains("engineer"));
  EXPECT_TRUE(family.contains("wife"));
  EXPECT_TRUE(family.contains("wedding"));
  EXPECT_TRUE(family.contains("marriage"));
  EXPECT_TRUE(unpleasant.contains("idiot"));
  EXPECT_TRUE(pleasant.contains("lovely"));
}

}  // namespace
}  // namespace fairdial
