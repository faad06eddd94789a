#include <gtest/gtest.h>

#include <algorithm>
#include <fstream>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

#include "potion/category.hpp"
#include "potion/corpus.hpp"
#include "potion/rng.hpp"
#include "test_util.hpp"

namespace potion {
namespace {

using test::dataset_from;
using test::shipped_lexicon;

TEST(Category, FixedTaxonomy) {
  ASSERT_EQ(kCategories.size(), 11u);
  std::set<std::string_view> names;
  for (std::size_t i = 0; i < kCategories.size(); ++i) {
    EXPECT_EQ(kCategories[i].id, i);
    EXPECT_EQ(find_category(kCategories[i].name), i);
    names.insert(kCategories[i].name);
  }
  EXPECT_EQ(names.size(), 11u);
  EXPECT_FALSE(kCategories[5].atc().has_value());
  EXPECT_EQ(kCategories[5].name, "Poison");
  EXPECT_EQ(*kCategories[6].atc(), "N06");
  EXPECT_EQ(*kCategories[7].atc(), "N05");
  EXPECT_EQ(*kCategories[0].atc(), "N01");
}

TEST(Category, LookupIgnoresCaseAndSpacing) {
  EXPECT_EQ(find_category("  psychoanaleptics "), 6u);
  EXPECT_EQ(find_category("ANTIINFECTIVES   for\tsystemic use"), 1u);
  EXPECT_EQ(find_category("Musco-sceletal system"), 4u);
  EXPECT_EQ(find_category("Antiparasitic products, insecticides and repellants"), 2u);
  EXPECT_FALSE(find_category("Charms").has_value());
}

TEST(NormalizeText, Examples) {
  EXPECT_EQ(normalize_text("Stir 5 times,  clockwise. "), "stir 5 times, clockwise");
  EXPECT_EQ(normalize_text(""), "");
  EXPECT_EQ(normalize_text("ADD   Wormwood."), "add wormwood");
  EXPECT_EQ(normalize_text("Add Wormwood!  Stir;  Shake..."), "add wormwood. stir. shake");
  EXPECT_EQ(normalize_text(" \n\t "), "");
}

TEST(NormalizeText, Idempotent) {
  Rng rng(7);
  const std::string alphabet = "aB .!;,\n\tx";
  for (int trial = 0; trial < 500; ++trial) {
    std::string s;
    const auto len = rng.below(30);
    for (std::uint64_t i = 0; i < len; ++i) s.push_back(alphabet[rng.below(alphabet.size())]);
    const std::string once = normalize_text(s);
    EXPECT_EQ(normalize_text(once), once) << "input: '" << s << "'";
  }
}

TEST(SegmentRecipe, SplitsAndClassifies) {
  const Lexicon lex = shipped_lexicon();
  const auto frags = segment_recipe("Add Wormwood. Stir four times anti-clockwise.", lex);
  ASSERT_EQ(frags.size(), 2u);
  EXPECT_EQ(frags[0], (Fragment{"Add Wormwood.", FragmentKind::IngredientAddition}));
  EXPECT_EQ(frags[1], (Fragment{"Stir four times anti-clockwise.", FragmentKind::MixingInstruction}));

  const auto single = segment_recipe("Stir 5 times, clockwise.", lex);
  ASSERT_EQ(single.size(), 1u);
  EXPECT_EQ(single[0].kind, FragmentKind::MixingInstruction);

  const auto other = segment_recipe("The potion glows.", lex);
  ASSERT_EQ(other.size(), 1u);
  EXPECT_EQ(other[0], (Fragment{"The potion glows.", FragmentKind::Other}));
}

TEST(SegmentRecipe, BoundaryRequiresUppercaseOrEnd) {
  const Lexicon lex = shipped_lexicon();
  const auto frags = segment_recipe(
      "Leave to brew and return in 8 hours (Copper), 14 hours (Brass). Add 2.5 drops of bile; stir. "
      "Shake!  Slice bursting mushrooms",
      lex);
  ASSERT_EQ(frags.size(), 4u);
  EXPECT_EQ(frags[0].text, "Leave to brew and return in 8 hours (Copper), 14 hours (Brass).");
  EXPECT_EQ(frags[1].text, "Add 2.5 drops of bile; stir.");
  EXPECT_EQ(frags[2], (Fragment{"Shake!", FragmentKind::MixingInstruction}));
  EXPECT_EQ(frags[3], (Fragment{"Slice bursting mushrooms", FragmentKind::IngredientAddition}));
}

TEST(SegmentRecipe, NoContentThrows) {
  const Lexicon lex = shipped_lexicon();
  EXPECT_THROW(segment_recipe("", lex), NoFragments);
  EXPECT_THROW(segment_recipe("  ...  ", lex), NoFragments);
}

TEST(SegmentRecipe, FragmentsHaveNoNewlines) {
  const auto frags = segment_recipe("Add\nwormwood.\n\nStir\ttwice.", shipped_lexicon());
  ASSERT_EQ(frags.size(), 2u);
  EXPECT_EQ(frags[0].text, "Add wormwood.");
  EXPECT_EQ(frags[1].text, "Stir twice.");
}

TEST(Lexicon, ParsesSectionsAndRejectsJunk) {
  const Lexicon lex = Lexicon::parse(std::string_view("version 3\n[ingredient]\nAdd\n[mixing]\nwhisk\n"));
  EXPECT_EQ(lex.version, "3");
  EXPECT_EQ(lex.classify("ADD"), FragmentKind::IngredientAddition);
  EXPECT_EQ(lex.classify("whisk"), FragmentKind::MixingInstruction);
  EXPECT_EQ(lex.classify("stir"), FragmentKind::Other);
  EXPECT_THROW(Lexicon::parse(std::string_view("add\n")), MalformedRecord);
  EXPECT_THROW(Lexicon::parse(std::string_view("[nouns]\n")), MalformedRecord);
  EXPECT_THROW(Lexicon::parse(std::string_view("[ingredient]\nadd\n[mixing]\nadd\n")), InvalidConfig);
}

TEST(Lexicon, ShippedFileMatchesDocumentedVerbs) {
  const Lexicon lex = shipped_lexicon();
  EXPECT_EQ(lex.ingredient_verbs,
            (std::set<std::string>{"add", "pour", "drop", "sprinkle", "slice", "crush", "juice", "place"}));
  EXPECT_EQ(lex.mixing_verbs,
            (std::set<std::string>{"stir", "shake", "heat", "brew", "leave", "wave", "bottle", "allow", "let"}));
}

TEST(ParseCorpus, CanonicalCountsMatchTaxonomyTable) {
  const Dataset d = test::canonical_dataset();
  EXPECT_EQ(d.size(), 72u);
  const CategoryCountArray expected{2, 4, 2, 8, 12, 11, 21, 2, 1, 1, 8};
  EXPECT_EQ(d.counts_per_category, expected);
}

TEST(ParseCorpus, ToyCorpusCounts) {
  const Dataset d = dataset_from(
      R"({"id":"a","category":"Poison","text":"Add hemlock."})"
      "\n"
      R"({"id":"b","category":"various","text":"Add a bezoar. Stir."})"
      "\n\n"
      R"({"id":"c","category":"Dermatologicals","text":"Add dittany."})"
      "\n");
  CategoryCountArray expected{};
  expected[5] = expected[10] = expected[3] = 1;
  EXPECT_EQ(d.counts_per_category, expected);
  ASSERT_EQ(d.size(), 3u);
  EXPECT_EQ(d.recipes[0].id, "a");
  EXPECT_EQ(d.recipes[1].id, "b");
  EXPECT_EQ(d.recipes[2].id, "c");
  EXPECT_EQ(d.recipes[1].fragments.size(), 2u);
}

TEST(ParseCorpus, Errors) {
  EXPECT_THROW(dataset_from(""), EmptyCorpus);
  EXPECT_THROW(dataset_from("\n  \n"), EmptyCorpus);
  try {
    dataset_from(R"({"id":"a","category":"Poison","text":"Add x."})" "\n" R"({"id":"b","category":"Charms","text":"Add y."})");
    FAIL() << "expected UnknownCategory";
  } catch (const UnknownCategory& e) {
    EXPECT_EQ(e.name(), "Charms");
    EXPECT_EQ(e.line_no(), 2u);
  }
  EXPECT_THROW(dataset_from(R"({"id":"a","category":"Poison","text":"Add x."})" "\n"
                            R"({"id":"a","category":"Poison","text":"Add y."})"),
               DuplicateId);
  try {
    dataset_from(R"({"id":"a","category":"Poison","text":"Add x."})" "\nnot json\n");
    FAIL() << "expected MalformedRecord";
  } catch (const MalformedRecord& e) {
    EXPECT_EQ(e.line_no(), 2u);
  }
  EXPECT_THROW(dataset_from(R"({"id":"","category":"Poison","text":"Add x."})"), MalformedRecord);
  EXPECT_THROW(dataset_from(R"({"id":"a","category":"Poison"})"), MalformedRecord);
  EXPECT_THROW(dataset_from(R"({"id":"a","text":"Add x."})"), MalformedRecord);
  EXPECT_THROW(dataset_from(R"({"id":"a","category":"Poison","text":7})"), MalformedRecord);
  EXPECT_THROW(dataset_from(R"(["a","Poison","Add x."])"), MalformedRecord);
  EXPECT_THROW(dataset_from(R"({"id":"a","category":"Poison","text":"..."})"), MalformedRecord);
  EXPECT_THROW(parse_corpus("/nonexistent/corpus.jsonl", shipped_lexicon()), IoError);
}

TEST(ParseCorpus, Deterministic) {
  EXPECT_EQ(test::canonical_dataset(), test::canonical_dataset());
}

TEST(ParseCorpus, FragmentsReassembleToRawText) {
  for (const Recipe& r : test::canonical_dataset().recipes) {
    std::string joined;
    for (const auto& f : r.fragments) {
      EXPECT_FALSE(f.text.empty());
      EXPECT_EQ(f.text.find('\n'), std::string::npos);
      EXPECT_NE(normalize_text(r.raw_text).find(normalize_text(f.text)), std::string::npos) << f.text;
      joined += (joined.empty() ? "" : " ") + f.text;
    }
    EXPECT_EQ(normalize_text(joined), normalize_text(r.raw_text)) << r.id;
  }
}

TEST(ParseCorpus, CountsSumToRecipeCount) {
  Rng rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    std::string jsonl;
    const auto n = 1 + rng.below(40);
    for (std::uint64_t i = 0; i < n; ++i) {
      const auto cat = rng.below(kNumCategories);
      jsonl += R"({"id":"r)" + std::to_string(i) + R"(","category":")" + std::string(category_name(cat)) +
               R"(","text":"Add item )" + std::to_string(i) + ".\"}\n";
    }
    const Dataset d = dataset_from(jsonl);
    EXPECT_EQ(std::accumulate(d.counts_per_category.begin(), d.counts_per_category.end(), std::size_t{0}), n);
  }
}

TEST(BuildPool, Deduplicates) {
  const Dataset d = dataset_from(R"({"id":"a","category":"Poison","text":"Add Wormwood. Add  wormwood. Stir twice."})");
  const FragmentPool pool = build_pool(d);
  ASSERT_EQ(pool.ingredients.size(), 1u);
  ASSERT_EQ(pool.mixings.size(), 1u);
  EXPECT_EQ(pool.ingredients[0].text, "Add Wormwood.");
  EXPECT_EQ(pool.mixings[0].text, "Stir twice.");
}

TEST(BuildPool, OtherFragmentsOnlyIsEmptyPool) {
  const Dataset d = dataset_from(R"({"id":"a","category":"Poison","text":"The potion glows. It smells."})");
  try {
    build_pool(d);
    FAIL() << "expected EmptyPool";
  } catch (const EmptyPool& e) {
    EXPECT_EQ(e.kind(), "ingredient");
  }
  EXPECT_THROW(build_pool(dataset_from(R"({"id":"a","category":"Poison","text":"Add x."})")), EmptyPool);
}

TEST(BuildPool, SortedAndPermutationInvariant) {
  Dataset d = test::canonical_dataset();
  const FragmentPool pool = build_pool(d);
  auto sorted = [](const std::vector<Fragment>& v) {
    return std::is_sorted(v.begin(), v.end(), [](const Fragment& a, const Fragment& b) {
      return normalize_text(a.text) < normalize_text(b.text);
    });
  };
  EXPECT_TRUE(sorted(pool.ingredients));
  EXPECT_TRUE(sorted(pool.mixings));
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    Rng rng(seed);
    rng.shuffle(d.recipes);
    EXPECT_EQ(build_pool(d), pool);
  }
}

TEST(BuildPool, CanonicalSizesMatchGolden) {
  const FragmentPool pool = build_pool(test::canonical_dataset());
  std::ifstream in(std::string(POTION_GOLDEN_DIR) + "/pool_sizes.txt");
  ASSERT_TRUE(in) << "missing golden pool_sizes.txt";
  std::size_t ingredients = 0, mixings = 0;
  std::string key;
  in >> key >> ingredients;
  EXPECT_EQ(key, "ingredients");
  in >> key >> mixings;
  EXPECT_EQ(key, "mixings");
  EXPECT_EQ(pool.ingredients.size(), ingredients);
  EXPECT_EQ(pool.mixings.size(), mixings);
}

TEST(WriteRecords, RoundTripsThroughParser) {
  const Dataset d = test::canonical_dataset();
  std::ostringstream out;
  write_records(out, d.recipes);
  EXPECT_EQ(dataset_from(out.str()), d);
}

}  // namespace
}  // namespace potion
