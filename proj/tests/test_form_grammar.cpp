#include <set>
#include <string>

#include <gtest/gtest.h>

#include "chronoform/form_grammar.hpp"
#include "oracles.hpp"

using namespace chronoform;

namespace {

FormTree ab() { return flat_tree("AB"); }

std::set<std::string> flat_strings(const std::set<FormTree>& trees) {
  std::set<std::string> out;
  for (const auto& t : trees) out.insert(flatten(t));
  return out;
}

}  // namespace

TEST(FormTree, ParseAndPrint) {
  const FormTree t = parse_form_tree("((A A B) A)");
  EXPECT_EQ(to_string(t), "((A A B) A)");
  EXPECT_EQ(flatten(t), "AABA");
  EXPECT_EQ(parse_form_tree("(AB)"), ab());
  EXPECT_EQ(parse_form_tree("A"), FormTree::leaf('A'));
  EXPECT_THROW(parse_form_tree("(A)"), ParseError);
  EXPECT_THROW(parse_form_tree("((A B)"), ParseError);
  EXPECT_THROW(parse_form_tree("(A B))"), ParseError);
  EXPECT_THROW(parse_form_tree("ab"), ParseError);
  EXPECT_THROW(parse_form_tree(""), ParseError);
}

TEST(LeftReplicate, RootOfAB) {
  const FormTree t = left_replicate(ab(), {});
  EXPECT_EQ(flatten(t), "AAB");
  EXPECT_EQ(t.children.size(), 3u);
}

TEST(LeftReplicate, RootOfABA) {
  EXPECT_EQ(flatten(left_replicate(flat_tree("ABA"), {})), "AABA");
}

TEST(LeftReplicate, NestedNodeOnly) {
  const FormTree t = parse_form_tree("((A B) C)");
  EXPECT_EQ(left_replicate(t, {0}), parse_form_tree("((A A B) C)"));
}

TEST(LeftReplicate, PathErrors) {
  EXPECT_THROW(left_replicate(ab(), {0}), PreconditionError);  // leaf
  EXPECT_THROW(left_replicate(ab(), {5}), PreconditionError);  // out of range
  EXPECT_THROW(left_replicate(FormTree::leaf('A'), {}), PreconditionError);
}

TEST(Generate, TwoStepsFromAB) {
  EXPECT_EQ(flat_strings(generate(ab(), 2)), (std::set<std::string>{"AB", "AAB", "AAAB"}));
  EXPECT_EQ(flat_strings(generate(ab(), 2)), oracle::flat_language("AB", 2, true));
  EXPECT_EQ(generate_strings(ab(), 2), (std::vector<std::string>{"AB", "AAB", "AAAB"}));
}

TEST(Generate, ZeroSteps) { EXPECT_EQ(generate(ab(), 0), (std::set<FormTree>{ab()})); }

TEST(Generate, OneStepFromABA) {
  EXPECT_EQ(flat_strings(generate(flat_tree("ABA"), 1)), (std::set<std::string>{"ABA", "AABA"}));
  EXPECT_EQ(flat_strings(generate(flat_tree("ABA"), 1)), oracle::flat_language("ABA", 1, true));
}

TEST(Generate, NestedSeedGrowsAtEveryLevel) {
  const auto trees = generate(parse_form_tree("((A B) C)"), 1);
  EXPECT_EQ(trees.size(), 3u);
  EXPECT_TRUE(trees.count(parse_form_tree("((A A B) C)")));
  EXPECT_TRUE(trees.count(parse_form_tree("((A B) (A B) C)")));
}

TEST(Recognize, Anchors) {
  const auto aab = recognize("AAB", ab());
  ASSERT_TRUE(aab.derivable());
  EXPECT_EQ(aab.steps, 1u);
  EXPECT_FALSE(recognize("ABB", ab()).derivable());
  EXPECT_EQ(recognize("ABB", ab()).status, Recognition::Status::kNotDerivable);
  EXPECT_EQ(recognize("AAAAB", ab()).steps, 3u);
  EXPECT_EQ(recognize("AABA", flat_tree("ABA")).steps, 1u);
  EXPECT_EQ(recognize("AB", ab()).steps, 0u);
  EXPECT_FALSE(recognize("BA", ab()).derivable());
  EXPECT_FALSE(recognize("A", ab()).derivable());
}

TEST(Recognize, EmptyOrMalformedForm) {
  EXPECT_THROW(recognize("", ab()), ParseError);
  EXPECT_THROW(recognize("A-B", ab()), ParseError);
}

TEST(Recognize, SearchBound) {
  std::string within(kMaxDerivationSteps, 'A');
  EXPECT_EQ(recognize(within + "AB", ab()).steps, kMaxDerivationSteps);
  const auto beyond = recognize(within + "AAB", ab());
  EXPECT_EQ(beyond.status, Recognition::Status::kBoundExceeded);
  EXPECT_EQ(recognize(within + "AAB", ab(), RecognitionMode::kHierarchical).status,
            Recognition::Status::kBoundExceeded);
}

TEST(Recognize, FlatModeWithNestedSeed) {
  const FormTree seed = parse_form_tree("((A B) C)");
  const auto r = recognize("ABABABC", seed);
  ASSERT_TRUE(r.derivable());
  EXPECT_EQ(r.steps, 2u);
  EXPECT_FALSE(recognize("AABC", seed).derivable());  // needs the inner node
}

TEST(Recognize, HierarchicalModeReportsPaths) {
  const FormTree seed = parse_form_tree("((A B) C)");
  const auto r = recognize("AABC", seed, RecognitionMode::kHierarchical);
  ASSERT_TRUE(r.derivable());
  EXPECT_EQ(r.steps, 1u);
  ASSERT_TRUE(r.derivation.has_value());
  EXPECT_EQ(r.derivation->steps, (std::vector<NodePath>{{0}}));
  EXPECT_EQ(replay(seed, r.derivation->steps), r.derivation->result);
}

TEST(RecognizeTree, CollapsesAnywhere) {
  const FormTree seed = parse_form_tree("((A B) C)");
  const FormTree target = parse_form_tree("((A A B) (A A B) C)");
  const auto r = recognize_tree(target, seed);
  ASSERT_TRUE(r.derivable());
  EXPECT_EQ(r.steps, 2u);
  EXPECT_EQ(replay(seed, r.derivation->steps), target);
  EXPECT_FALSE(recognize_tree(parse_form_tree("(A B B)"), ab()).derivable());
}

TEST(PredictedClimax, Arithmetic) {
  EXPECT_EQ(predicted_climax_position(1, 1, 1), Rational(1, 2));
  EXPECT_EQ(predicted_climax_position(2, 1, 1), Rational(2, 3));
  EXPECT_EQ(predicted_climax_position(3, 1, 1), Rational(3, 4));
  // Cross-check by laying the segments end to end.
  for (int n = 1; n <= 10; ++n) {
    const Rational a(3, 2), b(5, 4);
    Rational b_onset{0};
    for (int k = 0; k < n; ++k) b_onset += a;
    EXPECT_EQ(predicted_climax_position(n, a, b), b_onset / (b_onset + b));
  }
  EXPECT_THROW(predicted_climax_position(1, 0, 1), PreconditionError);
  EXPECT_THROW(predicted_climax_position(1, 1, -1), PreconditionError);
  EXPECT_THROW(predicted_climax_position(0, 1, 1), PreconditionError);
}

TEST(SentenceCheck, Proportions) {
  EXPECT_TRUE(sentence_check(2, 2, 4, 0.0));
  EXPECT_FALSE(sentence_check(2, 2, 5, 0.1));
  EXPECT_TRUE(sentence_check(2, 2, 5, 0.3));
  EXPECT_TRUE(sentence_check(2, 2, 5, 0.25));
  EXPECT_FALSE(sentence_check(2, 3, 5, 0.0));
  EXPECT_THROW(sentence_check(0, 2, 4, 0.0), PreconditionError);
  EXPECT_THROW(sentence_check(2, 2, 4, -0.1), PreconditionError);
}

TEST(SonataAlignment, InterruptionAtRepeat) {
  const auto a = sonata_alignment();
  ASSERT_EQ(a.rows.size(), 4u);
  EXPECT_EQ(a.form(), "AABA");
  const std::vector<std::string> sections = {"exposition", "exposition-repeat", "development",
                                             "recapitulation"};
  const std::vector<std::string> ursatz = {"3̂/I 2̂/V", "3̂/I 2̂/V", "—", "1̂/I"};
  for (std::size_t i = 0; i < 4; ++i) {
    EXPECT_EQ(a.rows[i].section, sections[i]);
    EXPECT_EQ(a.rows[i].ursatz, ursatz[i]);
    EXPECT_EQ(a.rows[i].interruption_before, i == 1);
  }
  EXPECT_EQ(a.rows[2].letters, "B");
}

TEST(SonataAlignment, InterruptionAtRecapitulation) {
  const auto a = sonata_alignment(SonataReading::kInterruptionAtRecapitulation);
  ASSERT_EQ(a.rows.size(), 2u);
  EXPECT_EQ(a.rows.back().section, "recapitulation");
  EXPECT_TRUE(a.rows.back().interruption_before);
  EXPECT_EQ(a.form(), "ABA");
}

TEST(TimeReverse, Strings) {
  EXPECT_EQ(time_reverse("AAB"), "BAA");
  EXPECT_EQ(time_reverse("AB"), "BA");
  EXPECT_EQ(time_reverse("AABA"), "ABAA");
}

TEST(GrammarProperty, FlatCompletenessAgainstOracle) {
  for (std::size_t k = 0; k <= 6; ++k) {
    std::set<std::string> expected;
    for (std::size_t n = 1; n <= k + 1; ++n) expected.insert(std::string(n, 'A') + "B");
    EXPECT_EQ(flat_strings(generate(ab(), k)), expected);
    EXPECT_EQ(oracle::flat_language("AB", k, true), expected);
  }
}

TEST(GrammarProperty, SuffixPreservation) {
  for (const auto& seed : {ab(), flat_tree("ABC"), parse_form_tree("((A B) (C D))")}) {
    const char last = flatten(seed).back();
    for (const auto& t : generate(seed, 4)) EXPECT_EQ(flatten(t).back(), last);
  }
}

TEST(GrammarProperty, MirrorAsymmetry) {
  const auto left = flat_strings(generate(ab(), 6, Rule::kLeft));
  const auto right = flat_strings(generate(ab(), 6, Rule::kRight));
  std::set<std::string> both;
  for (const auto& s : left) {
    if (right.count(s)) both.insert(s);
  }
  EXPECT_EQ(both, (std::set<std::string>{"AB"}));
}

TEST(GrammarProperty, ReplaySoundnessAndRecognitionConsistency) {
  for (const auto& seed : {ab(), flat_tree("ABA"), parse_form_tree("((A B) C)"),
                           parse_form_tree("((A B) (C (D E)))")}) {
    const std::size_t k = 3;
    for (const auto& [tree, d] : enumerate_derivations(seed, k)) {
      EXPECT_EQ(replay(d.seed, d.steps), d.result);
      EXPECT_EQ(d.result, tree);
      const auto r = recognize_tree(tree, seed);
      ASSERT_TRUE(r.derivable()) << to_string(tree);
      EXPECT_LE(r.steps, k);
      EXPECT_EQ(replay(seed, r.derivation->steps), tree);
      const auto h = recognize(flatten(tree), seed, RecognitionMode::kHierarchical);
      ASSERT_TRUE(h.derivable());
      EXPECT_LE(h.steps, k);
      EXPECT_EQ(flatten(replay(seed, h.derivation->steps)), flatten(tree));
    }
  }
}

TEST(GrammarProperty, PredictedDelayIsMonotone) {
  for (const auto& [a, b] : {std::pair{Rational(1), Rational(1)}, std::pair{Rational(1, 3), Rational(7)}}) {
    Rational prev{0};
    for (int n = 1; n <= 200; ++n) {
      const Rational p = predicted_climax_position(n, a, b);
      EXPECT_GT(p, prev);
      EXPECT_LT(p, Rational(1));
      prev = p;
    }
    EXPECT_GT(to_double(prev), 1.0 - to_double(b / (200 * a)));
  }
}
