#include <gtest/gtest.h>

#include <set>

#include "ias/errors.hpp"
#include "ias/varset.hpp"

using ias::VarSet;

TEST(VarSet, BasicMembership) {
  VarSet s{3, 1, 70};
  EXPECT_EQ(s.size(), 3);
  EXPECT_TRUE(s.contains(1));
  EXPECT_TRUE(s.contains(70));
  EXPECT_FALSE(s.contains(2));
  EXPECT_EQ(s.min_member(), 1);
  EXPECT_EQ(s.max_member(), 70);
  EXPECT_EQ(s.to_string(), "{1,3,70}");
  s.erase(70);
  EXPECT_EQ(s, (VarSet{1, 3}));
  EXPECT_THROW(s.insert(0), ias::ArgumentError);
}

TEST(VarSet, SpillWordsAreTrimmedForEquality) {
  VarSet a{5, 200};
  a.erase(200);
  EXPECT_EQ(a, VarSet{5});
  EXPECT_EQ(a.hash(), VarSet{5}.hash());
}

TEST(VarSet, AlgebraMatchesStdSet) {
  const VarSet a{1, 2, 65, 130};
  const VarSet b{2, 3, 130};
  EXPECT_EQ(a | b, (VarSet{1, 2, 3, 65, 130}));
  EXPECT_EQ(a & b, (VarSet{2, 130}));
  EXPECT_EQ(a - b, (VarSet{1, 65}));
  EXPECT_TRUE((VarSet{2, 130}).is_subset_of(a));
  EXPECT_TRUE((VarSet{2, 130}).is_strict_subset_of(a));
  EXPECT_FALSE(a.is_strict_subset_of(a));
  EXPECT_TRUE(a.intersects(b));
  EXPECT_FALSE((VarSet{4}).intersects(b));
}

TEST(VarSet, CanonicalOrder) {
  std::vector<VarSet> v{{1, 3}, {2}, {}, {1, 2}, {3}, {1}};
  std::sort(v.begin(), v.end(), ias::canonical_less);
  const std::vector<VarSet> want{{}, {1}, {2}, {3}, {1, 2}, {1, 3}};
  EXPECT_EQ(v, want);
  EXPECT_TRUE(ias::lexicographic_less(VarSet{1, 2, 9}, VarSet{1, 3}));
  EXPECT_TRUE(ias::lexicographic_less(VarSet{1}, VarSet{1, 2}));
  EXPECT_FALSE(ias::lexicographic_less(VarSet{1, 2}, VarSet{1}));
}

TEST(VarSet, ForEachIsIncreasing) {
  const VarSet s{64, 65, 1, 128};
  std::vector<int> seen;
  s.for_each([&](int k) { seen.push_back(k); });
  EXPECT_EQ(seen, (std::vector<int>{1, 64, 65, 128}));
  EXPECT_EQ(VarSet::range(2, 4), (VarSet{2, 3, 4}));
  EXPECT_TRUE(VarSet::range(3, 2).empty());
  EXPECT_EQ(VarSet::from_mask(0b101), (VarSet{1, 3}));
}
