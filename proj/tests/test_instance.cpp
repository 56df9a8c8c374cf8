#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <vector>

#include "mnlmatch/instance.hpp"
#include "mnlmatch/instance_io.hpp"

using namespace mnlmatch;

namespace {

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / ("mnlmatch_" + name)).string();
}

}  // namespace

TEST(Validate, TwoByTwoPresetIsValid) {
  EXPECT_TRUE(validate_instance(preset_two_by_two()).ok());
  EXPECT_TRUE(validate_instance(preset_unit()).ok());
}

TEST(Validate, NegativeRewardNamed) {
  Instance inst = preset_two_by_two();
  inst.rewards(0, 0) = -1.0;
  auto res = validate_instance(inst);
  ASSERT_FALSE(res.ok());
  ASSERT_EQ(res.violations.size(), 1u);
  EXPECT_EQ(res.violations[0].message(), "negative reward at (0,0)");
  EXPECT_EQ(res.violations[0].matrix, "rewards");
}

TEST(Validate, ShapeMismatch) {
  Instance inst = preset_two_by_two();
  inst.cust_weights = Matrix(2, 3, 1.0);
  auto res = validate_instance(inst);
  ASSERT_FALSE(res.ok());
  EXPECT_NE(res.summary().find("shape mismatch"), std::string::npos);
  EXPECT_EQ(res.violations[0].matrix, "customer_weights");
}

TEST(Validate, NonFiniteRejected) {
  Instance inst = preset_unit();
  inst.supp_weights(0, 0) = std::numeric_limits<double>::quiet_NaN();
  EXPECT_FALSE(validate_instance(inst).ok());
  inst.supp_weights(0, 0) = std::numeric_limits<double>::infinity();
  EXPECT_FALSE(validate_instance(inst).ok());
  EXPECT_THROW(require_valid(inst), InvalidInstance);
}

TEST(Validate, ReportsEveryViolation) {
  Instance inst = preset_two_by_two();
  inst.rewards(1, 1) = -2.0;
  inst.cust_weights(0, 1) = -0.5;
  EXPECT_EQ(validate_instance(inst).violations.size(), 2u);
}

TEST(SplitEdges, BoundaryGoesLow) {
  Instance inst = preset_unit();
  inst.supp_weights(0, 0) = 1.0;
  auto s = split_edges(inst);
  EXPECT_TRUE(s.low(0, 0));
  EXPECT_FALSE(s.high(0, 0));
  inst.supp_weights(0, 0) = 1.5;
  s = split_edges(inst);
  EXPECT_TRUE(s.high(0, 0));
  ASSERT_EQ(s.e_plus.size(), 1u);
  EXPECT_EQ(s.e_plus[0], (Edge{0, 0}));
}

TEST(SplitEdges, TwoByTwoHasNoHighEdges) {
  auto s = split_edges(preset_two_by_two());
  EXPECT_TRUE(s.e_plus.empty());
  EXPECT_EQ(s.e_minus.size(), 4u);
}

TEST(SplitEdges, PartitionOnRandomInstances) {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    GenParams p;
    p.seed = seed;
    const Instance inst = generate_random(4, 5, p);
    const auto s = split_edges(inst);
    std::size_t edges = 0;
    for (std::size_t i = 0; i < 4; ++i) {
      for (std::size_t j = 0; j < 5; ++j) {
        if (inst.u(i, j) <= 0.0) continue;
        ++edges;
        EXPECT_NE(s.low(i, j), s.high(i, j));
        EXPECT_EQ(s.low(i, j), inst.w(i, j) <= 1.0);
      }
    }
    EXPECT_EQ(s.e_minus.size() + s.e_plus.size(), edges);
  }
}

TEST(Generate, DeterministicForSeed) {
  GenParams p;
  p.seed = 7;
  EXPECT_EQ(generate_random(3, 3, p), generate_random(3, 3, p));
  GenParams q = p;
  q.seed = 8;
  EXPECT_FALSE(generate_random(3, 3, p) == generate_random(3, 3, q));
}

TEST(Generate, RespectsRanges) {
  GenParams p;
  p.reward_range = {0.0, 1.0};
  p.cust_weight_range = {0.0, 1.0};
  p.supp_weight_range = {0.0, 1.0};
  p.weight_scale = WeightScale::uniform;
  p.seed = 3;
  const Instance inst = generate_random(6, 7, p);
  EXPECT_TRUE(validate_instance(inst).ok());
  for (const Matrix* m : {&inst.rewards, &inst.cust_weights, &inst.supp_weights})
    for (std::size_t i = 0; i < 6; ++i)
      for (std::size_t j = 0; j < 7; ++j) {
        EXPECT_GE((*m)(i, j), 0.0);
        EXPECT_LE((*m)(i, j), 1.0);
      }
}

TEST(Generate, LogUniformMedianNearOne) {
  GenParams p;
  p.seed = 11;
  const Instance inst = generate_random(100, 100, p);
  std::vector<double> w(inst.supp_weights.data().begin(),
                        inst.supp_weights.data().end());
  std::nth_element(w.begin(), w.begin() + w.size() / 2, w.end());
  const double median = w[w.size() / 2];
  EXPECT_GE(median, 0.7);
  EXPECT_LE(median, 1.4);
}

TEST(Generate, RejectsBadInput) {
  GenParams p;
  EXPECT_THROW(generate_random(0, 3, p), std::invalid_argument);
  p.cust_weight_range = {0.0, 1.0};  // log scale needs lo > 0
  EXPECT_THROW(generate_random(2, 2, p), std::invalid_argument);
  p = GenParams{};
  p.reward_range = {2.0, 1.0};
  EXPECT_THROW(generate_random(2, 2, p), std::invalid_argument);
}

TEST(InstanceIo, RoundTripExact) {
  const std::string path = temp_path("roundtrip.json");
  save_instance(preset_two_by_two(), path);
  EXPECT_EQ(load_instance(path), preset_two_by_two());

  GenParams p;
  p.seed = 99;
  const Instance inst = generate_random(4, 3, p);
  save_instance(inst, path);
  EXPECT_EQ(load_instance(path), inst);  // bitwise equal doubles
  std::remove(path.c_str());
}

TEST(InstanceIo, MissingFieldNamed) {
  const std::string text =
      R"({"customers":1,"suppliers":1,"customer_weights":[[1]],"supplier_weights":[[1]]})";
  try {
    parse_instance(text);
    FAIL() << "expected FormatError";
  } catch (const FormatError& e) {
    EXPECT_NE(std::string(e.what()).find("\"rewards\""), std::string::npos);
    EXPECT_NE(std::string(e.what()).find("schema error"), std::string::npos);
  }
}

TEST(InstanceIo, NonNumericEntryHasPath) {
  const std::string text =
      R"({"customers":2,"suppliers":1,"rewards":[[1],[1]],)"
      R"("customer_weights":[[1],["a"]],"supplier_weights":[[1],[1]]})";
  try {
    parse_instance(text);
    FAIL() << "expected FormatError";
  } catch (const FormatError& e) {
    EXPECT_NE(std::string(e.what()).find("customer_weights[1][0]"),
              std::string::npos);
  }
}

TEST(InstanceIo, MalformedJsonAndMissingFile) {
  EXPECT_THROW(parse_instance("{not json"), FormatError);
  EXPECT_THROW(load_instance(temp_path("does_not_exist.json")), FormatError);
}

TEST(InstanceIo, InvalidValuesRejectedOnLoad) {
  const std::string text =
      R"({"customers":1,"suppliers":1,"rewards":[[-1]],)"
      R"("customer_weights":[[1]],"supplier_weights":[[1]]})";
  EXPECT_THROW(parse_instance(text), std::exception);
}
