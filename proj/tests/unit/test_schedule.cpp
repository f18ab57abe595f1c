#include <gtest/gtest.h>

#include "vmadmm/error.hpp"
#include "vmadmm/schedule.hpp"

using namespace vmadmm;

TEST(Schedule, ConstantIsStationary) {
  const auto s = MetricSchedule::constant(MetricOperator::scaled_identity(3, 2.0));
  EXPECT_EQ(s.stationary_after(), std::optional<std::size_t>(1));
  EXPECT_EQ(*s.at(0).scalar(), 2.0);
  EXPECT_EQ(*s.at(1000).scalar(), 2.0);
  EXPECT_EQ(*s.limit().scalar(), 2.0);
}

TEST(Schedule, GeometricDecayIsMonotone) {
  const auto s = MetricSchedule::geometric_decay(MetricOperator::scaled_identity(2, 1.0), 0.5);
  EXPECT_FALSE(s.stationary_after().has_value());
  EXPECT_DOUBLE_EQ(*s.at(3).scalar(), 0.125);
  for (std::size_t k = 0; k < 20; ++k) {
    EXPECT_TRUE(loewner_geq(s.at(k), s.at(k + 1)).holds);
    // 2 M^{k+1} >= M^k holds exactly when rho >= 1/2.
    EXPECT_TRUE(loewner_geq(s.at(k + 1).scaled(2.0), s.at(k)).holds);
  }
  EXPECT_EQ(s.limit().form(), MetricOperator::Form::kZero);
}

TEST(Schedule, GeometricDecayRejectsBadRho) {
  EXPECT_THROW(MetricSchedule::geometric_decay(MetricOperator::zero(1), 0.0), Error);
  EXPECT_THROW(MetricSchedule::geometric_decay(MetricOperator::zero(1), 1.5), Error);
}

TEST(Schedule, ShiftedGramUsesLastTauAfterwards) {
  const auto a = LinearMap::forward_difference(6);
  const auto s = MetricSchedule::shifted_gram({0.2, 0.19}, 1.0, a);
  EXPECT_EQ(s.stationary_after(), std::optional<std::size_t>(2));
  EXPECT_DOUBLE_EQ(s.at(0).tau(), 0.2);
  EXPECT_DOUBLE_EQ(s.at(1).tau(), 0.19);
  EXPECT_DOUBLE_EQ(s.at(50).tau(), 0.19);
  EXPECT_DOUBLE_EQ(s.limit().tau(), 0.19);
  // Decreasing tau increases the metric, so this schedule is not monotone.
  EXPECT_FALSE(loewner_geq(s.at(0), s.at(1)).holds);
}

TEST(Schedule, ShiftedGramValidatesEveryTau) {
  EXPECT_THROW(MetricSchedule::shifted_gram({0.2, 0.5}, 1.0, LinearMap::forward_difference(6)),
               Error);
  EXPECT_THROW(MetricSchedule::shifted_gram({}, 1.0, LinearMap::identity(2)), Error);
}
