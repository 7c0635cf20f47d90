#include <gtest/gtest.h>

#include "ssmctl/validation.hpp"

namespace ssmctl {
namespace {

TEST(Validation, PassesAcrossSeeds) {
  for (std::uint64_t seed : {0u, 1u, 2u, 17u}) {
    ValidationOptions o;
    o.seed = seed;
    for (const auto& check : run_validation(o)) {
      EXPECT_TRUE(check.passed) << "seed " << seed << ": " << check.name << " observed "
                                << check.observed << " bound " << check.bound;
    }
  }
}

TEST(Validation, ToleranceCapsBounds) {
  ValidationOptions o;
  o.tolerance = 1e-13;
  for (const auto& check : run_validation(o)) EXPECT_LE(check.bound, 1e-13);
  o.tolerance = 0.0;
  bool any_failed = false;
  for (const auto& check : run_validation(o)) any_failed = any_failed || !check.passed;
  EXPECT_TRUE(any_failed);
}

TEST(Validation, FaultIsDetected) {
  ValidationOptions o;
  o.fault = Fault::FlipTransitionSign;
  int failures = 0;
  for (const auto& check : run_validation(o)) failures += check.passed ? 0 : 1;
  EXPECT_GE(failures, 3);
}

}  // namespace
}  // namespace ssmctl
