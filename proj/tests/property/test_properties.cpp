#include <gtest/gtest.h>

#include "support/property_checks.hpp"

// Different seeds from the acceptance gate, so the two runs cover different
// random cases.

namespace {

void expectClean(const props::Report& r, std::size_t cases) {
  EXPECT_GE(r.cases, cases) << r.summary();
  EXPECT_GT(r.checks, 0u) << r.summary();
  EXPECT_EQ(r.failures, 0u) << r.summary();
}

}  // namespace

TEST(Properties, ParserRoundTrip) { expectClean(props::parserRoundTrip(1000, 7), 1000); }

TEST(Properties, NormalFormsPreserveMeaning) { expectClean(props::normalFormPreservation(300, 11), 300); }

TEST(Properties, UnifiersAreMostGeneral) { expectClean(props::unifierProperties(1000, 13), 1000); }

TEST(Properties, CountermodelsAreCertified) {
  const props::Report r = props::countermodelCertification(100, 17);
  EXPECT_EQ(r.failures, 0u) << r.summary();
  EXPECT_GT(r.checks, 0u) << r.summary();
}
