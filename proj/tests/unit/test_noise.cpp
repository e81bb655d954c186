#include <gtest/gtest.h>

#include "fmb/csv.hpp"
#include "fmb/error.hpp"
#include "fmb/noise.hpp"

using namespace fmb;

namespace {

std::string data_path(const char* name) { return std::string(FMB_DATA_DIR) + "/" + name; }

ErrorCode code_of(const std::string& text) {
  try {
    parse_calibration(text);
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::InvalidArgument;
}

const char* kQubitHeader =
    "qubit,T1 (us),T2 (us),frequency (GHz),anharmonicity (GHz),readout error,\"Pr(prep 1, measure 0)\","
    "\"Pr(prep 0, measure 1)\",readout length (ns)\n";
const char* kGateHeader = "qubit,Single Qubit Error (%),Gate Length (ns),qubits,Two Qubit Error (%),Gate Length (ns)\n";

}  // namespace

TEST(Calibration, MontrealValues) {
  const auto noise = ingest_calibration(data_path("ibmq_montreal.csv"));
  EXPECT_DOUBLE_EQ(noise.single_rate(0), 0.00018);
  EXPECT_DOUBLE_EQ(noise.readout(0).p1_to_0, 0.016);
  EXPECT_DOUBLE_EQ(noise.readout(0).p0_to_1, 0.008);
  EXPECT_DOUBLE_EQ(noise.pair_rate(1, 0), 0.00658);
  EXPECT_DOUBLE_EQ(noise.pair_rate(15, 18), 0.01848);
  EXPECT_EQ(noise.single_rates().size(), 27u);
  EXPECT_EQ(noise.pair_rates().size(), 28u);
  const auto g = noise.connectivity();
  EXPECT_TRUE(g.has_edge(3, 5));
  EXPECT_FALSE(g.has_edge(3, 4));
}

TEST(Calibration, AlgiersBrokenCouplers) {
  const auto noise = ingest_calibration(data_path("ibmq_algiers.csv"));
  EXPECT_DOUBLE_EQ(noise.pair_rate(5, 8), 1.0);
  EXPECT_DOUBLE_EQ(noise.pair_rate(17, 18), 1.0);
  const auto dep = ingest_calibration(data_path("ibmq_algiers.csv"), ErrorRateConvention::Depolarizing);
  EXPECT_DOUBLE_EQ(dep.single_rate(0), 1.5 * 0.00033);
  EXPECT_DOUBLE_EQ(dep.pair_rate(0, 1), 1.25 * 0.00727);
}

TEST(Calibration, FormatRoundTrip) {
  const auto table = parse_calibration(csv::read_file(data_path("ibmq_montreal.csv")));
  const auto again = parse_calibration(format_calibration(table));
  EXPECT_EQ(format_calibration(again), format_calibration(table));
  ASSERT_EQ(again.pairs.size(), table.pairs.size());
  EXPECT_EQ(again.pairs.back().a, 18);
}

TEST(Calibration, MissingTwoQubitSection) {
  std::string text = std::string(kQubitHeader) + "Q0,1,1,5,-0.3,0.01,0.01,0.01,100\n";
  EXPECT_EQ(code_of(text), ErrorCode::IncompleteNoiseModel);
  text += "qubit,Single Qubit Error (%),Gate Length (ns)\nQ0,0.02,35\n";
  EXPECT_EQ(code_of(text), ErrorCode::IncompleteNoiseModel);
}

TEST(Calibration, DuplicateQubitNamesRow) {
  const std::string text = std::string(kQubitHeader) + "Q0,1,1,5,-0.3,0.01,0.01,0.01,100\nQ0,1,1,5,-0.3,0.01,0.01,0.01,100\n" +
                           kGateHeader + "Q0,0.02,35,\"(Q0, Q1)\",0.5,300\n";
  try {
    parse_calibration(text);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ParseError);
    EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos) << e.what();
  }
}

TEST(Calibration, MissingColumn) {
  const std::string text =
      "qubit,T1 (us),T2 (us),frequency (GHz),anharmonicity (GHz),readout error,\"Pr(prep 1, measure 0)\"\n"
      "Q0,1,1,5,-0.3,0.01,0.01\n";
  EXPECT_EQ(code_of(text), ErrorCode::ParseError);
}

TEST(NoiseModel, RejectsOutOfRange) {
  NoiseModel m;
  EXPECT_THROW(m.set_single(0, 1.5), Error);
  EXPECT_THROW(m.set_pair(0, 1, -0.1), Error);
  EXPECT_THROW(m.set_readout(0, {0.1, 2.0}), Error);
  EXPECT_THROW(m.single_rate(0), Error);
}
