#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <sstream>

#include "mixgap/errors.hpp"
#include "mixgap/io.hpp"

namespace mixgap::io {
namespace {

ErrorCode parse_code(const std::string& text) {
  try {
    parse_matrix(text);
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::InvalidArgument;
}

TEST(MatrixIo, JsonAndCsvAgree) {
  const auto a = parse_matrix(R"({"d": 2, "rows": [[0.9, 0.1], [0.4, 0.6]]})");
  const auto b = parse_matrix("0.9, 0.1\n0.4,0.6\n\n");
  EXPECT_TRUE(a.entries() == b.entries());
}

TEST(MatrixIo, RoundTripIsExact) {
  Matrix m(3, 3);
  m << 1.0 / 3, 1.0 / 3, 1.0 / 3, 0.1, 0.7, 0.2, 0.0, 0.25, 0.75;
  const auto from_csv = parse_matrix(matrix_to_csv(m));
  const auto from_json = parse_matrix(matrix_to_json(m).dump());
  EXPECT_TRUE(TransitionMatrix(m).entries() == from_csv.entries());
  EXPECT_TRUE(from_json.entries() == from_csv.entries());
}

TEST(MatrixIo, MalformedInputIsAParseError) {
  EXPECT_EQ(parse_code(""), ErrorCode::ParseError);
  EXPECT_EQ(parse_code("{\"rows\": [[1]]"), ErrorCode::ParseError);
  EXPECT_EQ(parse_code(R"({"d": 3, "rows": [[1]]})"), ErrorCode::ParseError);
  EXPECT_EQ(parse_code(R"({"rows": [[0.5, 0.5], [1]]})"), ErrorCode::ParseError);
  EXPECT_EQ(parse_code("0.5,abc\n0.5,0.5\n"), ErrorCode::ParseError);
  EXPECT_EQ(parse_code("0.5,0.5\n1\n"), ErrorCode::ParseError);
  EXPECT_EQ(parse_code("0.5,0.6\n0.5,0.5\n"), ErrorCode::InvalidMatrix);
}

TEST(TrajectoryIo, StreamsStatesAndReportsBadLines) {
  std::istringstream good("0\n2\n\n1\n");
  std::vector<std::uint32_t> seen;
  for_each_state(good, [&](std::uint32_t s) { seen.push_back(s); });
  EXPECT_EQ(seen, (std::vector<std::uint32_t>{0, 2, 1}));

  for (const std::string bad : {"0\n-1\n", "1.5\n", "99999999999\n"}) {
    std::istringstream in(bad);
    EXPECT_THROW(for_each_state(in, [](std::uint32_t) {}), Error) << bad;
  }
}

TEST(TrajectoryIo, WriteThenReadRecoversStates) {
  const auto t = make_trajectory({3, 0, 1, 1, 2}, 4);
  std::stringstream buf;
  write_trajectory(t, buf);
  std::vector<std::uint32_t> back;
  for_each_state(buf, [&](std::uint32_t s) { back.push_back(s); });
  EXPECT_EQ(back, t.states);
}

TEST(JsonOutput, NonFiniteNumbersBecomeStrings) {
  EXPECT_EQ(number(std::numeric_limits<double>::infinity()), "inf");
  EXPECT_EQ(number(-std::numeric_limits<double>::infinity()), "-inf");
  EXPECT_EQ(number(std::nan("")), "nan");
  EXPECT_EQ(number(0.5), 0.5);
}

TEST(JsonOutput, FlatteningUsesDottedPaths) {
  const Json j = {{"a", 1}, {"b", {{"c", "x"}, {"d", {1, 2}}}}};
  EXPECT_EQ(to_csv(j), "field,value\na,1\nb.c,x\nb.d[0],1\nb.d[1],2\n");
  EXPECT_NE(to_table(j).find("b.d[1]  2"), std::string::npos);
}

}  // namespace
}  // namespace mixgap::io
