#include "test_support.hpp"

using namespace okt;

TEST(Io, MatrixRoundTrip) {
  auto h = random_hermitian(4, std::uint64_t{1});
  auto j = matrix_to_json(h.matrix());
  EXPECT_EQ(j["n"], 4);
  EXPECT_EQ(matrix_from_json(json::parse(j.dump())), h.matrix());
}

TEST(Io, ImaginaryPartOptional) {
  auto m = matrix_from_json(json::parse(R"({"n": 2, "re": [[0.7, 0], [0, 0.3]]})"));
  EXPECT_EQ(m, mat2(0.7, 0, 0, 0.3));
}

TEST(Io, MalformedMatricesAreParseErrors) {
  for (const char* text : {R"({"n": 2, "re": [[1, 0]]})", R"({"n": 2, "re": [[1, 0], [0]]})",
                           R"({"re": [[1]]})", R"({"n": 1, "re": [["x"]]})", R"({"n": 0, "re": []})",
                           R"({"n": 1, "re": [[1]], "im": [[0, 1]]})"}) {
    try {
      matrix_from_json(json::parse(text));
      FAIL() << text;
    } catch (const Error& e) {
      EXPECT_EQ(e.kind(), ErrorKind::ParseError) << text;
    }
  }
}

TEST(Io, SpectrumRoundTrip) {
  Spectrum s{{0.4, 0.2, 0.1}, {1, 2, 2}};
  EXPECT_EQ(spectrum_from_json(spectrum_to_json(s)), s);
  EXPECT_THROW(spectrum_from_json(json::parse(R"({"values": [0.5], "mults": [1, 1]})")), Error);
}

TEST(Io, ConfigOverridesOnlyGivenKeys) {
  auto cfg = config_from_json(json::parse(R"({"hbar": 2.0, "fd_step": 1e-3})"));
  EXPECT_EQ(cfg.hbar, 2.0);
  EXPECT_EQ(cfg.fd_step, 1e-3);
  EXPECT_EQ(cfg.tau_c, Config{}.tau_c);
  EXPECT_THROW(config_from_json(json::parse(R"({"hbar": -1})")), Error);
  EXPECT_THROW(config_from_json(json::parse(R"({"hbar": "one"})")), Error);
}

TEST(Io, TrajectoryLines) {
  auto tr = trajectory(qubit(0.7), sigma_x(), 1.0, 3);
  const auto text = trajectory_to_jsonl(tr);
  std::istringstream in(text);
  std::string line;
  int count = 0;
  while (std::getline(in, line)) {
    auto j = json::parse(line);
    EXPECT_TRUE(j.contains("t"));
    EXPECT_EQ(matrix_from_json(j["rho"]).rows(), 2);
    ++count;
  }
  EXPECT_EQ(count, 3);
}

TEST(Io, MissingFile) {
  try {
    read_json_file("/nonexistent/file.json");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::ParseError);
  }
}

TEST(Io, ReportKeys) {
  auto j = report_to_json(full_report(sigma_x(), sigma_y(), qubit(0.7)));
  for (const char* key : {"deltaA", "deltaB", "product", "geometric_bound", "rs_bound"})
    EXPECT_TRUE(j.contains(key)) << key;
}
