#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <limits>

#include "proctensor/io.hpp"
#include "proctensor/models.hpp"
#include "test_util.hpp"

using namespace proctensor;

TEST_CASE("process tensors round-trip bit for bit") {
  std::mt19937_64 rng(81);
  const ProcessTensor pt = build_process_tensor(testutil::random_dynamics(3, 2, true, rng), 3, true);
  const ProcessTensor back = process_tensor_from_json(process_tensor_to_json(pt));
  CHECK(back.layout == pt.layout);
  REQUIRE(back.choi.rows() == pt.choi.rows());
  bool same = true;
  for (Index i = 0; i < pt.choi.size(); ++i) same = same && back.choi(i) == pt.choi(i);
  CHECK(same);

  const auto path = std::filesystem::temp_directory_path() / "proctensor_io_test.json";
  save_process_tensor(path.string(), pt);
  CHECK(load_process_tensor(path.string()).choi == pt.choi);
  std::filesystem::remove(path);
}

TEST_CASE("instruments round-trip") {
  const Instrument cb = causal_break_instrument(1, 2);
  const std::string text = instrument_to_json(cb);
  CHECK(detect_file_kind(text) == FileKind::Instrument);
  const Instrument back = instrument_from_json(text);
  REQUIRE(back.outcome_count() == cb.outcome_count());
  CHECK(back.layout() == cb.layout());
  for (std::size_t x = 0; x < cb.outcome_count(); ++x) {
    CHECK(back.element(x) == cb.element(x));
    CHECK(back.label(x) == cb.label(x));
  }
  CHECK(detect_file_kind(process_tensor_to_json(sp_process_tensor({}))) == FileKind::ProcessTensor);
}

TEST_CASE("malformed input is rejected") {
  const std::string good = process_tensor_to_json(sp_process_tensor({}));
  CHECK_THROWS_AS(process_tensor_from_json("not json"), std::runtime_error);
  CHECK_THROWS_AS(process_tensor_from_json("{}"), std::runtime_error);
  CHECK_THROWS_AS(process_tensor_from_json(R"({"legs": [{"t": 1, "role": "sideways", "dim": 2}], "matrix": []})"),
                  std::runtime_error);
  // matrix too short for the declared legs
  CHECK_THROWS_AS(process_tensor_from_json(R"({"legs": [{"t": 1, "role": "out", "dim": 2}], "matrix": [[1, 0]]})"),
                  std::runtime_error);
  CHECK_THROWS_AS(detect_file_kind("[1, 2, 3]"), std::runtime_error);
  CHECK_THROWS_AS(read_text_file("/nonexistent/dir/file.json"), std::runtime_error);
  CHECK_NOTHROW(process_tensor_from_json(good));
}

TEST_CASE("number formatting") {
  CHECK(format_double(0.1) == "0.10000000000000001");
  CHECK(std::stod(format_double(M_PI)) == M_PI);
  CHECK(format_double(std::numeric_limits<double>::quiet_NaN()) == "nan");
  CHECK(format_double(-std::numeric_limits<double>::infinity()) == "-inf");
}

TEST_CASE("csv writer") {
  CsvWriter w({"t", "value"});
  w.add_row(std::vector<double>{0.5, 2.0});
  w.add_row(std::vector<std::string>{"1", "x"});
  CHECK(w.str() == "t,value\n0.5,2\n1,x\n");
  CHECK_THROWS(w.add_row(std::vector<double>{1.0}));
}
