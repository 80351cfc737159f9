#pragma once

#include <string>
#include <vector>

#include "proctensor/instruments.hpp"
#include "proctensor/process_tensor.hpp"

namespace proctensor {

// Process tensors are stored as
//   {"legs": [{"t": int, "role": "in"|"out", "dim": int}, ...],
//    "matrix": [[re, im], ...]}      (row-major)
// Instruments use the same leg list plus "outcomes" (labels) and "elements"
// (one flat matrix per outcome). Doubles are written so they read back
// bit-for-bit.
std::string process_tensor_to_json(const ProcessTensor& pt);
ProcessTensor process_tensor_from_json(const std::string& text);
void save_process_tensor(const std::string& path, const ProcessTensor& pt);
ProcessTensor load_process_tensor(const std::string& path);

std::string instrument_to_json(const Instrument& inst);
Instrument instrument_from_json(const std::string& text);
void save_instrument(const std::string& path, const Instrument& inst);
Instrument load_instrument(const std::string& path);

enum class FileKind { ProcessTensor, Instrument };
FileKind detect_file_kind(const std::string& text);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

// 17 significant digits, enough to round-trip any double.
std::string format_double(double v);

class CsvWriter {
 public:
  explicit CsvWriter(std::vector<std::string> header);
  void add_row(const std::vector<double>& values);
  void add_row(const std::vector<std::string>& cells);
  std::string str() const;

 private:
  std::size_t columns_;
  std::string text_;
};

}  // namespace proctensor
