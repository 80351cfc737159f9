#include "proctensor/io.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace proctensor {

using nlohmann::json;

namespace {

json legs_to_json(const LegLayout& layout) {
  json legs = json::array();
  for (const auto& leg : layout.legs()) {
    if (leg.role == Role::Aux) throw std::invalid_argument("auxiliary legs cannot be serialized");
    legs.push_back({{"t", leg.t}, {"role", leg.role == Role::In ? "in" : "out"}, {"dim", leg.dim}});
  }
  return legs;
}

LegLayout legs_from_json(const json& j) {
  if (!j.is_array()) throw std::runtime_error("\"legs\" must be an array");
  std::vector<Leg> legs;
  for (const auto& l : j) {
    if (!l.is_object() || !l.contains("t") || !l.contains("role") || !l.contains("dim"))
      throw std::runtime_error("each leg needs \"t\", \"role\" and \"dim\"");
    const std::string role = l.at("role").get<std::string>();
    if (role != "in" && role != "out") throw std::runtime_error("leg role must be \"in\" or \"out\"");
    legs.push_back(Leg{l.at("t").get<int>(), role == "in" ? Role::In : Role::Out, l.at("dim").get<Index>()});
  }
  return LegLayout(std::move(legs));
}

json matrix_to_json(const Matrix& m) {
  json flat = json::array();
  for (Index r = 0; r < m.rows(); ++r)
    for (Index c = 0; c < m.cols(); ++c) flat.push_back(json::array({m(r, c).real(), m(r, c).imag()}));
  return flat;
}

Matrix matrix_from_json(const json& j, Index d) {
  if (!j.is_array()) throw std::runtime_error("matrix must be an array of [re, im] pairs");
  if (static_cast<Index>(j.size()) != d * d)
    throw std::runtime_error("matrix has " + std::to_string(j.size()) + " entries, expected " +
                             std::to_string(d * d));
  Matrix m(d, d);
  for (Index k = 0; k < d * d; ++k) {
    const auto& e = j[static_cast<std::size_t>(k)];
    if (!e.is_array() || e.size() != 2 || !e[0].is_number() || !e[1].is_number())
      throw std::runtime_error("matrix entry " + std::to_string(k) + " is not a [re, im] pair");
    m(k / d, k % d) = Complex(e[0].get<double>(), e[1].get<double>());
  }
  return m;
}

json parse(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw std::runtime_error(std::string("malformed JSON: ") + e.what());
  }
}

}  // namespace

std::string process_tensor_to_json(const ProcessTensor& pt) {
  json j;
  j["legs"] = legs_to_json(pt.layout);
  j["matrix"] = matrix_to_json(pt.choi);
  return j.dump();
}

ProcessTensor process_tensor_from_json(const std::string& text) {
  const json j = parse(text);
  if (!j.is_object() || !j.contains("legs") || !j.contains("matrix"))
    throw std::runtime_error("process tensor file needs \"legs\" and \"matrix\"");
  try {
    LegLayout layout = legs_from_json(j.at("legs"));
    Matrix m = matrix_from_json(j.at("matrix"), layout.dim());
    return {std::move(m), std::move(layout)};
  } catch (const json::exception& e) {
    throw std::runtime_error(std::string("malformed process tensor: ") + e.what());
  }
}

std::string instrument_to_json(const Instrument& inst) {
  json j;
  j["name"] = inst.name();
  j["legs"] = legs_to_json(inst.layout());
  json labels = json::array();
  json elements = json::array();
  for (std::size_t x = 0; x < inst.outcome_count(); ++x) {
    labels.push_back(inst.label(x));
    elements.push_back(matrix_to_json(inst.element(x)));
  }
  j["outcomes"] = labels;
  j["elements"] = elements;
  return j.dump();
}

Instrument instrument_from_json(const std::string& text) {
  const json j = parse(text);
  if (!j.is_object() || !j.contains("legs") || !j.contains("outcomes") || !j.contains("elements"))
    throw std::runtime_error("instrument file needs \"legs\", \"outcomes\" and \"elements\"");
  try {
    LegLayout layout = legs_from_json(j.at("legs"));
    const auto& outcomes = j.at("outcomes");
    const auto& elements = j.at("elements");
    if (!outcomes.is_array() || !elements.is_array() || outcomes.size() != elements.size() || outcomes.empty())
      throw std::runtime_error("\"outcomes\" and \"elements\" must be non-empty arrays of equal length");
    std::vector<Matrix> elems;
    std::vector<std::string> labels;
    for (std::size_t k = 0; k < elements.size(); ++k) {
      elems.push_back(matrix_from_json(elements[k], layout.dim()));
      labels.push_back(outcomes[k].get<std::string>());
    }
    const std::string name = j.value("name", std::string("instrument"));
    return Instrument::single(name, std::move(layout), std::move(elems), std::move(labels));
  } catch (const json::exception& e) {
    throw std::runtime_error(std::string("malformed instrument: ") + e.what());
  }
}

FileKind detect_file_kind(const std::string& text) {
  const json j = parse(text);
  if (!j.is_object() || !j.contains("legs")) throw std::runtime_error("not a process tensor or instrument file");
  if (j.contains("outcomes")) return FileKind::Instrument;
  return FileKind::ProcessTensor;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << text;
  if (!out) throw std::runtime_error("failed writing '" + path + "'");
}

void save_process_tensor(const std::string& path, const ProcessTensor& pt) {
  write_text_file(path, process_tensor_to_json(pt));
}

ProcessTensor load_process_tensor(const std::string& path) {
  return process_tensor_from_json(read_text_file(path));
}

void save_instrument(const std::string& path, const Instrument& inst) {
  write_text_file(path, instrument_to_json(inst));
}

Instrument load_instrument(const std::string& path) { return instrument_from_json(read_text_file(path)); }

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  std::ostringstream ss;
  ss.imbue(std::locale::classic());
  ss << std::setprecision(std::numeric_limits<double>::max_digits10) << v;
  return ss.str();
}

CsvWriter::CsvWriter(std::vector<std::string> header) : columns_(header.size()) {
  for (std::size_t k = 0; k < header.size(); ++k) text_ += (k ? "," : "") + header[k];
  text_ += "\n";
}

void CsvWriter::add_row(const std::vector<double>& values) {
  if (values.size() != columns_) throw std::invalid_argument("CSV row has the wrong number of columns");
  for (std::size_t k = 0; k < values.size(); ++k) text_ += (k ? "," : "") + format_double(values[k]);
  text_ += "\n";
}

void CsvWriter::add_row(const std::vector<std::string>& cells) {
  if (cells.size() != columns_) throw std::invalid_argument("CSV row has the wrong number of columns");
  for (std::size_t k = 0; k < cells.size(); ++k) text_ += (k ? "," : "") + cells[k];
  text_ += "\n";
}

std::string CsvWriter::str() const { return text_; }

}  // namespace proctensor
