#include "ctph/io/csv.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace ctph {

std::uint64_t fnv1a(std::string_view bytes, std::uint64_t state) {
  for (unsigned char c : bytes) {
    state ^= c;
    state *= 1099511628211ull;
  }
  return state;
}

std::string format_number(double value) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.9g", value);
  if (std::strtod(buf, nullptr) != value) {
    std::snprintf(buf, sizeof(buf), "%.17g", value);
  }
  return buf;
}

CsvWriter::CsvWriter(std::filesystem::path path,
                     const std::vector<std::string>& header)
    : path_(std::move(path)), columns_(header.size()) {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (i) buffer_ += ',';
    buffer_ += header[i];
  }
  buffer_ += '\n';
}

CsvWriter::~CsvWriter() {
  try {
    finish();
  } catch (...) {
    // Destructors must not throw; an explicit finish() reports I/O errors.
  }
}

void CsvWriter::row(const std::vector<CsvCell>& cells) {
  if (cells.size() != columns_) {
    throw std::invalid_argument("CsvWriter: row width " +
                                std::to_string(cells.size()) +
                                " does not match header width " +
                                std::to_string(columns_));
  }
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) buffer_ += ',';
    buffer_ += cells[i].text;
  }
  buffer_ += '\n';
}

std::uint64_t CsvWriter::finish() {
  if (finished_) return digest_;
  std::filesystem::create_directories(path_.parent_path());
  std::ofstream out(path_, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw std::runtime_error("CsvWriter: cannot open " + path_.string());
  }
  out.write(buffer_.data(), static_cast<std::streamsize>(buffer_.size()));
  if (!out) {
    throw std::runtime_error("CsvWriter: write failed for " + path_.string());
  }
  digest_ = fnv1a(buffer_);
  finished_ = true;
  return digest_;
}

std::size_t CsvTable::column(const std::string& name) const {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return i;
  }
  throw std::out_of_range("CsvTable: no column named '" + name + "'");
}

double CsvTable::number(std::size_t row, std::size_t col) const {
  const std::string& cell = rows.at(row).at(col);
  char* end = nullptr;
  const double v = std::strtod(cell.c_str(), &end);
  if (end == cell.c_str() || *end != '\0') {
    throw std::invalid_argument("CsvTable: non-numeric cell '" + cell + "'");
  }
  return v;
}

CsvTable read_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw std::runtime_error("read_csv: cannot open " + path.string());
  }
  CsvTable table;
  std::string line;
  auto split = [](const std::string& text) {
    std::vector<std::string> cells;
    std::string cell;
    std::stringstream stream(text);
    while (std::getline(stream, cell, ',')) cells.push_back(cell);
    if (!text.empty() && text.back() == ',') cells.emplace_back();
    return cells;
  };
  if (!std::getline(in, line)) {
    throw std::runtime_error("read_csv: empty file " + path.string());
  }
  table.header = split(line);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto cells = split(line);
    if (cells.size() != table.header.size()) {
      throw std::runtime_error("read_csv: ragged row in " + path.string());
    }
    table.rows.push_back(std::move(cells));
  }
  return table;
}

std::uint64_t hash_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw std::runtime_error("hash_file: cannot open " + path.string());
  }
  std::uint64_t state = kFnvOffsetBasis;
  char chunk[65536];
  while (in.read(chunk, sizeof(chunk)) || in.gcount() > 0) {
    state = fnv1a({chunk, static_cast<std::size_t>(in.gcount())}, state);
  }
  return state;
}

}  // namespace ctph
