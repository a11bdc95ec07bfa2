#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace ctph {

inline constexpr std::uint64_t kFnvOffsetBasis = 14695981039346656037ull;

/// 64-bit FNV-1a; pass a previous digest as `state` to hash a concatenation.
std::uint64_t fnv1a(std::string_view bytes,
                    std::uint64_t state = kFnvOffsetBasis);

/// Compact numeric cell formatting: "%.9g", upgraded to "%.17g" only when
/// nine significant digits would not round-trip the exact double.
std::string format_number(double value);

/// One CSV cell, implicitly constructible from the types artifacts contain.
struct CsvCell {
  std::string text;

  CsvCell(double v) : text(format_number(v)) {}
  CsvCell(int v) : text(std::to_string(v)) {}
  CsvCell(long v) : text(std::to_string(v)) {}
  CsvCell(unsigned long v) : text(std::to_string(v)) {}
  CsvCell(unsigned long long v) : text(std::to_string(v)) {}
  CsvCell(bool v) : text(v ? "1" : "0") {}
  CsvCell(const char* s) : text(s) {}
  CsvCell(std::string s) : text(std::move(s)) {}
};

/// Buffered CSV writer. Rows are accumulated in memory and written atomically
/// by finish(), which also reports the FNV-1a digest of the file contents —
/// the hash recorded in the run manifest. Destruction without finish() still
/// writes the file.
class CsvWriter {
 public:
  CsvWriter(std::filesystem::path path, const std::vector<std::string>& header);
  ~CsvWriter();
  CsvWriter(const CsvWriter&) = delete;
  CsvWriter& operator=(const CsvWriter&) = delete;

  void row(const std::vector<CsvCell>& cells);

  /// Flushes to disk and returns the content digest. Idempotent.
  std::uint64_t finish();

  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
  std::string buffer_;
  std::size_t columns_ = 0;
  bool finished_ = false;
  std::uint64_t digest_ = 0;
};

/// In-memory CSV contents: header plus string cells, with numeric accessors.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  /// Column index by name; throws std::out_of_range when absent.
  std::size_t column(const std::string& name) const;
  /// Cell parsed as double; throws std::invalid_argument on non-numeric text.
  double number(std::size_t row, std::size_t col) const;
};

/// Reads a whole CSV file; throws std::runtime_error on missing files or
/// ragged rows.
CsvTable read_csv(const std::filesystem::path& path);

/// FNV-1a digest of a file's raw bytes (for manifest verification).
std::uint64_t hash_file(const std::filesystem::path& path);

}  // namespace ctph
