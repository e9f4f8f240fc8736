#pragma once

#include <cstdint>
#include <fstream>
#include <initializer_list>
#include <string>
#include <vector>

#include "kgz/soliton.hpp"

namespace kgz {

inline constexpr std::uint32_t kSnapshotVersion = 1;

/// Binary layout: "KGZ1", u32 version, u32 n, f64 length, f64 t, then
/// Re u, Im u, Re rho, Im rho, v, n as n little-endian f64 each.
std::vector<unsigned char> snapshot_bytes(const FieldState& state);
FieldState snapshot_parse(const std::vector<unsigned char>& bytes);

void snapshot_write(const FieldState& state, const std::string& path);
FieldState snapshot_read(const std::string& path);

/// Formats with 17 significant digits (round-trips every double).
std::string format_double(double v);

class CsvWriter {
 public:
  /// Writes to `path`; an empty path means standard output.
  CsvWriter(const std::string& path, std::initializer_list<std::string> header);
  CsvWriter(const std::string& path, const std::vector<std::string>& header);
  ~CsvWriter();
  CsvWriter(const CsvWriter&) = delete;
  CsvWriter& operator=(const CsvWriter&) = delete;

  void row(std::initializer_list<double> values);
  void row(const std::vector<double>& values);
  void flush();

 private:
  std::ofstream file_;
  std::ostream* out_;
  std::size_t columns_;
};

}  // namespace kgz
