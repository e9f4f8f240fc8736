#include "kgz/io.hpp"

#include <bit>
#include <cstdio>
#include <cstring>
#include <iostream>
#include <iterator>

#include "kgz/errors.hpp"

namespace kgz {

namespace {

constexpr char kMagic[4] = {'K', 'G', 'Z', '1'};
constexpr std::size_t kHeaderBytes = 4 + 4 + 4 + 8 + 8;

void put_u32(std::vector<unsigned char>& out, std::uint32_t v) {
  for (int b = 0; b < 4; ++b) out.push_back(static_cast<unsigned char>(v >> (8 * b)));
}

void put_f64(std::vector<unsigned char>& out, double d) {
  auto v = std::bit_cast<std::uint64_t>(d);
  for (int b = 0; b < 8; ++b) out.push_back(static_cast<unsigned char>(v >> (8 * b)));
}

std::uint32_t get_u32(const unsigned char* p) {
  std::uint32_t v = 0;
  for (int b = 0; b < 4; ++b) v |= static_cast<std::uint32_t>(p[b]) << (8 * b);
  return v;
}

double get_f64(const unsigned char* p) {
  std::uint64_t v = 0;
  for (int b = 0; b < 8; ++b) v |= static_cast<std::uint64_t>(p[b]) << (8 * b);
  return std::bit_cast<double>(v);
}

}  // namespace

std::vector<unsigned char> snapshot_bytes(const FieldState& s) {
  const std::size_t n = s.grid()->size();
  std::vector<unsigned char> out;
  out.reserve(kHeaderBytes + 48 * n);
  out.insert(out.end(), std::begin(kMagic), std::end(kMagic));
  put_u32(out, kSnapshotVersion);
  put_u32(out, static_cast<std::uint32_t>(n));
  put_f64(out, s.grid()->length());
  put_f64(out, s.t);
  for (std::size_t j = 0; j < n; ++j) put_f64(out, s.u[j].real());
  for (std::size_t j = 0; j < n; ++j) put_f64(out, s.u[j].imag());
  for (std::size_t j = 0; j < n; ++j) put_f64(out, s.rho[j].real());
  for (std::size_t j = 0; j < n; ++j) put_f64(out, s.rho[j].imag());
  for (std::size_t j = 0; j < n; ++j) put_f64(out, s.v[j]);
  for (std::size_t j = 0; j < n; ++j) put_f64(out, s.n[j]);
  return out;
}

FieldState snapshot_parse(const std::vector<unsigned char>& bytes) {
  if (bytes.size() < kHeaderBytes) throw NumericalError("snapshot: truncated header");
  if (std::memcmp(bytes.data(), kMagic, 4) != 0) throw NumericalError("snapshot: bad magic");
  std::uint32_t version = get_u32(bytes.data() + 4);
  if (version != kSnapshotVersion)
    throw NumericalError("snapshot: unknown format version " + std::to_string(version));
  std::size_t n = get_u32(bytes.data() + 8);
  double length = get_f64(bytes.data() + 12);
  double t = get_f64(bytes.data() + 20);
  if (bytes.size() != kHeaderBytes + 48 * n)
    throw NumericalError("snapshot: expected " + std::to_string(kHeaderBytes + 48 * n) + " bytes, got " +
                         std::to_string(bytes.size()));
  GridPtr g;
  try {
    g = make_grid(n, length);
  } catch (const ParameterError& e) {
    throw NumericalError(std::string("snapshot: invalid grid: ") + e.what());
  }
  FieldState s{FieldSet::zeros(g), t};
  const unsigned char* p = bytes.data() + kHeaderBytes;
  auto next = [&] {
    double d = get_f64(p);
    p += 8;
    return d;
  };
  for (std::size_t j = 0; j < n; ++j) s.u[j].real(next());
  for (std::size_t j = 0; j < n; ++j) s.u[j].imag(next());
  for (std::size_t j = 0; j < n; ++j) s.rho[j].real(next());
  for (std::size_t j = 0; j < n; ++j) s.rho[j].imag(next());
  for (std::size_t j = 0; j < n; ++j) s.v[j] = next();
  for (std::size_t j = 0; j < n; ++j) s.n[j] = next();
  return s;
}

void snapshot_write(const FieldState& state, const std::string& path) {
  std::vector<unsigned char> bytes = snapshot_bytes(state);
  std::ofstream f(path, std::ios::binary);
  if (!f) throw NumericalError("snapshot: cannot open '" + path + "' for writing");
  f.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!f) throw NumericalError("snapshot: write to '" + path + "' failed");
}

FieldState snapshot_read(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw NumericalError("snapshot: cannot open '" + path + "'");
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
  return snapshot_parse(bytes);
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

CsvWriter::CsvWriter(const std::string& path, std::initializer_list<std::string> header)
    : CsvWriter(path, std::vector<std::string>(header)) {}

CsvWriter::CsvWriter(const std::string& path, const std::vector<std::string>& header)
    : out_(&std::cout), columns_(header.size()) {
  if (!path.empty()) {
    file_.open(path);
    if (!file_) throw NumericalError("csv: cannot open '" + path + "' for writing");
    out_ = &file_;
  }
  for (std::size_t i = 0; i < header.size(); ++i) *out_ << (i ? "," : "") << header[i];
  *out_ << '\n';
}

CsvWriter::~CsvWriter() { out_->flush(); }

void CsvWriter::row(std::initializer_list<double> values) { row(std::vector<double>(values)); }

void CsvWriter::row(const std::vector<double>& values) {
  if (values.size() != columns_) throw ParameterError("csv: row width does not match header");
  for (std::size_t i = 0; i < values.size(); ++i) *out_ << (i ? "," : "") << format_double(values[i]);
  *out_ << '\n';
}

void CsvWriter::flush() { out_->flush(); }

}  // namespace kgz
