#pragma once

#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

#include "cnslab/core.hpp"
#include "cnslab/semigroup.hpp"

namespace cnslab {

inline constexpr std::uint32_t kSnapshotVersion = 1;

// Named scalar fields on one grid. Layout on disk (all little-endian):
// "CNSB", u32 version, u32 d, u32 n per axis, f64 L, u32 field count,
// null-terminated names, then f64 samples per field in row-major order.
struct Snapshot {
  GridSpec grid;
  std::vector<std::string> names;
  std::vector<std::vector<double>> fields;

  void add(const std::string& name, const RealField& f);  // one entry per component
  RealField field(const std::string& name) const;
};

std::vector<unsigned char> encode_snapshot(const Snapshot& s);
Snapshot decode_snapshot(const std::vector<unsigned char>& bytes);
void write_snapshot(const std::string& path, const Snapshot& s);
Snapshot read_snapshot(const std::string& path);

// a, u1..ud (or m1..md) from a spectral state.
Snapshot snapshot_of(const SpectralState& s, const std::string& vector_name = "u");
SpectralState state_of(const Snapshot& s, const std::string& vector_name = "u");

// %.17g, with inf/nan spelled out.
std::string format_double(double v);

// CSV with a commented config echo ahead of the header row.
class CsvWriter {
 public:
  CsvWriter(const std::string& path, const std::vector<std::string>& columns, const std::string& echo = "");
  void row(const std::vector<double>& values);
  void row(const std::vector<std::string>& values);
  void close();

 private:
  std::string path_;
  std::size_t ncols_;
  std::ofstream out_;
};

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> comments;
};
CsvTable read_csv(const std::string& path);

struct PlotSeries {
  std::string label;
  std::vector<double> x, y;
  bool markers = true;  // false: polyline only
};

struct PlotSpec {
  std::string title, xlabel, ylabel;
  bool logx = false, logy = false;  // log2 axes
};

std::string render_svg(const PlotSpec& spec, const std::vector<PlotSeries>& series);
void write_text(const std::string& path, const std::string& text);

}  // namespace cnslab
