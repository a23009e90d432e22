#include "cnslab/io.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <limits>
#include <sstream>

#include "cnslab/fft.hpp"

namespace cnslab {

namespace {

constexpr char kMagic[4] = {'C', 'N', 'S', 'B'};

void put_u32(std::vector<unsigned char>& b, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) b.push_back(static_cast<unsigned char>(v >> (8 * i)));
}

void put_f64(std::vector<unsigned char>& b, double v) {
  const auto u = std::bit_cast<std::uint64_t>(v);
  for (int i = 0; i < 8; ++i) b.push_back(static_cast<unsigned char>(u >> (8 * i)));
}

class Reader {
 public:
  explicit Reader(const std::vector<unsigned char>& b) : b_(b) {}
  void need(std::size_t n, const char* what) const {
    if (pos_ + n > b_.size()) throw Error(std::string("snapshot truncated while reading ") + what);
  }
  std::uint32_t u32(const char* what) {
    need(4, what);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b_[pos_ + i]) << (8 * i);
    pos_ += 4;
    return v;
  }
  double f64(const char* what) {
    need(8, what);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b_[pos_ + i]) << (8 * i);
    pos_ += 8;
    return std::bit_cast<double>(v);
  }
  std::string cstr(const char* what) {
    std::string s;
    while (true) {
      need(1, what);
      const char c = static_cast<char>(b_[pos_++]);
      if (c == '\0') return s;
      s.push_back(c);
    }
  }
  std::size_t pos() const { return pos_; }
  std::size_t size() const { return b_.size(); }

 private:
  const std::vector<unsigned char>& b_;
  std::size_t pos_ = 0;
};

}  // namespace

void Snapshot::add(const std::string& name, const RealField& f) {
  if (fields.empty() && names.empty()) grid = f.grid;
  require_same_grid(grid, f.grid, "Snapshot::add");
  const std::size_t np = f.grid.points();
  for (int c = 0; c < f.components; ++c) {
    names.push_back(f.components == 1 ? name : name + std::to_string(c + 1));
    fields.emplace_back(f.comp(c), f.comp(c) + np);
  }
}

RealField Snapshot::field(const std::string& name) const {
  for (std::size_t i = 0; i < names.size(); ++i)
    if (names[i] == name) {
      RealField f(grid, 1);
      std::copy(fields[i].begin(), fields[i].end(), f.data.begin());
      return f;
    }
  throw Error("snapshot: no field named '" + name + "'");
}

std::vector<unsigned char> encode_snapshot(const Snapshot& s) {
  s.grid.validate();
  if (s.names.size() != s.fields.size()) throw Error("snapshot: name/count mismatch");
  const std::size_t np = s.grid.points();
  std::vector<unsigned char> b(kMagic, kMagic + 4);
  put_u32(b, kSnapshotVersion);
  put_u32(b, static_cast<std::uint32_t>(s.grid.d));
  for (int a = 0; a < s.grid.d; ++a) put_u32(b, static_cast<std::uint32_t>(s.grid.n));
  put_f64(b, s.grid.L);
  put_u32(b, static_cast<std::uint32_t>(s.fields.size()));
  for (const auto& n : s.names) {
    if (n.empty() || n.find('\0') != std::string::npos) throw Error("snapshot: invalid field name");
    b.insert(b.end(), n.begin(), n.end());
    b.push_back(0);
  }
  b.reserve(b.size() + 8 * np * s.fields.size());
  for (const auto& f : s.fields) {
    if (f.size() != np) throw Error("snapshot: field size does not match the grid");
    for (double v : f) {
      if (!std::isfinite(v)) throw Error("snapshot: non-finite sample");
      put_f64(b, v);
    }
  }
  return b;
}

Snapshot decode_snapshot(const std::vector<unsigned char>& bytes) {
  if (bytes.size() < 4 || std::memcmp(bytes.data(), kMagic, 4) != 0) throw Error("snapshot: bad magic");
  std::vector<unsigned char> rest(bytes.begin() + 4, bytes.end());
  Reader r(rest);
  const std::uint32_t version = r.u32("version");
  if (version != kSnapshotVersion)
    throw Error("snapshot: version mismatch (file " + std::to_string(version) + ", reader " + std::to_string(kSnapshotVersion) + ")");
  Snapshot s;
  const std::uint32_t d = r.u32("dimension");
  if (d < 1 || d > 3) throw Error("snapshot: dimension out of range");
  s.grid.d = static_cast<int>(d);
  std::uint32_t n0 = 0;
  for (std::uint32_t a = 0; a < d; ++a) {
    const std::uint32_t n = r.u32("axis size");
    if (a == 0) n0 = n;
    if (n != n0) throw Error("snapshot: unequal axis sizes are not supported");
  }
  s.grid.n = static_cast<int>(n0);
  s.grid.L = r.f64("domain length");
  s.grid.validate();
  const std::uint32_t count = r.u32("field count");
  for (std::uint32_t i = 0; i < count; ++i) s.names.push_back(r.cstr("field names"));
  const std::size_t np = s.grid.points();
  if (r.size() - r.pos() != 8 * np * count) {
    if (r.size() - r.pos() < 8 * np * count) throw Error("snapshot truncated: payload shorter than header declares");
    throw Error("snapshot: name/count mismatch (payload longer than header declares)");
  }
  for (std::uint32_t i = 0; i < count; ++i) {
    std::vector<double> f(np);
    for (auto& v : f) v = r.f64("payload");
    s.fields.push_back(std::move(f));
  }
  return s;
}

void write_snapshot(const std::string& path, const Snapshot& s) {
  const auto b = encode_snapshot(s);
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("cannot write '" + path + "'");
  f.write(reinterpret_cast<const char*>(b.data()), static_cast<std::streamsize>(b.size()));
  if (!f) throw Error("write failed for '" + path + "'");
}

Snapshot read_snapshot(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error("cannot open '" + path + "'");
  std::vector<unsigned char> b((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
  return decode_snapshot(b);
}

Snapshot snapshot_of(const SpectralState& s, const std::string& vector_name) {
  Snapshot out;
  out.add("a", inverse(s.a));
  out.add(vector_name, inverse(s.u));
  return out;
}

SpectralState state_of(const Snapshot& s, const std::string& vector_name) {
  SpectralState st;
  st.a = transform(s.field("a"));
  RealField u(s.grid, s.grid.d);
  for (int c = 0; c < s.grid.d; ++c) {
    const RealField uc = s.field(vector_name + std::to_string(c + 1));
    std::copy(uc.data.begin(), uc.data.end(), u.comp(c));
  }
  st.u = transform(u);
  return st;
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

CsvWriter::CsvWriter(const std::string& path, const std::vector<std::string>& columns, const std::string& echo)
    : path_(path), ncols_(columns.size()), out_(path) {
  if (!out_) throw Error("cannot write '" + path + "'");
  std::istringstream in(echo);
  std::string line;
  while (std::getline(in, line)) out_ << "# " << line << "\n";
  for (std::size_t i = 0; i < columns.size(); ++i) out_ << (i ? "," : "") << columns[i];
  out_ << "\n";
}

void CsvWriter::row(const std::vector<double>& values) {
  std::vector<std::string> s;
  for (double v : values) s.push_back(format_double(v));
  row(s);
}

void CsvWriter::row(const std::vector<std::string>& values) {
  if (values.size() != ncols_) throw Error("csv '" + path_ + "': row has wrong column count");
  for (std::size_t i = 0; i < values.size(); ++i) out_ << (i ? "," : "") << values[i];
  out_ << "\n";
  if (!out_) throw Error("write failed for '" + path_ + "'");
}

void CsvWriter::close() {
  out_.close();
  if (out_.fail()) throw Error("write failed for '" + path_ + "'");
}

CsvTable read_csv(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw Error("cannot open '" + path + "'");
  CsvTable t;
  std::string line;
  auto split = [](const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(item);
    if (!s.empty() && s.back() == ',') out.push_back("");
    return out;
  };
  while (std::getline(f, line)) {
    if (line.rfind("# ", 0) == 0 && t.header.empty()) {
      t.comments.push_back(line.substr(2));
      continue;
    }
    if (line.empty()) continue;
    if (t.header.empty())
      t.header = split(line);
    else
      t.rows.push_back(split(line));
  }
  return t;
}

namespace {

std::string esc(const std::string& s) {
  std::string o;
  for (char c : s) {
    if (c == '<') o += "&lt;";
    else if (c == '>') o += "&gt;";
    else if (c == '&') o += "&amp;";
    else o += c;
  }
  return o;
}

}  // namespace

std::string render_svg(const PlotSpec& spec, const std::vector<PlotSeries>& series) {
  const double W = 640, H = 420, ml = 70, mr = 150, mt = 40, mb = 55;
  auto tx = [&](double v) { return spec.logx ? std::log2(v) : v; };
  auto ty = [&](double v) { return spec.logy ? std::log2(v) : v; };
  double xlo = std::numeric_limits<double>::infinity(), xhi = -std::numeric_limits<double>::infinity(), ylo = std::numeric_limits<double>::infinity(), yhi = -std::numeric_limits<double>::infinity();
  for (const auto& s : series)
    for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
      const double x = tx(s.x[i]), y = ty(s.y[i]);
      if (!std::isfinite(x) || !std::isfinite(y)) continue;
      xlo = std::min(xlo, x), xhi = std::max(xhi, x), ylo = std::min(ylo, y), yhi = std::max(yhi, y);
    }
  if (!(xlo <= xhi)) xlo = 0, xhi = 1, ylo = 0, yhi = 1;
  if (xhi - xlo < 1e-12) xlo -= 0.5, xhi += 0.5;
  if (yhi - ylo < 1e-12) ylo -= 0.5, yhi += 0.5;
  const double padx = 0.05 * (xhi - xlo), pady = 0.08 * (yhi - ylo);
  xlo -= padx, xhi += padx, ylo -= pady, yhi += pady;
  auto px = [&](double x) { return ml + (x - xlo) / (xhi - xlo) * (W - ml - mr); };
  auto py = [&](double y) { return H - mb - (y - ylo) / (yhi - ylo) * (H - mt - mb); };
  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};
  std::ostringstream o;
  char buf[128];
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  o << "<text x=\"" << W / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">" << esc(spec.title) << "</text>\n";
  std::snprintf(buf, sizeof buf, "<rect x=\"%.1f\" y=\"%.1f\" width=\"%.1f\" height=\"%.1f\" fill=\"none\" stroke=\"black\"/>\n", ml, mt,
                W - ml - mr, H - mt - mb);
  o << buf;
  for (int i = 0; i <= 4; ++i) {
    const double xv = xlo + (xhi - xlo) * i / 4, yv = ylo + (yhi - ylo) * i / 4;
    std::snprintf(buf, sizeof buf, "<text x=\"%.1f\" y=\"%.1f\" text-anchor=\"middle\">%s%.3g</text>\n", px(xv), H - mb + 16,
                  spec.logx ? "2^" : "", xv);
    o << buf;
    std::snprintf(buf, sizeof buf, "<text x=\"%.1f\" y=\"%.1f\" text-anchor=\"end\">%s%.3g</text>\n", ml - 6, py(yv) + 4,
                  spec.logy ? "2^" : "", yv);
    o << buf;
  }
  o << "<text x=\"" << (ml + (W - ml - mr) / 2) << "\" y=\"" << H - 12 << "\" text-anchor=\"middle\">" << esc(spec.xlabel) << "</text>\n";
  o << "<text x=\"16\" y=\"" << H / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 " << H / 2 << ")\">"
    << esc(spec.ylabel) << "</text>\n";
  for (std::size_t k = 0; k < series.size(); ++k) {
    const auto& s = series[k];
    const char* col = colors[k % 6];
    std::string pts;
    for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
      const double x = tx(s.x[i]), y = ty(s.y[i]);
      if (!std::isfinite(x) || !std::isfinite(y)) continue;
      std::snprintf(buf, sizeof buf, "%.2f,%.2f ", px(x), py(y));
      pts += buf;
      if (s.markers) {
        std::snprintf(buf, sizeof buf, "<circle cx=\"%.2f\" cy=\"%.2f\" r=\"3\" fill=\"%s\"/>\n", px(x), py(y), col);
        o << buf;
      }
    }
    o << "<polyline fill=\"none\" stroke=\"" << col << "\" points=\"" << pts << "\"/>\n";
    std::snprintf(buf, sizeof buf, "<text x=\"%.1f\" y=\"%.1f\" fill=\"%s\">", W - mr + 10, mt + 16.0 * (k + 1), col);
    o << buf << esc(s.label) << "</text>\n";
  }
  o << "</svg>\n";
  return o.str();
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream f(path);
  if (!f) throw Error("cannot write '" + path + "'");
  f << text;
  if (!f) throw Error("write failed for '" + path + "'");
}

}  // namespace cnslab
