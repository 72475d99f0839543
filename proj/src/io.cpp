#include "envl0/io.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace envl0 {

namespace fs = std::filesystem;

namespace {

std::ofstream open_out(const fs::path &path, std::ios::openmode mode = std::ios::out) {
  if (path.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(path.parent_path(), ec);
    if (ec)
      throw IoError("cannot create directory " + path.parent_path().string() + ": " + ec.message());
  }
  std::ofstream os(path, mode | std::ios::trunc);
  if (!os)
    throw IoError("cannot open " + path.string() + " for writing");
  return os;
}

void finish(std::ofstream &os, const fs::path &path) {
  os.flush();
  if (!os)
    throw IoError("write failed for " + path.string());
}

std::vector<std::string> split(const std::string &line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream is(line);
  while (std::getline(is, cell, ','))
    out.push_back(cell);
  if (!line.empty() && line.back() == ',')
    out.emplace_back();
  return out;
}

} // namespace

std::string format_double(double v) {
  if (std::isnan(v))
    return "nan";
  if (std::isinf(v))
    return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

Index CsvTable::column(const std::string &name) const {
  auto it = std::find(header.begin(), header.end(), name);
  if (it == header.end())
    throw IoError("CSV: missing column '" + name + "'");
  return static_cast<Index>(it - header.begin());
}

std::vector<double> CsvTable::numeric(const std::string &name) const {
  const auto c = static_cast<size_t>(column(name));
  std::vector<double> out;
  out.reserve(rows.size());
  for (size_t i = 0; i < rows.size(); ++i) {
    const std::string &s = rows[i][c];
    double v = 0;
    auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size())
      throw IoError("CSV: row " + std::to_string(i + 2) + ", column '" + name + "': not a number: '" + s + "'");
    out.push_back(v);
  }
  return out;
}

CsvTable read_csv(const fs::path &path) {
  std::ifstream is(path);
  if (!is)
    throw IoError("cannot open " + path.string());
  CsvTable t;
  std::string line;
  if (!std::getline(is, line))
    throw IoError(path.string() + ": empty file");
  if (!line.empty() && line.back() == '\r')
    line.pop_back();
  t.header = split(line);
  size_t lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r')
      line.pop_back();
    if (line.empty())
      continue;
    auto cells = split(line);
    if (cells.size() != t.header.size())
      throw IoError(path.string() + ":" + std::to_string(lineno) + ": expected " + std::to_string(t.header.size()) +
                    " fields, got " + std::to_string(cells.size()));
    t.rows.push_back(std::move(cells));
  }
  return t;
}

void write_csv(const fs::path &path, const CsvTable &table) {
  auto os = open_out(path);
  auto line = [&](const std::vector<std::string> &cells) {
    for (size_t i = 0; i < cells.size(); ++i)
      os << (i ? "," : "") << cells[i];
    os << '\n';
  };
  line(table.header);
  for (const auto &r : table.rows)
    line(r);
  finish(os, path);
}

void write_columns(const fs::path &path, const std::vector<std::string> &names, const std::vector<Vector> &columns) {
  if (names.size() != columns.size() || columns.empty())
    throw DimensionError("write_columns: one name per column required");
  for (const auto &c : columns)
    require_size(c.size(), columns.front().size(), "write_columns");
  CsvTable t;
  t.header = names;
  for (Index i = 0; i < columns.front().size(); ++i) {
    std::vector<std::string> row;
    for (const auto &c : columns)
      row.push_back(format_double(c[i]));
    t.rows.push_back(std::move(row));
  }
  write_csv(path, t);
}

void write_grid_csv(const fs::path &path, const Eigen::MatrixXd &grid) {
  auto os = open_out(path);
  for (Index i = 0; i < grid.rows(); ++i) {
    for (Index j = 0; j < grid.cols(); ++j)
      os << (j ? "," : "") << format_double(grid(i, j));
    os << '\n';
  }
  finish(os, path);
}

namespace {

void write_pgm_bytes(const fs::path &path, const Eigen::MatrixXd &image, double lo, double hi,
                     const std::string &mapping) {
  auto os = open_out(path, std::ios::out | std::ios::binary);
  os << "P5\n" << image.cols() << ' ' << image.rows() << "\n255\n";
  const double span = hi - lo;
  std::vector<unsigned char> row(static_cast<size_t>(image.cols()));
  for (Index i = 0; i < image.rows(); ++i) {
    for (Index j = 0; j < image.cols(); ++j) {
      double t = span > 0 ? (image(i, j) - lo) / span : 0.5;
      row[static_cast<size_t>(j)] = static_cast<unsigned char>(std::lround(std::clamp(t, 0.0, 1.0) * 255.0));
    }
    os.write(reinterpret_cast<const char *>(row.data()), static_cast<std::streamsize>(row.size()));
  }
  finish(os, path);
  std::ostringstream side;
  side << "format P5 maxval 255\n"
       << "width " << image.cols() << "\nheight " << image.rows() << '\n'
       << "mapping " << mapping << '\n'
       << "black " << format_double(lo) << "\nwhite " << format_double(hi) << '\n';
  write_text(fs::path(path.string() + ".txt"), side.str());
}

} // namespace

void write_pgm(const fs::path &path, const Eigen::MatrixXd &image, double scale) {
  if (image.size() == 0)
    throw DimensionError("write_pgm: empty image");
  double s = scale > 0 ? scale : image.cwiseAbs().maxCoeff();
  write_pgm_bytes(path, image, -s, s, "linear [-s,+s] -> [0,255]");
}

void write_pgm_magnitude(const fs::path &path, const Eigen::MatrixXd &image) {
  if (image.size() == 0)
    throw DimensionError("write_pgm: empty image");
  write_pgm_bytes(path, image, 0.0, image.maxCoeff(), "linear [0,max] -> [0,255]");
}

void write_svg(const fs::path &path, const std::string &title, const Vector &t,
               const std::vector<SvgSeries> &series) {
  static const char *colors[] = {"#000000", "#d62728", "#1f77b4", "#2ca02c", "#9467bd", "#ff7f0e"};
  const double W = 800, H = 400, pad = 50;
  double lo = 0, hi = 0;
  for (const auto &s : series) {
    require_size(s.values.size(), t.size(), "write_svg");
    if (s.values.size()) {
      lo = std::min(lo, s.values.minCoeff());
      hi = std::max(hi, s.values.maxCoeff());
    }
  }
  if (hi == lo)
    hi = lo + 1;
  const double t0 = t.size() ? t[0] : 0, t1 = t.size() > 1 ? t[t.size() - 1] : 1;
  auto px = [&](double x) { return pad + (x - t0) / (t1 - t0) * (W - 2 * pad); };
  auto py = [&](double y) { return H - pad - (y - lo) / (hi - lo) * (H - 2 * pad); };
  char buf[64];
  auto num = [&](double v) {
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return std::string(buf);
  };

  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\">\n"
     << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
     << "<text x=\"" << pad << "\" y=\"25\" font-family=\"sans-serif\" font-size=\"14\">" << title << "</text>\n"
     << "<line x1=\"" << pad << "\" y1=\"" << num(py(0)) << "\" x2=\"" << W - pad << "\" y2=\"" << num(py(0))
     << "\" stroke=\"#bbbbbb\"/>\n";
  for (size_t k = 0; k < series.size(); ++k) {
    const char *color = colors[k % 6];
    os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.2\" points=\"";
    for (Index i = 0; i < t.size(); ++i)
      os << (i ? " " : "") << num(px(t[i])) << ',' << num(py(series[k].values[i]));
    os << "\"/>\n";
    os << "<text x=\"" << W - pad - 150 << "\" y=\"" << 45 + 16 * k << "\" font-family=\"sans-serif\" font-size=\"12\" "
       << "fill=\"" << color << "\">" << series[k].label << "</text>\n";
  }
  os << "</svg>\n";
  write_text(path, os.str());
}

void write_text(const fs::path &path, const std::string &text) {
  auto os = open_out(path, std::ios::out | std::ios::binary);
  os << text;
  finish(os, path);
}

} // namespace envl0
