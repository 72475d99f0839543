#pragma once

#include "envl0/types.h"

#include <Eigen/Dense>
#include <filesystem>
#include <string>
#include <vector>

namespace envl0 {

/// Raised for unreadable or malformed files.
class IoError : public Error {
public:
  using Error::Error;
};

/// Shortest decimal form that round-trips the double.
std::string format_double(double v);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  Index column(const std::string &name) const; ///< throws IoError if absent
  std::vector<double> numeric(const std::string &name) const;
};

CsvTable read_csv(const std::filesystem::path &path);
void write_csv(const std::filesystem::path &path, const CsvTable &table);

/// Writes named equal-length columns.
void write_columns(const std::filesystem::path &path, const std::vector<std::string> &names,
                   const std::vector<Vector> &columns);

void write_grid_csv(const std::filesystem::path &path, const Eigen::MatrixXd &grid);

/// 8-bit binary PGM of `image` (rows top to bottom). Values map linearly from
/// [-scale, +scale] to [0, 255], scale = max |image| unless given. The
/// mapping is recorded in `<path>.txt`.
void write_pgm(const std::filesystem::path &path, const Eigen::MatrixXd &image, double scale = 0.0);
/// Magnitude images map [0, max] to [0, 255].
void write_pgm_magnitude(const std::filesystem::path &path, const Eigen::MatrixXd &image);

struct SvgSeries {
  std::string label;
  Vector values;
};

/// Line overlay of several series sharing the abscissa `t`.
void write_svg(const std::filesystem::path &path, const std::string &title, const Vector &t,
               const std::vector<SvgSeries> &series);

void write_text(const std::filesystem::path &path, const std::string &text);

} // namespace envl0
