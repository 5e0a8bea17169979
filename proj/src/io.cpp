#include "riscim/io.hpp"

#include <fstream>
#include <sstream>

namespace riscim {

void ensure_directory(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory " + dir.string());
}

void write_field_csv(const FieldMap& field,
                     const std::filesystem::path& path) {
  std::ofstream os(path);
  if (!os) throw IoError("cannot open " + path.string());
  os << "x,y,z,re,im\n";
  os.precision(17);
  for (Eigen::Index i = 0; i < field.values.size(); ++i) {
    const Vec3& p = field.points[static_cast<std::size_t>(i)];
    os << p.x() << "," << p.y() << "," << p.z() << ","
       << field.values[i].real() << "," << field.values[i].imag() << "\n";
  }
}

void write_magnitude_pgm(const CVector& values, const PlaneGrid& grid,
                         const std::filesystem::path& path) {
  if (values.size() != static_cast<Eigen::Index>(grid.points.size()))
    throw std::invalid_argument("write_magnitude_pgm: size mismatch");
  const int nx = grid.nx(), ny = grid.ny();
  double vmax = 0.0;
  for (Eigen::Index i = 0; i < values.size(); ++i)
    vmax = std::max(vmax, std::abs(values[i]));
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot open " + path.string());
  os << "P5\n# riscim magnitude map, max-normalized, north up\n"
     << nx << " " << ny << "\n255\n";
  for (int iy = ny - 1; iy >= 0; --iy) {
    for (int ix = 0; ix < nx; ++ix) {
      const double v = std::abs(values[grid.index(iy, ix)]);
      const int q = vmax > 0 ? static_cast<int>(255.0 * v / vmax + 0.5) : 0;
      os.put(static_cast<char>(std::min(q, 255)));
    }
  }
}

void write_image_csv(const CVector& sigma, const PlaneGrid& grid,
                     const std::filesystem::path& path) {
  if (sigma.size() != static_cast<Eigen::Index>(grid.points.size()))
    throw std::invalid_argument("write_image_csv: size mismatch");
  std::ofstream os(path);
  if (!os) throw IoError("cannot open " + path.string());
  os << "x,y,magnitude,phase\n";
  os.precision(17);
  for (int iy = 0; iy < grid.ny(); ++iy) {
    for (int ix = 0; ix < grid.nx(); ++ix) {
      const Complex v = sigma[grid.index(iy, ix)];
      os << grid.xs[static_cast<std::size_t>(ix)] << ","
         << grid.ys[static_cast<std::size_t>(iy)] << "," << std::abs(v) << ","
         << std::arg(v) << "\n";
    }
  }
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

void write_text_file(const std::filesystem::path& path,
                     const std::string& content) {
  std::ofstream os(path);
  if (!os) throw IoError("cannot open " + path.string());
  os << content;
  if (!os) throw IoError("write failed for " + path.string());
}

}  // namespace riscim
