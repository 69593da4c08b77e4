#include "mlheat/grid.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <numbers>
#include <sstream>

#include "mlheat/errors.hpp"
#include "mlheat/parallel.hpp"

namespace mlheat {

GridSpec GridSpec::make(int dim, double half_width, std::size_t points) {
  if (dim != 1 && dim != 2) {
    throw ConfigError("grid dimension must be 1 or 2, got " + std::to_string(dim));
  }
  if (!(half_width > 0.0) || !std::isfinite(half_width)) {
    throw ConfigError("grid half-width must be positive and finite");
  }
  if (points < 16 || !std::has_single_bit(points)) {
    throw ConfigError("grid points must be a power of two >= 16, got " + std::to_string(points));
  }
  return GridSpec(dim, half_width, points);
}

double GridSpec::cell_volume() const noexcept {
  const double dx = spacing();
  return dim_ == 1 ? dx : dx * dx;
}

double GridSpec::volume() const noexcept {
  const double side = 2.0 * half_width_;
  return dim_ == 1 ? side : side * side;
}

double GridSpec::frequency(std::size_t k) const noexcept {
  return std::numbers::pi * static_cast<double>(wavenumber(k)) / half_width_;
}

GridSpec GridSpec::dilated(double factor) const { return make(dim_, half_width_ * factor, points_); }

Field::Field() : Field(GridSpec::make(1, 1.0, 16)) {}

Field::Field(const GridSpec& grid) : grid_(grid), values_(grid.size(), 0.0) {}

Field::Field(const GridSpec& grid, std::vector<double> values)
    : grid_(grid), values_(std::move(values)) {
  if (values_.size() != grid_.size()) {
    throw ConfigError("field size does not match its grid");
  }
}

Field Field::sample(const GridSpec& grid, const std::function<double(const Point&)>& fn) {
  Field f(grid);
  par::for_each(f.size(), [&](std::size_t i) { f.values_[i] = fn(f.point(i)); });
  return f;
}

Field Field::delta(const GridSpec& grid) {
  Field f(grid);
  f.values_[f.origin_index()] = 1.0 / grid.cell_volume();
  return f;
}

Point Field::point(std::size_t i) const noexcept {
  const std::size_t n = grid_.points();
  if (grid_.dim() == 1) return {grid_.coordinate(i), 0.0};
  return {grid_.coordinate(i / n), grid_.coordinate(i % n)};
}

std::size_t Field::origin_index() const noexcept {
  const std::size_t n = grid_.points();
  return grid_.dim() == 1 ? n / 2 : (n / 2) * n + n / 2;
}

double Field::integral() const { return grid_.cell_volume() * par::sum(values_); }
double Field::min() const { return par::min(values_); }
double Field::max() const { return par::max(values_); }
bool Field::finite() const { return par::all_finite(values_); }

Field& Field::operator+=(const Field& other) {
  if (!(other.grid_ == grid_)) throw ConfigError("field grids differ");
  par::for_each(size(), [&](std::size_t i) { values_[i] += other.values_[i]; });
  return *this;
}

Field& Field::operator-=(const Field& other) {
  if (!(other.grid_ == grid_)) throw ConfigError("field grids differ");
  par::for_each(size(), [&](std::size_t i) { values_[i] -= other.values_[i]; });
  return *this;
}

Field& Field::operator*=(double s) {
  par::for_each(size(), [&](std::size_t i) { values_[i] *= s; });
  return *this;
}

Field operator+(Field a, const Field& b) { return a += b; }
Field operator-(Field a, const Field& b) { return a -= b; }
Field operator*(double s, Field a) { return a *= s; }

namespace {

constexpr char kMagic[4] = {'F', 'H', 'K', '1'};

template <class T>
void put_le(std::ostream& out, T value) {
  auto raw = std::bit_cast<std::array<unsigned char, sizeof(T)>>(value);
  if constexpr (std::endian::native == std::endian::big) {
    std::reverse(raw.begin(), raw.end());
  }
  out.write(reinterpret_cast<const char*>(raw.data()), sizeof(T));
}

template <class T>
T get_le(std::istream& in) {
  std::array<unsigned char, sizeof(T)> raw{};
  in.read(reinterpret_cast<char*>(raw.data()), sizeof(T));
  if (!in) throw ConfigError("snapshot file truncated");
  if constexpr (std::endian::native == std::endian::big) {
    std::reverse(raw.begin(), raw.end());
  }
  return std::bit_cast<T>(raw);
}

}  // namespace

void write_snapshot(const std::filesystem::path& path, const Field& f) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot open snapshot for writing: " + path.string());
  out.write(kMagic, 4);
  const auto& g = f.grid();
  put_le<std::uint8_t>(out, static_cast<std::uint8_t>(g.dim()));
  for (int a = 0; a < g.dim(); ++a) put_le<std::uint64_t>(out, g.points());
  put_le<double>(out, g.half_width());
  for (double v : f.values()) put_le<double>(out, v);
  if (!out) throw ConfigError("failed writing snapshot: " + path.string());
}

Field read_snapshot(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open snapshot: " + path.string());
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, kMagic, 4) != 0) throw ConfigError("not an FHK1 snapshot");
  const int dim = get_le<std::uint8_t>(in);
  if (dim != 1 && dim != 2) throw ConfigError("snapshot has invalid dimension");
  std::uint64_t n = get_le<std::uint64_t>(in);
  if (dim == 2 && get_le<std::uint64_t>(in) != n) {
    throw ConfigError("snapshot axes must have equal point counts");
  }
  const double L = get_le<double>(in);
  const GridSpec grid = GridSpec::make(dim, L, static_cast<std::size_t>(n));
  std::vector<double> values(grid.size());
  for (double& v : values) v = get_le<double>(in);
  return Field(grid, std::move(values));
}

}  // namespace mlheat
