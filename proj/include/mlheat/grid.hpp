#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <functional>
#include <span>
#include <vector>

namespace mlheat {

/// Truncated periodic box [-L, L)^N sampled with n points per axis.
///
/// Node j on an axis sits at x_j = -L + j*dx, so x = 0 is node n/2. The
/// discrete frequency of FFT index k is pi*k/L with k folded into
/// [-n/2, n/2 - 1].
class GridSpec {
 public:
  /// Throws ConfigError unless dim is 1 or 2, L > 0 and n is a power of two
  /// no smaller than 16.
  static GridSpec make(int dim, double half_width, std::size_t points);

  int dim() const noexcept { return dim_; }
  double half_width() const noexcept { return half_width_; }
  std::size_t points() const noexcept { return points_; }
  std::size_t size() const noexcept { return dim_ == 1 ? points_ : points_ * points_; }

  double spacing() const noexcept { return 2.0 * half_width_ / static_cast<double>(points_); }
  double cell_volume() const noexcept;
  double volume() const noexcept;

  double coordinate(std::size_t j) const noexcept {
    return -half_width_ + static_cast<double>(j) * spacing();
  }
  /// Signed integer wavenumber of FFT index k on a full axis.
  long wavenumber(std::size_t k) const noexcept {
    const auto n = static_cast<long>(points_);
    const auto kk = static_cast<long>(k);
    return kk < n / 2 ? kk : kk - n;
  }
  double frequency(std::size_t k) const noexcept;

  /// Same node count, half-width multiplied by `factor`.
  GridSpec dilated(double factor) const;

  bool operator==(const GridSpec&) const = default;

 private:
  GridSpec(int dim, double half_width, std::size_t points)
      : dim_(dim), half_width_(half_width), points_(points) {}

  int dim_ = 1;
  double half_width_ = 1.0;
  std::size_t points_ = 16;
};

using Point = std::array<double, 2>;

/// Real samples on a GridSpec, row-major (axis 0 slowest).
class Field {
 public:
  /// Zero field on a 16-point unit 1D grid; a placeholder until assigned.
  Field();
  explicit Field(const GridSpec& grid);
  Field(const GridSpec& grid, std::vector<double> values);

  static Field sample(const GridSpec& grid, const std::function<double(const Point&)>& fn);
  /// Unit-mass discrete delta at x = 0: 1/dx^N on node (n/2, n/2).
  static Field delta(const GridSpec& grid);

  const GridSpec& grid() const noexcept { return grid_; }
  std::size_t size() const noexcept { return values_.size(); }
  std::span<double> values() noexcept { return values_; }
  std::span<const double> values() const noexcept { return values_; }
  double& operator[](std::size_t i) noexcept { return values_[i]; }
  double operator[](std::size_t i) const noexcept { return values_[i]; }

  /// Coordinates of flat index i.
  Point point(std::size_t i) const noexcept;
  /// Flat index of the node nearest to x = 0.
  std::size_t origin_index() const noexcept;

  /// dx^N * sum(values); deterministic regardless of thread count.
  double integral() const;
  double min() const;
  double max() const;
  bool finite() const;

  Field& operator+=(const Field& other);
  Field& operator-=(const Field& other);
  Field& operator*=(double s);

 private:
  GridSpec grid_;
  std::vector<double> values_;
};

Field operator+(Field a, const Field& b);
Field operator-(Field a, const Field& b);
Field operator*(double s, Field a);

/// Snapshot file: "FHK1", u8 dim, u64 n per axis, f64 L, row-major f64 values,
/// everything little-endian.
void write_snapshot(const std::filesystem::path& path, const Field& f);
Field read_snapshot(const std::filesystem::path& path);

}  // namespace mlheat
