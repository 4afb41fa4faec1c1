#pragma once

#include <string_view>

namespace adiabatic {

enum class Boundary { periodic, dirichlet };

std::string_view to_string(Boundary b);
Boundary parse_boundary(std::string_view s);

/// Uniform grid on [-L/2, L/2).
///
/// Periodic grids place nodes at -L/2 + i*h. Dirichlet grids use cell
/// centres -L/2 + (i + 1/2)*h; boundary values live on ghost nodes outside
/// the domain. In both cases spacing * num_points == length.
class Grid1D {
 public:
  static constexpr int kMinPoints = 16;

  Grid1D(double length, int num_points, Boundary boundary);

  double length() const noexcept { return length_; }
  int num_points() const noexcept { return num_points_; }
  double spacing() const noexcept { return spacing_; }
  Boundary boundary() const noexcept { return boundary_; }
  bool periodic() const noexcept { return boundary_ == Boundary::periodic; }

  double x(int i) const noexcept {
    return -0.5 * length_ + (periodic() ? i : i + 0.5) * spacing_;
  }

  /// Signed offset x - a, wrapped into [-L/2, L/2) on periodic grids.
  double offset(int i, double a) const noexcept;

  friend bool operator==(const Grid1D&, const Grid1D&) = default;

 private:
  double length_;
  int num_points_;
  double spacing_;
  Boundary boundary_;
};

}  // namespace adiabatic
