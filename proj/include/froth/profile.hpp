#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace froth {

enum class BoundaryKind { open, periodic, neumann, plus, minus, custom };

std::string to_string(BoundaryKind bc);
BoundaryKind boundary_from_string(const std::string& token);

struct Interval {
  double a = 0.0;
  double b = 0.0;
  double length() const { return b - a; }
};

// Fixed exterior samples for the custom boundary condition, same spacing as
// the interior grid. left runs over cells [-n dx, 0) in increasing x, right
// over [L, L + n dx).
struct CustomBoundary {
  std::vector<double> left;
  std::vector<double> right;
};

// Samples at cell midpoints x_i = (i + 1/2) dx on [0, L].
class GridProfile {
 public:
  GridProfile(double L, double dx, std::vector<double> samples,
              BoundaryKind bc = BoundaryKind::open, CustomBoundary out = {});

  static GridProfile constant(double L, double dx, double value,
                              BoundaryKind bc = BoundaryKind::open);
  static GridProfile from_function(double L, double dx, const std::function<double(double)>& f,
                                   BoundaryKind bc = BoundaryKind::open);

  double L() const { return L_; }
  double dx() const { return dx_; }
  std::size_t size() const { return samples_.size(); }
  const std::vector<double>& samples() const { return samples_; }
  double operator[](std::size_t i) const { return samples_[i]; }
  BoundaryKind bc() const { return bc_; }
  const CustomBoundary& custom() const { return custom_; }

  double x(std::size_t i) const { return (static_cast<double>(i) + 0.5) * dx_; }
  // Grid line index of a position; throws AlignmentError off the grid.
  std::size_t line_index(double pos) const;

  GridProfile with_samples(std::vector<double> s) const;
  GridProfile with_bc(BoundaryKind bc, CustomBoundary out = {}) const;

 private:
  double L_;
  double dx_;
  std::vector<double> samples_;
  BoundaryKind bc_;
  CustomBoundary custom_;
};

// Piecewise-constant profile: values[i] on [breakpoints[i], breakpoints[i+1]).
class StepProfile {
 public:
  StepProfile(std::vector<double> breakpoints, std::vector<double> values);

  static StepProfile from_grid(const GridProfile& g, bool merge_equal = true);
  // sigma_h = m sign(sin(pi x / h)) on [0, L], starting with +m.
  static StepProfile alternating(double h, double L, double m);

  const std::vector<double>& breakpoints() const { return breaks_; }
  const std::vector<double>& values() const { return values_; }
  std::size_t pieces() const { return values_.size(); }
  double L() const { return breaks_.back(); }
  double length(std::size_t i) const { return breaks_[i + 1] - breaks_[i]; }

  bool in_K(double m_bar) const;
  double min_abs_value() const;
  double mean() const;
  StepProfile negated() const;
  // Samples the step function on cell midpoints.
  GridProfile to_grid(double dx, BoundaryKind bc = BoundaryKind::open) const;

 private:
  std::vector<double> breaks_;
  std::vector<double> values_;
};

// Maximal intervals of constant sign of a step profile. With periodic = true the
// first and last intervals are merged when they share a sign (wrap-around).
struct SignInterval {
  double a;
  double b;
  int sign;
  double length() const { return b - a; }
};
std::vector<SignInterval> sign_intervals(const StepProfile& s, bool periodic = false);

enum class BlockType { plus, minus, zero };
std::string to_string(BlockType t);
BlockType block_type(double mean_value, double m_beta);

double average_over(const GridProfile& p, const Interval& I);

struct ProfileFile {
  GridProfile profile;
  std::map<std::string, std::string> extras;
};

void save_profile(const std::string& path, const GridProfile& p,
                  const std::vector<std::pair<std::string, std::string>>& extras = {},
                  const std::string& comment = {});
ProfileFile load_profile_file(const std::string& path);
GridProfile load_profile(const std::string& path);
ProfileFile parse_profile(const std::string& text);
std::string format_profile(const GridProfile& p,
                           const std::vector<std::pair<std::string, std::string>>& extras = {},
                           const std::string& comment = {});

}  // namespace froth
