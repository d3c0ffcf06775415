#pragma once

#include <complex>
#include <cstddef>
#include <variant>
#include <vector>

namespace l3lab {

using cplx = std::complex<double>;

struct LineSegment {
  cplx a;
  cplx b;
};

/// Circular arc `center + radius * exp(i*phi)` for phi from phi_start to phi_end.
/// phi_end < phi_start runs clockwise.
struct ArcSegment {
  cplx center;
  double radius = 0.0;
  double phi_start = 0.0;
  double phi_end = 0.0;
};

using PathSegment = std::variant<LineSegment, ArcSegment>;

/// Point on one segment, parametrized by s in [0,1].
[[nodiscard]] cplx segment_point(const PathSegment& seg, double s);
/// dz/ds on one segment.
[[nodiscard]] cplx segment_tangent(const PathSegment& seg, double s);
[[nodiscard]] cplx segment_start(const PathSegment& seg);
[[nodiscard]] cplx segment_end(const PathSegment& seg);
[[nodiscard]] double segment_length(const PathSegment& seg);

/// Offset `z(s) - z(anchor_s)` computed without cancellation, where anchor_s
/// is 0 or 1. Quadrature nodes pinned against a singular endpoint rely on it.
[[nodiscard]] cplx segment_offset(const PathSegment& seg, double anchor_s, double ds);

/// Piecewise line/arc path in a complex plane.
///
/// Consecutive segments must share endpoints to within 1e-12; the builder
/// methods enforce it. Paths are immutable values once built.
class ComplexPath {
 public:
  static constexpr double kJoinTolerance = 1e-12;

  ComplexPath() = default;
  explicit ComplexPath(std::vector<PathSegment> segments);

  static ComplexPath line(cplx a, cplx b);
  static ComplexPath arc(cplx center, double radius, double phi_start, double phi_end);
  /// Straight polyline through the given vertices (at least two).
  static ComplexPath polyline(const std::vector<cplx>& vertices);

  /// Append a straight segment from the current end to `b`.
  ComplexPath& line_to(cplx b);
  /// Append an arc about `center` starting at the current end and sweeping
  /// by `sweep` radians (negative = clockwise).
  ComplexPath& arc_about(cplx center, double sweep);
  /// Append another path whose start coincides with the current end.
  ComplexPath& append(const ComplexPath& other);

  [[nodiscard]] ComplexPath reversed() const;

  [[nodiscard]] bool empty() const noexcept { return segments_.empty(); }
  [[nodiscard]] std::size_t size() const noexcept { return segments_.size(); }
  [[nodiscard]] const PathSegment& segment(std::size_t i) const { return segments_.at(i); }
  [[nodiscard]] const std::vector<PathSegment>& segments() const noexcept { return segments_; }

  [[nodiscard]] cplx start() const;
  [[nodiscard]] cplx end() const;
  [[nodiscard]] double length() const;

  /// Throws InvalidArgument unless the path satisfies its invariants.
  void validate() const;

 private:
  std::vector<PathSegment> segments_;
};

}  // namespace l3lab
