#include "l3lab/numerics/complex_path.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "l3lab/error.hpp"

namespace l3lab {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

cplx polar_unit(double phi) { return {std::cos(phi), std::sin(phi)}; }

}  // namespace

cplx segment_point(const PathSegment& seg, double s) {
  return std::visit(overloaded{
                        [s](const LineSegment& l) { return l.a + s * (l.b - l.a); },
                        [s](const ArcSegment& a) {
                          const double phi = a.phi_start + s * (a.phi_end - a.phi_start);
                          return a.center + a.radius * polar_unit(phi);
                        },
                    },
                    seg);
}

cplx segment_tangent(const PathSegment& seg, double s) {
  return std::visit(overloaded{
                        [](const LineSegment& l) { return l.b - l.a; },
                        [s](const ArcSegment& a) {
                          const double sweep = a.phi_end - a.phi_start;
                          const double phi = a.phi_start + s * sweep;
                          return cplx(0.0, 1.0) * a.radius * sweep * polar_unit(phi);
                        },
                    },
                    seg);
}

cplx segment_start(const PathSegment& seg) { return segment_point(seg, 0.0); }
cplx segment_end(const PathSegment& seg) { return segment_point(seg, 1.0); }

double segment_length(const PathSegment& seg) {
  return std::visit(overloaded{
                        [](const LineSegment& l) { return std::abs(l.b - l.a); },
                        [](const ArcSegment& a) {
                          return a.radius * std::abs(a.phi_end - a.phi_start);
                        },
                    },
                    seg);
}

cplx segment_offset(const PathSegment& seg, double anchor_s, double ds) {
  return std::visit(
      overloaded{
          [ds](const LineSegment& l) { return ds * (l.b - l.a); },
          [anchor_s, ds](const ArcSegment& a) {
            // r e^{i phi0} (e^{i dphi} - 1) with e^{i x} - 1 = -2 sin^2(x/2) + i sin x
            const double sweep = a.phi_end - a.phi_start;
            const double phi0 = a.phi_start + anchor_s * sweep;
            const double dphi = ds * sweep;
            const double h = std::sin(0.5 * dphi);
            return a.radius * polar_unit(phi0) * cplx(-2.0 * h * h, std::sin(dphi));
          },
      },
      seg);
}

ComplexPath::ComplexPath(std::vector<PathSegment> segments) : segments_(std::move(segments)) {
  validate();
}

ComplexPath ComplexPath::line(cplx a, cplx b) { return ComplexPath({LineSegment{a, b}}); }

ComplexPath ComplexPath::arc(cplx center, double radius, double phi_start, double phi_end) {
  return ComplexPath({ArcSegment{center, radius, phi_start, phi_end}});
}

ComplexPath ComplexPath::polyline(const std::vector<cplx>& vertices) {
  if (vertices.size() < 2) {
    throw Error(ErrorCode::InvalidArgument, "polyline needs at least two vertices");
  }
  std::vector<PathSegment> segs;
  for (std::size_t i = 0; i + 1 < vertices.size(); ++i) {
    segs.emplace_back(LineSegment{vertices[i], vertices[i + 1]});
  }
  return ComplexPath(std::move(segs));
}

ComplexPath& ComplexPath::line_to(cplx b) {
  if (segments_.empty()) throw Error(ErrorCode::InvalidArgument, "line_to on empty path");
  segments_.emplace_back(LineSegment{end(), b});
  validate();
  return *this;
}

ComplexPath& ComplexPath::arc_about(cplx center, double sweep) {
  if (segments_.empty()) throw Error(ErrorCode::InvalidArgument, "arc_about on empty path");
  const cplx from = end() - center;
  const double phi0 = std::arg(from);
  segments_.emplace_back(ArcSegment{center, std::abs(from), phi0, phi0 + sweep});
  validate();
  return *this;
}

ComplexPath& ComplexPath::append(const ComplexPath& other) {
  segments_.insert(segments_.end(), other.segments_.begin(), other.segments_.end());
  validate();
  return *this;
}

ComplexPath ComplexPath::reversed() const {
  std::vector<PathSegment> out;
  out.reserve(segments_.size());
  for (auto it = segments_.rbegin(); it != segments_.rend(); ++it) {
    out.push_back(std::visit(overloaded{
                                 [](const LineSegment& l) -> PathSegment {
                                   return LineSegment{l.b, l.a};
                                 },
                                 [](const ArcSegment& a) -> PathSegment {
                                   return ArcSegment{a.center, a.radius, a.phi_end, a.phi_start};
                                 },
                             },
                             *it));
  }
  return ComplexPath(std::move(out));
}

cplx ComplexPath::start() const { return segment_start(segments_.at(0)); }
cplx ComplexPath::end() const { return segment_end(segments_.at(segments_.size() - 1)); }

double ComplexPath::length() const {
  double total = 0.0;
  for (const auto& s : segments_) total += segment_length(s);
  return total;
}

void ComplexPath::validate() const {
  if (segments_.empty()) throw Error(ErrorCode::InvalidArgument, "path has no segments");
  for (std::size_t i = 0; i < segments_.size(); ++i) {
    if (const auto* a = std::get_if<ArcSegment>(&segments_[i]); a && !(a->radius > 0.0)) {
      throw Error(ErrorCode::InvalidArgument, "arc radius must be positive");
    }
    if (i > 0) {
      const double gap = std::abs(segment_end(segments_[i - 1]) - segment_start(segments_[i]));
      if (gap > kJoinTolerance) {
        std::ostringstream os;
        os << "segments " << i - 1 << " and " << i << " do not join (gap " << gap << ")";
        throw Error(ErrorCode::InvalidArgument, os.str());
      }
    }
  }
  const double len = length();
  if (!(len > 0.0) || !std::isfinite(len)) {
    throw Error(ErrorCode::InvalidArgument, "path length must be finite and positive");
  }
}

}  // namespace l3lab
