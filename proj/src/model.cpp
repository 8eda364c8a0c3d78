#include "qtt/model.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include <nlohmann/json.hpp>

namespace qtt {

RegionOfInterest::RegionOfInterest(double a_, double b_) : a(a_), b(b_) {
  if (!(a < b)) throw SchemaError("RegionOfInterest requires a < b");
}

double TimeProfile::at(double t) const {
  if (times.empty() || times.size() != heights.size())
    throw SchemaError("TimeProfile: empty or mismatched sample arrays");
  const double eps = 1e-12 * (1.0 + std::abs(times.back() - times.front()));
  if (t < times.front() - eps || t > times.back() + eps)
    throw NumericalDomainError("TimeProfile: t outside schedule domain");
  t = std::clamp(t, times.front(), times.back());
  auto it = std::upper_bound(times.begin(), times.end(), t);
  if (it == times.begin()) return heights.front();
  if (it == times.end()) return heights.back();
  const std::size_t hi = static_cast<std::size_t>(it - times.begin());
  const std::size_t lo = hi - 1;
  const double w = (t - times[lo]) / (times[hi] - times[lo]);
  return heights[lo] + w * (heights[hi] - heights[lo]);
}

void PotentialSpec::validate() const {
  double prev_hi = -std::numeric_limits<double>::infinity();
  for (const auto& s : segments) {
    if (!(s.x_lo < s.x_hi)) throw SchemaError("segment requires x_lo < x_hi");
    if (!std::isfinite(s.height)) throw SchemaError("segment height must be finite");
    if (s.x_lo < prev_hi - 1e-12) throw SchemaError("segments overlap or are unsorted");
    if (!s.profile.empty() && schedule.find(s.profile) == schedule.end())
      throw SchemaError("segment references unknown schedule '" + s.profile + "'");
    prev_hi = s.x_hi;
  }
}

double PotentialSpec::height_at(const Segment& s, double t) const {
  if (s.profile.empty()) return s.height;
  return s.height + schedule.at(s.profile).at(t);
}

double PotentialSpec::value(double x, double t) const {
  for (const auto& s : segments)
    if (x >= s.x_lo && x < s.x_hi) return height_at(s, t);
  return 0.0;
}

double PotentialSpec::max_abs_height() const {
  double m = 0.0;
  for (const auto& s : segments) {
    m = std::max(m, std::abs(s.height));
    if (!s.profile.empty())
      for (double h : schedule.at(s.profile).heights)
        m = std::max(m, std::abs(s.height + h));
  }
  return m;
}

std::pair<double, double> PotentialSpec::support() const {
  if (segments.empty()) return {0.0, 0.0};
  return {segments.front().x_lo, segments.back().x_hi};
}

PotentialSpec PotentialSpec::rectangular_barrier(double v0, double x_lo, double x_hi) {
  PotentialSpec v;
  v.segments.push_back({x_lo, x_hi, v0, ""});
  v.validate();
  return v;
}

SpatialGrid::SpatialGrid(double x_min_, double x_max_, int n_points_)
    : x_min(x_min_), x_max(x_max_), n_points(n_points_) {
  if (!(x_min < x_max)) throw SchemaError("SpatialGrid requires x_min < x_max");
  if (n_points < 256 || (n_points & (n_points - 1)) != 0)
    throw SchemaError("SpatialGrid n_points must be a power of two >= 256");
}

VectorXd SpatialGrid::midpoints() const {
  VectorXd x(n_points);
  for (int i = 0; i < n_points; ++i) x[i] = midpoint(i);
  return x;
}

VectorXd SpatialGrid::indicator(const RegionOfInterest& omega) const {
  VectorXd mask = VectorXd::Zero(n_points);
  for (int i = 0; i < n_points; ++i)
    if (omega.contains(midpoint(i))) mask[i] = 1.0;
  return mask;
}

PotentialSpec composite_potential(const PotentialSpec& v, const RegionOfInterest& omega,
                                  double lambda) {
  v.validate();
  std::set<double> cuts{omega.a, omega.b};
  for (const auto& s : v.segments) {
    cuts.insert(s.x_lo);
    cuts.insert(s.x_hi);
  }
  std::vector<double> x(cuts.begin(), cuts.end());

  PotentialSpec out;
  out.schedule = v.schedule;
  for (std::size_t i = 0; i + 1 < x.size(); ++i) {
    const double lo = x[i], hi = x[i + 1];
    const double mid = 0.5 * (lo + hi);
    const Segment* base = nullptr;
    for (const auto& s : v.segments)
      if (mid >= s.x_lo && mid < s.x_hi) base = &s;
    const bool in_omega = mid >= omega.a && mid <= omega.b;
    if (base == nullptr && !in_omega) continue;
    Segment seg;
    seg.x_lo = lo;
    seg.x_hi = hi;
    seg.height = (base ? base->height : 0.0) + (in_omega ? lambda : 0.0);
    seg.profile = base ? base->profile : "";
    // Merge with the previous piece when nothing distinguishes them.
    if (!out.segments.empty()) {
      Segment& prev = out.segments.back();
      if (prev.x_hi == seg.x_lo && prev.height == seg.height && prev.profile == seg.profile) {
        prev.x_hi = seg.x_hi;
        continue;
      }
    }
    out.segments.push_back(seg);
  }
  out.validate();
  return out;
}

VectorXd sample_potential(const PotentialSpec& v, const SpatialGrid& g, double t) {
  v.validate();
  VectorXd out(g.n_points);
  for (int i = 0; i < g.n_points; ++i) out[i] = v.value(g.midpoint(i), t);
  return out;
}

std::string potential_to_json(const PotentialSpec& v) {
  nlohmann::json j;
  j["segments"] = nlohmann::json::array();
  for (const auto& s : v.segments) {
    nlohmann::json js{{"x_lo", s.x_lo}, {"x_hi", s.x_hi}, {"height", s.height}};
    if (!s.profile.empty()) js["profile"] = s.profile;
    j["segments"].push_back(js);
  }
  if (!v.schedule.empty()) {
    nlohmann::json sched = nlohmann::json::object();
    for (const auto& [name, prof] : v.schedule)
      sched[name] = {{"times", prof.times}, {"heights", prof.heights}};
    j["schedule"] = sched;
  }
  return j.dump();
}

PotentialSpec potential_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw SchemaError(std::string("potential JSON parse error: ") + e.what());
  }
  PotentialSpec v;
  try {
    for (const auto& js : j.at("segments")) {
      Segment s;
      s.x_lo = js.at("x_lo").get<double>();
      s.x_hi = js.at("x_hi").get<double>();
      s.height = js.at("height").get<double>();
      if (js.contains("profile")) s.profile = js["profile"].get<std::string>();
      v.segments.push_back(s);
    }
    if (j.contains("schedule"))
      for (const auto& [name, jp] : j["schedule"].items()) {
        TimeProfile p;
        p.times = jp.at("times").get<std::vector<double>>();
        p.heights = jp.at("heights").get<std::vector<double>>();
        v.schedule[name] = p;
      }
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(std::string("potential JSON schema violation: ") + e.what());
  }
  v.validate();
  return v;
}

}  // namespace qtt
