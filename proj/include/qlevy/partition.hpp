#pragma once

#include <cstddef>
#include <random>
#include <vector>

namespace qlevy {

/// s = t_0 < t_1 < ... < t_n = t.
class Partition {
 public:
  Partition() = default;
  /// Throws InvalidParameter unless strictly increasing with at least two points.
  explicit Partition(std::vector<double> times);

  static Partition uniform(double s, double t, std::size_t n);
  /// n subintervals with uniformly drawn interior points.
  static Partition random(double s, double t, std::size_t n, std::mt19937_64& rng);

  const std::vector<double>& times() const { return times_; }
  std::size_t size() const { return times_.size() - 1; }
  double start() const { return times_.front(); }
  double end() const { return times_.back(); }
  double length(std::size_t i) const { return times_.at(i + 1) - times_.at(i); }
  double mesh() const;

  /// True when every point of `coarser` is a point of *this.
  bool refines(const Partition& coarser) const;
  /// Splits every interval so that the mesh is at most h.
  Partition subdivided(double h) const;

 private:
  std::vector<double> times_;
};

/// Union of the points of two partitions of the same interval.
Partition common_refinement(const Partition& a, const Partition& b);

}  // namespace qlevy
