#include "qlevy/partition.hpp"

#include <algorithm>
#include <cmath>

#include "qlevy/error.hpp"

namespace qlevy {

Partition::Partition(std::vector<double> times) : times_(std::move(times)) {
  if (times_.size() < 2) throw InvalidParameter("partition needs at least two points");
  for (std::size_t i = 0; i + 1 < times_.size(); ++i)
    if (!(times_[i] < times_[i + 1]) || !std::isfinite(times_[i + 1]))
      throw InvalidParameter("partition points must be finite and strictly increasing");
}

Partition Partition::uniform(double s, double t, std::size_t n) {
  if (n < 1) throw InvalidParameter("partition needs at least one interval");
  std::vector<double> ts(n + 1);
  for (std::size_t i = 0; i <= n; ++i) ts[i] = s + (t - s) * static_cast<double>(i) / static_cast<double>(n);
  ts.back() = t;
  return Partition(std::move(ts));
}

Partition Partition::random(double s, double t, std::size_t n, std::mt19937_64& rng) {
  if (n < 1) throw InvalidParameter("partition needs at least one interval");
  std::uniform_real_distribution<double> u(s, t);
  std::vector<double> ts;
  ts.reserve(n + 1);
  ts.push_back(s);
  ts.push_back(t);
  while (ts.size() < n + 1) {
    const double v = u(rng);
    if (v > s && v < t && std::find(ts.begin(), ts.end(), v) == ts.end()) ts.push_back(v);
  }
  std::sort(ts.begin(), ts.end());
  return Partition(std::move(ts));
}

double Partition::mesh() const {
  double m = 0.0;
  for (std::size_t i = 0; i < size(); ++i) m = std::max(m, length(i));
  return m;
}

bool Partition::refines(const Partition& coarser) const {
  return std::includes(times_.begin(), times_.end(), coarser.times_.begin(), coarser.times_.end());
}

Partition Partition::subdivided(double h) const {
  if (!(h > 0.0)) throw InvalidParameter("subdivision width must be positive");
  std::vector<double> ts{times_.front()};
  for (std::size_t i = 0; i < size(); ++i) {
    const auto k = static_cast<std::size_t>(std::ceil(length(i) / h - 1e-12));
    for (std::size_t j = 1; j < k; ++j)
      ts.push_back(times_[i] + length(i) * static_cast<double>(j) / static_cast<double>(k));
    ts.push_back(times_[i + 1]);
  }
  return Partition(std::move(ts));
}

Partition common_refinement(const Partition& a, const Partition& b) {
  if (a.start() != b.start() || a.end() != b.end())
    throw InvalidParameter("common refinement needs partitions of the same interval");
  std::vector<double> ts;
  std::set_union(a.times().begin(), a.times().end(), b.times().begin(), b.times().end(), std::back_inserter(ts));
  return Partition(std::move(ts));
}

}  // namespace qlevy
