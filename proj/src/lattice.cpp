#include "qmix/lattice.hpp"

#include <algorithm>
#include <cstdlib>
#include <limits>
#include <string>

#include "qmix/errors.hpp"

namespace qmix {

Lattice::Lattice(std::vector<int> extents, Metric metric)
    : extents_(std::move(extents)), metric_(metric), size_(1) {
  if (extents_.empty() || extents_.size() > 3) {
    throw ShapeMismatch("lattice dimension must be 1, 2 or 3, got " +
                        std::to_string(extents_.size()));
  }
  for (int e : extents_) {
    if (e < 1) throw ShapeMismatch("lattice extents must be positive");
    size_ *= e;
  }
}

std::vector<int> Lattice::coords(int site) const {
  std::vector<int> c(extents_.size());
  for (int axis = dims() - 1; axis >= 0; --axis) {
    c[axis] = site % extents_[axis];
    site /= extents_[axis];
  }
  return c;
}

int Lattice::index(std::span<const int> coords) const {
  int idx = 0;
  for (int axis = 0; axis < dims(); ++axis) idx = idx * extents_[axis] + coords[axis];
  return idx;
}

int Lattice::distance(int a, int b) const {
  int d = 0;
  for (int axis = dims() - 1; axis >= 0; --axis) {
    d += std::abs(a % extents_[axis] - b % extents_[axis]);
    a /= extents_[axis];
    b /= extents_[axis];
  }
  return d;
}

int Lattice::diameter() const {
  int d = 0;
  for (int e : extents_) d += e - 1;
  return d;
}

Region::Region(const Lattice& lattice, std::vector<int> sites)
    : lattice_(lattice), sites_(std::move(sites)) {
  std::sort(sites_.begin(), sites_.end());
  sites_.erase(std::unique(sites_.begin(), sites_.end()), sites_.end());
  for (int s : sites_) {
    if (!lattice_.contains(s)) {
      throw ShapeMismatch("site " + std::to_string(s) + " outside lattice of " +
                          std::to_string(lattice_.size()) + " sites");
    }
  }
}

Region Region::all(const Lattice& lattice) {
  std::vector<int> s(lattice.size());
  for (int i = 0; i < lattice.size(); ++i) s[i] = i;
  return Region(lattice, std::move(s));
}

bool Region::contains(int site) const {
  return std::binary_search(sites_.begin(), sites_.end(), site);
}

Region Region::complement() const {
  std::vector<int> out;
  for (int i = 0; i < lattice_.size(); ++i)
    if (!contains(i)) out.push_back(i);
  return Region(lattice_, std::move(out));
}

Region Region::unite(const Region& other) const {
  std::vector<int> out;
  std::set_union(sites_.begin(), sites_.end(), other.sites_.begin(), other.sites_.end(),
                 std::back_inserter(out));
  return Region(lattice_, std::move(out));
}

Region Region::intersect(const Region& other) const {
  std::vector<int> out;
  std::set_intersection(sites_.begin(), sites_.end(), other.sites_.begin(),
                        other.sites_.end(), std::back_inserter(out));
  return Region(lattice_, std::move(out));
}

bool Region::intersects(const Region& other) const { return !intersect(other).empty(); }

bool Region::subset_of(const Region& other) const {
  return std::includes(other.sites_.begin(), other.sites_.end(), sites_.begin(), sites_.end());
}

int site_distance(const Region& region, int site) {
  if (region.empty()) throw EmptyRegion("distance to an empty region");
  int best = std::numeric_limits<int>::max();
  for (int s : region.sites()) best = std::min(best, region.lattice().distance(s, site));
  return best;
}

int region_distance(const Region& a, const Region& b) {
  if (a.empty() || b.empty()) throw EmptyRegion("region_distance needs nonempty regions");
  if (!(a.lattice() == b.lattice())) throw ShapeMismatch("regions live on different lattices");
  int best = std::numeric_limits<int>::max();
  for (int x : a.sites()) best = std::min(best, site_distance(b, x));
  return best;
}

Region boundary_band(const Region& a, const Region& b) {
  std::vector<int> band;
  for (int x = 0; x < a.lattice().size(); ++x) {
    if (std::abs(site_distance(a, x) - site_distance(b, x)) <= 1) band.push_back(x);
  }
  return Region(a.lattice(), std::move(band));
}

std::vector<std::size_t> separating_boundary(const Region& a, const Region& b,
                                             std::span<const Region> terms) {
  if (a.intersects(b)) throw OverlappingRegions("A and B intersect");
  const int dist = region_distance(a, b);
  if (dist < 2) {
    throw RegionsTooClose("separating boundary needs d(A,B) >= 2, got " + std::to_string(dist));
  }
  const Lattice& lat = a.lattice();
  // side[x] = -1 on A's side of the band, +1 on B's side, 0 inside the band.
  std::vector<int> side(lat.size());
  for (int x = 0; x < lat.size(); ++x) {
    const int diff = site_distance(a, x) - site_distance(b, x);
    side[x] = diff <= -2 ? -1 : (diff >= 2 ? 1 : 0);
  }
  std::vector<std::size_t> cut;
  for (std::size_t k = 0; k < terms.size(); ++k) {
    bool touches_band = false, touches_a_side = false, touches_b_side = false;
    for (int x : terms[k].sites()) {
      touches_band |= side[x] == 0;
      touches_a_side |= side[x] == -1;
      touches_b_side |= side[x] == 1;
    }
    if (touches_band || (touches_a_side && touches_b_side)) cut.push_back(k);
  }
  return cut;
}

Region buffer_region(const Region& a, int radius) {
  if (a.empty()) throw EmptyRegion("buffer around an empty region");
  std::vector<int> out;
  for (int x = 0; x < a.lattice().size(); ++x) {
    if (!a.contains(x) && site_distance(a, x) <= radius) out.push_back(x);
  }
  return Region(a.lattice(), std::move(out));
}

int boundary_size(const Region& a) {
  const Lattice& lat = a.lattice();
  int count = 0;
  for (int x : a.sites()) {
    auto c = lat.coords(x);
    bool exposed = false;
    for (int axis = 0; axis < lat.dims() && !exposed; ++axis) {
      for (int step : {-1, 1}) {
        auto n = c;
        n[axis] += step;
        if (n[axis] < 0 || n[axis] >= lat.extents()[axis]) continue;
        if (!a.contains(lat.index(n))) {
          exposed = true;
          break;
        }
      }
    }
    count += exposed;
  }
  return count;
}

}  // namespace qmix
