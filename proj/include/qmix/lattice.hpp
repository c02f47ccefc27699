#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace qmix {

enum class Metric { manhattan };

/// Open-boundary cubic lattice in one to three dimensions. Sites are numbered
/// in row-major order of their coordinates (last axis fastest).
class Lattice {
 public:
  explicit Lattice(std::vector<int> extents, Metric metric = Metric::manhattan);

  static Lattice chain(int sites) { return Lattice({sites}); }

  int dims() const { return static_cast<int>(extents_.size()); }
  const std::vector<int>& extents() const { return extents_; }
  Metric metric() const { return metric_; }
  int size() const { return size_; }

  std::vector<int> coords(int site) const;
  int index(std::span<const int> coords) const;
  int distance(int a, int b) const;
  int diameter() const;
  bool contains(int site) const { return site >= 0 && site < size_; }

  bool operator==(const Lattice& other) const {
    return extents_ == other.extents_ && metric_ == other.metric_;
  }

 private:
  std::vector<int> extents_;
  Metric metric_;
  int size_;
};

/// A sorted, duplicate-free set of lattice sites.
class Region {
 public:
  Region(const Lattice& lattice, std::vector<int> sites);

  static Region all(const Lattice& lattice);
  static Region single(const Lattice& lattice, int site) { return Region(lattice, {site}); }

  const Lattice& lattice() const { return lattice_; }
  const std::vector<int>& sites() const { return sites_; }
  std::size_t size() const { return sites_.size(); }
  bool empty() const { return sites_.empty(); }
  bool contains(int site) const;

  Region complement() const;
  Region unite(const Region& other) const;
  Region intersect(const Region& other) const;
  bool intersects(const Region& other) const;
  bool subset_of(const Region& other) const;

  bool operator==(const Region& other) const {
    return lattice_ == other.lattice_ && sites_ == other.sites_;
  }

 private:
  Lattice lattice_;
  std::vector<int> sites_;
};

/// Minimum metric distance between a site and a nonempty region.
int site_distance(const Region& region, int site);

/// Minimum metric distance between two nonempty regions; 0 iff they intersect.
int region_distance(const Region& a, const Region& b);

/// Sites x with |d(x,A) - d(x,B)| <= 1: the discrete surface halfway between
/// A and B.
Region boundary_band(const Region& a, const Region& b);

/// Indices of the term supports that must be cut to decouple A from B: every
/// support touching the halfway band, plus any support that straddles the
/// A-side and B-side of the band without touching it.
std::vector<std::size_t> separating_boundary(const Region& a, const Region& b,
                                             std::span<const Region> terms);

/// B_l = {x outside A : d(x, A) <= l}.
Region buffer_region(const Region& a, int radius);

/// Number of sites in A with at least one nearest neighbour outside A.
int boundary_size(const Region& a);

}  // namespace qmix
