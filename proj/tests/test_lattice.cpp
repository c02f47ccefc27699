#include <algorithm>
#include <queue>
#include <random>

#include "doctest.h"
#include "qmix/errors.hpp"
#include "qmix/lattice.hpp"

using namespace qmix;

namespace {

// Graph distances by breadth-first search over nearest-neighbour bonds.
std::vector<int> bfs_distances(const Lattice& lat, const std::vector<int>& sources) {
  std::vector<int> dist(lat.size(), -1);
  std::queue<int> q;
  for (int s : sources) {
    dist[s] = 0;
    q.push(s);
  }
  while (!q.empty()) {
    int x = q.front();
    q.pop();
    auto c = lat.coords(x);
    for (int axis = 0; axis < lat.dims(); ++axis)
      for (int step : {-1, 1}) {
        auto n = c;
        n[axis] += step;
        if (n[axis] < 0 || n[axis] >= lat.extents()[axis]) continue;
        int y = lat.index(n);
        if (dist[y] < 0) {
          dist[y] = dist[x] + 1;
          q.push(y);
        }
      }
  }
  return dist;
}

std::vector<std::size_t> band_oracle(const Lattice& lat, const Region& a, const Region& b,
                                     const std::vector<Region>& terms) {
  auto da = bfs_distances(lat, a.sites());
  auto db = bfs_distances(lat, b.sites());
  std::vector<std::size_t> out;
  for (std::size_t k = 0; k < terms.size(); ++k) {
    bool hit = false, left = false, right = false;
    for (int x : terms[k].sites()) {
      int diff = da[x] - db[x];
      hit |= std::abs(diff) <= 1;
      left |= diff <= -2;
      right |= diff >= 2;
    }
    if (hit || (left && right)) out.push_back(k);
  }
  return out;
}

std::vector<Region> chain_bonds(const Lattice& lat) {
  std::vector<Region> t;
  for (int i = 0; i + 1 < lat.size(); ++i) t.emplace_back(lat, std::vector<int>{i, i + 1});
  return t;
}

}  // namespace

TEST_CASE("lattice indexing round trip") {
  Lattice lat({3, 4, 2});
  CHECK(lat.size() == 24);
  CHECK(lat.diameter() == 2 + 3 + 1);
  for (int i = 0; i < lat.size(); ++i) CHECK(lat.index(lat.coords(i)) == i);
  CHECK_THROWS_AS(Lattice({}), ShapeMismatch);
  CHECK_THROWS_AS(Lattice({2, 0}), ShapeMismatch);
}

TEST_CASE("region distance examples") {
  Lattice chain = Lattice::chain(8);
  CHECK(region_distance(Region(chain, {0}), Region(chain, {5})) == 5);
  CHECK(region_distance(Region(chain, {0, 1}), Region(chain, {1, 2})) == 0);
  Lattice sq({4, 4});
  int a = sq.index(std::vector<int>{0, 0});
  int b = sq.index(std::vector<int>{2, 3});
  CHECK(region_distance(Region(sq, {a}), Region(sq, {b})) == 5);
  CHECK_THROWS_AS(region_distance(Region(chain, {}), Region(chain, {1})), EmptyRegion);
}

TEST_CASE("metric agrees with graph distance and satisfies the triangle inequality") {
  Lattice lat({4, 3, 2});
  for (int x = 0; x < lat.size(); ++x) {
    auto d = bfs_distances(lat, {x});
    for (int y = 0; y < lat.size(); ++y) {
      CHECK(lat.distance(x, y) == d[y]);
      CHECK(lat.distance(x, y) == lat.distance(y, x));
      for (int z = 0; z < lat.size(); z += 5)
        CHECK(lat.distance(x, z) <= lat.distance(x, y) + lat.distance(y, z));
    }
  }
}

TEST_CASE("region algebra") {
  Lattice lat = Lattice::chain(6);
  Region a(lat, {4, 1, 1, 3});
  CHECK(a.sites() == std::vector<int>{1, 3, 4});
  CHECK(a.complement().complement() == a);
  CHECK_FALSE(a.intersects(a.complement()));
  CHECK(a.unite(a.complement()) == Region::all(lat));
  CHECK(Region(lat, {1, 4}).subset_of(a));
  CHECK_THROWS_AS(Region(lat, {6}), ShapeMismatch);
}

TEST_CASE("separating boundary on a chain") {
  Lattice lat = Lattice::chain(6);
  auto terms = chain_bonds(lat);
  Region a(lat, {0, 1}), b(lat, {4, 5});
  auto cut = separating_boundary(a, b, terms);
  CHECK(cut == band_oracle(lat, a, b, terms));
  CHECK(cut == std::vector<std::size_t>{1, 2, 3});
  CHECK(boundary_band(a, b).sites() == std::vector<int>{2, 3});
  CHECK_THROWS_AS(separating_boundary(Region(lat, {0}), Region(lat, {1}), terms), RegionsTooClose);
}

TEST_CASE("separating boundary without coupling terms is empty") {
  Lattice lat = Lattice::chain(6);
  std::vector<Region> terms;
  for (int i = 0; i < 6; ++i) {
    if (i == 2 || i == 3) continue;
    terms.emplace_back(lat, std::vector<int>{i});
  }
  auto cut = separating_boundary(Region(lat, {0}), Region(lat, {5}), terms);
  CHECK(cut.empty());
}

TEST_CASE("separating boundary on a square lattice with plaquettes") {
  Lattice lat({4, 4});
  std::vector<Region> plaquettes;
  for (int r = 0; r + 1 < 4; ++r)
    for (int c = 0; c + 1 < 4; ++c) {
      std::vector<int> s;
      for (int dr : {0, 1})
        for (int dc : {0, 1}) s.push_back(lat.index(std::vector<int>{r + dr, c + dc}));
      plaquettes.emplace_back(lat, s);
    }
  std::vector<int> left, right;
  for (int r = 0; r < 4; ++r) {
    left.push_back(lat.index(std::vector<int>{r, 0}));
    right.push_back(lat.index(std::vector<int>{r, 3}));
  }
  Region a(lat, left), b(lat, right);
  auto cut = separating_boundary(a, b, plaquettes);
  CHECK(cut == band_oracle(lat, a, b, plaquettes));
  CHECK(cut.size() == plaquettes.size());
}

TEST_CASE("separating boundary matches the oracle on random regions") {
  std::mt19937 rng(11);
  Lattice lat({5, 5});
  std::vector<Region> terms;
  for (int x = 0; x < lat.size(); ++x) {
    auto c = lat.coords(x);
    if (c[1] + 1 < 5) terms.emplace_back(lat, std::vector<int>{x, x + 1});
    if (c[0] + 1 < 5) terms.emplace_back(lat, std::vector<int>{x, x + 5});
  }
  std::uniform_int_distribution<int> site(0, lat.size() - 1);
  int checked = 0;
  while (checked < 50) {
    Region a(lat, {site(rng), site(rng)});
    Region b(lat, {site(rng)});
    if (a.intersects(b) || region_distance(a, b) < 2) continue;
    CHECK(separating_boundary(a, b, terms) == band_oracle(lat, a, b, terms));
    ++checked;
  }
}

TEST_CASE("cut terms avoid A and B when the regions are far apart") {
  Lattice lat = Lattice::chain(7);
  auto terms = chain_bonds(lat);
  Region a(lat, {0}), b(lat, {6});
  auto cut = separating_boundary(a, b, terms);
  CHECK_FALSE(cut.empty());
  for (auto k : cut) {
    CHECK_FALSE(terms[k].intersects(a));
    CHECK_FALSE(terms[k].intersects(b));
  }
}

TEST_CASE("buffer region examples and monotonicity") {
  Lattice chain = Lattice::chain(10);
  Region a(chain, {0, 1, 2, 3});
  CHECK(buffer_region(a, 2).sites() == std::vector<int>{4, 5});
  CHECK(buffer_region(a, chain.diameter()) == a.complement());

  Lattice sq({5, 5});
  int centre = sq.index(std::vector<int>{2, 2});
  auto b1 = buffer_region(Region(sq, {centre}), 1);
  CHECK(b1.size() == 4);
  for (int x : b1.sites()) CHECK(sq.distance(x, centre) == 1);

  Region blob(sq, {0, 1, 6});
  for (int l = 1; l < sq.diameter(); ++l) {
    CHECK(buffer_region(blob, l).subset_of(buffer_region(blob, l + 1)));
    CHECK_FALSE(buffer_region(blob, l).intersects(blob));
  }
  CHECK(buffer_region(blob, sq.diameter()) == blob.complement());
}

TEST_CASE("boundary size") {
  Lattice chain = Lattice::chain(10);
  CHECK(boundary_size(Region(chain, {0, 1, 2})) == 1);
  CHECK(boundary_size(Region(chain, {3, 4, 5})) == 2);
  CHECK(boundary_size(Region::all(chain)) == 0);
  Lattice sq({4, 4});
  std::vector<int> block;
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) block.push_back(sq.index(std::vector<int>{r, c}));
  CHECK(boundary_size(Region(sq, block)) == 5);
}
