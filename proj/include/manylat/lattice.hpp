#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <numeric>
#include <string>
#include <vector>

#include "manylat/errors.hpp"

namespace manylat {

using IVec = std::vector<long>;

inline double norm2(const IVec& v) {
  double s = 0;
  for (long c : v) s += double(c) * double(c);
  return std::sqrt(s);
}

inline long sqdist(const IVec& a, const IVec& b) {
  long s = 0;
  for (size_t i = 0; i < a.size(); ++i) {
    long d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

// Axis-aligned lattice box; sides count sites per axis.
struct Box {
  int d = 1;
  IVec corner;
  IVec sides;

  Box() = default;
  Box(int dim, IVec lo, IVec sd) : d(dim), corner(std::move(lo)), sides(std::move(sd)) {
    if (d < 1) throw ConfigError("box dimension must be >= 1");
    if (corner.size() != size_t(d) || sides.size() != size_t(d))
      throw ConfigError("box corner/sides length must equal dimension");
    for (long s : sides)
      if (s < 1) throw ConfigError("box sides must be >= 1");
  }

  // 1-d interval [lo, hi] inclusive
  static Box interval(long lo, long hi) { return Box(1, {lo}, {hi - lo + 1}); }
  // cube centered at the origin with even side L (L+1 sites per axis)
  static Box centered_cube(int d, long L) {
    return Box(d, IVec(d, -L / 2), IVec(d, L + 1));
  }

  long volume() const {
    long v = 1;
    for (long s : sides) v *= s;
    return v;
  }

  bool contains(const IVec& x) const {
    for (int a = 0; a < d; ++a)
      if (x[a] < corner[a] || x[a] > corner[a] + sides[a] - 1) return false;
    return true;
  }

  // lexicographic enumeration, first axis most significant
  IVec site(long idx) const {
    IVec x(d);
    for (int a = d - 1; a >= 0; --a) {
      x[a] = corner[a] + idx % sides[a];
      idx /= sides[a];
    }
    return x;
  }

  std::vector<IVec> all_sites() const {
    std::vector<IVec> out;
    out.reserve(volume());
    for (long i = 0; i < volume(); ++i) out.push_back(site(i));
    return out;
  }

  Box translated(const IVec& g) const {
    IVec lo = corner;
    for (int a = 0; a < d; ++a) lo[a] += g[a];
    return Box(d, lo, sides);
  }

  double diameter() const {
    double s = 0;
    for (long sd : sides) s += double(sd - 1) * double(sd - 1);
    return std::sqrt(s);
  }

  bool disjoint(const Box& o) const {
    if (o.d != d) throw ConfigError("box dimension mismatch");
    for (int a = 0; a < d; ++a) {
      long hiA = corner[a] + sides[a] - 1, hiB = o.corner[a] + o.sides[a] - 1;
      if (hiA < o.corner[a] || hiB < corner[a]) return true;
    }
    return false;
  }

  bool operator==(const Box& o) const {
    return d == o.d && corner == o.corner && sides == o.sides;
  }
};

// Euclidean distance between closest site pairs; 0 iff the site sets meet.
inline double box_distance(const Box& a, const Box& b) {
  if (a.d != b.d) throw ConfigError("box dimension mismatch");
  double s = 0;
  for (int ax = 0; ax < a.d; ++ax) {
    long hiA = a.corner[ax] + a.sides[ax] - 1, hiB = b.corner[ax] + b.sides[ax] - 1;
    long gap = std::max({long(0), b.corner[ax] - hiA, a.corner[ax] - hiB});
    s += double(gap) * double(gap);
  }
  return std::sqrt(s);
}

// Distance from an interior site to the complement of the box.
// The nearest exterior site lies along an axis, so the axis margin + 1 is exact.
inline double site_depth(const Box& b, const IVec& x) {
  long m = std::numeric_limits<long>::max();
  for (int a = 0; a < b.d; ++a) {
    long hi = b.corner[a] + b.sides[a] - 1;
    m = std::min({m, x[a] - b.corner[a], hi - x[a]});
  }
  return double(m + 1);
}

// |boundary layer| / |box|: sites within distance max(h, 1) of the complement.
inline double boundary_ratio(const Box& b, double h) {
  double cut = std::max(h, 1.0);
  long count = 0, vol = b.volume();
  for (long i = 0; i < vol; ++i)
    if (site_depth(b, b.site(i)) <= cut) ++count;
  return double(count) / double(vol);
}

// A finite set of lattice sites, kept sorted lexicographically.
// Usually the disjoint union of boxes; interiors may be irregular site sets.
struct Domain {
  int d = 1;
  std::vector<Box> boxes;
  std::vector<IVec> sites;
  std::map<IVec, long> site_index;

  Domain() = default;

  explicit Domain(const Box& b) : Domain(std::vector<Box>{b}) {}

  explicit Domain(std::vector<Box> bs) {
    if (bs.empty()) throw GeometryError("domain needs at least one box");
    d = bs[0].d;
    for (size_t i = 0; i < bs.size(); ++i) {
      if (bs[i].d != d) throw ConfigError("box dimension mismatch in domain");
      for (size_t j = i + 1; j < bs.size(); ++j)
        if (!bs[i].disjoint(bs[j])) throw GeometryError("domain boxes must be disjoint");
    }
    boxes = std::move(bs);
    for (const Box& b : boxes)
      for (long i = 0; i < b.volume(); ++i) sites.push_back(b.site(i));
    std::sort(sites.begin(), sites.end());
    build_index();
  }

  static Domain from_sites(int dim, std::vector<IVec> ss) {
    Domain dom;
    dom.d = dim;
    std::sort(ss.begin(), ss.end());
    ss.erase(std::unique(ss.begin(), ss.end()), ss.end());
    dom.sites = std::move(ss);
    dom.build_index();
    return dom;
  }

  void build_index() {
    site_index.clear();
    for (long i = 0; i < long(sites.size()); ++i) site_index[sites[i]] = i;
  }

  long size() const { return long(sites.size()); }

  bool contains(const IVec& x) const { return site_index.count(x) > 0; }

  long index_of(const IVec& x) const {
    auto it = site_index.find(x);
    return it == site_index.end() ? -1 : it->second;
  }

  Domain translated(const IVec& g) const {
    std::vector<IVec> ss = sites;
    for (IVec& x : ss)
      for (int a = 0; a < d; ++a) x[a] += g[a];
    Domain out = from_sites(d, std::move(ss));
    for (const Box& b : boxes) out.boxes.push_back(b.translated(g));
    return out;
  }

  // Sites whose whole lattice ball of radius h stays inside the domain,
  // i.e. distance to the complement > h.
  Domain interior(double h) const {
    long r = long(std::floor(h));
    std::vector<IVec> offsets;
    IVec o(d, -r);
    while (true) {
      long s = 0;
      for (long c : o) s += c * c;
      if (s > 0 && double(s) <= h * h) offsets.push_back(o);
      int a = d - 1;
      while (a >= 0 && o[a] == r) o[a--] = -r;
      if (a < 0) break;
      ++o[a];
    }
    std::vector<IVec> kept;
    for (const IVec& x : sites) {
      bool ok = true;
      for (const IVec& off : offsets) {
        IVec y = x;
        for (int a = 0; a < d; ++a) y[a] += off[a];
        if (!contains(y)) { ok = false; break; }
      }
      if (ok) kept.push_back(x);
    }
    if (kept.empty()) throw GeometryError("interior is empty at the requested depth");
    return from_sites(d, std::move(kept));
  }

  bool is_subset_of(const Domain& o) const {
    for (const IVec& x : sites)
      if (!o.contains(x)) return false;
    return true;
  }
};

inline Domain domain_union(const Domain& a, const Domain& b) {
  if (a.d != b.d) throw ConfigError("domain dimension mismatch");
  std::vector<IVec> ss = a.sites;
  ss.insert(ss.end(), b.sites.begin(), b.sites.end());
  Domain out = Domain::from_sites(a.d, std::move(ss));
  if (out.size() != a.size() + b.size())
    throw GeometryError("domains overlap");
  out.boxes = a.boxes;
  out.boxes.insert(out.boxes.end(), b.boxes.begin(), b.boxes.end());
  return out;
}

inline double domain_distance(const Domain& a, const Domain& b) {
  long best = std::numeric_limits<long>::max();
  for (const IVec& x : a.sites)
    for (const IVec& y : b.sites) best = std::min(best, sqdist(x, y));
  return std::sqrt(double(best));
}

// Doubling cube sequence with sub-cube placement.
struct CubeSequenceParams {
  int d = 1;
  double theta = 1.5;
  long Ltilde = 16;
  double R0 = 1;
  double delta = 4;
  double lambda = 2;

  double R() const { return (R0 + delta) / (2.0 - theta); }

  void validate() const {
    if (d < 1) throw ConfigError("cube sequence: dimension must be >= 1");
    if (lambda <= d) throw ConfigError("cube sequence: lambda > d violated");
    double lower = std::pow(2.0, double(d) / lambda);
    if (!(1.0 < lower)) throw ConfigError("cube sequence: 1 < 2^(d/lambda) violated");
    if (!(lower < theta)) throw ConfigError("cube sequence: 2^(d/lambda) < theta violated");
    if (!(theta < 2.0)) throw ConfigError("cube sequence: theta < 2 violated");
    if (R0 < 0) throw ConfigError("cube sequence: R0 must be >= 0");
    if (delta <= 0) throw ConfigError("cube sequence: delta must be > 0");
    if (!(double(Ltilde) > R())) throw ConfigError("cube sequence: Ltilde > R violated");
  }
};

struct CubeLevel {
  long L = 0;          // even side; the cube holds L+1 sites per axis
  Box cube;            // centered at the origin
  std::vector<IVec> gammas;  // 2^d placement vectors (absent on the last level)
  long gap = -1;       // L_{N+1} - 2 L_N (absent on the last level)
};

struct CubeFamily {
  CubeSequenceParams params;
  std::vector<CubeLevel> levels;
};

inline CubeFamily make_cube_sequence(const CubeSequenceParams& p, int N_max) {
  p.validate();
  if (N_max < 0) throw ConfigError("cube sequence: N_max must be >= 0");
  CubeFamily fam;
  fam.params = p;
  double R = p.R();
  std::vector<long> L(N_max + 1);
  for (int N = 0; N <= N_max; ++N) {
    double target = std::pow(2.0, N) * double(p.Ltilde) - std::pow(p.theta, N) * R;
    L[N] = 2 * long(std::floor(target / 2.0));
    if (L[N] <= 0)
      throw ConfigError("cube sequence: level side is not positive; increase Ltilde");
    if (std::abs(double(L[N]) - target) > 2.0)
      throw ConfigError("cube sequence: side deviates from target by more than 2");
  }
  for (int N = 0; N <= N_max; ++N) {
    CubeLevel lvl;
    lvl.L = L[N];
    lvl.cube = Box::centered_cube(p.d, L[N]);
    if (N < N_max) {
      lvl.gap = L[N + 1] - 2 * L[N];
      if (double(lvl.gap) < p.R0)
        throw ConfigError("cube sequence: gap R_N >= R0 violated");
      long shift = (L[N + 1] - L[N]) / 2;
      for (long mask = 0; mask < (1L << p.d); ++mask) {
        IVec g(p.d);
        for (int a = 0; a < p.d; ++a) g[a] = (mask >> a & 1) ? shift : -shift;
        lvl.gammas.push_back(g);
      }
      Box outer = Box::centered_cube(p.d, L[N + 1]);
      for (size_t i = 0; i < lvl.gammas.size(); ++i) {
        Box ti = lvl.cube.translated(lvl.gammas[i]);
        for (int a = 0; a < p.d; ++a) {
          if (ti.corner[a] < outer.corner[a] ||
              ti.corner[a] + ti.sides[a] > outer.corner[a] + outer.sides[a])
            throw ConfigError("cube sequence: translate escapes the next level");
        }
        for (size_t j = 0; j < i; ++j) {
          Box tj = lvl.cube.translated(lvl.gammas[j]);
          if (!ti.disjoint(tj))
            throw ConfigError("cube sequence: translates overlap");
          if (box_distance(ti, tj) < p.R0)
            throw ConfigError("cube sequence: translate spacing below R0");
        }
      }
    }
    fam.levels.push_back(std::move(lvl));
  }
  return fam;
}

}  // namespace manylat
