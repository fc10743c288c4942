#include "hibreg/spatial.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <queue>
#include <set>

namespace hibreg {

std::vector<std::pair<int, int>> NeighborhoodGraph::edges() const {
  std::vector<std::pair<int, int>> out;
  for (int k = 0; k < adjacency.outerSize(); ++k) {
    for (SparseMatrix::InnerIterator it(adjacency, k); it; ++it) {
      if (it.row() < it.col()) {
        out.emplace_back(static_cast<int>(it.row()),
                         static_cast<int>(it.col()));
      }
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

Vector NeighborhoodGraph::degrees() const {
  Vector d = Vector::Zero(n_sites());
  for (int k = 0; k < adjacency.outerSize(); ++k) {
    for (SparseMatrix::InnerIterator it(adjacency, k); it; ++it) {
      d[it.row()] += it.value();
    }
  }
  return d;
}

bool NeighborhoodGraph::is_connected() const {
  const int n = n_sites();
  if (n == 0) return false;
  std::vector<char> seen(static_cast<std::size_t>(n), 0);
  std::queue<int> q;
  q.push(0);
  seen[0] = 1;
  int count = 1;
  while (!q.empty()) {
    const int i = q.front();
    q.pop();
    for (SparseMatrix::InnerIterator it(adjacency, i); it; ++it) {
      const int j = static_cast<int>(it.row());
      if (!seen[j]) {
        seen[j] = 1;
        ++count;
        q.push(j);
      }
    }
  }
  return count == n;
}

namespace {

struct Triangle {
  int a, b, c;
};

// > 0 when (a, b, c) are counterclockwise.
long double orient2d(const std::array<long double, 2>& a,
                     const std::array<long double, 2>& b,
                     const std::array<long double, 2>& c) {
  return (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]);
}

// > 0 when d lies strictly inside the circumcircle of ccw triangle (a, b, c).
long double incircle(const std::array<long double, 2>& a,
                     const std::array<long double, 2>& b,
                     const std::array<long double, 2>& c,
                     const std::array<long double, 2>& d) {
  const long double adx = a[0] - d[0], ady = a[1] - d[1];
  const long double bdx = b[0] - d[0], bdy = b[1] - d[1];
  const long double cdx = c[0] - d[0], cdy = c[1] - d[1];
  const long double ad2 = adx * adx + ady * ady;
  const long double bd2 = bdx * bdx + bdy * bdy;
  const long double cd2 = cdx * cdx + cdy * cdy;
  return adx * (bdy * cd2 - cdy * bd2) - ady * (bdx * cd2 - cdx * bd2) +
         ad2 * (bdx * cdy - cdx * bdy);
}

double frac(double x) { return x - std::floor(x); }

}  // namespace

NeighborhoodGraph delaunay_adjacency(
    const std::vector<std::array<double, 2>>& coords) {
  const int n = static_cast<int>(coords.size());
  if (n < 3) {
    throw DomainError("delaunay_adjacency: need at least 3 sites");
  }

  double xmin = coords[0][0], xmax = coords[0][0];
  double ymin = coords[0][1], ymax = coords[0][1];
  for (const auto& p : coords) {
    xmin = std::min(xmin, p[0]);
    xmax = std::max(xmax, p[0]);
    ymin = std::min(ymin, p[1]);
    ymax = std::max(ymax, p[1]);
  }
  const double span = std::max({xmax - xmin, ymax - ymin, 1e-12});

  // Reject (near-)duplicate coordinates: closer than the tie-break
  // perturbation would make the triangulation meaningless.
  {
    std::vector<int> order(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) order[static_cast<std::size_t>(i)] = i;
    std::sort(order.begin(), order.end(), [&](int i, int j) {
      if (coords[i][0] != coords[j][0]) return coords[i][0] < coords[j][0];
      return coords[i][1] < coords[j][1];
    });
    const double tol = 1e-8 * span;
    for (int k = 0; k + 1 < n; ++k) {
      const auto& p = coords[order[static_cast<std::size_t>(k)]];
      const auto& q = coords[order[static_cast<std::size_t>(k + 1)]];
      if (std::fabs(p[0] - q[0]) <= tol && std::fabs(p[1] - q[1]) <= tol) {
        throw IngestError("delaunay_adjacency: duplicate coordinates");
      }
    }
  }

  // Collinearity check on the raw coordinates.
  {
    bool degenerate = true;
    const std::array<long double, 2> p0{coords[0][0], coords[0][1]};
    const std::array<long double, 2> p1{coords[1][0], coords[1][1]};
    for (int i = 2; i < n; ++i) {
      const std::array<long double, 2> pi{coords[i][0], coords[i][1]};
      if (std::fabs(static_cast<double>(orient2d(p0, p1, pi))) >
          1e-12 * span * span) {
        degenerate = false;
        break;
      }
    }
    if (degenerate) {
      throw DomainError("delaunay_adjacency: all sites are collinear");
    }
  }

  // Deterministic tie-break: perturb point i by a low-discrepancy offset
  // derived from its input index, bounded by 1e-9 of the coordinate span.
  // Cocircular configurations resolve the same way on every run.
  constexpr double kA1 = 0.7548776662466927;  // 2D low-discrepancy constants
  constexpr double kA2 = 0.5698402909980532;
  const double delta = 1e-9 * span;
  std::vector<std::array<long double, 2>> pts(static_cast<std::size_t>(n + 3));
  for (int i = 0; i < n; ++i) {
    pts[static_cast<std::size_t>(i)] = {
        static_cast<long double>(coords[i][0] +
                                 delta * (frac((i + 1) * kA1) - 0.5)),
        static_cast<long double>(coords[i][1] +
                                 delta * (frac((i + 1) * kA2) - 0.5))};
  }

  // Super-triangle far outside the data; its vertices use indices n..n+2.
  const double cx = 0.5 * (xmin + xmax);
  const double cy = 0.5 * (ymin + ymax);
  const double big = 64.0 * span;
  pts[static_cast<std::size_t>(n)] = {cx - 3.0 * big, cy - big};
  pts[static_cast<std::size_t>(n + 1)] = {cx + 3.0 * big, cy - big};
  pts[static_cast<std::size_t>(n + 2)] = {cx, cy + 3.0 * big};

  auto pt = [&](int i) -> const std::array<long double, 2>& {
    return pts[static_cast<std::size_t>(i)];
  };

  std::vector<Triangle> tris;
  tris.push_back({n, n + 1, n + 2});

  // Bowyer-Watson incremental insertion.
  std::map<std::pair<int, int>, int> boundary;  // edge -> count
  for (int i = 0; i < n; ++i) {
    boundary.clear();
    std::vector<Triangle> keep;
    keep.reserve(tris.size());
    for (const auto& t : tris) {
      long double o = orient2d(pt(t.a), pt(t.b), pt(t.c));
      bool bad;
      if (o > 0) {
        bad = incircle(pt(t.a), pt(t.b), pt(t.c), pt(i)) > 0;
      } else {
        bad = incircle(pt(t.a), pt(t.c), pt(t.b), pt(i)) > 0;
      }
      if (bad) {
        const std::array<std::pair<int, int>, 3> es = {
            std::minmax(t.a, t.b), std::minmax(t.b, t.c),
            std::minmax(t.c, t.a)};
        for (const auto& e : es) boundary[e] += 1;
      } else {
        keep.push_back(t);
      }
    }
    tris.swap(keep);
    for (const auto& [e, count] : boundary) {
      if (count == 1) {  // cavity boundary edge
        tris.push_back({e.first, e.second, i});
      }
    }
  }

  std::set<std::pair<int, int>> edge_set;
  for (const auto& t : tris) {
    if (t.a < n && t.b < n) edge_set.insert(std::minmax(t.a, t.b));
    if (t.b < n && t.c < n) edge_set.insert(std::minmax(t.b, t.c));
    if (t.c < n && t.a < n) edge_set.insert(std::minmax(t.c, t.a));
  }

  NeighborhoodGraph g;
  g.coordinates = coords;
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(edge_set.size() * 2);
  for (const auto& [i, j] : edge_set) {
    trips.emplace_back(i, j, 1.0);
    trips.emplace_back(j, i, 1.0);
  }
  g.adjacency.resize(n, n);
  g.adjacency.setFromTriplets(trips.begin(), trips.end());
  return g;
}

NeighborhoodGraph graph_from_edges(
    std::vector<std::array<double, 2>> coords,
    const std::vector<std::pair<int, int>>& edges) {
  const int n = static_cast<int>(coords.size());
  NeighborhoodGraph g;
  g.coordinates = std::move(coords);
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(edges.size() * 2);
  for (const auto& [i, j] : edges) {
    if (i < 0 || j < 0 || i >= n || j >= n || i == j) {
      throw DomainError("graph_from_edges: invalid edge");
    }
    trips.emplace_back(i, j, 1.0);
    trips.emplace_back(j, i, 1.0);
  }
  g.adjacency.resize(n, n);
  g.adjacency.setFromTriplets(
      trips.begin(), trips.end(),
      [](const double&, const double&) { return 1.0; });
  return g;
}

SparseMatrix car_precision(const CarStructure& car) {
  if (car.graph == nullptr) {
    throw DomainError("car_precision: no neighborhood graph");
  }
  if (!(car.rho > 0.0 && car.rho < 1.0)) {
    throw DomainError("car_precision: rho must lie in (0, 1)");
  }
  if (!(car.precision_scale > 0.0)) {
    throw DomainError("car_precision: tau2 must be positive");
  }
  const Vector d = car.graph->degrees();
  SparseMatrix q = -car.rho * car.graph->adjacency;
  for (int i = 0; i < q.rows(); ++i) q.coeffRef(i, i) += d[i];
  q *= car.precision_scale;
  q.makeCompressed();
  return q;
}

double gmrf_logdensity(const Vector& zeta, const CarStructure& car) {
  if (car.graph == nullptr) {
    throw DomainError("gmrf_logdensity: no neighborhood graph");
  }
  CarDensity dens(*car.graph);
  return dens.logdensity(zeta, car.rho, car.precision_scale);
}

CarDensity::CarDensity(const NeighborhoodGraph& graph)
    : n_(graph.n_sites()),
      adjacency_(graph.adjacency),
      degrees_(graph.degrees()) {}

void CarDensity::factorize(double rho) {
  if (!(rho > 0.0 && rho < 1.0)) {
    throw DomainError("CarDensity: rho must lie in (0, 1)");
  }
  if (rho == cached_rho_) return;
  base_ = -rho * adjacency_;
  for (int i = 0; i < n_; ++i) base_.coeffRef(i, i) += degrees_[i];
  base_.makeCompressed();
  if (!analyzed_) {
    llt_.analyzePattern(base_);
    analyzed_ = true;
  }
  llt_.factorize(base_);
  if (llt_.info() != Eigen::Success) {
    cached_rho_ = -1.0;
    throw NumericError("CarDensity: sparse Cholesky failed (not PD)");
  }
  double logdet = 0.0;
  const Vector ldiag =
      llt_.matrixL().nestedExpression().diagonal();
  for (int i = 0; i < n_; ++i) {
    logdet += 2.0 * std::log(ldiag[i]);
  }
  cached_rho_ = rho;
  cached_logdet_ = logdet;
}

double CarDensity::base_logdet(double rho) {
  factorize(rho);
  return cached_logdet_;
}

double CarDensity::quad_form(const Vector& zeta, double rho) const {
  if (zeta.size() != n_) {
    throw DomainError("CarDensity: zeta length does not match graph");
  }
  const double diag = degrees_.dot(zeta.cwiseProduct(zeta));
  const double cross = zeta.dot(adjacency_ * zeta);
  return diag - rho * cross;
}

double CarDensity::logdensity(const Vector& zeta, double rho, double tau2) {
  if (!(tau2 > 0.0)) throw DomainError("CarDensity: tau2 must be positive");
  constexpr double kLog2Pi = 1.8378770664093454836;
  const double logdet = n_ * std::log(tau2) + base_logdet(rho);
  const double quad = tau2 * quad_form(zeta, rho);
  return 0.5 * logdet - 0.5 * quad - 0.5 * n_ * kLog2Pi;
}

Vector CarDensity::sample(double rho, double tau2, const Vector& z) {
  if (z.size() != n_) throw DomainError("CarDensity: z length mismatch");
  factorize(rho);
  // base = P^T L L^T P, so x = P^T L^{-T} z has covariance base^{-1}.
  Vector v = llt_.matrixU().solve(z);
  Vector x = llt_.permutationPinv() * v;
  return x / std::sqrt(tau2);
}

}  // namespace hibreg
