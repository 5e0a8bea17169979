#include "riscim/recon.hpp"

#include <algorithm>
#include <cmath>

namespace riscim {

const char* recon_method_name(ReconMethod m) {
  switch (m) {
    case ReconMethod::Cgnr: return "cgnr";
    case ReconMethod::Cgs: return "cgs";
    case ReconMethod::MatchedFilter: return "matched_filter";
    case ReconMethod::LeastSquaresOracle: return "least_squares";
  }
  return "?";
}

ReconMethod recon_method_from_name(const std::string& name) {
  if (name == "cgnr") return ReconMethod::Cgnr;
  if (name == "cgs") return ReconMethod::Cgs;
  if (name == "matched_filter") return ReconMethod::MatchedFilter;
  if (name == "least_squares") return ReconMethod::LeastSquaresOracle;
  throw ConfigError("unknown reconstruction method: " + name);
}

namespace {

// Damped normal operator A x = H^H (H x) + lambda x. Two rectangular
// products instead of forming H^H H keeps the cost at O(MN) per apply.
struct NormalOp {
  const CMatrix& h;
  double lambda;

  CVector apply(const CVector& x) const {
    CVector y = h.adjoint() * (h * x);
    if (lambda > 0.0) y += lambda * x;
    return y;
  }
};

// Conjugate-residual iteration for a Hermitian positive semidefinite
// operator: minimizes ||b - A x|| over the Krylov space at every step, so
// the recorded residual history is non-increasing by construction.
ReconResult solve_cr(const NormalOp& a, const CVector& b, double tol,
                     int max_iter) {
  ReconResult res;
  res.method = ReconMethod::Cgnr;
  const double nb = b.norm();
  res.sigma = CVector::Zero(b.size());
  res.residual_history.push_back(1.0);
  if (nb == 0.0) {
    res.converged = true;
    res.residual_history.back() = 0.0;
    return res;
  }
  CVector r = b;
  CVector ar = a.apply(r);
  CVector p = r, ap = ar;
  double rho = std::real(r.dot(ar));
  for (int it = 0; it < max_iter; ++it) {
    const double den = ap.squaredNorm();
    if (den <= 0.0 || rho <= 0.0) break;  // numerical null-space breakdown
    const double alpha = rho / den;
    res.sigma += alpha * p;
    r -= alpha * ap;
    ++res.iterations;
    const double rel = r.norm() / nb;
    res.residual_history.push_back(rel);
    if (rel <= tol) {
      res.converged = true;
      break;
    }
    ar = a.apply(r);
    const double rho_next = std::real(r.dot(ar));
    const double beta = rho_next / rho;
    p = r + beta * p;
    ap = ar + beta * ap;
    rho = rho_next;
  }
  return res;
}

// Sonneveld's transpose-free CGS recurrence on the same normal operator.
ReconResult solve_cgs(const NormalOp& a, const CVector& b, double tol,
                      int max_iter) {
  ReconResult res;
  res.method = ReconMethod::Cgs;
  const double nb = b.norm();
  res.sigma = CVector::Zero(b.size());
  res.residual_history.push_back(1.0);
  if (nb == 0.0) {
    res.converged = true;
    res.residual_history.back() = 0.0;
    return res;
  }
  CVector r = b;
  const CVector r_shadow = b;
  CVector p = r, u = r;
  Complex rho = r_shadow.dot(r);
  for (int it = 0; it < max_iter; ++it) {
    if (std::abs(rho) < 1e-300) break;  // breakdown
    const CVector v = a.apply(p);
    const Complex sg = r_shadow.dot(v);
    if (std::abs(sg) < 1e-300) break;
    const Complex alpha = rho / sg;
    const CVector q = u - alpha * v;
    res.sigma += alpha * (u + q);
    r -= alpha * a.apply(u + q);
    ++res.iterations;
    const double rel = r.norm() / nb;
    res.residual_history.push_back(rel);
    if (rel <= tol) {
      res.converged = true;
      break;
    }
    const Complex rho_next = r_shadow.dot(r);
    const Complex beta = rho_next / rho;
    u = r + beta * q;
    p = u + beta * (q + beta * p);
    rho = rho_next;
  }
  return res;
}

}  // namespace

ReconResult reconstruct_iterative(const CMatrix& h, const CVector& g,
                                  const SolverOptions& options) {
  if (h.rows() != g.size())
    throw std::invalid_argument("reconstruct_iterative: dimension mismatch");
  if (!(options.tol > 0.0))
    throw std::invalid_argument("reconstruct_iterative: tol must be positive");
  if (options.max_iter < 1)
    throw std::invalid_argument("reconstruct_iterative: max_iter must be >= 1");
  const NormalOp a{h, options.tikhonov};
  const CVector b = h.adjoint() * g;
  switch (options.method) {
    case ReconMethod::Cgs:
      return solve_cgs(a, b, options.tol, options.max_iter);
    case ReconMethod::MatchedFilter:
      return reconstruct_matched_filter(h, g);
    case ReconMethod::LeastSquaresOracle:
      return reconstruct_least_squares(h, g);
    case ReconMethod::Cgnr:
    default:
      return solve_cr(a, b, options.tol, options.max_iter);
  }
}

ReconResult reconstruct_cgs(const SensingMatrix& h_inv, const Measurement& g,
                            double tol, int max_iter) {
  SolverOptions opt;
  opt.tol = tol;
  opt.max_iter = max_iter;
  return reconstruct_iterative(h_inv.entries, g.g, opt);
}

ReconResult reconstruct_matched_filter(const CMatrix& h, const CVector& g) {
  if (h.rows() != g.size())
    throw std::invalid_argument("reconstruct_matched_filter: dim mismatch");
  ReconResult res;
  res.method = ReconMethod::MatchedFilter;
  res.sigma = h.adjoint() * g;
  for (Eigen::Index j = 0; j < h.cols(); ++j) {
    const double n2 = h.col(j).squaredNorm();
    res.sigma[j] = n2 > 0.0 ? res.sigma[j] / n2 : Complex(0.0, 0.0);
  }
  res.iterations = 1;
  res.converged = true;
  res.residual_history.push_back((g - h * res.sigma).norm() /
                                 std::max(g.norm(), 1e-300));
  return res;
}

ReconResult reconstruct_matched_filter(const SensingMatrix& h_inv,
                                       const Measurement& g) {
  return reconstruct_matched_filter(h_inv.entries, g.g);
}

ReconResult reconstruct_least_squares(const CMatrix& h, const CVector& g) {
  if (h.rows() != g.size())
    throw std::invalid_argument("reconstruct_least_squares: dim mismatch");
  ReconResult res;
  res.method = ReconMethod::LeastSquaresOracle;
  Eigen::BDCSVD<CMatrix> svd(h, Eigen::ComputeThinU | Eigen::ComputeThinV);
  res.sigma = svd.solve(g);
  res.iterations = 1;
  res.converged = true;
  res.residual_history.push_back((g - h * res.sigma).norm() /
                                 std::max(g.norm(), 1e-300));
  return res;
}

std::vector<Peak> top_peaks(const CVector& sigma, const PlaneGrid& grid,
                            int k) {
  const int nx = grid.nx(), ny = grid.ny();
  if (sigma.size() != static_cast<Eigen::Index>(grid.points.size()))
    throw std::invalid_argument("top_peaks: sigma does not match the grid");
  std::vector<Peak> peaks;
  for (int iy = 0; iy < ny; ++iy) {
    for (int ix = 0; ix < nx; ++ix) {
      const double v = std::abs(sigma[grid.index(iy, ix)]);
      bool is_max = v > 0.0;
      for (int dy = -1; dy <= 1 && is_max; ++dy) {
        for (int dx = -1; dx <= 1; ++dx) {
          if (dx == 0 && dy == 0) continue;
          const int jy = iy + dy, jx = ix + dx;
          if (jy < 0 || jy >= ny || jx < 0 || jx >= nx) continue;
          const double w = std::abs(sigma[grid.index(jy, jx)]);
          // strict dominance, with ties broken toward the first index
          if (w > v || (w == v && grid.index(jy, jx) < grid.index(iy, ix))) {
            is_max = false;
            break;
          }
        }
      }
      if (is_max)
        peaks.push_back({iy, ix, v, grid.points[grid.index(iy, ix)]});
    }
  }
  std::sort(peaks.begin(), peaks.end(),
            [](const Peak& a, const Peak& b) { return a.value > b.value; });
  if (static_cast<int>(peaks.size()) > k) peaks.resize(k);
  return peaks;
}

RVector rasterize_truth(const TargetMap& truth, const PlaneGrid& grid) {
  RVector img = RVector::Zero(static_cast<Eigen::Index>(grid.points.size()));
  for (const Scatterer& s : truth.scatterers) {
    Eigen::Index best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < grid.points.size(); ++j) {
      const double d = (grid.points[j] - s.position).norm();
      if (d < best_d) {
        best_d = d;
        best = static_cast<Eigen::Index>(j);
      }
    }
    img[best] += std::abs(s.reflectivity);
  }
  return img;
}

ImageMetrics compute_metrics(const CVector& sigma, const TargetMap& truth,
                             const PlaneGrid& grid) {
  if (sigma.size() != static_cast<Eigen::Index>(grid.points.size()))
    throw std::invalid_argument("compute_metrics: sigma does not match grid");
  ImageMetrics m;
  const RVector est = sigma.cwiseAbs();
  const RVector tru = rasterize_truth(truth, grid);
  const double ne = est.norm(), nt = tru.norm();
  m.normalized_correlation = (ne > 0 && nt > 0) ? est.dot(tru) / (ne * nt) : 0.0;

  const int k = static_cast<int>(truth.scatterers.size());
  const double tol_x = grid.pitch_x() * 1.0001 + 1e-12;
  const double tol_y = grid.pitch_y() * 1.0001 + 1e-12;
  const auto peaks = top_peaks(sigma, grid, k);
  std::vector<bool> hit(truth.scatterers.size(), false);
  double err_sum = 0.0;
  int matched = 0;
  for (const Peak& p : peaks) {
    int best = -1;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t t = 0; t < truth.scatterers.size(); ++t) {
      const double d = (truth.scatterers[t].position - p.position).norm();
      if (d < best_d) {
        best_d = d;
        best = static_cast<int>(t);
      }
    }
    if (best >= 0) {
      const Vec3 d = truth.scatterers[static_cast<std::size_t>(best)].position -
                     p.position;
      if (std::abs(d.x()) <= tol_x && std::abs(d.y()) <= tol_y) {
        hit[static_cast<std::size_t>(best)] = true;
        err_sum += best_d;
        ++matched;
      }
    }
  }
  const bool all_hit = std::all_of(hit.begin(), hit.end(), [](bool b) { return b; });
  m.peaks_matched = (matched == k && all_hit) ? k : std::min<int>(
      matched, static_cast<int>(std::count(hit.begin(), hit.end(), true)));
  m.peak_localization_error = matched > 0 ? err_sum / matched : 0.0;

  // Energy beyond one grid cell of every true scatterer.
  double background = 0.0, total = 0.0;
  for (std::size_t j = 0; j < grid.points.size(); ++j) {
    const double e = est[static_cast<Eigen::Index>(j)] *
                     est[static_cast<Eigen::Index>(j)];
    total += e;
    bool near = false;
    for (const Scatterer& s : truth.scatterers) {
      const Vec3 d = s.position - grid.points[j];
      if (std::abs(d.x()) <= tol_x && std::abs(d.y()) <= tol_y) {
        near = true;
        break;
      }
    }
    if (!near) background += e;
  }
  m.background_energy_ratio = total > 0 ? background / total : 0.0;
  return m;
}

}  // namespace riscim
