#pragma once

#include <string>
#include <vector>

#include "riscim/sensing.hpp"

namespace riscim {

enum class ReconMethod { Cgnr, Cgs, MatchedFilter, LeastSquaresOracle };

const char* recon_method_name(ReconMethod m);
ReconMethod recon_method_from_name(const std::string& name);

struct SolverOptions {
  ReconMethod method = ReconMethod::Cgnr;
  double tol = 1e-6;   // relative residual of the normal equations
  int max_iter = 200;
  double tikhonov = 0.0;  // optional damping weight added to H^H H
};

struct ReconResult {
  CVector sigma;                         // estimated reflectivity, length N
  int iterations = 0;
  std::vector<double> residual_history;  // ||H^H(g - H x_k)|| / ||H^H g||
  ReconMethod method = ReconMethod::Cgnr;
  bool converged = false;
};

/// Iterative solution of the normal equations H^H H sigma = H^H g.
///
/// Cgnr runs the conjugate-residual (minimal-residual) update, which makes
/// the recorded normal-equation residual non-increasing by construction;
/// Cgs runs the literal transpose-free CGS recurrence on the same
/// operator. Stops at tol on the relative normal residual or at max_iter,
/// whichever comes first; non-convergence is reported via `converged`.
ReconResult reconstruct_iterative(const CMatrix& h, const CVector& g,
                                  const SolverOptions& options);

/// Spec-named entry point: CG-family solve with default method (Cgnr).
ReconResult reconstruct_cgs(const SensingMatrix& h_inv, const Measurement& g,
                            double tol = 1e-6, int max_iter = 200);

/// sigma_j = h_j^H g / ||h_j||^2 (zero columns give zero).
ReconResult reconstruct_matched_filter(const CMatrix& h, const CVector& g);
ReconResult reconstruct_matched_filter(const SensingMatrix& h_inv,
                                       const Measurement& g);

/// Dense minimum-norm least squares via SVD; diagnostics/debug path.
ReconResult reconstruct_least_squares(const CMatrix& h, const CVector& g);

struct Peak {
  int iy = 0;
  int ix = 0;
  double value = 0.0;
  Vec3 position{0, 0, 0};
};

/// Largest k local maxima (8-neighborhood) of |sigma| on the grid,
/// strongest first.
std::vector<Peak> top_peaks(const CVector& sigma, const PlaneGrid& grid, int k);

struct ImageMetrics {
  double normalized_correlation = 0.0;    // cosine of |sigma| vs raster truth
  double peak_localization_error = 0.0;   // mean matched-peak distance, m
  double background_energy_ratio = 0.0;   // energy beyond 1 cell of targets
  int peaks_matched = 0;                  // top-k peaks within one cell, k = #scatterers
};

/// |reflectivity| accumulated onto nearest grid nodes.
RVector rasterize_truth(const TargetMap& truth, const PlaneGrid& grid);

ImageMetrics compute_metrics(const CVector& sigma, const TargetMap& truth,
                             const PlaneGrid& grid);

}  // namespace riscim
