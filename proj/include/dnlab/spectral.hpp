#pragma once

#include <optional>
#include <vector>

#include "dnlab/fourier.hpp"

namespace dnlab {

struct SpectralData {
  std::optional<double> mu;  // unique iH eigenvalue in the band, if any
  BoundaryFunction eta;      // Lambda-normalized eigenfunction (valid iff mu)
  std::vector<double> eigenvalues;    // all iH eigenvalues, ascending
  std::vector<double> cluster_gaps;   // distance of +-mu to the nearest cluster eigenvalue
  double pair_defect = 0.0;           // |mu_+ + mu_-| for the matched negative eigenvalue
};

// Solves diag(k) x = lambda * Lambda x on the mean-zero Fourier modes (the
// eigenproblem of iH) and looks for a unique eigenvalue inside (band_lo,
// band_hi). Candidates must be separated from the smeared clusters at +-1:
// the distance to the nearest other eigenvalue must exceed max(10 * median
// consecutive gap of the whole spectrum, 1e-6). Cluster members sit at the
// typical spacing and fail this; a genuine discrete eigenvalue is a spacing
// outlier. MultipleCandidates if more than one survives.
SpectralData extract_mu(const BoundaryOperator& dn, double band_lo = 0.01,
                        double band_hi = 0.999);

// dn_disk(N) with the modes {+1,-1} replaced by the coupled block
// [[a,b],[b,a]], a^2 - b^2 = 1/mu^2, so that iH has eigenvalues +-mu there.
BoundaryOperator make_synthetic_dn(double mu, int N = 32);

// Rank proxy of H^2 + I on mean-zero space: sum of singular values beyond the
// largest two, normalized by the largest. Near zero when Ran(H^2+I) is
// spanned by {eta, conj eta}.
double smoothing_defect(const BoundaryOperator& dn);

}  // namespace dnlab
