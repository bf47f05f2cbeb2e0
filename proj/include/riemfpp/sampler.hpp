#pragma once

#include <memory>

#include "riemfpp/scalar_field.hpp"

namespace riemfpp {

/// Exact stationary Gaussian sampling on a regular grid by circulant
/// embedding. The embedding extends the grid by at least 2*(range/spacing)
/// nodes per axis (rounded up to a power of two); eigenvalues of the
/// embedded covariance below -1e-8 * max trigger EmbeddingError, tiny
/// negatives above that threshold are clipped to zero and recorded.
///
/// One sampler may be shared by many threads: sample() uses only
/// thread-local buffers plus FFTW new-array execution.
class CirculantSampler {
  public:
    CirculantSampler(const GridSpec& grid, const CovarianceModel& model);
    ~CirculantSampler();

    CirculantSampler(const CirculantSampler&) = delete;
    CirculantSampler& operator=(const CirculantSampler&) = delete;

    ScalarField sample(uint64_t seed) const;
    const SampleDiagnostics& diagnostics() const { return diag_; }

    static constexpr double kClipTolerance = 1e-8;

  private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
    GridSpec grid_;
    CovarianceModel model_;
    SampleDiagnostics diag_;
};

/// One-shot convenience wrapper; deterministic in (grid, model, seed).
ScalarField sample_field(const GridSpec& grid, const CovarianceModel& model, uint64_t seed);

}  // namespace riemfpp
