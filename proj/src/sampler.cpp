#include "riemfpp/sampler.hpp"

#include <fftw3.h>

#include <cmath>
#include <complex>
#include <limits>
#include <cstring>
#include <mutex>
#include <sstream>
#include <vector>

#include "riemfpp/rng.hpp"

namespace riemfpp {

namespace {

std::mutex& fftw_plan_mutex() {
    static std::mutex m;
    return m;
}

int64_t next_pow2(int64_t n) {
    int64_t p = 1;
    while (p < n) p <<= 1;
    return p;
}

}  // namespace

struct CirculantSampler::Impl {
    int rank = 2;
    int dims[3] = {1, 1, 1};  // slowest-varying first, as FFTW expects
    int64_t total = 0;
    std::vector<double> sqrt_eig;  // sqrt(eig / total), clipped
    fftw_plan plan = nullptr;      // forward c2c plan for new-array execution
    fftw_complex* proto_in = nullptr;
    fftw_complex* proto_out = nullptr;

    ~Impl() {
        std::lock_guard<std::mutex> lock(fftw_plan_mutex());
        if (plan) fftw_destroy_plan(plan);
        if (proto_in) fftw_free(proto_in);
        if (proto_out) fftw_free(proto_out);
    }
};

CirculantSampler::CirculantSampler(const GridSpec& grid, const CovarianceModel& model)
    : impl_(new Impl), grid_(grid), model_(model) {
    model.validate(grid.dimension);
    const int d = grid.dimension;
    for (int i = 0; i < d; ++i) {
        if (!(grid.extent[i] > 2.0 * model.range)) {
            std::ostringstream os;
            os << "sample_field: grid extent along axis " << i << " (" << grid.extent[i]
               << ") must exceed twice the covariance range (" << 2.0 * model.range << ")";
            throw std::invalid_argument(os.str());
        }
    }

    const double h = grid.spacing;
    const int64_t pad = int64_t(std::ceil(model.range / h));
    impl_->rank = d;
    int64_t M[3] = {1, 1, 1};
    for (int i = 0; i < d; ++i) {
        M[i] = next_pow2(grid.nodes_along(i) + 2 * pad);
        diag_.embedding[i] = M[i];
    }
    for (int i = 0; i < d; ++i) impl_->dims[i] = int(M[d - 1 - i]);  // row-major for FFTW
    int64_t total = 1;
    for (int i = 0; i < d; ++i) total *= M[i];
    impl_->total = total;

    // covariance of the periodized lag
    std::vector<double> cov(static_cast<size_t>(total));
    {
        int64_t nx = M[0], ny = M[1], nz = d == 3 ? M[2] : 1;
        for (int64_t kz = 0; kz < nz; ++kz) {
            double dz = d == 3 ? double(std::min(kz, M[2] - kz)) * h : 0.0;
            for (int64_t ky = 0; ky < ny; ++ky) {
                double dy = double(std::min(ky, M[1] - ky)) * h;
                for (int64_t kx = 0; kx < nx; ++kx) {
                    double dx = double(std::min(kx, M[0] - kx)) * h;
                    cov[size_t((kz * ny + ky) * nx + kx)] =
                        model_(std::sqrt(dx * dx + dy * dy + dz * dz));
                }
            }
        }
    }

    fftw_complex* in;
    fftw_complex* out;
    {
        std::lock_guard<std::mutex> lock(fftw_plan_mutex());
        in = fftw_alloc_complex(size_t(total));
        out = fftw_alloc_complex(size_t(total));
        impl_->plan = fftw_plan_dft(impl_->rank, impl_->dims, in, out, FFTW_FORWARD, FFTW_ESTIMATE);
        impl_->proto_in = in;
        impl_->proto_out = out;
    }
    for (int64_t k = 0; k < total; ++k) {
        in[k][0] = cov[size_t(k)];
        in[k][1] = 0.0;
    }
    fftw_execute(impl_->plan);

    double eig_max = -std::numeric_limits<double>::infinity();
    double eig_min = std::numeric_limits<double>::infinity();
    for (int64_t k = 0; k < total; ++k) {
        eig_max = std::max(eig_max, out[k][0]);
        eig_min = std::min(eig_min, out[k][0]);
    }
    diag_.min_eigenvalue_ratio = eig_max > 0 ? eig_min / eig_max : 0.0;
    if (eig_min < -kClipTolerance * eig_max) {
        std::ostringstream os;
        os << "circulant embedding failed: min eigenvalue " << eig_min << " below -"
           << kClipTolerance << " * max (" << eig_max << ")";
        throw EmbeddingError(os.str());
    }
    int64_t clipped = 0;
    impl_->sqrt_eig.resize(size_t(total));
    for (int64_t k = 0; k < total; ++k) {
        double e = out[k][0];
        if (e < 0) {
            e = 0;
            ++clipped;
        }
        impl_->sqrt_eig[size_t(k)] = std::sqrt(e / double(total));
    }
    diag_.clipped_fraction = double(clipped) / double(total);
}

CirculantSampler::~CirculantSampler() = default;

ScalarField CirculantSampler::sample(uint64_t seed) const {
    const int d = grid_.dimension;
    const int64_t total = impl_->total;
    fftw_complex* in;
    fftw_complex* out;
    {
        std::lock_guard<std::mutex> lock(fftw_plan_mutex());
        in = fftw_alloc_complex(size_t(total));
        out = fftw_alloc_complex(size_t(total));
    }

    Xoshiro256 rng(seed);
    const double* s = impl_->sqrt_eig.data();
    for (int64_t k = 0; k < total; ++k) {
        in[k][0] = s[k] * rng.normal();
        in[k][1] = s[k] * rng.normal();
    }
    fftw_execute_dft(impl_->plan, in, out);

    int64_t nx = grid_.nodes_along(0), ny = grid_.nodes_along(1);
    int64_t nz = d == 3 ? grid_.nodes_along(2) : 1;
    int64_t Mx = diag_.embedding[0], My = diag_.embedding[1];
    std::vector<double> values(size_t(nx * ny * nz));
    for (int64_t k = 0; k < nz; ++k)
        for (int64_t j = 0; j < ny; ++j)
            for (int64_t i = 0; i < nx; ++i)
                values[size_t((k * ny + j) * nx + i)] = out[(k * My + j) * Mx + i][0];

    {
        std::lock_guard<std::mutex> lock(fftw_plan_mutex());
        fftw_free(in);
        fftw_free(out);
    }

    ScalarField field(grid_, std::move(values));
    field.seed = seed;
    field.covariance = model_;
    field.diagnostics = diag_;
    return field;
}

ScalarField sample_field(const GridSpec& grid, const CovarianceModel& model, uint64_t seed) {
    CirculantSampler sampler(grid, model);
    return sampler.sample(seed);
}

}  // namespace riemfpp
