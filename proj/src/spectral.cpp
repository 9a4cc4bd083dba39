#include "qkh/spectral.hpp"

#include <fftw3.h>

#include <mutex>
#include <stdexcept>

namespace qkh {

namespace {
// FFTW plan creation/destruction is not thread-safe; executions are.
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}
}  // namespace

SpectralWorkspace::SpectralWorkspace(int n_points, int n_columns)
    : n_points_(n_points), n_columns_(n_columns), plan_forward_(nullptr), plan_backward_(nullptr) {
    std::lock_guard<std::mutex> lock(planner_mutex());
    // Plan on a scratch buffer; FFTW_ESTIMATE keeps planning deterministic and
    // allows executing on other aligned arrays via the new-array interface.
    fftw_complex* scratch = fftw_alloc_complex(std::size_t(n_points_) * n_columns_);
    const int n[] = {n_points_};
    plan_forward_ =
        fftw_plan_many_dft(1, n, n_columns_, scratch, nullptr, 1, n_points_, scratch, nullptr, 1,
                           n_points_, FFTW_FORWARD, FFTW_ESTIMATE);
    plan_backward_ =
        fftw_plan_many_dft(1, n, n_columns_, scratch, nullptr, 1, n_points_, scratch, nullptr, 1,
                           n_points_, FFTW_BACKWARD, FFTW_ESTIMATE);
    fftw_free(scratch);
    if (!plan_forward_ || !plan_backward_) throw std::runtime_error("SpectralWorkspace: FFTW planning failed");
}

SpectralWorkspace::~SpectralWorkspace() {
    std::lock_guard<std::mutex> lock(planner_mutex());
    if (plan_forward_) fftw_destroy_plan(static_cast<fftw_plan>(plan_forward_));
    if (plan_backward_) fftw_destroy_plan(static_cast<fftw_plan>(plan_backward_));
}

void SpectralWorkspace::to_momentum(Eigen::MatrixXcd& amplitudes) const {
    auto* data = reinterpret_cast<fftw_complex*>(amplitudes.data());
    fftw_execute_dft(static_cast<fftw_plan>(plan_forward_), data, data);
}

void SpectralWorkspace::to_position(Eigen::MatrixXcd& amplitudes) const {
    auto* data = reinterpret_cast<fftw_complex*>(amplitudes.data());
    fftw_execute_dft(static_cast<fftw_plan>(plan_backward_), data, data);
    amplitudes *= 1.0 / double(n_points_);
}

}  // namespace qkh
